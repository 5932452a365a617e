use std::fmt;
use std::sync::{Arc, OnceLock};

use super::residue::{self, Coeffs};
use super::PadicError;

/// An unramified extension `Q_{p^m}` of `Q_p` truncated at relative precision `N`.
///
/// Elements are polynomials in `x` modulo a monic integer polynomial that is
/// irreducible mod `p`. The Frobenius `σ` sends `x` to the Hensel lift of the
/// root of the modulus congruent to `x^p`; its powers are stored as `m × m`
/// matrices over `Z/p^N`.
pub struct FieldDescriptor {
    p: u64,
    degree: usize,
    precision: u32,
    p_to_precision: u64,
    modulus: Vec<u64>,
    frobenius_image: Vec<u64>,
    // frob_powers[j] is the matrix of σ^j, row-major
    frob_powers: Vec<Vec<u64>>,
    prime_subfield: OnceLock<Arc<FieldDescriptor>>,
}

/// Largest `N` with `p^N < 2^63`.
pub fn max_precision(p: u64) -> u32 {
    let mut n = 0;
    let mut acc: u64 = 1;
    while let Some(next) = acc.checked_mul(p) {
        if next >= 1 << 63 {
            break;
        }
        acc = next;
        n += 1;
    }
    n
}

/// Builds `Q_{p^m}` at precision `N` with the lexicographically lowest
/// irreducible modulus.
pub fn make_field(p: u64, m: usize, precision: u32) -> Result<Arc<FieldDescriptor>, PadicError> {
    if !residue::is_prime(p) {
        return Err(PadicError::NotPrime(p));
    }
    if m == 0 {
        return Err(PadicError::ZeroDegree);
    }
    check_precision(p, precision)?;
    let modulus = lowest_irreducible(p, m).ok_or(PadicError::NoIrreducible { p, m })?;
    FieldDescriptor::build(p, modulus, precision)
}

fn check_precision(p: u64, precision: u32) -> Result<(), PadicError> {
    if precision < 1 {
        return Err(PadicError::PrecisionTooSmall);
    }
    let max = max_precision(p);
    if precision > max {
        return Err(PadicError::PrecisionTooLarge { precision, max });
    }
    Ok(())
}

/// Monic degree-`m` polynomials ordered by `(c_{m-1}, ..., c_0)` read as a base-`p` number.
fn lowest_irreducible(p: u64, m: usize) -> Option<Vec<u64>> {
    if m == 1 {
        return Some(vec![0, 1]);
    }
    let total = p.checked_pow(m as u32)?;
    (0..total).find_map(|code| {
        let mut coeffs = vec![0u64; m + 1];
        coeffs[m] = 1;
        let mut c = code;
        for i in 0..m {
            coeffs[i] = c % p;
            c /= p;
        }
        residue::fp_is_irreducible(&coeffs, p).then_some(coeffs)
    })
}

impl FieldDescriptor {
    /// Builds a descriptor from an explicit monic modulus (little-endian, leading 1).
    pub fn with_modulus(
        p: u64,
        modulus: Vec<u64>,
        precision: u32,
    ) -> Result<Arc<FieldDescriptor>, PadicError> {
        if !residue::is_prime(p) {
            return Err(PadicError::NotPrime(p));
        }
        check_precision(p, precision)?;
        if modulus.len() < 2 || *modulus.last().unwrap() != 1 {
            return Err(PadicError::ModulusNotIrreducible);
        }
        if !residue::fp_is_irreducible(&modulus, p) {
            return Err(PadicError::ModulusNotIrreducible);
        }
        Self::build(p, modulus, precision)
    }

    fn build(p: u64, modulus: Vec<u64>, precision: u32) -> Result<Arc<FieldDescriptor>, PadicError> {
        let m = modulus.len() - 1;
        let q = residue::pow_u64(p, precision);
        let modulus_q: Vec<u64> = modulus.iter().map(|&c| c % q).collect();
        let frobenius_image = hensel_frobenius_root(p, &modulus_q, precision)?;

        // columns of σ are the powers s^k of the Frobenius image
        let mut sigma = vec![0u64; m * m];
        let mut power: Coeffs = std::iter::once(1 % q).chain(std::iter::repeat_n(0, m - 1)).collect();
        for k in 0..m {
            for i in 0..m {
                sigma[i * m + k] = power[i];
            }
            power = residue::poly_mulmod(&power, &frobenius_image, &modulus_q, q);
        }
        let mut frob_powers = Vec::with_capacity(m);
        let mut acc = identity(m, q);
        for _ in 0..m {
            frob_powers.push(acc.clone());
            acc = mat_mul(&sigma, &acc, m, q);
        }
        if acc != identity(m, q) {
            return Err(PadicError::Internal("σ^m is not the identity".into()));
        }
        Ok(Arc::new(FieldDescriptor {
            p,
            degree: m,
            precision,
            p_to_precision: q,
            modulus: modulus_q,
            frobenius_image: frobenius_image.to_vec(),
            frob_powers,
            prime_subfield: OnceLock::new(),
        }))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Degree `m` over `Q_p`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Maximal relative precision `N`.
    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn frobenius_image(&self) -> &[u64] {
        &self.frobenius_image
    }

    pub(crate) fn p_to(&self, k: u32) -> u64 {
        debug_assert!(k <= self.precision);
        residue::pow_u64(self.p, k)
    }

    pub(crate) fn p_to_precision(&self) -> u64 {
        self.p_to_precision
    }

    /// Applies `σ^j` (any integer `j`) to a coefficient vector reduced mod `q`.
    pub(crate) fn apply_frobenius(&self, j: i64, coeffs: &[u64], q: u64) -> Coeffs {
        let m = self.degree;
        let mat = &self.frob_powers[j.rem_euclid(m as i64) as usize];
        (0..m)
            .map(|i| {
                let mut acc = 0u64;
                for k in 0..m {
                    if coeffs[k] != 0 {
                        let entry = mat[i * m + k] % q;
                        acc = residue::add_mod(acc, residue::mul_mod(entry, coeffs[k], q), q);
                    }
                }
                acc
            })
            .collect()
    }

    /// `Q_p` at the same prime and precision.
    pub fn prime_subfield(self: &Arc<Self>) -> Arc<FieldDescriptor> {
        if self.degree == 1 {
            return Arc::clone(self);
        }
        Arc::clone(self.prime_subfield.get_or_init(|| {
            make_field(self.p, 1, self.precision).expect("prime field at a valid precision")
        }))
    }

    /// Same field at a different precision.
    pub fn with_precision(&self, precision: u32) -> Result<Arc<FieldDescriptor>, PadicError> {
        check_precision(self.p, precision)?;
        Self::build(self.p, self.modulus.clone(), precision)
    }

    pub fn same_as(&self, other: &FieldDescriptor) -> bool {
        std::ptr::eq(self, other)
            || (self.p == other.p && self.precision == other.precision && self.modulus == other.modulus)
    }
}

impl fmt::Debug for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldDescriptor")
            .field("p", &self.p)
            .field("m", &self.degree)
            .field("precision", &self.precision)
            .field("modulus", &self.modulus)
            .finish()
    }
}

fn identity(m: usize, q: u64) -> Vec<u64> {
    let mut out = vec![0; m * m];
    for i in 0..m {
        out[i * m + i] = 1 % q;
    }
    out
}

fn mat_mul(a: &[u64], b: &[u64], m: usize, q: u64) -> Vec<u64> {
    let mut out = vec![0; m * m];
    for i in 0..m {
        for k in 0..m {
            let aik = a[i * m + k];
            if aik == 0 {
                continue;
            }
            for j in 0..m {
                out[i * m + j] =
                    residue::add_mod(out[i * m + j], residue::mul_mod(aik, b[k * m + j], q), q);
            }
        }
    }
    out
}

/// Newton iteration for the root of the modulus lifting `x^p mod p`.
fn hensel_frobenius_root(p: u64, modulus: &[u64], precision: u32) -> Result<Coeffs, PadicError> {
    let m = modulus.len() - 1;
    let q = residue::pow_u64(p, precision);
    let derivative: Vec<u64> = (1..=m)
        .map(|i| residue::mul_mod(modulus[i], i as u64 % q, q))
        .collect();
    let eval = |poly: &[u64], s: &[u64]| -> Coeffs {
        let mut acc: Coeffs = Coeffs::from_elem(0, m);
        for &c in poly.iter().rev() {
            acc = residue::poly_mulmod(&acc, s, modulus, q);
            acc[0] = residue::add_mod(acc[0], c % q, q);
        }
        acc
    };
    let mut s: Coeffs = residue::fp_x_to_p(modulus, p).into_iter().collect();
    for _ in 0..64 {
        let value = eval(modulus, &s);
        if value.iter().all(|&c| c == 0) {
            return Ok(s);
        }
        let slope = eval(&derivative, &s);
        let inv = residue::unit_inverse(&slope, modulus, p, precision)
            .ok_or_else(|| PadicError::Internal("modulus is not separable mod p".into()))?;
        let step = residue::poly_mulmod(&value, &inv, modulus, q);
        for i in 0..m {
            s[i] = residue::sub_mod(s[i], step[i], q);
        }
    }
    Err(PadicError::Internal("Hensel iteration did not converge".into()))
}

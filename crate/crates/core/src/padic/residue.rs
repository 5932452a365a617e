//! Word-sized modular arithmetic on residues modulo `p^r` and polynomial
//! helpers over `Z/p^r` and `F_p`.

use smallvec::SmallVec;

pub(crate) type Coeffs = SmallVec<[u64; 8]>;

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

#[inline]
pub(crate) fn add_mod(a: u64, b: u64, q: u64) -> u64 {
    let s = a + b;
    if s >= q {
        s - q
    } else {
        s
    }
}

#[inline]
pub(crate) fn sub_mod(a: u64, b: u64, q: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + q - b
    }
}

#[inline]
pub(crate) fn neg_mod(a: u64, q: u64) -> u64 {
    if a == 0 {
        0
    } else {
        q - a
    }
}

/// `p^k`, assuming the result fits (callers bound `k` by the field precision).
pub(crate) fn pow_u64(p: u64, k: u32) -> u64 {
    p.pow(k)
}

/// Inverse of `a` modulo `q`, if `gcd(a, q) = 1`.
pub(crate) fn inv_mod(a: u64, q: u64) -> Option<u64> {
    let (mut r0, mut r1) = (q as i128, (a % q) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let k = r0 / r1;
        (r0, r1) = (r1, r0 - k * r1);
        (t0, t1) = (t1, t0 - k * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(q as i128) as u64)
}

/// Exponent of the largest power of `p` dividing `a` (capped at `cap` for `a = 0`).
pub(crate) fn val_u64(mut a: u64, p: u64, cap: u32) -> u32 {
    if a == 0 {
        return cap;
    }
    let mut v = 0;
    while a.is_multiple_of(p) && v < cap {
        a /= p;
        v += 1;
    }
    v
}

/// Product of two reduced polynomials modulo the monic `modulus` and `q`.
pub(crate) fn poly_mulmod(a: &[u64], b: &[u64], modulus: &[u64], q: u64) -> Coeffs {
    let m = modulus.len() - 1;
    let mut prod: SmallVec<[u64; 16]> = SmallVec::from_elem(0, 2 * m - 1);
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            if bj != 0 {
                prod[i + j] = add_mod(prod[i + j], mul_mod(ai, bj, q), q);
            }
        }
    }
    for k in (m..2 * m - 1).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        for i in 0..m {
            let t = mul_mod(c, modulus[i] % q, q);
            prod[k - m + i] = sub_mod(prod[k - m + i], t, q);
        }
    }
    prod.truncate(m);
    prod.into_iter().collect()
}

/// Inverse of a unit of `(Z/p^r)[x]/(modulus)` by lifting the residue-field inverse.
pub(crate) fn unit_inverse(a: &[u64], modulus: &[u64], p: u64, r: u32) -> Option<Coeffs> {
    let m = modulus.len() - 1;
    let q = pow_u64(p, r);
    let a_mod_p: Vec<u64> = a.iter().map(|&c| c % p).collect();
    let f_mod_p: Vec<u64> = modulus.iter().map(|&c| c % p).collect();
    let inv0 = fp_inverse_mod(&a_mod_p, &f_mod_p, p)?;
    let mut u: Coeffs = (0..m).map(|i| inv0.get(i).copied().unwrap_or(0)).collect();
    let mut prec = 1u32;
    while prec < r {
        // u <- u (2 - a u)
        let au = poly_mulmod(a, &u, modulus, q);
        let mut two_minus: Coeffs = au.iter().map(|&c| neg_mod(c, q)).collect();
        two_minus[0] = add_mod(two_minus[0], 2 % q, q);
        u = poly_mulmod(&u, &two_minus, modulus, q);
        prec *= 2;
    }
    Some(u.into_iter().map(|c| c % q).collect())
}

// ---------------------------------------------------------------------------
// Polynomials over F_p, little-endian, trimmed.

pub(crate) fn fp_trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn fp_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            sub_mod(
                a.get(i).copied().unwrap_or(0),
                b.get(i).copied().unwrap_or(0),
                p,
            )
        })
        .collect();
    fp_trim(out)
}

fn fp_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = add_mod(out[i + j], mul_mod(x, y, p), p);
        }
    }
    fp_trim(out)
}

/// Quotient and remainder of `a` by nonzero `b` over `F_p`.
fn fp_divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let b = fp_trim(b.to_vec());
    let mut r = fp_trim(a.to_vec());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lead_inv = inv_mod(*b.last().unwrap(), p).expect("nonzero leading coefficient");
    let mut quo = vec![0; r.len() - b.len() + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let c = mul_mod(*r.last().unwrap(), lead_inv, p);
        quo[shift] = c;
        for (i, &bi) in b.iter().enumerate() {
            r[shift + i] = sub_mod(r[shift + i], mul_mod(c, bi, p), p);
        }
        r = fp_trim(r);
    }
    (fp_trim(quo), r)
}

fn fp_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    fp_divrem(a, b, p).1
}

fn fp_mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    fp_rem(&fp_mul(a, b, p), f, p)
}

fn fp_powmod(a: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
    let mut base = fp_rem(a, f, p);
    let mut acc = vec![1];
    while e > 0 {
        if e & 1 == 1 {
            acc = fp_mulmod(&acc, &base, f, p);
        }
        base = fp_mulmod(&base, &base, f, p);
        e >>= 1;
    }
    acc
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut x, mut y) = (fp_trim(a.to_vec()), fp_trim(b.to_vec()));
    while !y.is_empty() {
        let r = fp_rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

/// Inverse of `a` in `F_p[x]/(f)`; `None` when `a` is not invertible.
pub(crate) fn fp_inverse_mod(a: &[u64], f: &[u64], p: u64) -> Option<Vec<u64>> {
    let (mut r0, mut r1) = (fp_trim(f.to_vec()), fp_rem(a, f, p));
    let (mut t0, mut t1): (Vec<u64>, Vec<u64>) = (Vec::new(), vec![1]);
    while !r1.is_empty() {
        let (q, r) = fp_divrem(&r0, &r1, p);
        let t = fp_sub(&t0, &fp_mul(&q, &t1, p), p);
        (r0, r1) = (r1, r);
        (t0, t1) = (t1, t);
    }
    if r0.len() != 1 {
        return None;
    }
    let c = inv_mod(r0[0], p)?;
    Some(fp_rem(&t0.iter().map(|&x| mul_mod(x, c, p)).collect::<Vec<_>>(), f, p))
}

/// Irreducibility of a monic `f` of degree `m` over `F_p`: no factor of degree `<= m/2`.
pub(crate) fn fp_is_irreducible(f: &[u64], p: u64) -> bool {
    let f = fp_trim(f.iter().map(|&c| c % p).collect());
    let m = f.len().saturating_sub(1);
    if m == 0 {
        return false;
    }
    let x = vec![0, 1];
    let mut h = fp_rem(&x, &f, p);
    for _ in 1..=m / 2 {
        h = fp_powmod(&h, p, &f, p);
        let g = fp_gcd(&fp_sub(&h, &x, p), &f, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

/// `x^p mod (f, p)` as a length-`m` coefficient vector.
pub(crate) fn fp_x_to_p(f: &[u64], p: u64) -> Vec<u64> {
    let m = f.len() - 1;
    let r = fp_powmod(&[0, 1], p, &f.iter().map(|&c| c % p).collect::<Vec<_>>(), p);
    (0..m).map(|i| r.get(i).copied().unwrap_or(0)).collect()
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_mod_prime_power() {
        assert_eq!(inv_mod(3, 16), Some(11));
        assert_eq!(inv_mod(2, 16), None);
    }

    #[test]
    fn irreducibility_small_cases() {
        assert!(fp_is_irreducible(&[1, 1, 1], 2));
        assert!(!fp_is_irreducible(&[1, 0, 1], 2));
        assert!(fp_is_irreducible(&[1, 1, 0, 1], 2));
        assert!(!fp_is_irreducible(&[1, 0, 0, 0, 1], 2));
        assert!(fp_is_irreducible(&[1, 0, 1], 3));
    }

    #[test]
    fn unit_inverse_lifts() {
        let f = [1u64, 1, 1];
        let a = [3u64, 5];
        let q = 1u64 << 20;
        let inv = unit_inverse(&a, &f, 2, 20).unwrap();
        let one = poly_mulmod(&a, &inv, &f, q);
        assert_eq!(one.as_slice(), &[1, 0]);
    }
}

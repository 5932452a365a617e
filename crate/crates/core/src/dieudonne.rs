//! The basepoint Dieudonné modules: `D(H) = O_D ⊗_{O_{F_n}} O_L` with basis
//! `Π^j ⊗ 1`, the special module `D(G) = O_D ⊗_{O_F} O_L` with basis
//! `e_{a,b} = ι(Π^b)(e_a)`, the action `ι` of `O_D = W(F_{p^n})[Π]`, and
//! the isogeny `Δ = Id ⊕ Π ⊕ … ⊕ Π^{n−1}`.
//!
//! `V` is σ⁻¹-semilinear, `V(v) = M·σ⁻¹(v)`. The Frobenius `F = p·V⁻¹` has
//! matrix `p·M⁻¹`; slope reports use the dual Frobenius `p·ᵗF⁻¹ = ᵗM`,
//! whose slopes are `1/n`.

use std::sync::Arc;

use num_rational::Rational64;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::padic::{FieldDescriptor, MatrixJson, PadicElement, PadicError, PadicMatrix};
use crate::semilinear::{FixedSpace, Isocrystal, SemilinearError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DieudonneError {
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error(transparent)]
    Semilinear(#[from] SemilinearError),
    #[error("height n must be at least 1")]
    ZeroHeight,
    #[error("coefficient {0} does not lie in W(F_(p^n)) inside the working field")]
    NotInSubfield(usize),
    #[error("expected {expected} coefficients, got {found}")]
    CoefficientCount { expected: usize, found: usize },
    #[error("the element is zero, so it acts non-invertibly")]
    ZeroElement,
}

/// `Σ a_i Π^i` with `a_i ∈ W(F_{p^n})[1/p]` (elements of the working field fixed by `σ^n`).
#[derive(Clone, Debug)]
pub struct DElement {
    n: usize,
    coeffs: Vec<PadicElement>,
}

impl DElement {
    pub fn new(n: usize, coeffs: Vec<PadicElement>) -> Result<Self, DieudonneError> {
        if n == 0 {
            return Err(DieudonneError::ZeroHeight);
        }
        if coeffs.len() != n {
            return Err(DieudonneError::CoefficientCount { expected: n, found: coeffs.len() });
        }
        for (i, a) in coeffs.iter().enumerate() {
            if !a.frobenius_pow(n as i64).approx_eq(a) {
                return Err(DieudonneError::NotInSubfield(i));
            }
        }
        Ok(DElement { n, coeffs })
    }

    pub fn scalar(n: usize, a: PadicElement) -> Result<Self, DieudonneError> {
        let f = Arc::clone(a.field());
        let mut coeffs = vec![PadicElement::zero(&f); n.max(1)];
        coeffs[0] = a;
        Self::new(n, coeffs)
    }

    pub fn one(field: &Arc<FieldDescriptor>, n: usize) -> Self {
        Self::scalar(n, PadicElement::one(field)).expect("1 is rational")
    }

    /// `Π^k` for `k ≥ 0`, reduced with `Π^n = p`.
    pub fn pi_power(field: &Arc<FieldDescriptor>, n: usize, k: usize) -> Self {
        let mut coeffs = vec![PadicElement::zero(field); n];
        coeffs[k % n] = PadicElement::p_power(field, (k / n) as i64);
        DElement { n, coeffs }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &Arc<FieldDescriptor> {
        self.coeffs[0].field()
    }

    pub fn coeffs(&self) -> &[PadicElement] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(PadicElement::is_zero)
    }

    /// Product using `Π·a = σ(a)·Π` and `Π^n = p`.
    pub fn mul(&self, other: &DElement) -> DElement {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let f = self.field();
        let mut out = vec![PadicElement::zero(f); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                let mut t = a * &b.frobenius_pow(i as i64);
                if i + j >= n {
                    t = &t * &PadicElement::p_power(f, 1);
                }
                out[(i + j) % n] = &out[(i + j) % n] + &t;
            }
        }
        DElement { n, coeffs: out }
    }

    /// `Π^k · d · Π^{−k}`, which applies `σ^k` to every coefficient.
    pub fn conjugate_by_pi(&self, k: i64) -> DElement {
        DElement { n: self.n, coeffs: self.coeffs.iter().map(|a| a.frobenius_pow(k)).collect() }
    }
}

/// Uniform-ish element of `W(F_{p^n})` inside the working field, by the
/// trace `Σ_j σ^{jn}` of a random integral element.
pub fn random_subfield_element<R: Rng>(field: &Arc<FieldDescriptor>, n: usize, rng: &mut R) -> PadicElement {
    let m = field.degree();
    let x = crate::rng::integral_element(field, rng);
    (1..m / n).fold(x.clone(), |acc, j| &acc + &x.frobenius_pow((j * n) as i64))
}

/// A random unit of `O_D`: unit constant term, integral higher coefficients.
pub fn random_unit<R: Rng>(field: &Arc<FieldDescriptor>, n: usize, rng: &mut R) -> DElement {
    let mut coeffs = Vec::with_capacity(n);
    loop {
        let a0 = random_subfield_element(field, n, rng);
        if a0.is_unit() {
            coeffs.push(a0);
            break;
        }
    }
    for _ in 1..n {
        coeffs.push(random_subfield_element(field, n, rng));
    }
    DElement { n, coeffs }
}

/// The cyclic matrix with `e_j ↦ e_{j+1}` and `e_{n−1} ↦ p·e_0`: the matrix
/// of `ι(Π)` on `D(H)`, and of `V` in the same basis.
fn cyclic_pi(field: &Arc<FieldDescriptor>, n: usize) -> PadicMatrix {
    PadicMatrix::from_fn(field, n, n, |i, j| {
        if n == 1 {
            PadicElement::p_power(field, 1)
        } else if j + 1 == i {
            PadicElement::one(field)
        } else if i == 0 && j == n - 1 {
            PadicElement::p_power(field, 1)
        } else {
            PadicElement::zero(field)
        }
    })
}

/// `Φ`: `p` on the superdiagonal and `1` in the bottom-left corner
/// (for `n = 1` this is `[1]`). It is the matrix of `F = p·V⁻¹` on `D(H)`.
pub fn phi_matrix(field: &Arc<FieldDescriptor>, n: usize) -> PadicMatrix {
    PadicMatrix::from_fn(field, n, n, |i, j| {
        if i == n - 1 && j == 0 {
            PadicElement::one(field)
        } else if j == i + 1 {
            PadicElement::p_power(field, 1)
        } else {
            PadicElement::zero(field)
        }
    })
}

/// Matrix of `ι(d)` on `D(H)` in the basis `Π^j ⊗ 1`.
pub fn iota_matrix(d: &DElement) -> PadicMatrix {
    let n = d.n;
    let f = d.field();
    let mut out = PadicMatrix::zeros(f, n, n);
    for (i, a) in d.coeffs.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for j in 0..n {
            // a·Π^{i+j} = Π^{i+j}·σ^{−(i+j)}(a)
            let k = i + j;
            let mut x = a.frobenius_pow(-(k as i64));
            if k >= n {
                x = &x * &PadicElement::p_power(f, 1);
            }
            let r = k % n;
            let cur = out.get(r, j) + &x;
            out.set(r, j, cur);
        }
    }
    out
}

fn check_n(n: usize) -> Result<(), DieudonneError> {
    if n == 0 {
        Err(DieudonneError::ZeroHeight)
    } else {
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct LubinTateModel {
    n: usize,
    v_matrix: PadicMatrix,
}

pub fn build_dh(field: &Arc<FieldDescriptor>, n: usize) -> Result<LubinTateModel, DieudonneError> {
    check_n(n)?;
    Ok(LubinTateModel { n, v_matrix: cyclic_pi(field, n) })
}

impl LubinTateModel {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &Arc<FieldDescriptor> {
        self.v_matrix.field()
    }

    pub fn basis_labels(&self) -> Vec<String> {
        (0..self.n).map(|j| format!("Π^{j}⊗1")).collect()
    }

    pub fn v_matrix(&self) -> &PadicMatrix {
        &self.v_matrix
    }

    /// `V` applied to each column.
    pub fn apply_v(&self, v: &PadicMatrix) -> PadicMatrix {
        &self.v_matrix * &v.frobenius_pow(-1)
    }

    /// Matrix of `F = p·V⁻¹`; equals [`phi_matrix`].
    pub fn frobenius_matrix(&self) -> PadicMatrix {
        p_times_inverse(&self.v_matrix)
    }

    pub fn frobenius_isocrystal(&self) -> Result<Isocrystal, DieudonneError> {
        Ok(Isocrystal::new(self.frobenius_matrix())?)
    }

    /// `p·ᵗF⁻¹ = ᵗM`, the Frobenius whose slopes are reported.
    pub fn dual_isocrystal(&self) -> Result<Isocrystal, DieudonneError> {
        Ok(Isocrystal::new(self.v_matrix.transpose())?)
    }

    pub fn newton_slopes(&self) -> Result<Vec<Rational64>, DieudonneError> {
        Ok(self.dual_isocrystal()?.newton_slopes()?)
    }

    pub fn iota(&self, d: &DElement) -> Result<PadicMatrix, DieudonneError> {
        if d.is_zero() {
            return Err(DieudonneError::ZeroElement);
        }
        Ok(iota_matrix(d))
    }

    pub fn to_json(&self) -> ModelJson {
        ModelJson {
            n: self.n,
            basis_labels: self.basis_labels(),
            v_matrix: self.v_matrix.to_json(),
            phi_matrix: self.frobenius_matrix().to_json(),
            grading: None,
        }
    }
}

fn p_times_inverse(m: &PadicMatrix) -> PadicMatrix {
    let p = PadicElement::p_power(m.field(), 1);
    m.inverse().expect("V is invertible after inverting p").scale(&p)
}

#[derive(Clone, Debug)]
pub struct SpecialModel {
    n: usize,
    v_matrix: PadicMatrix,
}

pub fn build_dg(field: &Arc<FieldDescriptor>, n: usize) -> Result<SpecialModel, DieudonneError> {
    check_n(n)?;
    let block = cyclic_pi(field, n);
    let v_matrix = PadicMatrix::block_diagonal(field, &vec![block; n]);
    Ok(SpecialModel { n, v_matrix })
}

impl SpecialModel {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &Arc<FieldDescriptor> {
        self.v_matrix.field()
    }

    /// Index of `e_{a,b}` in the basis.
    pub fn index(&self, a: usize, b: usize) -> usize {
        (a % self.n) * self.n + b % self.n
    }

    pub fn basis_labels(&self) -> Vec<String> {
        (0..self.n * self.n).map(|k| format!("e_{{{},{}}}", k / self.n, k % self.n)).collect()
    }

    /// Degree `a + b mod n` of each basis vector.
    pub fn grading(&self) -> Vec<usize> {
        (0..self.n * self.n).map(|k| (k / self.n + k % self.n) % self.n).collect()
    }

    /// Basis indices of `N_i`.
    pub fn graded_piece(&self, i: usize) -> Vec<usize> {
        self.grading().iter().enumerate().filter(|(_, g)| **g == i % self.n).map(|(k, _)| k).collect()
    }

    /// Basis indices of `N_0`, ordered by `a` (vector `e_{a,−a}`).
    pub fn n0_indices(&self) -> Vec<usize> {
        (0..self.n).map(|a| self.index(a, (self.n - a) % self.n)).collect()
    }

    pub fn v_matrix(&self) -> &PadicMatrix {
        &self.v_matrix
    }

    pub fn apply_v(&self, v: &PadicMatrix) -> PadicMatrix {
        &self.v_matrix * &v.frobenius_pow(-1)
    }

    pub fn frobenius_matrix(&self) -> PadicMatrix {
        p_times_inverse(&self.v_matrix)
    }

    pub fn frobenius_isocrystal(&self) -> Result<Isocrystal, DieudonneError> {
        Ok(Isocrystal::new(self.frobenius_matrix())?)
    }

    pub fn dual_isocrystal(&self) -> Result<Isocrystal, DieudonneError> {
        Ok(Isocrystal::new(self.v_matrix.transpose())?)
    }

    pub fn newton_slopes(&self) -> Result<Vec<Rational64>, DieudonneError> {
        Ok(self.dual_isocrystal()?.newton_slopes()?)
    }

    /// Matrix of `ι(d)`: `ι(xΠ^i)e_{a,b} = p^{⌊(b+i)/n⌋}·σ^{−(a+b+i)}(x)·e_{a,b+i}`.
    pub fn iota(&self, d: &DElement) -> Result<PadicMatrix, DieudonneError> {
        if d.is_zero() {
            return Err(DieudonneError::ZeroElement);
        }
        let n = self.n;
        let f = self.field();
        let mut out = PadicMatrix::zeros(f, n * n, n * n);
        for (i, x) in d.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for a in 0..n {
                for b in 0..n {
                    let mut y = x.frobenius_pow(-((a + b + i) as i64));
                    if b + i >= n {
                        y = &y * &PadicElement::p_power(f, 1);
                    }
                    let (r, c) = (self.index(a, b + i), self.index(a, b));
                    let cur = out.get(r, c) + &y;
                    out.set(r, c, cur);
                }
            }
        }
        Ok(out)
    }

    /// `V⁻¹∘ι(Π)` restricted to `N_0`, a σ-semilinear operator.
    pub fn unit_root_operator(&self) -> Result<Isocrystal, DieudonneError> {
        let pi = self.iota(&DElement::pi_power(self.field(), self.n, 1))?;
        // V⁻¹(w) = σ(M⁻¹w) = M⁻¹σ(w) since M has entries in Q_p
        let u = &self.v_matrix.inverse()? * &pi.frobenius_pow(1);
        let idx = self.n0_indices();
        Ok(Isocrystal::new(u.select_rows(&idx).select_columns(&idx))?)
    }

    /// The `Q_p`-space `N_0^{V⁻¹Π}`, in `N_0` coordinates.
    pub fn unit_root_fixed_space(&self) -> Result<FixedSpace, DieudonneError> {
        Ok(self.unit_root_operator()?.phi_fixed_points(Rational64::from_integer(0))?)
    }

    /// Embeds columns in `N_0` coordinates into the full module.
    pub fn embed_n0(&self, v: &PadicMatrix) -> PadicMatrix {
        let idx = self.n0_indices();
        let mut out = PadicMatrix::zeros(self.field(), self.n * self.n, v.cols());
        for (a, &k) in idx.iter().enumerate() {
            for c in 0..v.cols() {
                out.set(k, c, v.get(a, c).clone());
            }
        }
        out
    }

    /// `⊕_j ι(Π)^j W` for a subspace `W ⊂ N_0 ⊗ K` given by spanning columns.
    pub fn filtration_from_n0(&self, w: &PadicMatrix) -> Result<PadicMatrix, DieudonneError> {
        let pi = self.iota(&DElement::pi_power(self.field(), self.n, 1))?;
        let mut cur = self.embed_n0(w);
        let mut out = cur.clone();
        for _ in 1..self.n {
            cur = &pi * &cur;
            out = out.hstack(&cur);
        }
        Ok(out)
    }

    /// The sub-isocrystal `D·v` generated by a vector `v ∈ N_0` fixed by `V⁻¹Π`.
    pub fn sub_object_from_n0(&self, v: &PadicMatrix) -> Result<PadicMatrix, DieudonneError> {
        self.filtration_from_n0(v)
    }

    pub fn to_json(&self) -> ModelJson {
        ModelJson {
            n: self.n,
            basis_labels: self.basis_labels(),
            v_matrix: self.v_matrix.to_json(),
            phi_matrix: self.frobenius_matrix().to_json(),
            grading: Some(self.grading()),
        }
    }
}

/// `Δ: D(H)^n → D(G)`, copy `i` sent by `ι(Π^i)` onto the block `a ≡ −i`.
#[derive(Clone, Debug)]
pub struct DeltaIsogeny {
    n: usize,
    matrix: PadicMatrix,
}

pub fn delta_matrix(field: &Arc<FieldDescriptor>, n: usize) -> Result<DeltaIsogeny, DieudonneError> {
    check_n(n)?;
    let pi = cyclic_pi(field, n);
    let mut matrix = PadicMatrix::zeros(field, n * n, n * n);
    let mut block = PadicMatrix::identity(field, n);
    for i in 0..n {
        let a = (n - i) % n;
        for r in 0..n {
            for c in 0..n {
                matrix.set(a * n + r, i * n + c, block.get(r, c).clone());
            }
        }
        block = &pi * &block;
    }
    Ok(DeltaIsogeny { n, matrix })
}

impl DeltaIsogeny {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &PadicMatrix {
        &self.matrix
    }

    pub fn declared_height(&self) -> i64 {
        (self.n * (self.n - 1) / 2) as i64
    }

    /// `v_p(det Δ)`; `None` if the determinant is not resolved at precision.
    pub fn computed_height(&self) -> Option<i64> {
        self.matrix.det().valuation().exact()
    }

    /// The diagonal action `ι(d)^{⊕n}` on `D(H)^n`.
    pub fn source_action(&self, d: &DElement) -> PadicMatrix {
        let b = iota_matrix(d);
        PadicMatrix::block_diagonal(self.matrix.field(), &vec![b; self.n])
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModelJson {
    pub n: usize,
    pub basis_labels: Vec<String>,
    #[serde(rename = "V_matrix")]
    pub v_matrix: MatrixJson,
    pub phi_matrix: MatrixJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grading: Option<Vec<usize>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::make_field;

    fn r(a: i64, b: i64) -> Rational64 {
        Rational64::new(a, b)
    }

    #[test]
    fn phi_shapes() {
        let q2 = make_field(2, 1, 16).unwrap();
        assert!(phi_matrix(&q2, 2).approx_eq(&PadicMatrix::from_i64_rows(&q2, &[vec![0, 2], vec![1, 0]])));
        assert_eq!(phi_matrix(&q2, 1), PadicMatrix::from_i64_rows(&q2, &[vec![1]]));
        assert_eq!(phi_matrix(&q2, 3).det().valuation().exact(), Some(2));
        for n in 1..=5 {
            let dh = build_dh(&q2, n).unwrap();
            assert!(dh.frobenius_matrix().approx_eq(&phi_matrix(&q2, n)));
        }
    }

    #[test]
    fn iota_examples() {
        let k = make_field(2, 2, 16).unwrap();
        let one = DElement::one(&k, 2);
        assert_eq!(iota_matrix(&one), PadicMatrix::identity(&k, 2));
        let pi = DElement::pi_power(&k, 2, 1);
        assert!(iota_matrix(&pi).approx_eq(&PadicMatrix::from_i64_rows(&k, &[vec![0, 2], vec![1, 0]])));
        let omega = PadicElement::from_integer_coeffs(&k, &[0, 1]);
        let d = DElement::scalar(2, omega.clone()).unwrap();
        let m = iota_matrix(&d);
        assert!(m.get(0, 0).approx_eq(&omega));
        assert!(m.get(1, 1).approx_eq(&omega.frobenius_pow(-1)));
        assert!(m.get(0, 1).is_zero());
    }

    #[test]
    fn subfield_check() {
        let k = make_field(2, 2, 16).unwrap();
        let omega = PadicElement::from_integer_coeffs(&k, &[0, 1]);
        assert!(DElement::scalar(2, omega.clone()).is_ok());
        assert_eq!(DElement::scalar(1, omega).unwrap_err(), DieudonneError::NotInSubfield(0));
    }

    #[test]
    fn dh_slopes_small_n() {
        let q2 = make_field(2, 1, 24).unwrap();
        assert_eq!(build_dh(&q2, 1).unwrap().newton_slopes().unwrap(), vec![r(1, 1)]);
        assert_eq!(build_dh(&q2, 2).unwrap().newton_slopes().unwrap(), vec![r(1, 2); 2]);
        let f = build_dh(&q2, 3).unwrap().frobenius_isocrystal().unwrap();
        assert_eq!(f.newton_slopes().unwrap(), vec![r(2, 3); 3]);
    }

    #[test]
    fn dg_v_rule_n2() {
        let q2 = make_field(2, 1, 16).unwrap();
        let dg = build_dg(&q2, 2).unwrap();
        let e = |a, b| {
            let mut v = PadicMatrix::zeros(&q2, 4, 1);
            v.set(dg.index(a, b), 0, PadicElement::one(&q2));
            v
        };
        assert!(dg.apply_v(&e(0, 1)).approx_eq(&e(0, 0).scale(&PadicElement::from_i64(&q2, 2))));
        assert!(dg.apply_v(&e(0, 0)).approx_eq(&e(0, 1)));
        assert_eq!(dg.grading(), vec![0, 1, 1, 0]);
        assert_eq!(dg.n0_indices(), vec![0, 3]);
    }

    #[test]
    fn delta_heights() {
        let q2 = make_field(2, 1, 16).unwrap();
        for (n, h) in [(1, 0), (2, 1), (3, 3), (4, 6)] {
            let d = delta_matrix(&q2, n).unwrap();
            assert_eq!(d.declared_height(), h);
            assert_eq!(d.computed_height(), Some(h));
        }
        assert_eq!(delta_matrix(&q2, 1).unwrap().matrix(), &PadicMatrix::identity(&q2, 1));
    }

    #[test]
    fn d_multiplication_matches_iota() {
        let k = make_field(3, 2, 12).unwrap();
        let mut rng = crate::rng::seeded(11);
        for _ in 0..10 {
            let a = random_unit(&k, 2, &mut rng);
            let b = random_unit(&k, 2, &mut rng);
            let lhs = iota_matrix(&a.mul(&b));
            let rhs = &iota_matrix(&a) * &iota_matrix(&b);
            assert!(lhs.approx_eq(&rhs));
        }
    }
}

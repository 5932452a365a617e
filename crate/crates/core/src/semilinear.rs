//! Isocrystals `(K^n, φ = A·σ)`, their Newton slopes, Frobenius fixed
//! vectors and a weak-admissibility check on caller-supplied sub-objects.

use std::sync::Arc;

use num_rational::Rational64;
use serde::Serialize;
use thiserror::Error;

use crate::padic::{
    certified_rank, right_kernel, smith_form, FieldDescriptor, MatrixJson, PadicElement,
    PadicError, PadicMatrix, RankCertificate, Valuation,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemilinearError {
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error("Frobenius matrix must be square")]
    NotSquare,
    #[error("Frobenius matrix is not invertible at the working precision")]
    NotInvertible,
    #[error("precision insufficient to resolve the Newton polygon")]
    NewtonPolygonUnresolved,
    #[error("precision insufficient to certify the kernel rank")]
    KernelUnresolved,
    #[error("sub-object {0} is not φ-stable")]
    NotStable(usize),
    #[error("spanning matrix has rank {found}, expected {expected}")]
    SpanRank { expected: usize, found: usize },
    #[error("objects live over different fields")]
    FieldMismatch,
}

/// `K^n` with the σ-semilinear bijection `v ↦ A·σ(v)`.
#[derive(Clone, Debug)]
pub struct Isocrystal {
    frob: PadicMatrix,
}

impl Isocrystal {
    pub fn new(frob: PadicMatrix) -> Result<Self, SemilinearError> {
        if !frob.is_square() {
            return Err(SemilinearError::NotSquare);
        }
        if frob.rows() > 0 && frob.det().valuation().exact().is_none() {
            return Err(SemilinearError::NotInvertible);
        }
        Ok(Isocrystal { frob })
    }

    pub fn field(&self) -> &Arc<FieldDescriptor> {
        self.frob.field()
    }

    pub fn dim(&self) -> usize {
        self.frob.rows()
    }

    pub fn frobenius_matrix(&self) -> &PadicMatrix {
        &self.frob
    }

    /// `φ` applied to each column of `v`.
    pub fn apply(&self, v: &PadicMatrix) -> PadicMatrix {
        &self.frob * &v.frobenius_pow(1)
    }

    /// `B = A·σ(A)···σ^{m−1}(A)`, the matrix of the linear map `φ^m`.
    pub fn linearize(&self) -> PadicMatrix {
        let m = self.field().degree();
        let mut b = self.frob.clone();
        for j in 1..m {
            b = &b * &self.frob.frobenius_pow(j as i64);
        }
        b
    }

    /// Matrix of `φ` in the basis given by the columns of `g⁻¹`: `G·A·σ(G)⁻¹`.
    pub fn base_change(&self, g: &PadicMatrix) -> Result<Isocrystal, SemilinearError> {
        let s_inv = g.frobenius_pow(1).inverse()?;
        Isocrystal::new(&(g * &self.frob) * &s_inv)
    }

    /// Newton slopes in nondecreasing order, with multiplicity.
    pub fn newton_slopes(&self) -> Result<Vec<Rational64>, SemilinearError> {
        let m = self.field().degree() as i64;
        let roots = newton_polygon(&self.linearize().charpoly())?;
        Ok(roots.into_iter().map(|s| s / m).collect())
    }

    /// `Q_p`-basis (as columns in `K^n`) of `{v : φ(v) = p^twist·v}`.
    pub fn phi_fixed_points(&self, twist: Rational64) -> Result<FixedSpace, SemilinearError> {
        let field = self.field();
        let n = self.dim();
        if !twist.is_integer() {
            let empty = PadicMatrix::zeros(field, n, 0);
            return Ok(FixedSpace { basis: empty, certificate: None });
        }
        let m = field.degree();
        let base = field.prime_subfield();
        let scale = PadicElement::p_power(field, twist.to_integer());
        let mut t = PadicMatrix::zeros(&base, n * m, n * m);
        for i in 0..n {
            for s in 0..m {
                let mut monomial = vec![0u64; m];
                monomial[s] = 1;
                let x = PadicElement::from_residues(field, &monomial);
                let sx = x.frobenius();
                for r in 0..n {
                    let mut w = self.frob.get(r, i) * &sx;
                    if r == i {
                        w = &w - &(&scale * &x);
                    }
                    for (c, coord) in w.coordinates().into_iter().enumerate() {
                        t.set(r * m + c, i * m + s, coord);
                    }
                }
            }
        }
        let (kernel, cert) = right_kernel(&t, t.precision());
        if !cert.deficiency_resolved() {
            return Err(SemilinearError::KernelUnresolved);
        }
        let basis = PadicMatrix::from_fn(field, n, kernel.cols(), |r, k| {
            let coords: Vec<PadicElement> = (0..m).map(|c| kernel.get(r * m + c, k).clone()).collect();
            PadicElement::from_coordinates(field, &coords)
        });
        Ok(FixedSpace { basis, certificate: Some(cert) })
    }

    /// Whether the column span of `sub` is carried into itself by `φ`.
    pub fn is_stable(&self, sub: &PadicMatrix) -> bool {
        let d = certified_rank(sub, sub.precision()).rank;
        let joint = sub.hstack(&self.apply(sub));
        let cert = certified_rank(&joint, joint.precision());
        cert.rank == d && cert.deficiency_resolved()
    }

    /// The isocrystal induced on a `φ`-stable subspace with basis the columns of `sub`.
    pub fn restrict(&self, sub: &PadicMatrix) -> Result<Isocrystal, SemilinearError> {
        if !self.is_stable(sub) {
            return Err(SemilinearError::NotStable(0));
        }
        let c = solve_in_span(sub, &self.apply(sub))?;
        Isocrystal::new(c)
    }

    pub fn to_json(&self) -> IsocrystalJson {
        IsocrystalJson { field: FieldJson::of(self.field()), dim: self.dim(), frob_matrix: self.frob.to_json() }
    }
}

/// Solves `N·C = Y` for `N` of full column rank with `Y` in its span.
fn solve_in_span(n: &PadicMatrix, y: &PadicMatrix) -> Result<PadicMatrix, SemilinearError> {
    let d = n.cols();
    let smith = smith_form(n);
    if smith.pivots < d {
        return Err(SemilinearError::SpanRank { expected: d, found: smith.pivots });
    }
    let py = &smith.left * y;
    let diag = &(&smith.left * n) * &smith.right;
    let mut z = PadicMatrix::zeros(n.field(), d, y.cols());
    for i in 0..d {
        let inv = diag.get(i, i).inverse()?;
        for j in 0..y.cols() {
            z.set(i, j, py.get(i, j) * &inv);
        }
    }
    Ok(&smith.right * &z)
}

/// Valuations of the roots of `Σ c_i T^i` (constant term first, monic),
/// read from the lower convex hull of the exact points `(i, v(c_i))`.
pub fn newton_polygon(coeffs: &[PadicElement]) -> Result<Vec<Rational64>, SemilinearError> {
    let deg = coeffs.len() - 1;
    let points: Vec<(i64, i64)> = coeffs
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.valuation().exact().map(|v| (i as i64, v)))
        .collect();
    if points.first().map(|p| p.0) != Some(0) {
        return Err(SemilinearError::NewtonPolygonUnresolved);
    }
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &pt in &points {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b when it lies on or above the segment a–pt
            if (b.1 - a.1) * (pt.0 - a.0) >= (pt.1 - a.1) * (b.0 - a.0) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    // unresolved coefficients must not be able to dip below the hull
    for (i, c) in coeffs.iter().enumerate() {
        if let Valuation::AtLeast(b) = c.valuation() {
            let i = i as i64;
            let seg = hull.windows(2).find(|w| w[0].0 <= i && i <= w[1].0).unwrap();
            let (a, z) = (seg[0], seg[1]);
            let at = Rational64::from_integer(a.1) + Rational64::new((z.1 - a.1) * (i - a.0), z.0 - a.0);
            if Rational64::from_integer(b) < at {
                return Err(SemilinearError::NewtonPolygonUnresolved);
            }
        }
    }
    let mut roots = Vec::with_capacity(deg);
    for w in hull.windows(2) {
        let len = w[1].0 - w[0].0;
        let v = Rational64::new(w[0].1 - w[1].1, len);
        roots.extend(std::iter::repeat_n(v, len as usize));
    }
    roots.sort();
    Ok(roots)
}

/// Frobenius-fixed vectors, as columns over `K` spanning a `Q_p`-space.
#[derive(Clone, Debug)]
pub struct FixedSpace {
    pub basis: PadicMatrix,
    /// Absent when the twist is not integral (the space is then zero).
    pub certificate: Option<RankCertificate>,
}

impl FixedSpace {
    pub fn dim(&self) -> usize {
        self.basis.cols()
    }
}

/// An isocrystal with a one-step filtration `Fil ⊂ K^n`.
#[derive(Clone, Debug)]
pub struct FilteredIsocrystal {
    base: Isocrystal,
    filtration: PadicMatrix,
}

impl FilteredIsocrystal {
    /// `filtration` spans `Fil` by its columns, which must be independent.
    pub fn new(base: Isocrystal, filtration: PadicMatrix) -> Result<Self, SemilinearError> {
        if !filtration.field().same_as(base.field()) {
            return Err(SemilinearError::FieldMismatch);
        }
        if filtration.rows() != base.dim() {
            return Err(PadicError::Dimension("filtration rows must equal the dimension".into()).into());
        }
        let cert = certified_rank(&filtration, filtration.precision());
        if cert.rank != filtration.cols() {
            return Err(SemilinearError::SpanRank { expected: filtration.cols(), found: cert.rank });
        }
        Ok(FilteredIsocrystal { base, filtration })
    }

    pub fn base(&self) -> &Isocrystal {
        &self.base
    }

    pub fn filtration(&self) -> &PadicMatrix {
        &self.filtration
    }

    pub fn hodge_codimension(&self) -> usize {
        self.base.dim() - self.filtration.cols()
    }

    /// `dim(N' ∩ Fil)` for the span of `sub`.
    fn t_h(&self, sub: &PadicMatrix) -> Result<usize, SemilinearError> {
        let joint = sub.hstack(&self.filtration);
        let cert = certified_rank(&joint, joint.precision());
        if !cert.deficiency_resolved() {
            return Err(SemilinearError::KernelUnresolved);
        }
        Ok(sub.cols() + self.filtration.cols() - cert.rank)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubObjectReport {
    pub dim: usize,
    pub t_h: i64,
    #[serde(serialize_with = "ser_ratio")]
    pub t_n: Rational64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdmissibilityReport {
    pub sub_objects: Vec<SubObjectReport>,
    pub full: SubObjectReport,
    /// `t_H = t_N` on the whole object.
    pub full_equality: bool,
    /// Every supplied sub-object satisfies `t_H ≤ t_N` and the totals agree.
    pub weakly_admissible_on_sample: bool,
}

/// Checks `t_H(N') ≤ t_N(N')` on each supplied `φ`-stable subspace (given by
/// independent spanning columns) and `t_H = t_N` on the full object.
pub fn weak_admissibility_sample(
    fi: &FilteredIsocrystal,
    sub_objects: &[PadicMatrix],
) -> Result<AdmissibilityReport, SemilinearError> {
    let mut reports = Vec::with_capacity(sub_objects.len());
    for (k, sub) in sub_objects.iter().enumerate() {
        let cert = certified_rank(sub, sub.precision());
        if cert.rank != sub.cols() {
            return Err(SemilinearError::SpanRank { expected: sub.cols(), found: cert.rank });
        }
        let restricted = fi.base.restrict(sub).map_err(|e| match e {
            SemilinearError::NotStable(_) => SemilinearError::NotStable(k),
            e => e,
        })?;
        let t_n: Rational64 = restricted.newton_slopes()?.into_iter().sum();
        let t_h = fi.t_h(sub)? as i64;
        reports.push(SubObjectReport { dim: sub.cols(), t_h, t_n, holds: Rational64::from_integer(t_h) <= t_n });
    }
    let t_n: Rational64 = fi.base.newton_slopes()?.into_iter().sum();
    let t_h = fi.filtration.cols() as i64;
    let full = SubObjectReport { dim: fi.base.dim(), t_h, t_n, holds: Rational64::from_integer(t_h) <= t_n };
    let full_equality = Rational64::from_integer(t_h) == t_n;
    let weakly_admissible_on_sample = full_equality && reports.iter().all(|r| r.holds);
    Ok(AdmissibilityReport { sub_objects: reports, full, full_equality, weakly_admissible_on_sample })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FieldJson {
    pub p: String,
    pub m: usize,
    pub modulus: Vec<String>,
    pub precision: u32,
}

impl FieldJson {
    pub fn of(field: &FieldDescriptor) -> Self {
        FieldJson {
            p: field.p().to_string(),
            m: field.degree(),
            modulus: field.modulus().iter().map(u64::to_string).collect(),
            precision: field.precision(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IsocrystalJson {
    pub field: FieldJson,
    pub dim: usize,
    pub frob_matrix: MatrixJson,
}

/// Slopes as `[num, den]` pairs.
pub fn slopes_json(slopes: &[Rational64]) -> Vec<[i64; 2]> {
    slopes.iter().map(|s| [*s.numer(), *s.denom()]).collect()
}

fn ser_ratio<S: serde::Serializer>(r: &Rational64, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq([*r.numer(), *r.denom()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::make_field;

    fn r(a: i64, b: i64) -> Rational64 {
        Rational64::new(a, b)
    }

    fn phi2(k: &Arc<FieldDescriptor>) -> PadicMatrix {
        PadicMatrix::from_i64_rows(k, &[vec![0, 2], vec![1, 0]])
    }

    #[test]
    fn linearize_examples() {
        let q2 = make_field(2, 1, 16).unwrap();
        let a = phi2(&q2);
        assert_eq!(Isocrystal::new(a.clone()).unwrap().linearize(), a);

        let q4 = make_field(2, 2, 16).unwrap();
        let a = phi2(&q4);
        let b = Isocrystal::new(a).unwrap().linearize();
        assert!(b.approx_eq(&PadicMatrix::from_i64_rows(&q4, &[vec![2, 0], vec![0, 2]])));

        let omega = PadicElement::from_integer_coeffs(&q4, &[0, 1]);
        let mut a = PadicMatrix::identity(&q4, 2);
        a.set(0, 0, omega);
        let b = Isocrystal::new(a).unwrap().linearize();
        assert!(b.approx_eq(&PadicMatrix::identity(&q4, 2)));
    }

    #[test]
    fn slopes_of_small_examples() {
        let k = make_field(2, 2, 20).unwrap();
        let id = Isocrystal::new(PadicMatrix::identity(&k, 3)).unwrap();
        assert_eq!(id.newton_slopes().unwrap(), vec![r(0, 1); 3]);
        let q2 = make_field(2, 1, 20).unwrap();
        let phi = Isocrystal::new(phi2(&q2)).unwrap();
        assert_eq!(phi.newton_slopes().unwrap(), vec![r(1, 2), r(1, 2)]);
        let mixed = Isocrystal::new(PadicMatrix::from_i64_rows(&q2, &[vec![1, 0, 0], vec![0, 4, 0], vec![0, 0, 8]])).unwrap();
        assert_eq!(mixed.newton_slopes().unwrap(), vec![r(0, 1), r(2, 1), r(3, 1)]);
    }

    #[test]
    fn singular_frobenius_rejected() {
        let k = make_field(3, 1, 8).unwrap();
        let a = PadicMatrix::from_i64_rows(&k, &[vec![1, 1], vec![1, 1]]);
        assert_eq!(Isocrystal::new(a).unwrap_err(), SemilinearError::NotInvertible);
    }

    #[test]
    fn fixed_points() {
        let q2 = make_field(2, 1, 16).unwrap();
        let one = Isocrystal::new(PadicMatrix::identity(&q2, 1)).unwrap();
        let fs = one.phi_fixed_points(r(0, 1)).unwrap();
        assert_eq!(fs.dim(), 1);
        assert!(fs.basis.get(0, 0).is_unit());

        let phi = Isocrystal::new(phi2(&q2)).unwrap();
        assert_eq!(phi.phi_fixed_points(r(0, 1)).unwrap().dim(), 0);
        assert_eq!(phi.phi_fixed_points(r(1, 2)).unwrap().dim(), 0);

        // σ on K^2 fixes exactly Q_p^2
        let k = make_field(3, 2, 10).unwrap();
        let sigma = Isocrystal::new(PadicMatrix::identity(&k, 2)).unwrap();
        let fs = sigma.phi_fixed_points(r(0, 1)).unwrap();
        assert_eq!(fs.dim(), 2);
        let img = sigma.apply(&fs.basis);
        assert!(img.approx_eq(&fs.basis));
        // the twist p^1 on diag(p, 1)
        let a = PadicMatrix::from_i64_rows(&k, &[vec![3, 0], vec![0, 1]]);
        let fs = Isocrystal::new(a).unwrap().phi_fixed_points(r(1, 1)).unwrap();
        assert_eq!(fs.dim(), 1);
    }

    #[test]
    fn hull_respects_unresolved_terms() {
        let k = make_field(2, 1, 8).unwrap();
        let c = |v: i64| PadicElement::from_i64(&k, v);
        // T^2 - 0·T + 4: slopes 1, 1 provided the middle term has v ≥ 1
        let poly = vec![c(4), PadicElement::zero(&k), c(1)];
        assert_eq!(newton_polygon(&poly).unwrap(), vec![r(1, 1), r(1, 1)]);
        let poly = vec![c(4), PadicElement::zero_to(&k, 0), c(1)];
        assert_eq!(newton_polygon(&poly).unwrap_err(), SemilinearError::NewtonPolygonUnresolved);
    }

    #[test]
    fn admissibility_on_a_split_object() {
        // N = L·e0 ⊕ L·e1 with slopes 0 and 1; Fil a line
        let k = make_field(2, 2, 16).unwrap();
        let a = PadicMatrix::from_i64_rows(&k, &[vec![1, 0], vec![0, 2]]);
        let iso = Isocrystal::new(a).unwrap();
        let e0 = PadicMatrix::from_i64_rows(&k, &[vec![1], vec![0]]);
        let e1 = PadicMatrix::from_i64_rows(&k, &[vec![0], vec![1]]);
        let omega = PadicElement::from_integer_coeffs(&k, &[0, 1]);
        let generic = PadicMatrix::column_vector(&k, vec![PadicElement::one(&k), omega]);

        let fi = FilteredIsocrystal::new(iso.clone(), generic).unwrap();
        let rep = weak_admissibility_sample(&fi, &[e0.clone(), e1.clone()]).unwrap();
        assert!(rep.full_equality);
        assert!(rep.weakly_admissible_on_sample);

        // Fil = the slope-0 line: t_H = 1 > 0 = t_N there
        let fi = FilteredIsocrystal::new(iso.clone(), e0.clone()).unwrap();
        let rep = weak_admissibility_sample(&fi, &[e0.clone(), e1]).unwrap();
        assert!(!rep.sub_objects[0].holds);
        assert!(rep.sub_objects[1].holds);
        assert!(!rep.weakly_admissible_on_sample);

        let not_stable = PadicMatrix::from_i64_rows(&k, &[vec![1], vec![1]]);
        let err = weak_admissibility_sample(&fi, &[e0, not_stable]).unwrap_err();
        assert_eq!(err, SemilinearError::NotStable(1));
    }
}

//! Smith-style reduction over the valuation ring with minimal-valuation
//! pivoting, and the rank/kernel/saturation queries built on it.

use super::{PadicElement, PadicError, PadicMatrix, Valuation};

/// `left · M · right = diag(divisors)` with `left`, `right` invertible.
///
/// When every entry is integral, pivots have minimal valuation so the
/// elimination factors are integral and both transforms are unimodular.
#[derive(Clone, Debug)]
pub struct SmithForm {
    /// Exact divisor valuations first (nondecreasing), then the unresolved tail.
    pub divisors: Vec<Valuation>,
    pub left: PadicMatrix,
    pub left_inv: PadicMatrix,
    pub right: PadicMatrix,
    /// Number of pivots found before the residual block vanished.
    pub pivots: usize,
}

pub fn smith_form(m: &PadicMatrix) -> SmithForm {
    let field = m.field();
    let (r, c) = (m.rows(), m.cols());
    let mut w = m.clone();
    let mut left = PadicMatrix::identity(field, r);
    let mut left_inv = PadicMatrix::identity(field, r);
    let mut right = PadicMatrix::identity(field, c);
    let mut divisors = Vec::with_capacity(r.min(c));
    let mut pivots = 0;

    for k in 0..r.min(c) {
        let mut best: Option<(usize, usize, i64)> = None;
        for i in k..r {
            for j in k..c {
                let x = w.get(i, j);
                if x.is_zero() {
                    continue;
                }
                let v = x.valuation().bound();
                if best.is_none_or(|(_, _, bv)| v < bv) {
                    best = Some((i, j, v));
                }
            }
        }
        let Some((pi, pj, pv)) = best else {
            let bound = (k..r)
                .flat_map(|i| (k..c).map(move |j| (i, j)))
                .map(|(i, j)| w.get(i, j).precision())
                .min()
                .unwrap_or(m.precision());
            divisors.extend(std::iter::repeat_n(Valuation::AtLeast(bound), r.min(c) - k));
            break;
        };
        w.swap_rows(k, pi);
        left.swap_rows(k, pi);
        left_inv.swap_cols(k, pi);
        w.swap_cols(k, pj);
        right.swap_cols(k, pj);

        let pivot_inv = w.get(k, k).inverse().expect("pivot is nonzero");
        for i in k + 1..r {
            if w.get(i, k).is_zero() {
                let z = PadicElement::zero_to(field, w.get(i, k).precision());
                w.set(i, k, z);
                continue;
            }
            let factor = w.get(i, k) * &pivot_inv;
            for j in k + 1..c {
                let x = w.get(i, j) - &(&factor * w.get(k, j));
                w.set(i, j, x);
            }
            let z = PadicElement::zero_to(field, w.get(i, k).precision());
            w.set(i, k, z);
            for j in 0..r {
                let x = left.get(i, j) - &(&factor * left.get(k, j));
                left.set(i, j, x);
            }
            for a in 0..r {
                let x = left_inv.get(a, k) + &(left_inv.get(a, i) * &factor);
                left_inv.set(a, k, x);
            }
        }
        for j in k + 1..c {
            if w.get(k, j).is_zero() {
                continue;
            }
            let factor = w.get(k, j) * &pivot_inv;
            for a in 0..c {
                let x = right.get(a, j) - &(right.get(a, k) * &factor);
                right.set(a, j, x);
            }
            let z = PadicElement::zero_to(field, w.get(k, j).precision());
            w.set(k, j, z);
        }
        divisors.push(Valuation::Exact(pv));
        pivots += 1;
    }
    SmithForm { divisors, left, left_inv, right, pivots }
}

/// Rank certified against a valuation threshold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankCertificate {
    /// Number of divisors with exact valuation strictly below the threshold.
    pub rank: usize,
    /// Divisor valuations; anything not counted in `rank` is reported as `AtLeast`.
    pub divisors: Vec<Valuation>,
    pub threshold: i64,
}

impl RankCertificate {
    /// Whether the divisors not counted in `rank` are known to vanish modulo
    /// `p^threshold` (no precision was lost before the residual block vanished).
    pub fn deficiency_resolved(&self) -> bool {
        self.divisors[self.rank..]
            .iter()
            .all(|d| matches!(d, Valuation::AtLeast(b) if *b >= self.threshold))
    }
}

fn certify(smith: &SmithForm, threshold: i64) -> RankCertificate {
    let mut rank = 0;
    let divisors = smith
        .divisors
        .iter()
        .map(|d| match *d {
            Valuation::Exact(v) if v < threshold => {
                rank += 1;
                Valuation::Exact(v)
            }
            Valuation::Exact(_) => Valuation::AtLeast(threshold),
            Valuation::AtLeast(b) => Valuation::AtLeast(b.min(threshold)),
        })
        .collect();
    RankCertificate { rank, divisors, threshold }
}

/// Rank as the count of elementary divisors of valuation below `threshold`.
pub fn certified_rank(m: &PadicMatrix, threshold: i64) -> RankCertificate {
    certify(&smith_form(m), threshold)
}

/// Basis of the saturation `(span ⊗ Q_p) ∩ O^r` of the column span of an integral matrix.
pub fn saturate_lattice(m: &PadicMatrix) -> Result<PadicMatrix, PadicError> {
    if !m.is_integral() {
        return Err(PadicError::NotIntegral);
    }
    let threshold = m.precision();
    let smith = smith_form(m);
    let cert = certify(&smith, threshold);
    if !cert.deficiency_resolved() {
        return Err(PadicError::RankIndeterminate(threshold));
    }
    let cols: Vec<usize> = (0..cert.rank).collect();
    Ok(smith.left_inv.select_columns(&cols))
}

/// Columns spanning `{v : M v ≈ 0}` together with the rank certificate used.
pub fn right_kernel(m: &PadicMatrix, threshold: i64) -> (PadicMatrix, RankCertificate) {
    let smith = smith_form(m);
    let cert = certify(&smith, threshold);
    let cols: Vec<usize> = (cert.rank..m.cols()).collect();
    (smith.right.select_columns(&cols), cert)
}

/// Rows spanning `{w : w M ≈ 0}` together with the rank certificate used.
pub fn left_kernel(m: &PadicMatrix, threshold: i64) -> (PadicMatrix, RankCertificate) {
    let smith = smith_form(m);
    let cert = certify(&smith, threshold);
    let rows: Vec<usize> = (cert.rank..m.rows()).collect();
    (smith.left.select_rows(&rows), cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::make_field;

    #[test]
    fn smith_reconstructs() {
        let k = make_field(3, 2, 12).unwrap();
        let m = PadicMatrix::from_i64_rows(&k, &[vec![3, 9, 6], vec![6, 27, 3], vec![9, 0, 18]]);
        let s = smith_form(&m);
        let d = &(&s.left * &m) * &s.right;
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(d.get(i, j).is_zero());
                }
            }
        }
        assert!((&s.left * &s.left_inv).approx_eq(&PadicMatrix::identity(&k, 3)));
        assert_eq!(s.divisors[0], Valuation::Exact(1));
    }

    #[test]
    fn rank_examples() {
        let k = make_field(2, 1, 8).unwrap();
        let id = PadicMatrix::identity(&k, 4);
        let cert = certified_rank(&id, 8);
        assert_eq!(cert.rank, 4);
        assert!(cert.divisors.iter().all(|d| *d == Valuation::Exact(0)));

        let diag = PadicMatrix::from_i64_rows(&k, &[vec![1, 0], vec![0, 256]]);
        let cert = certified_rank(&diag, 8);
        assert_eq!(cert.rank, 1);
        assert_eq!(cert.divisors[1], Valuation::AtLeast(8));
        assert!(cert.deficiency_resolved());
    }

    #[test]
    fn saturation_examples() {
        let k = make_field(2, 1, 16).unwrap();
        let m = PadicMatrix::from_i64_rows(&k, &[vec![2], vec![2]]);
        let s = saturate_lattice(&m).unwrap();
        assert!(s.approx_eq(&PadicMatrix::from_i64_rows(&k, &[vec![1], vec![1]])));

        let m = PadicMatrix::from_i64_rows(&k, &[vec![4], vec![8]]);
        let s = saturate_lattice(&m).unwrap();
        assert!(s.approx_eq(&PadicMatrix::from_i64_rows(&k, &[vec![1], vec![2]])));

        let id = PadicMatrix::identity(&k, 3);
        assert!(saturate_lattice(&id).unwrap().approx_eq(&id));
    }
}

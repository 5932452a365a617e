//! Rank-`(n−1)` period matrices `X ∈ M_n(K)`. The row space of `X` is the
//! Lubin–Tate filtration `Fil_H`, the column space the Drinfeld filtration
//! `Fil_G`; the correspondence is `X ↦ ᵗX` and `GL_n(Q_p) × D^×` acts by
//! `(g, d)·X = ᵗg·X·ι(d)⁻¹`.

use std::sync::Arc;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::dieudonne::{iota_matrix, DElement};
use crate::padic::{
    left_kernel, smith_form, EntryJson, FieldDescriptor, MatrixJson, PadicElement, PadicError,
    PadicMatrix, Valuation,
};
use crate::semilinear::FieldJson;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PeriodError {
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error("period matrix must be square")]
    NotSquare,
    #[error("matrix has full rank {0}; a period matrix has rank n−1")]
    FullRank(usize),
    #[error("matrix has rank {rank} < n−1 = {expected}")]
    RankTooLow { rank: usize, expected: usize },
    #[error("rank cannot be certified at precision {0}")]
    Indeterminate(i64),
    #[error("hyperplane normal is indistinguishable from zero")]
    ZeroNormal,
    #[error("vectors do not span a hyperplane")]
    NotHyperplane,
    #[error("[K:Q_p] = {m} < n = {n}, so every hyperplane contains a rational vector")]
    FieldTooSmall { n: usize, m: usize },
    #[error("no certified point found after {0} attempts")]
    SamplingBudgetExhausted(usize),
    #[error("g is not invertible")]
    SingularG,
    #[error("g must have entries in Q_p")]
    GNotRational,
    #[error("d does not act on K^{n}")]
    DMismatch { n: usize },
    #[error("d is not invertible")]
    SingularD,
}

/// A hyperplane `{w : ℓ·w = 0}` in `K^n`, kept as a normal covector and a
/// spanning basis.
#[derive(Clone, Debug)]
pub struct Hyperplane {
    normal: PadicMatrix,
    basis: PadicMatrix,
}

impl Hyperplane {
    /// The normal is rescaled so its first entry of minimal valuation is 1.
    pub fn from_normal(normal: &PadicMatrix) -> Result<Self, PeriodError> {
        let field = normal.field();
        let n = normal.cols();
        if normal.rows() != 1 || n == 0 {
            return Err(PadicError::Dimension("normal must be a nonempty row".into()).into());
        }
        let mut k = None;
        let mut best = i64::MAX;
        for j in 0..n {
            if let Valuation::Exact(v) = normal.get(0, j).valuation() {
                if v < best {
                    best = v;
                    k = Some(j);
                }
            }
        }
        let k = k.ok_or(PeriodError::ZeroNormal)?;
        let inv = normal.get(0, k).inverse()?;
        let mut l = normal.scale(&inv);
        l.set(0, k, PadicElement::one(field));
        let others: Vec<usize> = (0..n).filter(|&j| j != k).collect();
        let basis = PadicMatrix::from_fn(field, n, n - 1, |i, c| {
            let j = others[c];
            if i == j {
                PadicElement::one(field)
            } else if i == k {
                -l.get(0, j)
            } else {
                PadicElement::zero(field)
            }
        });
        Ok(Hyperplane { normal: l, basis })
    }

    /// The hyperplane spanned by the columns of `span`.
    pub fn from_spanning(span: &PadicMatrix) -> Result<Self, PeriodError> {
        let n = span.rows();
        let (rows, cert) = left_kernel(span, span.precision());
        if cert.rank + 1 != n || !cert.deficiency_resolved() {
            return Err(PeriodError::NotHyperplane);
        }
        Self::from_normal(&rows.select_rows(&[0]))
    }

    pub fn ambient_dim(&self) -> usize {
        self.normal.cols()
    }

    pub fn field(&self) -> &Arc<FieldDescriptor> {
        self.normal.field()
    }

    pub fn normal(&self) -> &PadicMatrix {
        &self.normal
    }

    pub fn basis(&self) -> &PadicMatrix {
        &self.basis
    }

    /// Whether every column of `v` lies in the hyperplane at precision.
    pub fn contains(&self, v: &PadicMatrix) -> bool {
        (&self.normal * v).is_zero()
    }

    /// Equality as subspaces: the normals are proportional.
    pub fn same_subspace(&self, other: &Hyperplane) -> bool {
        let n = self.ambient_dim();
        if other.ambient_dim() != n {
            return false;
        }
        let (a, b) = (&self.normal, &other.normal);
        (0..n).all(|i| {
            (i + 1..n).all(|j| (&(a.get(0, i) * b.get(0, j)) - &(a.get(0, j) * b.get(0, i))).is_zero())
        })
    }

    /// `A·H` for invertible `A`, with normal `ℓ·A⁻¹`.
    pub fn image_under(&self, a: &PadicMatrix) -> Result<Hyperplane, PeriodError> {
        Self::from_normal(&(&self.normal * &a.inverse()?))
    }

    /// `{w·m : w ∈ H}` when `H` is read as a space of row vectors.
    pub fn right_translate(&self, m: &PadicMatrix) -> Result<Hyperplane, PeriodError> {
        self.image_under(&m.transpose())
    }

    pub fn to_json(&self) -> HyperplaneJson {
        HyperplaneJson { basis: self.basis.to_json(), normal: self.normal.to_json() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum OmegaVerdict {
    InOmega,
    /// A nonzero `v ∈ Q_p^n` lying in the hyperplane.
    NotInOmega { witness: Vec<PadicElement> },
    Indeterminate,
}

impl OmegaVerdict {
    pub fn is_in(&self) -> bool {
        matches!(self, OmegaVerdict::InOmega)
    }

    pub fn label(&self) -> &'static str {
        match self {
            OmegaVerdict::InOmega => "in_Omega",
            OmegaVerdict::NotInOmega { .. } => "not_in_Omega",
            OmegaVerdict::Indeterminate => "indeterminate",
        }
    }

    pub fn to_json(&self) -> OmegaJson {
        OmegaJson {
            verdict: self.label(),
            witness: match self {
                OmegaVerdict::NotInOmega { witness } => Some(witness.iter().map(EntryJson::from_element).collect()),
                _ => None,
            },
        }
    }
}

/// Whether the hyperplane avoids every nonzero `Q_p`-rational vector.
///
/// The coordinates of `ℓ` in the power basis of `K` form an `n × m` matrix
/// `C` over `Q_p`; `v ∈ Q_p^n` lies in the hyperplane iff `ᵗv·C = 0`.
pub fn omega_membership(h: &Hyperplane) -> OmegaVerdict {
    let c = h.normal.transpose().expand_columns_over_qp();
    let (rows, cert) = left_kernel(&c, c.precision());
    if cert.rank == h.ambient_dim() {
        OmegaVerdict::InOmega
    } else if cert.deficiency_resolved() {
        OmegaVerdict::NotInOmega { witness: rows.row(0) }
    } else {
        OmegaVerdict::Indeterminate
    }
}

/// A certified rank-`(n−1)` matrix with the kernels that cut out its filtrations.
#[derive(Clone, Debug)]
pub struct PeriodMatrix {
    x: PadicMatrix,
    divisors: Vec<Valuation>,
    /// `ℓ_G·X ≈ 0`
    left_normal: PadicMatrix,
    /// `X·ᵗℓ_H ≈ 0`
    right_normal: PadicMatrix,
}

impl PeriodMatrix {
    pub fn from_matrix(x: PadicMatrix) -> Result<Self, PeriodError> {
        if !x.is_square() || x.rows() == 0 {
            return Err(PeriodError::NotSquare);
        }
        let n = x.rows();
        let threshold = x.precision();
        let smith = smith_form(&x);
        let rank = smith.divisors.iter().filter(|d| matches!(d, Valuation::Exact(v) if *v < threshold)).count();
        let resolved = smith.divisors[rank..]
            .iter()
            .all(|d| matches!(d, Valuation::AtLeast(b) if *b >= threshold));
        if rank == n {
            return Err(PeriodError::FullRank(n));
        }
        if !resolved {
            return Err(PeriodError::Indeterminate(threshold));
        }
        if rank < n - 1 {
            return Err(PeriodError::RankTooLow { rank, expected: n - 1 });
        }
        let left_normal = smith.left.select_rows(&[n - 1]);
        let right_normal = smith.right.select_columns(&[n - 1]).transpose();
        Ok(PeriodMatrix { x, divisors: smith.divisors, left_normal, right_normal })
    }

    pub fn matrix(&self) -> &PadicMatrix {
        &self.x
    }

    pub fn n(&self) -> usize {
        self.x.rows()
    }

    pub fn field(&self) -> &Arc<FieldDescriptor> {
        self.x.field()
    }

    pub fn divisors(&self) -> &[Valuation] {
        &self.divisors
    }

    /// The row space, with normal `ℓ_H`.
    pub fn fil_h(&self) -> Hyperplane {
        Hyperplane::from_normal(&self.right_normal).expect("kernel vector of a unimodular transform is primitive")
    }

    /// The column space, with normal `ℓ_G`.
    pub fn fil_g(&self) -> Hyperplane {
        Hyperplane::from_normal(&self.left_normal).expect("kernel vector of a unimodular transform is primitive")
    }

    /// `ᵗX`.
    pub fn correspond(&self) -> PeriodMatrix {
        PeriodMatrix {
            x: self.x.transpose(),
            divisors: self.divisors.clone(),
            left_normal: self.right_normal.clone(),
            right_normal: self.left_normal.clone(),
        }
    }

    pub fn to_json(&self) -> PointJson {
        let fil_g = self.fil_g();
        PointJson {
            n: self.n(),
            field: FieldJson::of(self.field()),
            precision: self.x.precision(),
            x: self.x.to_json(),
            fil_h: self.fil_h().to_json(),
            omega: omega_membership(&fil_g).to_json(),
            fil_g: fil_g.to_json(),
        }
    }
}

/// `ᵗg·X·ι(d)⁻¹` for `g ∈ GL_n(Q_p)` (a matrix over the prime field) and `d ∈ D^×`.
pub fn act(g: &PadicMatrix, d: &DElement, pm: &PeriodMatrix) -> Result<PeriodMatrix, PeriodError> {
    let field = pm.field();
    let n = pm.n();
    if g.field().degree() != 1 || g.field().p() != field.p() || g.rows() != n || !g.is_square() {
        return Err(PeriodError::GNotRational);
    }
    if d.n() != n || !d.field().same_as(field) {
        return Err(PeriodError::DMismatch { n });
    }
    if g.det().valuation().exact().is_none() {
        return Err(PeriodError::SingularG);
    }
    if d.is_zero() {
        return Err(PeriodError::SingularD);
    }
    let g = PadicMatrix::embed(field, g);
    let d_inv = iota_matrix(d).inverse().map_err(|_| PeriodError::SingularD)?;
    PeriodMatrix::from_matrix(&(&g.transpose() * &pm.x) * &d_inv)
}

const SAMPLING_BUDGET: usize = 64;

/// Deterministic sampler: `X = B·C` with `B` a basis of a random hyperplane
/// certified in `Ω` and `C` a random `(n−1) × n` integral matrix.
pub fn random_point(n: usize, field: &Arc<FieldDescriptor>, seed: u64) -> Result<PeriodMatrix, PeriodError> {
    random_point_with(n, field, &mut crate::rng::seeded(seed))
}

pub fn random_point_with<R: Rng>(
    n: usize,
    field: &Arc<FieldDescriptor>,
    rng: &mut R,
) -> Result<PeriodMatrix, PeriodError> {
    let m = field.degree();
    if m < n {
        return Err(PeriodError::FieldTooSmall { n, m });
    }
    for _ in 0..SAMPLING_BUDGET {
        let normal = crate::rng::integral_matrix(field, 1, n, rng);
        if !(0..n).any(|j| normal.get(0, j).is_unit()) {
            continue;
        }
        let h = Hyperplane::from_normal(&normal)?;
        if !omega_membership(&h).is_in() {
            continue;
        }
        let c = crate::rng::integral_matrix(field, n - 1, n, rng);
        match PeriodMatrix::from_matrix(h.basis() * &c) {
            Ok(pm) if pm.fil_g().same_subspace(&h) => return Ok(pm),
            _ => continue,
        }
    }
    Err(PeriodError::SamplingBudgetExhausted(SAMPLING_BUDGET))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HyperplaneJson {
    pub basis: MatrixJson,
    pub normal: MatrixJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OmegaJson {
    pub verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<EntryJson>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PointJson {
    pub n: usize,
    pub field: FieldJson,
    pub precision: i64,
    #[serde(rename = "X")]
    pub x: MatrixJson,
    #[serde(rename = "fil_H")]
    pub fil_h: HyperplaneJson,
    #[serde(rename = "fil_G")]
    pub fil_g: HyperplaneJson,
    pub omega: OmegaJson,
}

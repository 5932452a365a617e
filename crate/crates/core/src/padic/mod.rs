//! Truncated arithmetic in unramified extensions of `Q_p`.

mod element;
mod field;
mod json;
mod matrix;
pub(crate) mod residue;
mod smith;

pub use element::{PadicElement, Valuation};
pub use field::{make_field, max_precision, FieldDescriptor};
pub use json::{ElementJson, EntryJson, MatrixJson};
pub use matrix::PadicMatrix;
pub use smith::{
    certified_rank, left_kernel, right_kernel, saturate_lattice, smith_form, RankCertificate,
    SmithForm,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PadicError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("precision must be at least 1")]
    PrecisionTooSmall,
    #[error("precision {precision} exceeds the word-size limit {max} for this prime")]
    PrecisionTooLarge { precision: u32, max: u32 },
    #[error("no irreducible polynomial of degree {m} found mod {p}")]
    NoIrreducible { p: u64, m: usize },
    #[error("modulus is not monic and irreducible mod p")]
    ModulusNotIrreducible,
    #[error("division by an element indistinguishable from zero")]
    DivisionByZero,
    #[error("matrix is singular at the working precision")]
    Singular,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix entries must be integral")]
    NotIntegral,
    #[error("rank cannot be certified at precision {0}")]
    RankIndeterminate(i64),
    #[error("malformed serialized value: {0}")]
    Malformed(String),
    #[error("internal error: {0}")]
    Internal(String),
}

//! Exact truncated `p`-adic linear algebra for the period-matrix description
//! of the Lubin–Tate and Drinfeld towers.
//!
//! The crate is organised bottom-up:
//!
//! * [`padic`]: unramified extensions `Q_{p^m}` at finite precision, Frobenius,
//!   Teichmüller lifts, Smith-style reduction, certified rank and saturation.
//! * [`semilinear`]: isocrystals, Newton slopes, Frobenius fixed points and
//!   weak admissibility on supplied sub-objects.
//! * [`dieudonne`]: the basepoint Dieudonné modules `D(H)`, `D(G)`, the
//!   division-algebra action and the isogeny `Δ`.
//! * [`periods`]: rank-`(n−1)` period matrices, their row and column
//!   filtrations, the transpose correspondence, Drinfeld half-space membership
//!   and the `GL_n(Q_p) × D^×` action.
//! * [`ledger`]: exact rational valuation identities (determinant laws, heights, CM periods).
//! * [`formal_group`]: the Lubin–Tate formal group with logarithm `Σ T^{p^{kh}}/p^k`.
//! * [`batch`]: data-parallel batch evaluation with a sequential fallback.

pub mod batch;
pub mod dieudonne;
pub mod formal_group;
pub mod ledger;
pub mod padic;
pub mod periods;
pub mod rng;
pub mod semilinear;

pub use padic::{make_field, FieldDescriptor, PadicElement, PadicMatrix, Valuation};

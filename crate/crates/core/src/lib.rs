//! Finite-field arithmetic, q-polynomials and exhaustive verification of
//! permutation-polynomial families.

pub mod agw;
pub mod error;
pub mod families;
pub mod gf;
pub mod linearized;
pub mod oracle;
pub mod poly;
pub mod report;

pub use error::{Error, Result};
pub use gf::{make_field, Elem, FieldCtx, FieldSpec, ResidueClass, Sign};
pub use linearized::LinPoly;
pub use poly::Poly;

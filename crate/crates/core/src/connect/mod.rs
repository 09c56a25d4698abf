//! Connection coefficients between families, finite identities among the
//! auxiliary polynomials, and the conversion formula.

pub(crate) mod formulas;
mod identities;
mod matrix;

pub use formulas::{connection_aw_asc, connection_aw_asc_form, connection_aw_c2h, connection_h_p, connection_w_p, AwAscForm};
pub use identities::{conversion_residual, conversion_sides, ConversionResidual, identity_residual, IdentityKind, Residual};
pub use matrix::{apply_connection, ConnectionMatrix, Direction};

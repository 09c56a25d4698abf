//! Polynomial families of the Askey-Wilson scheme and their auxiliaries.

pub mod classical;
pub mod coeffs;
pub mod params;
pub mod rescaled;
pub mod scheme;

pub use classical::{chebyshev_u, classical, hermite_var, rogers_szego, ClassicalKind};
pub use coeffs::{aw_recurrence_coeffs, kls_ladder_coeffs};
pub use params::{omega, Family, SchemeParams};
pub use rescaled::{eval_rescaled, rescaled_sequence, RescaledKind};
pub use scheme::{
    b_sequence, eval_b, eval_g, eval_h, eval_p, eval_scheme, eval_sequence, eval_w, g_sequence, h_sequence,
    p_sequence, w_sequence, PolySequence,
};

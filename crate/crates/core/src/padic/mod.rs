//! Exact arithmetic in `O_F = W(F_{p^f})` at a fixed absolute precision `p^N`.
//!
//! The precision model is a single modulus per context: every value is a
//! residue modulo `p^N`. Operations that divide by `p` do so only where the
//! quotient is exact as an integer; the Smith normal form and determinant use
//! elementary operations only, so their outputs are exact modulo `p^N`.

mod context;
mod element;
mod matrix;
mod newton;
pub(crate) mod ring;
mod semisimple;
mod snf;

pub use context::PrecisionContext;
pub use element::{teichmuller, teichmuller_lift, OFElement};
pub use matrix::OFMatrix;
pub use newton::{
    characteristic_polynomial, frobenius_norm_product, inverse_semilinear_stable_rank,
    newton_slopes, residue_rank, semilinear_stable_rank, Slope,
};
pub use semisimple::{is_semisimple_at, RationalMatrix};
pub use snf::{elementary_divisors, smith_normal_form, SmithForm};

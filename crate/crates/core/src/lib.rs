//! Exact p-adic computer algebra for strongly divisible filtered φ-modules in
//! the Fontaine–Laffaille range: the Wach lattice constructor, Tamagawa and
//! determinant-line exponents, and truncated Iwasawa-algebra bookkeeping.

pub mod aplus;
pub mod error;
pub mod cep;
pub mod filmod;
pub mod iwasawa;
pub mod wach;
pub mod padic;

pub use error::{Error, Result};

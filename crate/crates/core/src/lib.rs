//! Entropy and pressure of higher-rank subshifts of finite type.
//!
//! A rank-`r` subshift of finite type is given by `r` commuting 0-1 matrices
//! `M_1, ..., M_r` over a finite alphabet. Its finite pieces are words that
//! label lattice boxes `[0, m] ⊂ Z_+^r`, and the shifts `T^p` act by
//! translation. This crate
//!
//! * validates matrix families and counts words exactly ([`matrices`], [`words`]);
//! * computes the entropy `log r(M^p)` of `T^p` and cross-checks it against
//!   Bowen separated-set counts ([`dynamics`]);
//! * computes the pressure of locally constant potentials from cylinder sums
//!   and a weighted transfer matrix ([`pressure`]);
//! * checks the partial-isometry patterns that appear when the canonical
//!   shift of the graph algebra is compressed to matrix units ([`nclemma`]);
//! * sweeps small families for the gap `Σ log r(M_i) - log r(M_1 ⋯ M_r)` ([`search`]).
//!
//! Hot loops run through [`exec::Exec`], parallel with the `parallel`
//! feature (default) and sequential otherwise.

pub mod bignum;
pub mod dynamics;
pub mod error;
pub mod exec;
pub mod matrices;
pub mod nclemma;
pub mod numfmt;
pub mod pressure;
pub mod search;
pub mod shape;
pub mod words;

pub use error::{Error, Result};
pub use exec::Exec;
pub use matrices::{MatrixFamily, ZeroOneMatrix};
pub use shape::Shape;
pub use words::Word;

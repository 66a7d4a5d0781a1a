//! Exact univariate polynomial arithmetic over arbitrary-precision rationals.
//!
//! Everything here is exact: coefficients are `BigRational`, divisions check
//! their remainders, Sturm chains are carried in integer form, and interval
//! evaluation returns rational enclosures with no rounding. Floating point
//! only appears at the very edge (`Poly::eval_f64`, `RootInterval::mid_f64`)
//! when a caller wants an approximate value of something already certified.

mod error;
mod poly;
mod roots;

pub use error::PolyError;
pub use poly::{rat, rat_int, rat_to_f64, Poly, Rational};
pub use roots::{
    eval_interval, is_squarefree, round_out, sqrt_enclosure, RootInterval, SturmChain,
};

//! Exact construction and verification of digit-expansion self-similar sets.
//!
//! The crate builds truncated self-similar sets and product sets from digit
//! expansions in an integer radix, equips them with discrete measures, and
//! verifies covering-number, uniformity, regularity and Frostman-type bounds
//! with exact integer arithmetic end to end. All pass/fail decisions are made
//! on exact rationals (fractional powers are compared through integer
//! powers); floating point appears only in human-readable decimal renderings.

pub mod covering;
pub mod error;
pub mod exact;
pub mod fractal;
pub mod measure;
pub mod params;
pub mod product;
pub mod radix;
pub mod regularity;

pub use error::{Error, Result};
pub use exact::RootRational;
pub use fractal::{DigitFractal, DiscreteSet, DEFAULT_SIZE_LIMIT};
pub use params::{PaperParams, ToyConfig};
pub use radix::{make_base, Grid, RadixBase, Rational, Scale, ScaledInt};

//! Option pricing from the opinion dynamics of market players.
//!
//! The community of players is a point `(alpha, beta)` of conditional
//! probabilities diffusing between reflecting herding limits. Its bull ratio
//! drives the stock price through a log-odds market function; Monte Carlo
//! averages of call payoffs are inverted to implied volatilities and the model
//! parameters are fitted to market surfaces with a multi-start simplex.
//!
//! This crate is `no_std` (with `alloc`) and holds only the numerics. File
//! formats, the command line and the multi-threaded path engine live in the
//! `herdprice` crate.
#![no_std]
// `!(x > 0.0)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
extern crate alloc;

pub mod bs;
pub mod calibration;
pub mod dynamics;
pub mod error;
pub mod math;
pub mod mc;
pub mod params;
pub mod population;
pub mod pricemap;
pub mod rng;
pub mod simplex;
pub mod surface;

pub use error::{Error, Result};

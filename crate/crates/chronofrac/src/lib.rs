//! Fractional (noninteger-order) differentiation and integration on
//! arbitrary time scales: closed sets of reals mixing continuous intervals
//! with isolated points, uniform grids, and Cantor-like sets.

pub mod cli;
pub mod error;
pub mod expr;
pub mod fracderiv;
pub mod integral;
pub mod laws;
pub mod number;
pub mod timescale;

pub use error::{Error, Result};
pub use expr::Expr;
pub use fracderiv::{
    chain_rule_witness, delta_derivative, frac_derivative, higher_frac_derivative,
    limit_quotient, power_rule_derivative, rpow, DerivResult, FnOnScale, FractionalOrder,
    HigherOrder, LimitParams, Method, ScaleFn,
};
pub use integral::{
    cauchy_frac_integral, delta_antiderivative, delta_integral, frac_indefinite_integral,
    Antiderivative, FracIntegralFn,
};
pub use timescale::{Component, PointClass, Segment, Side, TimeScale};

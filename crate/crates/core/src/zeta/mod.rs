//! Explicit formulas over zeta zeros.
//!
//! Sieved values of `Λ`, `μ` and `λ` give the Chebyshev, Mertens and
//! Liouville summatory functions. Their normalized versions on the log scale
//! `t = log x` expand as sums of `e^{iγt}` over zero ordinates `γ` plus an
//! elementary remainder; [`build_explicit_model`] turns a [`ZeroTable`] into
//! the oscillating part as a [`FourierModel`](crate::FourierModel).

mod analytic;
mod asymptotics;
mod explicit;
mod sieve;
mod table;

pub use analytic::{
    zeta_evaluate, zeta_prime_on_line, DEFAULT_DERIVATIVE_STEP, DEFAULT_TERMS, MAX_HEIGHT, MULTIPLE_ZERO_THRESHOLD,
};
pub use asymptotics::{gonek_diagnostic, gonek_report, gonek_sum, zero_counting_check, CountingRow, ZeroCounting};
pub use explicit::{
    build_explicit_model, explicit_formula_check, explicit_remainder, explicit_truncation_scan, liouville_constant,
    normalized_summatory, strict_decrease_report, ExplicitCheck, ExplicitKind, ExplicitModel,
};
pub use sieve::{sieve, summatory, ArithmeticFunction, ArithmeticTables, Convention};
pub use table::{ingest_zeros, ZeroTable, ORDINATE_MATCH_TOLERANCE, ZETA_PRIME_HEADER};

//! Intelligent (uncertainty-saturating) states for su(1,1), su(2) and their
//! q-deformations in the Dyson boson realization.
//!
//! The crate is organized bottom-up:
//!
//! - [`qnum`]: q-numbers `[x]_q` and the ratio `[x]_q / x`.
//! - [`special`]: exact terminating `2F1`, log rising-factorial ratios and
//!   Pollaczek polynomials.
//! - [`repr`]: truncated ladder-operator matrices and their algebra checks.
//! - [`states`]: the eigenvalue problem `(α·lower + β·raise)ψ = 2ηψ`, solved by
//!   forward recurrence, closed form and diagonalization, plus uncertainty
//!   verification.

pub mod error;
pub mod qnum;
pub mod repr;
pub mod special;
pub mod states;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use qnum::{q_bracket, q_bracket_ratio, DeformationParameter};
pub use repr::{
    AlgebraReport, Branch, OperatorMatrix, OperatorTriple, Realization, RepresentationSpec, Stripe,
};
pub use special::{
    hyp2f1_terminating, log_gamma_ratio, pollaczek, pollaczek_spin, selected_exponent_mode,
    ExponentMode, PollaczekArgs,
};
pub use states::{
    eigen_residual, ratio_deviation, solve_by_diagonalization, solve_closed_form,
    solve_recurrence, solve_recurrence_with, verify, Eigenpair, IsParams, RecurrenceOptions,
    StateVector, VerificationReport, DEFAULT_TAIL_TOLERANCE,
};

//! Exact linear-programming feasibility and the noncontextuality encodings.

mod encode;
mod simplex;

pub use encode::{
    decide_noncontextual, decide_noncontextual_with, encode_multimaximal, encode_reduced_coupling,
    verify_multimaximal_coupling, verify_reduced_coupling, CouplingProgram, DecideError, Encoding,
    Evidence, FarkasCertificate, NoncontextualityVerdict, RowLabel,
};
pub use simplex::{
    check_certificate, check_witness, maximize, solve_feasibility, solve_feasibility_with, Constraint,
    LpError, LpOptimum, LpOutcome, LpProblem, SolverConfig, DEFAULT_MAX_COLUMNS,
};

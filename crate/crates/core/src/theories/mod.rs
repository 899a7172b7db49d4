//! Table generators (quantum and local hidden-variable), CHSH and GHZ evaluators.

mod chsh;
mod ghz;
mod models;
mod optimize;
mod sampling;

pub use chsh::{
    chsh, chsh_sweep, correlation, enumerate_deterministic_chsh, pc_sweep, pc_sweep_csv,
    random_angle_sweep, random_deterministic_mixture, singlet_chsh, sweep_csv, tsirelson_search,
    BellResult, Correlation, SweepRow, TsirelsonSearch, CLASSICAL_BOUND, PC_SWEEP_CSV_HEADER,
    SINGLET_OPTIMAL_ANGLES, SWEEP_CSV_HEADER, TSIRELSON_BOUND,
};
pub use ghz::{
    ghz_closed_form, ghz_conditional_ladder, ghz_extrapolation_residual, ghz_parity_check,
    ghz_parity_table, parity_sign, GhzLadderReport, GhzParityReport, LadderRow, ParityRow,
};
pub use models::{
    table_from_lhv, table_from_quantum, DeterministicStrategy, LhvEntry, LocalHvModel, QuantumModel,
};
pub use optimize::{golden_section_max, grid_then_golden};
pub use sampling::sample_table;

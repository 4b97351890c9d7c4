//! Local-law experiments: parameter arithmetic, discretized spectral
//! domains, sweeps of `m_N` against `m_MP`, rigidity and delocalization
//! scans, and a descent in `η` that mirrors the bootstrap structure.

mod descent;
mod lattice;
mod params;
mod scans;

pub use descent::{eta_ladder, multiscale_descent, DescentOptions, DescentRow, DescentTable};
pub use lattice::{domain_lattice, lattice_continuity, ContinuityReport, DomainGrid, LatticeOptions, LatticePoint};
pub use params::{
    beta_bookkeeping, choice_inputs, exponent_report, exponent_report_general, theta_params, AffineForm, BetaBookkeeping,
    ExponentInputs, ExponentReport, ThetaParams,
};
pub use scans::{
    bulk_energy_grid, deloc_scan, envelope_constant, locallaw_sweep, rigidity_scan, DelocRow, DelocScan, RigidityRow, RigidityScan,
    SeedSummary, SweepResult, SweepRow,
};

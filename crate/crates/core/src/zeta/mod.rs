//! Zeta functions built from an orbit database: Euler products, traces of
//! transfer operators, Fredholm determinants, entropy, orbit counting and
//! grid scans.

mod counting;
mod entropy;
mod euler;
mod scan;
mod transfer;

pub use counting::{count_pi, counting_report, li, CountingRow};
pub use entropy::{entropy, EntropyEstimate};
pub use euler::{euler_selberg, euler_zeta, l_euler_selberg, l_euler_zeta, selberg_truncation_bound};
pub use scan::{linspace, scan, ScanFlag, ScanGrid, ScanTarget, Scanner, SCAN_MERGE_TOL};
pub use transfer::{
    fredholm_det, fredholm_det_exp, log_selberg_from_tables, selberg_via_determinants, trace, zeta_from_table,
    zeta_via_determinants, FredholmDet, TermTable, TraceTable,
};

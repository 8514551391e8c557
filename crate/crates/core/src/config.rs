//! Every cutoff and tolerance the library enforces, in one place. Nothing
//! below is baked into an algorithm; callers pass these down explicitly.

use std::path::PathBuf;

/// Largest n for a dense exact-integer n x n matrix.
pub const DENSE_MAX: u64 = 512;
/// Largest n for the interpolation characteristic-polynomial oracle and for
/// monomial-basis expansion.
pub const ORACLE_MAX: u64 = 64;
/// Hard ceiling for the smallest-prime-factor table.
pub const TABLE_MAX: u64 = 1 << 31;
/// Default segment length for the segmented omega sieve.
pub const SEGMENT_SIZE: u64 = 1 << 16;
/// Relative residual accepted for a polished polynomial root.
pub const ROOT_TOL: f64 = 1e-12;
/// Relative successive-estimate tolerance for power iteration.
pub const POWER_TOL: f64 = 1e-10;
/// Iteration cap for power iteration.
pub const POWER_MAX_ITER: u32 = 10_000;

/// Dimension caps for the exact dense paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Guards {
    pub dense_max: u64,
    pub oracle_max: u64,
}

impl Default for Guards {
    fn default() -> Self {
        Guards {
            dense_max: DENSE_MAX,
            oracle_max: ORACLE_MAX,
        }
    }
}

/// Convergence targets for the floating-point spectral routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub root_tol: f64,
    pub power_tol: f64,
    pub power_max_iter: u32,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            root_tol: ROOT_TOL,
            power_tol: POWER_TOL,
            power_max_iter: POWER_MAX_ITER,
        }
    }
}

/// Aggregate runtime configuration as consumed by the command-line driver.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Worker threads for the data-parallel paths; 0 keeps the library default.
    pub threads: usize,
    pub segment_size: u64,
    pub tolerances: Tolerances,
    pub guards: Guards,
    /// Where command output goes; `None` means stdout.
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            threads: 0,
            segment_size: SEGMENT_SIZE,
            tolerances: Tolerances::default(),
            guards: Guards::default(),
            output: None,
        }
    }
}

//! Cross-route verification. Everything the library computes by a fast path
//! is recomputed here by an independent slow path and compared case by case:
//! sieve against trial division, sparse factorization against dense products,
//! closed-form polynomial coefficients against determinant interpolation,
//! root finding against power iteration. Each suite reports how many cases it
//! checked and how many disagreed; a disagreement is a bug somewhere, never
//! acceptable noise.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::arith::{
    is_unitary_divisor, k_values, primorial, unitary_convolve, unitary_divisors, OmegaHistogram,
    OmegaTable, StirlingTable,
};
use crate::charpoly::{
    dstar, expand_to_monomial, from_sstar, multiplicity_record, reduced_poly,
    root_one_multiplicity, sstar_all,
};
use crate::config::{Guards, Tolerances};
use crate::matrix::{charpoly_oracle, sparse_multiply, DenseIntMatrix, SparseUnitaryMatrix};
use crate::spectral::{dominant_power_iteration, nontrivial_eigenvalues};
use crate::Result;

/// Fault injection for exercising the suites themselves. `SstarPlusOne`
/// corrupts the S_2 coefficient feed on the closed-form side only, so the
/// matrix suites keep passing while the polynomial comparison must fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tamper {
    None,
    SstarPlusOne,
}

/// Outcome of one suite: deterministic case count, failure count, and the
/// first disagreement rendered for humans.
#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: u64,
    pub failures: u64,
    pub first_failure: Option<String>,
}

impl SuiteResult {
    fn new(name: &'static str) -> SuiteResult {
        SuiteResult {
            name,
            cases: 0,
            failures: 0,
            first_failure: None,
        }
    }

    fn case(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(detail());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Run every suite, with ranges clamped to `max_n` (and to each suite's own
/// cost ceiling). The result order is fixed; byte-identical reports for
/// identical inputs regardless of thread count.
pub fn run_all(
    max_n: u64,
    tol: &Tolerances,
    guards: &Guards,
    tamper: Tamper,
) -> Result<Vec<SuiteResult>> {
    if max_n == 0 {
        return Err(crate::Error::contract("verification needs max_n >= 1"));
    }
    let table = OmegaTable::build(max_n.min(1_000_000))?;
    Ok(vec![
        omega_table_suite(&table, max_n),
        mobius_convolution_suite(&table, max_n)?,
        delta_orthogonality_suite(&table, max_n)?,
        mertens_partition_suite(&table, max_n)?,
        histogram_segments_suite(max_n)?,
        mertens_histogram_suite(&table, max_n)?,
        primorial_steps_suite(&table, max_n),
        factorization_suite(max_n, guards)?,
        determinant_suite(&table, max_n, guards)?,
        trace_identities_suite(max_n)?,
        charpoly_match_suite(max_n, guards, tamper)?,
        multiplicity_bounds_suite(&table, max_n),
        coefficient_traces_suite(&table, max_n)?,
        eigen_residuals_suite(max_n, tol)?,
        spectral_cross_suite(max_n, tol)?,
    ])
}

/// omega from the linear sieve vs a from-scratch trial-division recount.
fn omega_table_suite(table: &OmegaTable, max_n: u64) -> SuiteResult {
    let mut s = SuiteResult::new("omega-table");
    for m in 1..=max_n.min(10_000) {
        let mut rest = m;
        let mut count = 0u32;
        let mut p = 2u64;
        while p * p <= rest {
            if rest % p == 0 {
                count += 1;
                while rest % p == 0 {
                    rest /= p;
                }
            }
            p += 1;
        }
        if rest > 1 {
            count += 1;
        }
        let got = table.omega(m);
        s.case(got == count, || {
            format!("omega({m}) = {got} from the sieve, {count} by trial division")
        });
    }
    s
}

/// The unitary Mobius function inverts the all-ones function: their unitary
/// convolution is 1 at m = 1 and 0 everywhere else.
fn mobius_convolution_suite(table: &OmegaTable, max_n: u64) -> Result<SuiteResult> {
    let mut s = SuiteResult::new("mobius-convolution");
    let cap = max_n.min(10_000);
    let mut f = vec![0i64; cap as usize + 1];
    let mut g = vec![0i64; cap as usize + 1];
    for m in 1..=cap {
        f[m as usize] = table.mu_star(m)?;
        g[m as usize] = 1;
    }
    let h = unitary_convolve(&f, &g)?;
    for m in 1..=cap {
        let want = i64::from(m == 1);
        let got = h[m as usize];
        s.case(got == want, || {
            format!("(mu* conv 1)({m}) = {got}, expected {want}")
        });
    }
    Ok(s)
}

/// Orthogonality of the unitary Mobius function: summing mu*(d) over the
/// unitary divisors d of j whose cofactor j/d still has i as a unitary
/// divisor leaves exactly the indicator of i = j.
fn delta_orthogonality_suite(table: &OmegaTable, max_n: u64) -> Result<SuiteResult> {
    let mut s = SuiteResult::new("delta-orthogonality");
    let cap = max_n.min(100);
    for j in 1..=cap {
        let divisors = unitary_divisors(j);
        for i in 1..=cap {
            let mut acc = 0i64;
            for &d in &divisors {
                if is_unitary_divisor(i, j / d) {
                    acc += table.mu_star(d)?;
                }
            }
            let want = i64::from(i == j);
            s.case(acc == want, || {
                format!("delta sum at i = {i}, j = {j}: got {acc}, expected {want}")
            });
        }
    }
    Ok(s)
}

/// Partition of unity: for every i <= n, the coprime-restricted Mertens
/// blocks M*(floor(n/k), k) over the unitary multiples k of i sum to 1.
fn mertens_partition_suite(table: &OmegaTable, max_n: u64) -> Result<SuiteResult> {
    let mut s = SuiteResult::new("mertens-partition");
    let cap = max_n.min(200);
    for n in 1..=cap {
        for i in 1..=n {
            let mut acc = 0i64;
            for k in 1..=n {
                if is_unitary_divisor(i, k) {
                    acc += table.mertens_star_coprime(n / k, k)?;
                }
            }
            s.case(acc == 1, || {
                format!("Mertens blocks at i = {i}, n = {n} sum to {acc}, expected 1")
            });
        }
    }
    Ok(s)
}

/// The segmented histogram is invariant under segment size and matches the
/// in-memory table route.
fn histogram_segments_suite(max_n: u64) -> Result<SuiteResult> {
    let mut s = SuiteResult::new("histogram-segments");
    let cap = max_n.min(20_000);
    let reference = OmegaHistogram::from_table(&OmegaTable::build(cap)?);
    for size in [2, 16, 1024, 1 << 16] {
        let segmented = OmegaHistogram::build(cap, size)?;
        s.case(segmented == reference, || {
            format!(
                "segment size {size} at limit {cap}: counts {:?} vs table {:?}",
                segmented.counts(),
                reference.counts()
            )
        });
    }
    Ok(s)
}

/// Mertens values from the segmented histogram vs the prefix sum over the
/// sieve table, on a geometric ladder of limits.
fn mertens_histogram_suite(table: &OmegaTable, max_n: u64) -> Result<SuiteResult> {
    let mut s = SuiteResult::new("mertens-histogram");
    for x in [1, 2, 8, 10, 100, 1_000, 10_000, 100_000, 1_000_000] {
        if x > max_n.min(table.limit()) {
            break;
        }
        let got = OmegaHistogram::build(x, 1 << 16)?.mertens_star();
        let want = table.mertens_star(x)?;
        s.case(got == want, || {
            format!("M*({x}) = {got} from the histogram, {want} from the table")
        });
    }
    Ok(s)
}

/// k_n from the running maximum of omega vs the primorial characterization:
/// the (k_n - 1)-st primorial is <= n and the k_n-th exceeds it.
fn primorial_steps_suite(table: &OmegaTable, max_n: u64) -> SuiteResult {
    let mut s = SuiteResult::new("primorial-steps");
    let ks = k_values(table);
    let mut primorials = Vec::new();
    let mut k = 0u32;
    loop {
        let p = primorial(k);
        primorials.push(p.clone());
        if p > BigInt::from(table.limit()) {
            break;
        }
        k += 1;
    }
    for n in 1..=max_n.min(table.limit()) {
        let k = ks[n as usize];
        if n == 1 {
            s.case(k == 0, || format!("k_1 = {k}, expected 0"));
            continue;
        }
        let big_n = BigInt::from(n);
        let ok = k >= 1
            && (k as usize) < primorials.len()
            && primorials[k as usize - 1] <= big_n
            && big_n < primorials[k as usize];
        s.case(ok, || {
            format!("k_{n} = {k} fails the primorial bracketing")
        });
    }
    s
}

/// The sparse factorization: S_n T_n multiplied out densely equals R*_n.
fn factorization_suite(max_n: u64, guards: &Guards) -> Result<SuiteResult> {
    let mut s = SuiteResult::new("factorization");
    for n in 2..=max_n.min(200).min(guards.dense_max) {
        let left = sparse_multiply(
            &SparseUnitaryMatrix::build_s(n)?,
            &SparseUnitaryMatrix::build_t(n)?,
            guards,
        )?;
        let right = DenseIntMatrix::from_sparse(&SparseUnitaryMatrix::build_rstar(n)?, guards)?;
        s.case(left == right, || {
            format!("S_{n} T_{n} differs from the direct matrix")
        });
    }
    Ok(s)
}

/// Exact dense determinants vs the sieve-side Mertens value.
fn determinant_suite(table: &OmegaTable, max_n: u64, guards: &Guards) -> Result<SuiteResult> {
    let mut s = SuiteResult::new("determinant");
    for n in 1..=max_n.min(60).min(guards.dense_max) {
        let dense = DenseIntMatrix::from_sparse(&SparseUnitaryMatrix::build_rstar(n)?, guards)?;
        let det = dense.bareiss_det();
        let want = BigInt::from(table.mertens_star(n)?);
        s.case(det == want, || {
            format!("det at n = {n}: Bareiss gives {det}, sieve gives {want}")
        });
    }
    Ok(s)
}

/// Trace identities read off the sparse matrix: sum of eigenvalues is n,
/// sum of squares is 3n - 2.
fn trace_identities_suite(max_n: u64) -> Result<SuiteResult> {
    let mut s = SuiteResult::new("trace-identities");
    for n in 1..=max_n.min(200) {
        let m = SparseUnitaryMatrix::build_rstar(n)?;
        let tr = m.trace();
        let tr2 = m.trace_sq();
        let want2 = 3 * n as i64 - 2;
        s.case(tr == n as i64 && tr2 == want2, || {
            format!("traces at n = {n}: ({tr}, {tr2}), expected ({n}, {want2})")
        });
    }
    Ok(s)
}

/// The closed-form polynomial (optionally tampered) against the
/// interpolation oracle, plus the eigenvalue-1 multiplicity extracted from
/// the oracle by synthetic division.
fn charpoly_match_suite(max_n: u64, guards: &Guards, tamper: Tamper) -> Result<SuiteResult> {
    let mut s = SuiteResult::new("charpoly-match");
    for n in 1..=max_n.min(60).min(guards.oracle_max) {
        let hist = OmegaHistogram::build(n, 1 << 10)?;
        let mut sstar = sstar_all(&hist);
        if tamper == Tamper::SstarPlusOne && sstar.len() > 2 {
            sstar[2] += 1;
        }
        let closed = expand_to_monomial(&from_sstar(n, &sstar)?, guards)?;
        let oracle = charpoly_oracle(n, guards)?;
        s.case(closed == oracle, || {
            format!("closed-form coefficients differ from the oracle at n = {n}")
        });
        let mult = root_one_multiplicity(&oracle);
        let want = n - hist.k_n() as u64;
        s.case(mult == want, || {
            format!("oracle multiplicity of 1 at n = {n} is {mult}, expected {want}")
        });
    }
    Ok(s)
}

/// m_n = n - k_n stays inside its proved window, and the asymptotic slack
/// is nonnegative wherever defined.
fn multiplicity_bounds_suite(table: &OmegaTable, max_n: u64) -> SuiteResult {
    let mut s = SuiteResult::new("multiplicity-bounds");
    let ks = k_values(table);
    for n in 1..=max_n.min(table.limit()) {
        let r = multiplicity_record(n, ks[n as usize]);
        let lower_ok = r.lower.is_none_or(|b| b <= r.m_n as i64);
        let upper_ok = r.upper.is_none_or(|b| r.m_n as i64 <= b);
        let gap_ok = r.ostar_gap.is_none_or(|g| g >= 0.0);
        s.case(lower_ok && upper_ok && gap_ok, || {
            format!(
                "multiplicity window at n = {n}: m = {}, lower {:?}, upper {:?}, gap {:?}",
                r.m_n, r.lower, r.upper, r.ostar_gap
            )
        });
    }
    s
}

/// Trace identities in exact coefficient form, for every n: the polynomial
/// has no second-highest term (eigenvalues sum to n) and its third-highest
/// coefficient is -(n - 1) (squares sum to 3n - 2). Cross-checked against
/// the matrix traces on a sparse ladder.
fn coefficient_traces_suite(table: &OmegaTable, max_n: u64) -> Result<SuiteResult> {
    let mut s = SuiteResult::new("coefficient-traces");
    let cap = max_n.min(10_000).min(table.limit());
    let st = StirlingTable::build(32, 32);
    let mut counts = [0u64; 33];
    let mut top = 0u32;
    for n in 1..=cap {
        let w = table.omega(n);
        counts[w as usize] += 1;
        top = top.max(w);
        let mut sstar = vec![BigInt::ZERO; top as usize + 1];
        for (k, slot) in sstar.iter_mut().enumerate().skip(1) {
            let mut acc = BigInt::ZERO;
            for j in k..=top as usize {
                acc += dstar(&st, k as u32, j as u32) * counts[j];
            }
            *slot = acc;
        }
        let p = from_sstar(n, &sstar)?;
        let no_subleading = p.coeff(n - 1).is_zero() || n == 1;
        let third_ok = n < 2 || p.coeff(n - 2) == BigInt::from(-(n as i64 - 1));
        s.case(no_subleading && third_ok, || {
            format!(
                "coefficient traces at n = {n}: [u^(n-1)] = {}, [u^(n-2)] = {}",
                p.coeff(n.saturating_sub(1)),
                p.coeff(n.saturating_sub(2))
            )
        });
    }
    for n in [500, 1_000, 2_000, 5_000, 10_000] {
        if n > max_n {
            break;
        }
        let m = SparseUnitaryMatrix::build_rstar(n)?;
        let ok = m.trace() == n as i64 && m.trace_sq() == 3 * n as i64 - 2;
        s.case(ok, || {
            format!(
                "matrix traces at n = {n}: ({}, {}), expected ({n}, {})",
                m.trace(),
                m.trace_sq(),
                3 * n - 2
            )
        });
    }
    Ok(s)
}

/// Root finding on the reduced polynomial: right root count, residuals
/// accepted, and the two exact power sums recovered within floating error.
fn eigen_residuals_suite(max_n: u64, tol: &Tolerances) -> Result<SuiteResult> {
    let mut s = SuiteResult::new("eigen-residuals");
    for n in [8u64, 30, 100, 1_000, 10_000] {
        if n > max_n {
            break;
        }
        let hist = OmegaHistogram::build(n, 1 << 14)?;
        let (q, k_n, _) = reduced_poly(&hist)?;
        match nontrivial_eigenvalues(&q, tol.root_tol) {
            Err(e) => s.case(false, || format!("root finding failed at n = {n}: {e}")),
            Ok(report) => {
                s.case(report.eigenvalues.len() == k_n as usize, || {
                    format!(
                        "{} roots at n = {n}, expected {k_n}",
                        report.eigenvalues.len()
                    )
                });
                let mu: Vec<_> = report
                    .eigenvalues
                    .iter()
                    .map(|z| z - num_complex::Complex64::new(1.0, 0.0))
                    .collect();
                let p1: num_complex::Complex64 = mu.iter().sum();
                let scale1 = 1.0 + mu.iter().map(|z| z.norm()).sum::<f64>();
                s.case(p1.norm() <= 1e-9 * scale1, || {
                    format!("power sum p1 = {p1} at n = {n}, expected 0")
                });
                let p2: num_complex::Complex64 = mu.iter().map(|z| z * z).sum();
                let want2 = 2.0 * (n as f64 - 1.0);
                s.case((p2 - want2).norm() <= 1e-9 * want2, || {
                    format!("power sum p2 = {p2} at n = {n}, expected {want2}")
                });
            }
        }
    }
    Ok(s)
}

/// The dominant eigenvalue by two unrelated methods: polynomial roots vs
/// power iteration on the sparse matrix, to eight digits.
fn spectral_cross_suite(max_n: u64, tol: &Tolerances) -> Result<SuiteResult> {
    let mut s = SuiteResult::new("spectral-cross");
    for n in [100u64, 1_000, 10_000, 100_000] {
        if n > max_n {
            break;
        }
        let hist = OmegaHistogram::build(n, 1 << 14)?;
        let (q, _, _) = reduced_poly(&hist)?;
        let by_roots = match nontrivial_eigenvalues(&q, tol.root_tol) {
            Ok(r) => r.lambda_plus,
            Err(e) => {
                s.case(false, || format!("root finding failed at n = {n}: {e}"));
                continue;
            }
        };
        let m = SparseUnitaryMatrix::build_rstar(n)?;
        match dominant_power_iteration(&m, tol.power_tol, tol.power_max_iter) {
            Err(e) => s.case(false, || format!("power iteration failed at n = {n}: {e}")),
            Ok(by_power) => {
                s.case((by_roots - by_power).abs() <= 1e-8 * by_roots.abs(), || {
                    format!("lambda+ at n = {n}: {by_roots} by roots, {by_power} by power")
                });
            }
        }
    }
    Ok(s)
}

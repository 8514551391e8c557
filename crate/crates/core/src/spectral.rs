//! Non-trivial eigenvalues. The full spectrum is the eigenvalue 1 with
//! multiplicity m_n plus the k_n roots of the reduced polynomial q; those
//! roots come from simultaneous iteration on q's exact coefficients with a
//! final extended-precision Newton step. A sparse power iteration supplies
//! an independent estimate of the largest eigenvalue, and the two dominant
//! values are compared against their asymptotic main terms
//!
//!   lambda_pm = +-sqrt(n) + ln n / (2 zeta(2)) + (gamma - 1/2 - zeta'(2)/zeta(2)) / zeta(2).
//!
//! The additive constant and the linear coefficient of the S_2 expansion
//! below carry a factor 1/zeta(2) on their Mertens-type constants; dropping
//! it leaves a remainder that visibly grows like sqrt(x) instead of decaying
//! (checked against sieve data to 10^7).

use num_complex::Complex64;

use crate::arith::OmegaHistogram;
use crate::charpoly::{sstar_all, ShiftedPoly};
use crate::dd::{Dd, DdC};
use crate::error::Error;
use crate::matrix::{MatrixKind, SparseUnitaryMatrix};
use crate::Result;

/// The constants entering the asymptotics, each computed by two unrelated
/// series and cross-checked at construction.
#[derive(Debug, Clone, Copy)]
pub struct AsymptoticConstants {
    pub euler_gamma: f64,
    pub zeta2: f64,
    /// zeta'(2) / zeta(2), about -0.57.
    pub zeta_log_deriv_2: f64,
    /// Decimal digits to which the two evaluation routes agreed.
    pub precision: u32,
}

impl AsymptoticConstants {
    /// Additive constant of lambda_pm: (gamma - 1/2 - zeta'(2)/zeta(2)) / zeta(2).
    pub fn lambda_offset(&self) -> f64 {
        (self.euler_gamma - 0.5 - self.zeta_log_deriv_2) / self.zeta2
    }

    /// Linear coefficient of S_2(x): x ln x / zeta(2) + (this) x + error.
    /// Equals 2 (lambda_offset - 1).
    pub fn s2_linear(&self) -> f64 {
        (2.0 * self.euler_gamma - 1.0 - 2.0 * self.zeta_log_deriv_2) / self.zeta2 - 2.0
    }
}

/// Harmonic number with correction terms: gamma = H_N - ln N - 1/(2N) + ...
/// The series error is far below f64; accuracy is set by the compensated sum.
fn gamma_harmonic(n: u64) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for m in 1..=n {
        let term = 1.0 / m as f64;
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    let nf = n as f64;
    let n2 = nf * nf;
    sum - nf.ln() - 1.0 / (2.0 * nf) + 1.0 / (12.0 * n2) - 1.0 / (120.0 * n2 * n2)
        + 1.0 / (252.0 * n2 * n2 * n2)
}

/// gamma = sum_{k>=1} (-1)^{k+1} / (k k!) - E1(1), with the exponential
/// integral from its continued fraction (modified Lentz).
fn gamma_expint() -> f64 {
    let mut series = 0.0f64;
    let mut kfact = 1.0f64;
    for k in 1..=25u32 {
        kfact *= k as f64;
        let term = 1.0 / (k as f64 * kfact);
        if k % 2 == 1 {
            series += term;
        } else {
            series -= term;
        }
    }
    series - expint_e1(1.0)
}

/// E1(z) = e^{-z} / (z + 1 - 1^2/(z + 3 - 2^2/(z + 5 - ...))).
fn expint_e1(z: f64) -> f64 {
    let tiny = 1e-300;
    let mut f = z + 1.0;
    let mut c = f;
    let mut d = 0.0f64;
    for j in 1..200u32 {
        let a = -((j as f64) * (j as f64));
        let b = z + 2.0 * j as f64 + 1.0;
        d = b + a * d;
        if d == 0.0 {
            d = tiny;
        }
        c = b + a / c;
        if c == 0.0 {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-17 {
            break;
        }
    }
    (-z).exp() / f
}

/// Direct series with Euler-Maclaurin tail for zeta(2).
fn zeta2_series(n: u64) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for m in 1..=n {
        let term = 1.0 / (m as f64 * m as f64);
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    let nf = n as f64;
    let n2 = nf * nf;
    let n3 = n2 * nf;
    sum + 1.0 / nf - 1.0 / (2.0 * n2) + 1.0 / (6.0 * n3) - 1.0 / (30.0 * n3 * n2)
        + 1.0 / (42.0 * n3 * n2 * n2)
}

/// -zeta'(2) by direct series with Euler-Maclaurin tail.
fn neg_zeta_deriv2_series(n: u64) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for m in 2..=n {
        let term = (m as f64).ln() / (m as f64 * m as f64);
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    let nf = n as f64;
    let ln_n = nf.ln();
    let n2 = nf * nf;
    let n3 = n2 * nf;
    sum + (ln_n + 1.0) / nf - ln_n / (2.0 * n2) - (1.0 - 2.0 * ln_n) / (12.0 * n3)
        + (26.0 - 24.0 * ln_n) / (720.0 * n3 * n2)
}

/// Alternating-series acceleration for sum_{k>=0} (-1)^k a_k.
fn alternating_sum(a: impl Fn(u32) -> f64, n: u32) -> f64 {
    let mut d = (3.0 + 8.0f64.sqrt()).powi(n as i32);
    d = (d + 1.0 / d) / 2.0;
    let mut b = -1.0f64;
    let mut c = -d;
    let mut s = 0.0f64;
    for k in 0..n {
        c = b - c;
        s += c * a(k);
        b = (k as f64 + n as f64) * (k as f64 - n as f64) * b
            / ((k as f64 + 0.5) * (k as f64 + 1.0));
    }
    s / d
}

/// zeta'(2) from the alternating eta series: eta'(2) = sum_{m>=2} (-1)^m
/// ln m / m^2, and zeta'(2) = 2 eta'(2) - ln 2 zeta(2).
fn zeta_deriv2_eta(zeta2: f64) -> f64 {
    let eta_deriv = alternating_sum(|k| {
        let m = k as f64 + 2.0;
        m.ln() / (m * m)
    }, 48);
    2.0 * eta_deriv - std::f64::consts::LN_2 * zeta2
}

/// Digits of agreement between two estimates of the same constant.
fn agreement_digits(a: f64, b: f64) -> u32 {
    let diff = (a - b).abs();
    if diff == 0.0 {
        return 17;
    }
    let rel = diff / a.abs().max(b.abs()).max(1e-300);
    (-rel.log10()).floor().max(0.0) as u32
}

/// Each constant by two unrelated routes; refuse to return anything the
/// routes disagree on.
pub fn compute_constants(digits: u32) -> Result<AsymptoticConstants> {
    if !(8..=15).contains(&digits) {
        return Err(Error::contract(format!(
            "requested {digits} digits, supported range is 8..=15"
        )));
    }
    let gamma_a = gamma_harmonic(10_000);
    let gamma_b = gamma_expint();
    let zeta2_a = std::f64::consts::PI * std::f64::consts::PI / 6.0;
    let zeta2_b = zeta2_series(10_000);
    let zd_a = -neg_zeta_deriv2_series(10_000);
    let zd_b = zeta_deriv2_eta(zeta2_a);
    let precision = agreement_digits(gamma_a, gamma_b)
        .min(agreement_digits(zeta2_a, zeta2_b))
        .min(agreement_digits(zd_a, zd_b))
        .min(15);
    if precision < digits.max(12) {
        return Err(Error::numeric(
            format!(
                "constant evaluations agree to only {precision} digits \
                 (gamma {gamma_a} vs {gamma_b}, zeta2 {zeta2_a} vs {zeta2_b}, \
                 zeta'(2) {zd_a} vs {zd_b})"
            ),
            Some(zd_a),
        ));
    }
    Ok(AsymptoticConstants {
        euler_gamma: gamma_a,
        zeta2: zeta2_a,
        zeta_log_deriv_2: zd_a / zeta2_a,
        precision,
    })
}

/// Main terms of the two dominant eigenvalues, (plus, minus).
pub fn asymptotic_lambda(n: u64, c: &AsymptoticConstants) -> (f64, f64) {
    assert!(n >= 3, "asymptotic form needs n >= 3");
    let shared = (n as f64).ln() / (2.0 * c.zeta2) + c.lambda_offset();
    let root = (n as f64).sqrt();
    (root + shared, -root + shared)
}

/// sqrt(x)-scaled remainder of S_2(x) against its main terms
/// x ln x / zeta(2) + s2_linear x.
pub fn s2star_asymptotic_check(
    h: &OmegaHistogram,
    c: &AsymptoticConstants,
) -> Result<f64> {
    let x = h.limit();
    if x < 100 {
        return Err(Error::contract("asymptotic comparison needs x >= 100"));
    }
    let s = sstar_all(h);
    if s.len() < 3 {
        return Err(Error::contract("no squarefull structure below this x"));
    }
    let s2 = big_to_f64(&s[2]);
    let xf = x as f64;
    let main = xf * xf.ln() / c.zeta2 + c.s2_linear() * xf;
    Ok((s2 - main) / xf.sqrt())
}

fn big_to_f64(v: &num_bigint::BigInt) -> f64 {
    use num_traits::ToPrimitive;
    v.to_f64().expect("finite conversion")
}

/// Scaled asymptotic errors |lambda_pm - main terms| sqrt(n) / ln^2 n.
pub fn lambda_error_scaled(
    n: u64,
    lambda_plus: f64,
    lambda_minus: f64,
    c: &AsymptoticConstants,
) -> (f64, f64) {
    let (ap, am) = asymptotic_lambda(n, c);
    let scale = (n as f64).sqrt() / (n as f64).ln().powi(2);
    (
        (lambda_plus - ap).abs() * scale,
        (lambda_minus - am).abs() * scale,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenMethod {
    Roots,
    Power,
}

/// The k_n eigenvalues that are not forced to 1, with per-root residuals.
#[derive(Debug, Clone)]
pub struct EigenReport {
    pub n: u64,
    /// lambda values (roots shifted back by +1), sorted by descending real part.
    pub eigenvalues: Vec<Complex64>,
    /// |q(lambda - 1)| per root, same order.
    pub residuals: Vec<f64>,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub method: EigenMethod,
}

/// All roots of the reduced polynomial, shifted back to eigenvalues.
///
/// Simultaneous (Ehrlich-Aberth) iteration in f64 from a Knuth-bound circle,
/// then one Newton step per root in complex double-double against the exact
/// coefficients. Residual acceptance per root is relative to the
/// backward-error scale: |q(mu)| <= tol max(1, sum_i |a_i| |mu|^i).
pub fn nontrivial_eigenvalues(q: &ShiftedPoly, tol: f64) -> Result<EigenReport> {
    let n = q.n();
    let deg = q.degree();
    if deg < 2 {
        return Err(Error::contract(format!(
            "root finding needs degree >= 2, got {deg}"
        )));
    }
    if tol <= 0.0 {
        return Err(Error::contract("tolerance must be positive"));
    }
    let coeffs: Vec<Dd> = dense_dd_coeffs(q);
    let coeffs_f64: Vec<f64> = coeffs.iter().map(|c| c.to_f64()).collect();

    let mut roots = aberth(&coeffs_f64)?;
    // one extended-precision Newton step against the exact coefficients
    for z in roots.iter_mut() {
        let zd = DdC::from_f64(z.re, z.im);
        let (p, dp) = horner_dd(&coeffs, zd);
        if dp.abs2().to_f64() > 0.0 {
            let step = p.div(dp);
            let polished = zd.sub(step);
            let (re, im) = polished.to_f64();
            *z = Complex64::new(re, im);
        }
    }

    let mut order: Vec<usize> = (0..roots.len()).collect();
    order.sort_by(|&a, &b| {
        roots[b]
            .re
            .partial_cmp(&roots[a].re)
            .unwrap()
            .then(roots[b].im.partial_cmp(&roots[a].im).unwrap())
    });
    let mu: Vec<Complex64> = order.iter().map(|&i| roots[i]).collect();

    let mut residuals = Vec::with_capacity(mu.len());
    for z in &mu {
        let zd = DdC::from_f64(z.re, z.im);
        let (p, _) = horner_dd(&coeffs, zd);
        let r = p.abs2().to_f64().sqrt();
        // backward-error scale of evaluating q at mu: sum_i |a_i| |mu|^i.
        // An absolute bound would be unattainable at small |mu| once the
        // coefficients are large, since rounding the exact root to f64
        // already contributes |q'(mu)| ulp(mu).
        let scale = coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| a.to_f64().abs() * z.norm().powi(i as i32))
            .sum::<f64>()
            .max(1.0);
        if !(r <= tol * scale) {
            return Err(Error::numeric(
                format!("root residual {r:.3e} above {tol:.1e} x {scale:.3e} at n = {n}"),
                Some(z.re),
            ));
        }
        residuals.push(r);
    }

    let eigenvalues: Vec<Complex64> = mu.iter().map(|z| z + Complex64::new(1.0, 0.0)).collect();

    // dominance: one eigenvalue far right, one far left
    let sqrt_n = (n as f64).sqrt();
    let (hi, lo) = (1.0 + sqrt_n / 2.0, 1.0 - sqrt_n / 2.0);
    let right: Vec<&Complex64> = eigenvalues.iter().filter(|z| z.re > hi).collect();
    let left: Vec<&Complex64> = eigenvalues.iter().filter(|z| z.re < lo).collect();
    if n >= 30 && (right.len() != 1 || left.len() != 1) {
        return Err(Error::numeric(
            format!(
                "expected exactly one eigenvalue beyond each dominance bound at n = {n}, \
                 found {} right and {} left",
                right.len(),
                left.len()
            ),
            eigenvalues.first().map(|z| z.re),
        ));
    }
    let lambda_plus = eigenvalues
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let lambda_minus = eigenvalues
        .iter()
        .map(|z| z.re)
        .fold(f64::INFINITY, f64::min);

    Ok(EigenReport {
        n,
        eigenvalues,
        residuals,
        lambda_plus,
        lambda_minus,
        method: EigenMethod::Roots,
    })
}

/// Dense ascending coefficients of q as double-double values (exact for the
/// sizes in play: coefficients fit well below 2^106).
fn dense_dd_coeffs(q: &ShiftedPoly) -> Vec<Dd> {
    let deg = q.degree() as usize;
    let mut out = vec![Dd::ZERO; deg + 1];
    for (e, c) in q.terms() {
        out[*e as usize] = Dd::from_bigint(c);
    }
    out
}

/// Value and derivative by one Horner pass.
fn horner_dd(coeffs: &[Dd], z: DdC) -> (DdC, DdC) {
    let mut p = DdC::new(*coeffs.last().unwrap(), Dd::ZERO);
    let mut dp = DdC::from_f64(0.0, 0.0);
    for c in coeffs.iter().rev().skip(1) {
        dp = dp.mul(z).add(p);
        p = p.mul(z).add(DdC::new(*c, Dd::ZERO));
    }
    (p, dp)
}

fn horner_c64(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(*coeffs.last().unwrap(), 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev().skip(1) {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Ehrlich-Aberth with Gauss-Seidel updates. Start on a circle of radius
/// given by Knuth's bound, angles offset to avoid the real axis.
fn aberth(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let deg = coeffs.len() - 1;
    let lead = coeffs[deg];
    let mut radius = 0.0f64;
    for (i, &c) in coeffs.iter().enumerate().take(deg) {
        if c != 0.0 {
            let r = 2.0 * (c / lead).abs().powf(1.0 / (deg - i) as f64);
            radius = radius.max(r);
        }
    }
    if radius == 0.0 {
        return Ok(vec![Complex64::new(0.0, 0.0); deg]);
    }
    let mut z: Vec<Complex64> = (0..deg)
        .map(|j| {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / deg as f64 + 0.4;
            Complex64::new(radius * theta.cos(), radius * theta.sin())
        })
        .collect();
    for _sweep in 0..400 {
        let mut worst = 0.0f64;
        for j in 0..deg {
            let (p, dp) = horner_c64(coeffs, z[j]);
            if p.norm() == 0.0 {
                continue;
            }
            let w = if dp.norm() == 0.0 {
                Complex64::new(1e-12, 1e-12)
            } else {
                p / dp
            };
            let mut repulse = Complex64::new(0.0, 0.0);
            for i in 0..deg {
                if i != j {
                    repulse += (z[j] - z[i]).finv();
                }
            }
            let denom = Complex64::new(1.0, 0.0) - w * repulse;
            let delta = if denom.norm() == 0.0 { w } else { w / denom };
            z[j] -= delta;
            worst = worst.max(delta.norm() / z[j].norm().max(1.0));
        }
        if worst <= 1e-14 {
            return Ok(z);
        }
    }
    Err(Error::numeric(
        format!("simultaneous iteration stalled at degree {deg}"),
        z.first().map(|r| r.re),
    ))
}

/// Rayleigh-quotient power iteration from the all-ones vector; converges to
/// the largest eigenvalue, which is simple and positive here. Stops when two
/// successive estimates agree to tol (relative above 1).
pub fn dominant_power_iteration(
    m: &SparseUnitaryMatrix,
    tol: f64,
    max_iter: u32,
) -> Result<f64> {
    if m.kind() != MatrixKind::RStar {
        return Err(Error::contract(
            "power iteration is defined for the full matrix only",
        ));
    }
    if tol <= 0.0 {
        return Err(Error::contract("tolerance must be positive"));
    }
    let n = m.n() as usize;
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut prev = f64::NAN;
    for _ in 0..max_iter {
        let w = m.matvec(&v);
        let est: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        let norm: f64 = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::numeric("iteration vector vanished", Some(est)));
        }
        for (t, s) in v.iter_mut().zip(&w) {
            *t = s / norm;
        }
        if (est - prev).abs() <= tol * est.abs().max(1.0) {
            return Ok(est);
        }
        prev = est;
    }
    Err(Error::numeric(
        format!("no convergence in {max_iter} power iterations"),
        Some(prev),
    ))
}

//! Characteristic polynomial of A in the shifted variable u = x - 1:
//!
//!   det(x I - A) = u^n - sum_{k >= 1} S_k(n) u^{n-k-1}
//!
//! where S_k(n) = sum_{m <= n} D_k(m) and D_k(m) = k! {omega(m) brace k}
//! counts ordered factorizations of m into k pairwise-coprime parts > 1.
//! S_1(n) = n - 1, and S_k(n) = 0 once k exceeds the largest omega below n,
//! so the polynomial is u^{n - k_n} times a reduced polynomial of degree k_n.
//! Everything here is exact.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{OmegaHistogram, StirlingTable};
use crate::config::Guards;
use crate::dd::floor_log_ratio;
use crate::error::Error;
use crate::Result;

/// Sparse exact polynomial in the shifted variable, ascending exponents,
/// no zero coefficients stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftedPoly {
    n: u64,
    terms: Vec<(u64, BigInt)>,
}

impl ShiftedPoly {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn terms(&self) -> &[(u64, BigInt)] {
        &self.terms
    }

    pub fn degree(&self) -> u64 {
        self.terms.last().map(|(e, _)| *e).unwrap_or(0)
    }

    pub fn coeff(&self, exponent: u64) -> BigInt {
        match self.terms.binary_search_by_key(&exponent, |(e, _)| *e) {
            Ok(p) => self.terms[p].1.clone(),
            Err(_) => BigInt::ZERO,
        }
    }

    /// Lowest exponent present; the power of u dividing the polynomial.
    pub fn valuation(&self) -> u64 {
        self.terms.first().map(|(e, _)| *e).unwrap_or(0)
    }

    /// Human-readable form, highest power first, e.g. `u^8 - 7u^6 - 2u^5`.
    pub fn render(&self, symbol: &str) -> String {
        render_terms(self.terms.iter().rev().map(|(e, c)| (*e, c)), symbol)
    }
}

fn render_terms<'a>(terms: impl Iterator<Item = (u64, &'a BigInt)>, symbol: &str) -> String {
    let mut out = String::new();
    for (e, c) in terms {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if c.is_negative() { " - " } else { " + " });
        }
        let show_coeff = !mag.is_one() || e == 0;
        if show_coeff {
            out.push_str(&mag.to_string());
        }
        match e {
            0 => {}
            1 => out.push_str(symbol),
            _ => {
                out.push_str(symbol);
                out.push('^');
                out.push_str(&e.to_string());
            }
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Monomial-basis rendering for an ascending coefficient slice.
pub fn render_monomial(coeffs: &[BigInt], symbol: &str) -> String {
    render_terms(
        coeffs.iter().enumerate().rev().map(|(e, c)| (e as u64, c)),
        symbol,
    )
}

/// D_k(m) = k! {omega(m) brace k}, from a prebuilt Stirling table.
pub fn dstar(st: &StirlingTable, k: u32, omega: u32) -> BigInt {
    let mut v = st.get(omega, k);
    for i in 2..=k {
        v *= i;
    }
    v
}

/// S_k(n) for k = 0..=max omega, read off the histogram:
/// S_k(n) = sum_j counts[j] k! {j brace k}. Slot 0 is unused.
pub fn sstar_all(h: &OmegaHistogram) -> Vec<BigInt> {
    let top = h.max_omega();
    let st = StirlingTable::build(top, top);
    let mut out = vec![BigInt::ZERO; top as usize + 1];
    for (k, slot) in out.iter_mut().enumerate().skip(1) {
        let k = k as u32;
        let mut acc = BigInt::ZERO;
        for (j, &c) in h.counts().iter().enumerate() {
            if (j as u32) >= k {
                acc += dstar(&st, k, j as u32) * c;
            }
        }
        *slot = acc;
    }
    out
}

/// Assemble the polynomial from n and the S_k values (index k, slot 0
/// ignored). Split out so a deliberately corrupted S_k vector can be fed to
/// the verification suite.
pub fn from_sstar(n: u64, sstar: &[BigInt]) -> Result<ShiftedPoly> {
    if n == 0 {
        return Err(Error::contract("characteristic polynomial needs n >= 1"));
    }
    if sstar.len() as u64 > n {
        return Err(Error::contract(format!(
            "got S_k values up to k = {}, impossible below n = {n}",
            sstar.len() - 1
        )));
    }
    let mut terms: Vec<(u64, BigInt)> = Vec::new();
    for (k, s) in sstar.iter().enumerate().skip(1) {
        if !s.is_zero() {
            // exponent n - k - 1; k <= max omega < n so this never underflows
            terms.push((n - k as u64 - 1, -s));
        }
    }
    terms.push((n, BigInt::one()));
    terms.sort_by_key(|(e, _)| *e);
    Ok(ShiftedPoly { n, terms })
}

/// det(x I - A) in the shifted basis, via the omega histogram of n.
pub fn charpoly_shifted(h: &OmegaHistogram) -> Result<ShiftedPoly> {
    from_sstar(h.limit(), &sstar_all(h))
}

/// The nonzero-root part: the full polynomial is u^{m_n} q(u) with
/// deg q = k_n, and this returns q together with (k_n, m_n).
pub fn reduced_poly(h: &OmegaHistogram) -> Result<(ShiftedPoly, u32, u64)> {
    let p = charpoly_shifted(h)?;
    let k_n = h.k_n();
    let m_n = p.n - k_n as u64;
    assert_eq!(p.valuation(), m_n, "valuation must equal the shift multiplicity");
    let terms = p
        .terms
        .into_iter()
        .map(|(e, c)| (e - m_n, c))
        .collect();
    Ok((ShiftedPoly { n: p.n, terms }, k_n, m_n))
}

/// Expand a shifted polynomial to monomial-basis coefficients in x
/// (ascending): substitute u = x - 1 and push binomials through each term.
/// Quadratic in the degree, so capped by the oracle guard.
pub fn expand_to_monomial(p: &ShiftedPoly, guards: &Guards) -> Result<Vec<BigInt>> {
    let deg = p.degree();
    if deg > guards.oracle_max {
        return Err(Error::Guard {
            what: "monomial expansion degree",
            got: deg,
            limit: guards.oracle_max,
        });
    }
    let mut out = vec![BigInt::ZERO; deg as usize + 1];
    for (e, c) in &p.terms {
        // (x - 1)^e = sum_i C(e, i) (-1)^{e-i} x^i, binomials built in place
        let e = *e;
        let mut binom = BigInt::one();
        for i in 0..=e {
            if i > 0 {
                binom = binom * (e - i + 1) / i;
            }
            let signed = if (e - i) % 2 == 0 {
                binom.clone()
            } else {
                -binom.clone()
            };
            out[i as usize] += signed * c;
        }
    }
    Ok(out)
}

/// Multiplicity of the root x = 1 of an ascending-coefficient polynomial:
/// synthetic division by (x - 1) repeated while the value at 1 stays zero.
pub fn root_one_multiplicity(coeffs: &[BigInt]) -> u64 {
    let mut cur: Vec<BigInt> = coeffs.to_vec();
    let mut mult = 0u64;
    loop {
        let at_one: BigInt = cur.iter().sum();
        if !at_one.is_zero() || cur.len() <= 1 {
            return mult;
        }
        let d = cur.len() - 1;
        let mut quot = vec![BigInt::ZERO; d];
        let mut carry = BigInt::ZERO;
        for i in (1..=d).rev() {
            carry += &cur[i];
            quot[i - 1] = carry.clone();
        }
        cur = quot;
        mult += 1;
    }
}

/// The eigenvalue-1 story for one n: k_n, the multiplicity m_n = n - k_n,
/// and the proved two-sided bounds where they apply.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicityRecord {
    pub n: u64,
    pub k_n: u32,
    pub m_n: u64,
    /// n - floor(1.3841 ln n / ln ln n) - 1, valid for n >= 3.
    pub lower: Option<i64>,
    /// n - floor(ln n / ln ln n), valid for n >= 6.
    pub upper: Option<i64>,
    /// Slack in the asymptotic window: 2 ln n / (ln ln n)^2 minus the
    /// distance from m_n to n - ln n / ln ln n. Nonnegative when the window
    /// holds. Valid for n >= 3.
    pub ostar_gap: Option<f64>,
}

pub fn multiplicity_record(n: u64, k_n: u32) -> MultiplicityRecord {
    let m_n = n - k_n as u64;
    let lower = (n >= 3).then(|| n as i64 - floor_log_ratio(13841, 10000, n) - 1);
    let upper = (n >= 6).then(|| n as i64 - floor_log_ratio(1, 1, n));
    let ostar_gap = (n >= 3).then(|| {
        let ln_n = (n as f64).ln();
        let lln = ln_n.ln();
        let center = n as f64 - ln_n / lln;
        2.0 * ln_n / (lln * lln) - (m_n as f64 - center).abs()
    });
    MultiplicityRecord {
        n,
        k_n,
        m_n,
        lower,
        upper,
        ostar_gap,
    }
}

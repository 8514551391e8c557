//! Unitary-divisor arithmetic. d is a unitary divisor of m (written d || m)
//! when d | m and gcd(d, m/d) = 1; every m has exactly 2^omega(m) of them.
//! On top of that sit the unitary Moebius function mu*(m) = (-1)^omega(m),
//! its summatory (Mertens) forms, omega histograms computed two independent
//! ways, Stirling set numbers and primorials.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use rayon::prelude::*;

use crate::config::TABLE_MAX;
use crate::error::Error;
use crate::Result;

/// Largest distinct-prime count a u64 can carry (2*3*...*p_15 > 2^64 / 614889782588491410 = N_15);
/// 32 is a comfortable bound for histogram scratch space.
const OMEGA_SLOTS: usize = 32;

pub fn is_unitary_divisor(i: u64, j: u64) -> bool {
    if i == 0 || j == 0 || j % i != 0 {
        return false;
    }
    i.gcd(&(j / i)) == 1
}

/// All unitary divisors of m, ascending. Trial-division factorization, so
/// this is the slow total function; sieve-backed paths exist for bulk work.
pub fn unitary_divisors(m: u64) -> Vec<u64> {
    assert!(m >= 1, "unitary divisors of 0 are undefined");
    let mut out = vec![1u64];
    let mut rest = m;
    let mut p = 2u64;
    while p * p <= rest {
        if rest % p == 0 {
            let mut q = 1u64;
            while rest % p == 0 {
                rest /= p;
                q *= p;
            }
            for idx in 0..out.len() {
                out.push(out[idx] * q);
            }
        }
        p += 1;
    }
    if rest > 1 {
        for idx in 0..out.len() {
            out.push(out[idx] * rest);
        }
    }
    out.sort_unstable();
    out
}

/// Unitary convolution of two value arrays indexed 1..=n (slot 0 is unused):
/// out[m] = sum over d || m of f[d] * g[m/d].
pub fn unitary_convolve(f: &[i64], g: &[i64]) -> Result<Vec<i64>> {
    if f.len() != g.len() {
        return Err(Error::contract(format!(
            "unitary_convolve: mismatched lengths {} vs {}",
            f.len(),
            g.len()
        )));
    }
    if f.len() < 2 {
        return Err(Error::contract(
            "unitary_convolve: arrays must cover at least m = 1",
        ));
    }
    let n = f.len() - 1;
    let mut out = vec![0i64; n + 1];
    for d in 1..=n {
        for q in 1..=n / d {
            if d.gcd(&q) == 1 {
                out[d * q] += f[d] * g[q];
            }
        }
    }
    Ok(out)
}

/// Smallest-prime-factor sieve with omega(m) tabulated for every m <= limit.
pub struct OmegaTable {
    limit: u64,
    omega: Vec<u8>,
    spf: Vec<u32>,
}

impl OmegaTable {
    /// Linear sieve: each composite is struck once, through its smallest
    /// prime factor, and omega propagates along the same recurrence.
    pub fn build(n: u64) -> Result<OmegaTable> {
        if n == 0 {
            return Err(Error::contract("omega table needs limit >= 1"));
        }
        if n > TABLE_MAX {
            return Err(Error::Capacity {
                what: "omega table limit",
                got: n,
                limit: TABLE_MAX,
            });
        }
        let len = n as usize + 1;
        let mut spf = vec![0u32; len];
        let mut omega = vec![0u8; len];
        let mut primes: Vec<u32> = Vec::new();
        for m in 2..len {
            if spf[m] == 0 {
                spf[m] = m as u32;
                omega[m] = 1;
                primes.push(m as u32);
            }
            for &p in &primes {
                let p = p as usize;
                if p > spf[m] as usize || m * p >= len {
                    break;
                }
                spf[m * p] = p as u32;
                omega[m * p] = if spf[m] as usize == p {
                    omega[m]
                } else {
                    omega[m] + 1
                };
            }
        }
        Ok(OmegaTable { limit: n, omega, spf })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Number of distinct prime factors; omega(1) = 0. Panics out of range.
    pub fn omega(&self, m: u64) -> u32 {
        assert!(m >= 1 && m <= self.limit, "omega({m}) outside table");
        self.omega[m as usize] as u32
    }

    /// Smallest prime factor of m >= 2. Panics out of range.
    pub fn spf(&self, m: u64) -> u32 {
        assert!(m >= 2 && m <= self.limit, "spf({m}) outside table");
        self.spf[m as usize]
    }

    /// mu*(m) = (-1)^omega(m).
    pub fn mu_star(&self, m: u64) -> Result<i64> {
        if m < 1 || m > self.limit {
            return Err(Error::contract(format!(
                "mu_star: m = {m} outside table limit {}",
                self.limit
            )));
        }
        Ok(if self.omega[m as usize] % 2 == 0 { 1 } else { -1 })
    }

    /// M*(x) = sum of mu*(k) for k <= x.
    pub fn mertens_star(&self, x: u64) -> Result<i64> {
        if x < 1 || x > self.limit {
            return Err(Error::contract(format!(
                "mertens_star: x = {x} outside table limit {}",
                self.limit
            )));
        }
        let mut acc = 0i64;
        for k in 1..=x as usize {
            acc += if self.omega[k] % 2 == 0 { 1 } else { -1 };
        }
        Ok(acc)
    }

    /// M*(x, n) = sum of mu*(k) over k <= x with gcd(k, n) = 1.
    pub fn mertens_star_coprime(&self, x: u64, n: u64) -> Result<i64> {
        if x < 1 || x > self.limit {
            return Err(Error::contract(format!(
                "mertens_star_coprime: x = {x} outside table limit {}",
                self.limit
            )));
        }
        if n < 1 {
            return Err(Error::contract("mertens_star_coprime: n must be >= 1"));
        }
        let mut acc = 0i64;
        for k in 1..=x {
            if k.gcd(&n) == 1 {
                acc += if self.omega[k as usize] % 2 == 0 { 1 } else { -1 };
            }
        }
        Ok(acc)
    }
}

/// counts[j] = #{m <= limit : omega(m) = j}; the trailing entry is nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaHistogram {
    limit: u64,
    counts: Vec<u64>,
}

impl OmegaHistogram {
    pub fn from_table(t: &OmegaTable) -> OmegaHistogram {
        let mut counts = vec![0u64; OMEGA_SLOTS];
        for m in 1..=t.limit as usize {
            counts[t.omega[m] as usize] += 1;
        }
        trim(&mut counts);
        OmegaHistogram {
            limit: t.limit,
            counts,
        }
    }

    /// Segmented computation: only the primes up to sqrt(x) are stored, each
    /// segment divides them out and counts one extra prime from whatever
    /// cofactor remains. Peak memory is O(segment_size + pi(sqrt x)), and the
    /// result is identical for every segment size.
    pub fn build(x: u64, segment_size: u64) -> Result<OmegaHistogram> {
        if x == 0 {
            return Err(Error::contract("omega histogram needs limit >= 1"));
        }
        if segment_size < 2 {
            return Err(Error::contract("segment size must be at least 2"));
        }
        let base = small_primes(x.isqrt());
        let ranges: Vec<(u64, u64)> = (1..=x)
            .step_by(segment_size.min(u64::MAX >> 1) as usize)
            .map(|lo| (lo, (lo + segment_size - 1).min(x)))
            .collect();
        let counts = ranges
            .into_par_iter()
            .map(|(lo, hi)| segment_counts(lo, hi, &base))
            .reduce(
                || [0u64; OMEGA_SLOTS],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b.iter()) {
                        *x += *y;
                    }
                    a
                },
            );
        let mut counts = counts.to_vec();
        trim(&mut counts);
        Ok(OmegaHistogram { limit: x, counts })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Largest omega value attained up to the limit.
    pub fn max_omega(&self) -> u32 {
        (self.counts.len() - 1) as u32
    }

    /// k_n: 0 for n = 1, otherwise 1 + max omega. Equivalently the unique k
    /// with primorial(k-1) <= n < primorial(k).
    pub fn k_n(&self) -> u32 {
        if self.limit == 1 {
            0
        } else {
            self.max_omega() + 1
        }
    }

    /// M*(x) through the histogram: sum of (-1)^j counts[j].
    pub fn mertens_star(&self) -> i64 {
        self.counts
            .iter()
            .enumerate()
            .map(|(j, &c)| if j % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }
}

fn trim(counts: &mut Vec<u64>) {
    while counts.len() > 1 && *counts.last().unwrap() == 0 {
        counts.pop();
    }
}

/// Primes up to bound, plain bool sieve (bound is at most sqrt of the
/// histogram limit, so this stays tiny).
fn small_primes(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            primes.push(p as u64);
            let mut q = p * p;
            while q <= n {
                composite[q] = true;
                q += p;
            }
        }
    }
    primes
}

fn segment_counts(lo: u64, hi: u64, base: &[u64]) -> [u64; OMEGA_SLOTS] {
    let len = (hi - lo + 1) as usize;
    let mut rem: Vec<u64> = (lo..=hi).collect();
    let mut cnt = vec![0u8; len];
    for &p in base {
        let mut m = lo.div_ceil(p) * p;
        while m <= hi {
            let i = (m - lo) as usize;
            cnt[i] += 1;
            while rem[i] % p == 0 {
                rem[i] /= p;
            }
            m += p;
        }
    }
    let mut counts = [0u64; OMEGA_SLOTS];
    for i in 0..len {
        let extra = if rem[i] > 1 { 1 } else { 0 };
        // lo may be 1; omega(1) = 0 falls out naturally (no prime hits, rem 1)
        counts[cnt[i] as usize + extra] += 1;
    }
    counts
}

/// Stirling set numbers {n brace k} for n <= max_n, k <= max_k.
pub struct StirlingTable {
    max_n: u32,
    max_k: u32,
    rows: Vec<Vec<BigInt>>,
}

impl StirlingTable {
    pub fn build(max_n: u32, max_k: u32) -> StirlingTable {
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(max_n as usize + 1);
        rows.push(vec![BigInt::one()]);
        for n in 1..=max_n {
            let prev = &rows[n as usize - 1];
            let width = n.min(max_k) as usize + 1;
            let mut row = vec![BigInt::ZERO; width];
            for k in 1..width {
                // {n k} = k {n-1 k} + {n-1 k-1}
                let mut v = prev.get(k).cloned().unwrap_or_else(|| BigInt::ZERO) * k;
                if let Some(left) = prev.get(k - 1) {
                    v += left;
                }
                row[k] = v;
            }
            rows.push(row);
        }
        StirlingTable { max_n, max_k, rows }
    }

    /// {n brace k}; zero when k > n. Panics when n or k is beyond the table.
    pub fn get(&self, n: u32, k: u32) -> BigInt {
        assert!(n <= self.max_n, "stirling row {n} beyond table");
        assert!(
            k <= self.max_k || k > n,
            "stirling column {k} beyond table"
        );
        if k > n {
            return BigInt::ZERO;
        }
        self.rows[n as usize]
            .get(k as usize)
            .cloned()
            .unwrap_or_else(|| BigInt::ZERO)
    }

    pub fn max_n(&self) -> u32 {
        self.max_n
    }

    pub fn max_k(&self) -> u32 {
        self.max_k
    }
}

/// Product of the first k primes; primorial(0) = 1.
pub fn primorial(k: u32) -> BigInt {
    let mut out = BigInt::one();
    let mut produced = 0u32;
    let mut candidate = 2u64;
    while produced < k {
        if is_prime_u64(candidate) {
            out *= candidate;
            produced += 1;
        }
        candidate += 1;
    }
    out
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// k_n for a single n via the recurrence k_1 = 0, k_n = max(k_{n-1}, omega(n) + 1).
pub fn k_sequence(t: &OmegaTable, n: u64) -> Result<u32> {
    if n < 1 || n > t.limit {
        return Err(Error::contract(format!(
            "k_sequence: n = {n} outside table limit {}",
            t.limit
        )));
    }
    if n == 1 {
        return Ok(0);
    }
    let mut k = 0u32;
    for m in 2..=n {
        k = k.max(t.omega(m) + 1);
    }
    Ok(k)
}

/// k_n for every n <= limit (slot 0 unused, k[1] = 0).
pub fn k_values(t: &OmegaTable) -> Vec<u32> {
    let mut out = vec![0u32; t.limit as usize + 1];
    let mut k = 0u32;
    for n in 2..=t.limit {
        k = k.max(t.omega(n) + 1);
        out[n as usize] = k;
    }
    out
}

/// k_n through the primorial characterization: the smallest k with
/// primorial(k) > n. Independent of any sieve; n >= 2.
pub fn k_via_primorials(n: u64) -> u32 {
    assert!(n >= 2, "primorial characterization needs n >= 2");
    let mut prod: u128 = 1;
    let mut k = 0u32;
    let mut p = 2u64;
    loop {
        prod *= p as u128;
        if prod > n as u128 {
            return k + 1;
        }
        k += 1;
        p += 1;
        while !is_prime_u64(p) {
            p += 1;
        }
    }
}

//! Double-double arithmetic: a value is the unevaluated sum hi + lo of two
//! f64, giving roughly 32 significant digits. Two places genuinely need it:
//! floors of log ratios that land near an integer, and the final Newton
//! polish of polynomial roots against exact coefficients.
//!
//! The error-free transforms rely on `f64::mul_add` compiling to a fused
//! multiply-add (single rounding), which Rust guarantees.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Requires |a| >= |b|.
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

// ln 2 split across two f64 (the split is exact, the pair is correct to
// ~1e-33; same constants as the classic quad-double library).
const LN2: Dd = Dd {
    hi: 6.931471805599452862e-01,
    lo: 2.319046813846299558e-17,
};

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn from_u64(x: u64) -> Dd {
        let hi = x as f64;
        let lo = (x as i128 - hi as i128) as f64;
        Dd { hi, lo }
    }

    /// Exact for |x| < 2^106; larger inputs round in the tail.
    pub fn from_bigint(x: &BigInt) -> Dd {
        let hi = x.to_f64().unwrap_or(f64::INFINITY);
        if !hi.is_finite() {
            return Dd {
                hi,
                lo: 0.0,
            };
        }
        let rest = x - BigInt::from(hi as i128);
        Dd {
            hi,
            lo: rest.to_f64().unwrap_or(0.0),
        }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            self.neg()
        } else {
            self
        }
    }

    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, o.hi);
        let (t1, t2) = two_sum(self.lo, o.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        Dd { hi, lo }
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    pub fn mul(self, o: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, o.hi);
        let p2 = p2 + self.hi * o.lo + self.lo * o.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    pub fn mul_f64(self, o: f64) -> Dd {
        let (p1, p2) = two_prod(self.hi, o);
        let p2 = p2 + self.lo * o;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul_f64(q1));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul_f64(q2));
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add(Dd::from_f64(q3))
    }

    pub fn sqr(self) -> Dd {
        self.mul(self)
    }

    fn ldexp(self, e: i32) -> Dd {
        let f = (e as f64).exp2();
        Dd {
            hi: self.hi * f,
            lo: self.lo * f,
        }
    }

    /// exp for |x| up to a few hundred: range-reduce by ln 2, then Taylor at
    /// the reduced argument (|r| <= ln2/2, 26 terms leave the tail below the
    /// representable precision).
    pub fn exp(self) -> Dd {
        if self.hi == 0.0 && self.lo == 0.0 {
            return Dd::ONE;
        }
        let k = (self.hi / LN2.hi).round();
        let r = self.sub(LN2.mul_f64(k));
        let mut term = r;
        let mut sum = Dd::ONE.add(r);
        for i in 2..=26u32 {
            // divide, don't multiply by a rounded reciprocal: 1/i is inexact
            // in f64 for most i and the error would dominate the result
            term = term.mul(r).div(Dd::from_f64(i as f64));
            sum = sum.add(term);
            if term.hi.abs() < 1e-35 * sum.hi.abs() {
                break;
            }
        }
        sum.ldexp(k as i32)
    }

    /// ln for x > 0: seed with the f64 log, then correct by ln(x e^{-y})
    /// with |u - 1| ~ 1e-15, where the series in u - 1 is essentially exact.
    pub fn ln(self) -> Dd {
        assert!(self.hi > 0.0, "ln of non-positive value");
        let y = self.hi.ln();
        let u = self.mul(Dd::from_f64(-y).exp());
        let v = u.sub(Dd::ONE);
        let corr = v.sub(v.sqr().mul_f64(0.5)).add(v.sqr().mul(v).mul_f64(1.0 / 3.0));
        Dd::from_f64(y).add(corr)
    }

    /// Distance to the nearest integer, as f64 (adequate: only consulted when
    /// the distance is far above the representation error).
    fn frac_distance(self) -> f64 {
        let r = self.sub(Dd::from_f64(self.hi.round()));
        (r.hi + r.lo).abs()
    }

    pub fn floor(self) -> f64 {
        let mut f = self.hi.floor();
        // hi can sit on the wrong side of an integer by less than |lo|.
        let r = self.sub(Dd::from_f64(f));
        if r.hi + r.lo < 0.0 {
            f -= 1.0;
        } else if r.hi + r.lo >= 1.0 {
            f += 1.0;
        }
        f
    }
}

/// Complex value with double-double components; just enough arithmetic for
/// Horner evaluation and a Newton step.
#[derive(Debug, Clone, Copy)]
pub struct DdC {
    pub re: Dd,
    pub im: Dd,
}

impl DdC {
    pub fn new(re: Dd, im: Dd) -> DdC {
        DdC { re, im }
    }

    pub fn from_f64(re: f64, im: f64) -> DdC {
        DdC {
            re: Dd::from_f64(re),
            im: Dd::from_f64(im),
        }
    }

    pub fn to_f64(self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn add(self, o: DdC) -> DdC {
        DdC {
            re: self.re.add(o.re),
            im: self.im.add(o.im),
        }
    }

    pub fn sub(self, o: DdC) -> DdC {
        DdC {
            re: self.re.sub(o.re),
            im: self.im.sub(o.im),
        }
    }

    pub fn mul(self, o: DdC) -> DdC {
        DdC {
            re: self.re.mul(o.re).sub(self.im.mul(o.im)),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    pub fn div(self, o: DdC) -> DdC {
        let den = o.re.sqr().add(o.im.sqr());
        let re = self.re.mul(o.re).add(self.im.mul(o.im)).div(den);
        let im = self.im.mul(o.re).sub(self.re.mul(o.im)).div(den);
        DdC { re, im }
    }

    /// Squared magnitude.
    pub fn abs2(self) -> Dd {
        self.re.sqr().add(self.im.sqr())
    }
}

/// floor(c * ln n / ln ln n) with c = c_num / c_den, for n >= 3.
///
/// Evaluated in f64; when the value lands within 1e-9 of an integer the
/// whole expression is re-evaluated in double-double, which settles the
/// floor unless the true value is within ~1e-25 of an integer (never
/// observed; asserted against rather than silently mis-floored).
pub fn floor_log_ratio(c_num: u32, c_den: u32, n: u64) -> i64 {
    assert!(n >= 3, "log ratio needs ln ln n > 0");
    let x = (n as f64).ln();
    let t = (c_num as f64 * x) / (c_den as f64 * x.ln());
    if (t - t.round()).abs() > 1e-9 {
        return t.floor() as i64;
    }
    let ln_n = Dd::from_u64(n).ln();
    let t = ln_n
        .mul_f64(c_num as f64)
        .div(ln_n.ln().mul_f64(c_den as f64));
    assert!(
        t.frac_distance() > 1e-25,
        "floor boundary unresolved at double-double precision: n = {n}"
    );
    t.floor() as i64
}

#[cfg(test)]
mod tests {
    use super::*;

    // References as hi+lo pairs: hi is the closest double, lo the remainder
    // of the 30-digit value (ln 2 = 0.693147180559945309417232121458,
    // e = 2.718281828459045235360287471353).
    const LN2_HI: f64 = 0.693147180559945309417232121458;
    const LN2_LO: f64 = 2.3190468138462996e-17;
    const E_HI: f64 = 2.718281828459045235;
    const E_LO: f64 = 1.4456468917292502e-16;

    fn close(a: Dd, hi: f64, lo: f64, tol: f64) {
        let d = a.sub(Dd { hi, lo }.add(Dd::ZERO));
        assert!(
            d.to_f64().abs() <= tol * hi.abs().max(1.0),
            "dd mismatch: {a:?} vs {hi}+{lo}, delta {}",
            d.to_f64()
        );
    }

    #[test]
    fn add_mul_exact_small_integers() {
        let a = Dd::from_u64(1u64 << 60);
        let b = Dd::from_f64(3.0);
        let s = a.add(b);
        assert_eq!(s.sub(a).to_f64(), 3.0);
        let p = Dd::from_u64(94906265).mul(Dd::from_u64(94906267));
        // product straddles 2^53; dd keeps it exactly
        let exact = 94906265i128 * 94906267i128;
        let back = p.hi as i128 + p.lo as i128;
        assert_eq!(back, exact);
    }

    #[test]
    fn div_roundtrip() {
        let a = Dd::from_u64(10).div(Dd::from_u64(3));
        let b = a.mul_f64(3.0);
        assert!(b.sub(Dd::from_u64(10)).to_f64().abs() < 1e-30);
    }

    #[test]
    fn ln_matches_references() {
        close(Dd::from_u64(2).ln(), LN2_HI, LN2_LO, 1e-30);
        // ln(2^40) = 40 ln 2, multiplied out in dd
        let ln2 = Dd { hi: LN2_HI, lo: LN2_LO };
        let d = Dd::from_u64(1u64 << 40).ln().sub(ln2.mul_f64(40.0));
        assert!(d.to_f64().abs() < 1e-29, "ln(2^40) off by {}", d.to_f64());
        // exp is verified against e below; ln must invert it
        let x = Dd::from_u64(10);
        let rt = x.ln().exp().sub(x);
        assert!(rt.to_f64().abs() < 1e-29, "roundtrip off by {}", rt.to_f64());
    }

    #[test]
    fn exp_matches_references() {
        close(Dd::ONE.exp(), E_HI, E_LO, 1e-30);
        let x = Dd::from_f64(13.8);
        let roundtrip = x.exp().ln();
        assert!(roundtrip.sub(x).to_f64().abs() < 1e-28);
    }

    #[test]
    fn ln_agrees_with_f64_everywhere() {
        for n in [3u64, 7, 100, 12345, 1_000_000, 123_456_789] {
            let dd = Dd::from_u64(n).ln().to_f64();
            let fl = (n as f64).ln();
            assert!((dd - fl).abs() <= 4.0 * f64::EPSILON * fl.abs());
        }
    }

    #[test]
    fn floor_handles_lo_carry() {
        // hi exactly 3.0, lo slightly negative: true value < 3
        let t = Dd { hi: 3.0, lo: -1e-20 };
        assert_eq!(t.floor(), 2.0);
        let t = Dd { hi: 3.0, lo: 1e-20 };
        assert_eq!(t.floor(), 3.0);
    }

    #[test]
    fn floor_log_ratio_plain_values() {
        // ln 8 / ln ln 8 = 2.8404…, 1.3841 * it = 3.9314…
        assert_eq!(floor_log_ratio(1, 1, 8), 2);
        assert_eq!(floor_log_ratio(13841, 10000, 8), 3);
        // ln 6 / ln ln 6 = 3.0723…
        assert_eq!(floor_log_ratio(1, 1, 6), 3);
        for n in [3u64, 10, 100, 1000, 999_983, 1_000_000] {
            let x = (n as f64).ln();
            let t = x / x.ln();
            assert_eq!(floor_log_ratio(1, 1, n), t.floor() as i64);
        }
    }

    #[test]
    fn floor_log_ratio_boundary_path() {
        // Pick c = c_num/c_den so c * ln n / ln ln n sits within 1e-9 of the
        // integer 3, forcing the double-double re-evaluation.
        let n = 1_000_003u64;
        let x = (n as f64).ln();
        let t0 = x / x.ln();
        let c_den: u32 = 2_000_000_000;
        let c_num = (3.0 * c_den as f64 / t0).round() as u32;
        let scaled = c_num as f64 * t0 / c_den as f64;
        assert!((scaled - 3.0).abs() <= 1e-9, "setup missed the window");
        let got = floor_log_ratio(c_num, c_den, n);
        // independent double-double evaluation of the same quantity
        let ln_n = Dd::from_u64(n).ln();
        let t = ln_n
            .mul_f64(c_num as f64)
            .div(ln_n.ln().mul_f64(c_den as f64));
        assert_eq!(got as f64, t.floor());
        assert!(got == 2 || got == 3);
    }
}

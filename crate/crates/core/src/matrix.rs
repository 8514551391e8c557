//! The three matrices of interest, stored sparsely: A = (a_ij) with
//! a_ij = 1 iff i || j or j = 1 (the full matrix), its upper factor S with
//! s_ij = 1 iff i || j, and the lower factor T carrying Mertens values down
//! the first column. A = S T, so det A = M*(n).
//!
//! Rows and columns are 1-based in every public signature; storage is
//! 0-based CSR with sorted column indices.

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use crate::arith::OmegaTable;
use crate::config::Guards;
use crate::error::Error;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    RStar,
    S,
    T,
}

#[derive(Debug, Clone)]
pub struct SparseUnitaryMatrix {
    n: u64,
    kind: MatrixKind,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<i64>,
}

/// Columns j = i q with gcd(i, q) = 1, ascending; exactly the j <= n with i || j.
fn unitary_multiple_cols(i: u64, n: u64) -> impl Iterator<Item = u64> {
    (1..=n / i).filter(move |q| num_integer::gcd(i, *q) == 1).map(move |q| i * q)
}

impl SparseUnitaryMatrix {
    pub fn build_rstar(n: u64) -> Result<SparseUnitaryMatrix> {
        Self::check_n(n)?;
        let mut m = SparseUnitaryMatrix::empty(n, MatrixKind::RStar);
        for i in 1..=n {
            if i == 1 {
                for j in 1..=n {
                    m.push(j, 1);
                }
            } else {
                m.push(1, 1);
                for j in unitary_multiple_cols(i, n) {
                    m.push(j, 1);
                }
            }
            m.seal_row();
        }
        Ok(m)
    }

    pub fn build_s(n: u64) -> Result<SparseUnitaryMatrix> {
        Self::check_n(n)?;
        let mut m = SparseUnitaryMatrix::empty(n, MatrixKind::S);
        for i in 1..=n {
            for j in unitary_multiple_cols(i, n) {
                m.push(j, 1);
            }
            m.seal_row();
        }
        Ok(m)
    }

    pub fn build_t(n: u64) -> Result<SparseUnitaryMatrix> {
        Self::check_n(n)?;
        let t = OmegaTable::build(n)?;
        let mut m = SparseUnitaryMatrix::empty(n, MatrixKind::T);
        for i in 1..=n {
            let first = t.mertens_star_coprime(n / i, i)?;
            if first != 0 {
                m.push(1, first);
            }
            if i >= 2 {
                m.push(i, 1);
            }
            m.seal_row();
        }
        Ok(m)
    }

    fn check_n(n: u64) -> Result<()> {
        if n == 0 {
            return Err(Error::contract("matrix size must be at least 1"));
        }
        if n > u32::MAX as u64 {
            return Err(Error::Capacity {
                what: "matrix size",
                got: n,
                limit: u32::MAX as u64,
            });
        }
        Ok(())
    }

    fn empty(n: u64, kind: MatrixKind) -> SparseUnitaryMatrix {
        SparseUnitaryMatrix {
            n,
            kind,
            row_ptr: vec![0],
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    fn push(&mut self, col: u64, val: i64) {
        debug_assert!(col >= 1 && col <= self.n);
        let row_start = *self.row_ptr.last().unwrap();
        debug_assert!(
            self.cols.len() == row_start || (*self.cols.last().unwrap() as u64) < col,
            "columns must be pushed in increasing order"
        );
        self.cols.push(col as u32 - 1);
        self.vals.push(val);
    }

    fn seal_row(&mut self) {
        self.row_ptr.push(self.cols.len());
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    /// Entry (i, j), 1-based.
    pub fn get(&self, i: u64, j: u64) -> i64 {
        assert!(i >= 1 && i <= self.n && j >= 1 && j <= self.n);
        let (cols, vals) = self.row(i);
        match cols.binary_search(&(j as u32 - 1)) {
            Ok(p) => vals[p],
            Err(_) => 0,
        }
    }

    /// Nonzeros of row i (1-based) as parallel slices of 0-based columns and values.
    pub fn row(&self, i: u64) -> (&[u32], &[i64]) {
        let lo = self.row_ptr[i as usize - 1];
        let hi = self.row_ptr[i as usize];
        (&self.cols[lo..hi], &self.vals[lo..hi])
    }

    pub fn trace(&self) -> i64 {
        (1..=self.n).map(|i| self.get(i, i)).sum()
    }

    /// trace of the square, without forming it: sum over nonzeros (i, k) of
    /// a_ik a_ki.
    pub fn trace_sq(&self) -> i64 {
        let mut acc = 0i64;
        for i in 1..=self.n {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                acc += v * self.get(c as u64 + 1, i);
            }
        }
        acc
    }

    /// y = A v with v indexed 0..n.
    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len() as u64, self.n);
        (0..self.n as usize)
            .map(|r| {
                let (cols, vals) = self.row(r as u64 + 1);
                cols.iter()
                    .zip(vals)
                    .map(|(&c, &a)| a as f64 * v[c as usize])
                    .sum()
            })
            .collect()
    }

    /// All rows as space-separated integers, one line per row.
    pub fn to_dense_string(&self, guards: &Guards) -> Result<String> {
        if self.n > guards.dense_max {
            return Err(Error::Guard {
                what: "dense rendering size",
                got: self.n,
                limit: guards.dense_max,
            });
        }
        let n = self.n as usize;
        let mut out = String::new();
        for i in 1..=self.n {
            let (cols, vals) = self.row(i);
            let mut dense = vec![0i64; n];
            for (&c, &v) in cols.iter().zip(vals) {
                dense[c as usize] = v;
            }
            let line: Vec<String> = dense.iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        Ok(out)
    }

    /// Nonzeros as `i,j,v` lines, 1-based, row-major, with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j,v\n");
        for i in 1..=self.n {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                out.push_str(&format!("{i},{},{v}\n", c as u64 + 1));
            }
        }
        out
    }
}

/// Row-major exact dense matrix; the workhorse behind determinant checks and
/// the interpolation oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseIntMatrix {
    n: usize,
    data: Vec<BigInt>,
}

impl DenseIntMatrix {
    pub fn from_sparse(a: &SparseUnitaryMatrix, guards: &Guards) -> Result<DenseIntMatrix> {
        if a.n > guards.dense_max {
            return Err(Error::Guard {
                what: "dense matrix size",
                got: a.n,
                limit: guards.dense_max,
            });
        }
        let n = a.n as usize;
        let mut data = vec![BigInt::ZERO; n * n];
        for i in 0..n {
            let (cols, vals) = a.row(i as u64 + 1);
            for (&c, &v) in cols.iter().zip(vals) {
                data[i * n + c as usize] = BigInt::from(v);
            }
        }
        Ok(DenseIntMatrix { n, data })
    }

    /// x I - A for an integer x; the matrix whose determinant is the
    /// characteristic polynomial evaluated at x.
    pub fn char_matrix(a: &SparseUnitaryMatrix, x: i64, guards: &Guards) -> Result<DenseIntMatrix> {
        let mut m = DenseIntMatrix::from_sparse(a, guards)?;
        for v in m.data.iter_mut() {
            *v = -std::mem::take(v);
        }
        let x = BigInt::from(x);
        for i in 0..m.n {
            m.data[i * m.n + i] += &x;
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.n + j]
    }

    /// Fraction-free Gaussian elimination with row pivoting; exact and
    /// polynomial-sized intermediates.
    pub fn bareiss_det(mut self) -> BigInt {
        let n = self.n;
        if n == 0 {
            return BigInt::from(1);
        }
        let mut sign = 1i64;
        let mut prev = BigInt::from(1);
        for k in 0..n - 1 {
            if self.data[k * n + k].is_zero() {
                match (k + 1..n).find(|&r| !self.data[r * n + k].is_zero()) {
                    Some(r) => {
                        for j in 0..n {
                            self.data.swap(k * n + j, r * n + j);
                        }
                        sign = -sign;
                    }
                    None => return BigInt::ZERO,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &self.data[k * n + k] * &self.data[i * n + j]
                        - &self.data[i * n + k] * &self.data[k * n + j];
                    debug_assert!((&num % &prev).is_zero(), "inexact division in elimination");
                    self.data[i * n + j] = num / &prev;
                }
                self.data[i * n + k] = BigInt::ZERO;
            }
            prev = self.data[k * n + k].clone();
        }
        let det = self.data[(n - 1) * n + (n - 1)].clone();
        if sign < 0 {
            -det
        } else {
            det
        }
    }
}

/// S T as a dense matrix, multiplied row by row through the sparse structure.
pub fn sparse_multiply(
    a: &SparseUnitaryMatrix,
    b: &SparseUnitaryMatrix,
    guards: &Guards,
) -> Result<DenseIntMatrix> {
    if a.n != b.n {
        return Err(Error::contract(format!(
            "product of mismatched sizes {} and {}",
            a.n, b.n
        )));
    }
    if a.n > guards.dense_max {
        return Err(Error::Guard {
            what: "dense product size",
            got: a.n,
            limit: guards.dense_max,
        });
    }
    let n = a.n as usize;
    let mut acc = vec![0i64; n * n];
    for i in 0..n {
        let (acols, avals) = a.row(i as u64 + 1);
        for (&k, &va) in acols.iter().zip(avals) {
            let (bcols, bvals) = b.row(k as u64 + 1);
            for (&j, &vb) in bcols.iter().zip(bvals) {
                acc[i * n + j as usize] += va * vb;
            }
        }
    }
    Ok(DenseIntMatrix {
        n,
        data: acc.into_iter().map(BigInt::from).collect(),
    })
}

/// Characteristic polynomial det(x I - A) by interpolation: n + 1 exact
/// determinants at x = 0..n, then Newton forward differences. Coefficients
/// ascending, leading coefficient 1. Independent of the set-partition route,
/// hence usable as its oracle.
pub fn charpoly_oracle(n: u64, guards: &Guards) -> Result<Vec<BigInt>> {
    if n == 0 {
        return Err(Error::contract("characteristic polynomial needs n >= 1"));
    }
    if n > guards.oracle_max {
        return Err(Error::Guard {
            what: "interpolation oracle size",
            got: n,
            limit: guards.oracle_max,
        });
    }
    let a = SparseUnitaryMatrix::build_rstar(n)?;
    let wide = Guards {
        dense_max: guards.dense_max.max(n),
        ..*guards
    };
    let values: Vec<BigInt> = (0..=n as i64)
        .into_par_iter()
        .map(|x| DenseIntMatrix::char_matrix(&a, x, &wide).map(DenseIntMatrix::bareiss_det))
        .collect::<Result<_>>()?;

    // forward differences: after pass k, diffs[0] = the k-th difference at 0
    let deg = n as usize;
    let mut diffs = values.clone();
    let mut newton: Vec<BigInt> = Vec::with_capacity(deg + 1);
    newton.push(diffs[0].clone());
    for k in 1..=deg {
        for i in 0..=deg - k {
            diffs[i] = &diffs[i + 1] - &diffs[i];
        }
        newton.push(diffs[0].clone());
    }

    // n! p(x) = sum_k newton[k] (n!/k!) x (x-1) ... (x-k+1), all integer
    let mut factorial = BigInt::from(1);
    for i in 2..=deg {
        factorial *= i;
    }
    let mut scale = factorial.clone(); // n!/k! for the current k
    let mut falling = vec![BigInt::from(1)]; // x(x-1)...(x-k+1), ascending
    let mut g = vec![BigInt::ZERO; deg + 1];
    for (k, c) in newton.iter().enumerate() {
        if k > 0 {
            scale /= k; // exact: n!/(k-1)! / k
            // falling *= (x - (k - 1))
            let shift = BigInt::from(k as i64 - 1);
            let mut next = vec![BigInt::ZERO; falling.len() + 1];
            for (d, coeff) in falling.iter().enumerate() {
                next[d + 1] += coeff;
                next[d] -= coeff * &shift;
            }
            falling = next;
        }
        let weight = c * &scale;
        for (d, coeff) in falling.iter().enumerate() {
            g[d] += coeff * &weight;
        }
    }
    let coeffs: Vec<BigInt> = g
        .into_iter()
        .map(|c| {
            debug_assert!((&c % &factorial).is_zero());
            c / &factorial
        })
        .collect();

    // the result must be monic and reproduce every node value
    assert!(coeffs[deg] == BigInt::from(1), "interpolated polynomial not monic");
    for (x, v) in values.iter().enumerate() {
        let mut acc = BigInt::ZERO;
        for c in coeffs.iter().rev() {
            acc = acc * x + c;
        }
        assert!(acc == *v, "interpolation fails to reproduce node {x}");
    }
    Ok(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{is_unitary_divisor, OmegaTable};

    fn guards() -> Guards {
        Guards::default()
    }

    /// Entry definition straight from the inequality, no sieve, no CSR.
    fn rstar_entry(i: u64, j: u64) -> i64 {
        if j == 1 || is_unitary_divisor(i, j) {
            1
        } else {
            0
        }
    }

    #[test]
    fn rstar_matches_definition() {
        for n in [1u64, 2, 3, 7, 8, 12, 30, 50] {
            let m = SparseUnitaryMatrix::build_rstar(n).unwrap();
            for i in 1..=n {
                for j in 1..=n {
                    assert_eq!(m.get(i, j), rstar_entry(i, j), "n={n} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn s_matches_definition() {
        for n in [1u64, 8, 20, 36] {
            let m = SparseUnitaryMatrix::build_s(n).unwrap();
            for i in 1..=n {
                for j in 1..=n {
                    let want = if is_unitary_divisor(i, j) { 1 } else { 0 };
                    assert_eq!(m.get(i, j), want, "n={n} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn t_matches_definition() {
        let n = 24u64;
        let t = OmegaTable::build(n).unwrap();
        let m = SparseUnitaryMatrix::build_t(n).unwrap();
        for i in 1..=n {
            for j in 1..=n {
                let want = if j == 1 {
                    t.mertens_star_coprime(n / i, i).unwrap()
                } else if i == j {
                    1
                } else {
                    0
                };
                assert_eq!(m.get(i, j), want, "({i},{j})");
            }
        }
    }

    #[test]
    fn dense_rendering_matches_fixtures() {
        let g = guards();
        let r = SparseUnitaryMatrix::build_rstar(8).unwrap();
        assert_eq!(
            r.to_dense_string(&g).unwrap(),
            include_str!("../tests/fixtures/rstar_8.txt")
        );
        let s = SparseUnitaryMatrix::build_s(8).unwrap();
        assert_eq!(
            s.to_dense_string(&g).unwrap(),
            include_str!("../tests/fixtures/s_8.txt")
        );
        let t = SparseUnitaryMatrix::build_t(8).unwrap();
        assert_eq!(
            t.to_dense_string(&g).unwrap(),
            include_str!("../tests/fixtures/t_8.txt")
        );
    }

    #[test]
    fn csv_rendering_small() {
        let m = SparseUnitaryMatrix::build_t(4).unwrap();
        // M*(4,1) = -2, M*(2,2) = 1, M*(1,3) = 1, M*(1,4) = 1
        assert_eq!(
            m.to_csv(),
            "i,j,v\n1,1,-2\n2,1,1\n2,2,1\n3,1,1\n3,3,1\n4,1,1\n4,4,1\n"
        );
    }

    #[test]
    fn factorization_holds() {
        let g = guards();
        for n in 1..=48u64 {
            let r = SparseUnitaryMatrix::build_rstar(n).unwrap();
            let s = SparseUnitaryMatrix::build_s(n).unwrap();
            let t = SparseUnitaryMatrix::build_t(n).unwrap();
            let product = sparse_multiply(&s, &t, &g).unwrap();
            let direct = DenseIntMatrix::from_sparse(&r, &g).unwrap();
            assert_eq!(product, direct, "S T != A at n = {n}");
        }
    }

    #[test]
    fn determinant_is_mertens() {
        let g = guards();
        let table = OmegaTable::build(40).unwrap();
        for n in 1..=40u64 {
            let r = SparseUnitaryMatrix::build_rstar(n).unwrap();
            let det = DenseIntMatrix::from_sparse(&r, &g).unwrap().bareiss_det();
            assert_eq!(
                det,
                BigInt::from(table.mertens_star(n).unwrap()),
                "det at n = {n}"
            );
        }
    }

    #[test]
    fn determinant_at_8_is_minus_4() {
        let g = guards();
        let r = SparseUnitaryMatrix::build_rstar(8).unwrap();
        assert_eq!(
            DenseIntMatrix::from_sparse(&r, &g).unwrap().bareiss_det(),
            BigInt::from(-4)
        );
    }

    #[test]
    fn bareiss_handles_pivoting() {
        // row swap needed immediately: first pivot is zero
        let m = DenseIntMatrix {
            n: 3,
            data: [0, 2, 1, 1, 0, 0, 3, 1, 4]
                .iter()
                .map(|&v| BigInt::from(v))
                .collect(),
        };
        // det = -(2*4 - 1*1) = -7 after expanding along the swapped rows
        assert_eq!(m.bareiss_det(), BigInt::from(-7));
        let singular = DenseIntMatrix {
            n: 2,
            data: [1, 2, 2, 4].iter().map(|&v| BigInt::from(v)).collect(),
        };
        assert_eq!(singular.bareiss_det(), BigInt::ZERO);
    }

    #[test]
    fn traces() {
        for n in [1u64, 2, 5, 8, 30, 100] {
            let r = SparseUnitaryMatrix::build_rstar(n).unwrap();
            assert_eq!(r.trace(), n as i64, "trace at n = {n}");
            assert_eq!(r.trace_sq(), 3 * n as i64 - 2, "trace of square at n = {n}");
        }
    }

    #[test]
    fn nnz_counts() {
        // row 1 has n entries; row i >= 2 has 1 + #unitary multiples of i
        for n in [1u64, 8, 40] {
            let r = SparseUnitaryMatrix::build_rstar(n).unwrap();
            let mut expect = n as usize;
            for i in 2..=n {
                expect += 1 + unitary_multiple_cols(i, n).count();
            }
            assert_eq!(r.nnz(), expect, "nnz at n = {n}");
        }
    }

    #[test]
    fn matvec_matches_dense() {
        let n = 12u64;
        let r = SparseUnitaryMatrix::build_rstar(n).unwrap();
        let v: Vec<f64> = (0..n).map(|i| (i as f64 + 1.0) * 0.5).collect();
        let y = r.matvec(&v);
        for i in 1..=n {
            let want: f64 = (1..=n).map(|j| r.get(i, j) as f64 * v[j as usize - 1]).sum();
            assert!((y[i as usize - 1] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn guards_refuse_oversized_dense() {
        let g = Guards {
            dense_max: 4,
            ..Guards::default()
        };
        let r = SparseUnitaryMatrix::build_rstar(5).unwrap();
        assert!(matches!(
            DenseIntMatrix::from_sparse(&r, &g),
            Err(Error::Guard { .. })
        ));
        assert!(matches!(
            r.to_dense_string(&g),
            Err(Error::Guard { .. })
        ));
        let g2 = Guards {
            oracle_max: 4,
            ..Guards::default()
        };
        assert!(matches!(charpoly_oracle(5, &g2), Err(Error::Guard { .. })));
    }

    #[test]
    fn charpoly_oracle_small_frozen() {
        let g = guards();
        // n = 1: x - 1
        assert_eq!(
            charpoly_oracle(1, &g).unwrap(),
            vec![BigInt::from(-1), BigInt::from(1)]
        );
        // n = 2: x^2 - 2x
        assert_eq!(
            charpoly_oracle(2, &g).unwrap(),
            [0, -2, 1].iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>()
        );
        // n = 3: x^3 - 3x^2 + x + 1
        assert_eq!(
            charpoly_oracle(3, &g).unwrap(),
            [1, 1, -3, 1].iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>()
        );
    }

    #[test]
    fn charpoly_oracle_fixed_points() {
        let g = guards();
        let table = OmegaTable::build(20).unwrap();
        for n in 1..=20u64 {
            let p = charpoly_oracle(n, &g).unwrap();
            assert_eq!(p.len() as u64, n + 1);
            // p(0) = det(-A) = (-1)^n det A
            let want = BigInt::from(table.mertens_star(n).unwrap());
            let sign = if n % 2 == 0 { want.clone() } else { -want.clone() };
            assert_eq!(p[0], sign, "constant term at n = {n}");
            // second-highest coefficient is -trace
            assert_eq!(p[n as usize - 1], BigInt::from(-(n as i64)), "trace at n = {n}");
        }
    }
}

//! Dense matrices over the integers with arbitrary-precision entries.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

/// A dense row-major integer matrix.
///
/// Columns are read as images of generators: a matrix with `rows` rows and
/// `cols` columns represents a homomorphism `Z^cols -> Z^rows`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix { rows, cols, entries: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        IntegerMatrix { rows, cols, entries }
    }

    /// Builds a matrix from rows of machine integers.
    ///
    /// Panics if the rows are ragged.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        assert!(rows.iter().all(|r| r.as_ref().len() == n_cols), "ragged rows");
        Self::from_fn(n_rows, n_cols, |i, j| BigInt::from(rows[i].as_ref()[j]))
    }

    /// Builds a matrix with the given dimensions from row-major entries.
    pub fn from_entries(rows: usize, cols: usize, entries: Vec<BigInt>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count does not match dimensions");
        IntegerMatrix { rows, cols, entries }
    }

    pub fn diagonal(values: &[i64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { BigInt::from(values[i]) } else { BigInt::zero() })
    }

    /// Uniformly random entries in `lo..=hi`.
    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, lo: i64, hi: i64, rng: &mut R) -> Self {
        Self::from_fn(rows, cols, |_, _| BigInt::from(rng.gen_range(lo..=hi)))
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Matrix product; panics on a dimension mismatch.
    pub fn mul(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hconcat(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.rows, other.rows, "row mismatch in hconcat");
        Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        })
    }

    /// Squared Euclidean norm of column `j`.
    pub fn column_norm_sq(&self, j: usize) -> BigInt {
        (0..self.rows).map(|i| {
            let x = self.get(i, j);
            x * x
        }).sum()
    }

    /// Permutes columns so that column `k` of the result is column `perm[k]` of `self`.
    pub fn permute_columns(&self, perm: &[usize]) -> IntegerMatrix {
        assert_eq!(perm.len(), self.cols);
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, perm[j]).clone())
    }

    /// Determinant by Bareiss fraction-free elimination. Panics if not square.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.to_rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    /// Rank over the rationals (fraction-free elimination, exact).
    pub fn rank_rational(&self) -> usize {
        let mut a = self.to_rows();
        let (m, n) = (self.rows, self.cols);
        let mut rank = 0;
        let mut prev = BigInt::one();
        for col in 0..n {
            if rank == m {
                break;
            }
            let Some(p) = (rank..m).find(|&i| !a[i][col].is_zero()) else {
                continue;
            };
            a.swap(rank, p);
            for i in rank + 1..m {
                for j in col + 1..n {
                    let v = &a[i][j] * &a[rank][col] - &a[i][col] * &a[rank][j];
                    a[i][j] = v / &prev;
                }
                a[i][col] = BigInt::zero();
            }
            prev = a[rank][col].clone();
            rank += 1;
        }
        rank
    }

    /// Rank over the prime field `F_p`.
    pub fn rank_mod_prime(&self, p: u64) -> usize {
        let modulus = BigInt::from(p);
        let mut a: Vec<Vec<u64>> = (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(|x| x.mod_floor(&modulus).to_u64().expect("residue fits in u64"))
                    .collect()
            })
            .collect();
        let (m, n) = (self.rows, self.cols);
        let mut rank = 0;
        for col in 0..n {
            if rank == m {
                break;
            }
            let Some(piv) = (rank..m).find(|&i| a[i][col] != 0) else {
                continue;
            };
            a.swap(rank, piv);
            let inv = mod_inverse(a[rank][col], p);
            for j in col..n {
                a[rank][j] = mul_mod(a[rank][j], inv, p);
            }
            for i in 0..m {
                if i != rank && a[i][col] != 0 {
                    let f = a[i][col];
                    for j in col..n {
                        let sub = mul_mod(f, a[rank][j], p);
                        a[i][j] = (a[i][j] + p - sub) % p;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Largest absolute value of any entry.
    pub fn max_abs(&self) -> BigInt {
        self.entries.iter().map(|x| x.abs()).max().unwrap_or_else(BigInt::zero)
    }
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // Fermat: p is prime.
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = mul_mod(result, base, p);
        }
        base = mul_mod(base, base, p);
        e >>= 1;
    }
    result
}

impl fmt::Debug for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntegerMatrix {}x{} ", self.rows, self.cols)?;
        f.debug_list().entries((0..self.rows).map(|i| {
            self.row(i).iter().map(|x| x.to_string()).collect::<Vec<_>>()
        })).finish()
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_transpose() {
        let a = IntegerMatrix::from_rows(&[[1, 2], [3, 4]]);
        let b = IntegerMatrix::from_rows(&[[0, 1], [1, 0]]);
        assert_eq!(a.mul(&b), IntegerMatrix::from_rows(&[[2, 1], [4, 3]]));
        assert_eq!(a.transpose(), IntegerMatrix::from_rows(&[[1, 3], [2, 4]]));
    }

    #[test]
    fn determinant_small() {
        let a = IntegerMatrix::from_rows(&[[2, 1, 0], [1, 3, 1], [0, 1, 4]]);
        // 2(12-1) - 1(4-0) = 18
        assert_eq!(a.determinant(), BigInt::from(18));
        assert_eq!(IntegerMatrix::from_rows(&[[0, 1], [1, 0]]).determinant(), BigInt::from(-1));
        assert_eq!(IntegerMatrix::identity(0).determinant(), BigInt::one());
    }

    #[test]
    fn ranks() {
        let a = IntegerMatrix::from_rows(&[[2, 0], [0, 2]]);
        assert_eq!(a.rank_rational(), 2);
        assert_eq!(a.rank_mod_prime(2), 0);
        assert_eq!(a.rank_mod_prime(3), 2);
        let b = IntegerMatrix::from_rows(&[[1, 2, 3], [2, 4, 6]]);
        assert_eq!(b.rank_rational(), 1);
        assert_eq!(IntegerMatrix::zeros(0, 4).rank_rational(), 0);
    }
}

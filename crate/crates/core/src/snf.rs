//! Smith normal form over the integers.
//!
//! Elimination uses a smallest-magnitude pivot and Euclidean row/column
//! reduction. Unimodular transforms are tracked only when requested, since
//! homology computations need just the diagonal.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::matrix::IntegerMatrix;

/// `U * A * V = S` with `S` diagonal and `s_1 | s_2 | ... | s_rank`.
#[derive(Clone, Debug)]
pub struct SnfResult {
    pub s: IntegerMatrix,
    pub u: IntegerMatrix,
    pub v: IntegerMatrix,
    pub rank: usize,
}

impl SnfResult {
    /// The nonzero diagonal entries, in order.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.s.get(i, i).clone()).collect()
    }
}

/// Full decomposition with transforms.
pub fn smith_normal_form(a: &IntegerMatrix) -> SnfResult {
    let mut e = Eliminator::new(a, true);
    e.run();
    let rank = e.rank;
    let (s, u, v) = e.into_parts();
    SnfResult { s, u: u.expect("tracked"), v: v.expect("tracked"), rank }
}

/// Rank and nonzero invariant factors, without transforms.
pub fn invariant_factors(a: &IntegerMatrix) -> (usize, Vec<BigInt>) {
    let mut e = Eliminator::new(a, false);
    e.run();
    let rank = e.rank;
    let diag = (0..rank).map(|i| e.a[i][i].clone()).collect();
    (rank, diag)
}

struct Eliminator {
    a: Vec<Vec<BigInt>>,
    u: Option<Vec<Vec<BigInt>>>,
    v: Option<Vec<Vec<BigInt>>>,
    m: usize,
    n: usize,
    rank: usize,
}

impl Eliminator {
    fn new(a: &IntegerMatrix, track: bool) -> Self {
        let (m, n) = (a.rows(), a.cols());
        let ident = |k: usize| -> Vec<Vec<BigInt>> {
            (0..k)
                .map(|i| (0..k).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
                .collect()
        };
        Eliminator {
            a: a.to_rows(),
            u: track.then(|| ident(m)),
            v: track.then(|| ident(n)),
            m,
            n,
            rank: 0,
        }
    }

    fn into_parts(self) -> (IntegerMatrix, Option<IntegerMatrix>, Option<IntegerMatrix>) {
        let to_mat = |rows: Vec<Vec<BigInt>>, r: usize, c: usize| {
            IntegerMatrix::from_entries(r, c, rows.into_iter().flatten().collect())
        };
        let (m, n) = (self.m, self.n);
        (
            to_mat(self.a, m, n),
            self.u.map(|u| to_mat(u, m, m)),
            self.v.map(|v| to_mat(v, n, n)),
        )
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i != j {
            self.a.swap(i, j);
            if let Some(u) = self.u.as_mut() {
                u.swap(i, j);
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i != j {
            for row in self.a.iter_mut() {
                row.swap(i, j);
            }
            if let Some(v) = self.v.as_mut() {
                for row in v.iter_mut() {
                    row.swap(i, j);
                }
            }
        }
    }

    /// row_target -= q * row_source
    fn row_axpy(&mut self, target: usize, source: usize, q: &BigInt, from_col: usize) {
        let (src, dst) = two_rows(&mut self.a, source, target);
        for j in from_col..src.len() {
            if !src[j].is_zero() {
                dst[j] -= q * &src[j];
            }
        }
        if let Some(u) = self.u.as_mut() {
            let (src, dst) = two_rows(u, source, target);
            for j in 0..src.len() {
                if !src[j].is_zero() {
                    dst[j] -= q * &src[j];
                }
            }
        }
    }

    /// col_target -= q * col_source
    fn col_axpy(&mut self, target: usize, source: usize, q: &BigInt, from_row: usize) {
        for row in self.a[from_row..].iter_mut() {
            if !row[source].is_zero() {
                let delta = q * &row[source];
                row[target] -= delta;
            }
        }
        if let Some(v) = self.v.as_mut() {
            for row in v.iter_mut() {
                if !row[source].is_zero() {
                    let delta = q * &row[source];
                    row[target] -= delta;
                }
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.a[i].iter_mut() {
            *x = -std::mem::take(x);
        }
        if let Some(u) = self.u.as_mut() {
            for x in u[i].iter_mut() {
                *x = -std::mem::take(x);
            }
        }
    }

    /// Position of a smallest-magnitude nonzero entry in the trailing block.
    fn find_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, BigInt)> = None;
        for i in t..self.m {
            for j in t..self.n {
                let x = &self.a[i][j];
                if x.is_zero() {
                    continue;
                }
                let mag = x.abs();
                if mag.is_one() {
                    return Some((i, j));
                }
                if best.as_ref().is_none_or(|(_, _, b)| &mag < b) {
                    best = Some((i, j, mag));
                }
            }
        }
        best.map(|(i, j, _)| (i, j))
    }

    fn run(&mut self) {
        let limit = self.m.min(self.n);
        let mut t = 0;
        while t < limit {
            let Some((pi, pj)) = self.find_pivot(t) else {
                break;
            };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            if !self.reduce_against_pivot(t) {
                // A remainder survived: pick the (now smaller) global minimum again.
                continue;
            }
            let pivot = self.a[t][t].clone();
            if !pivot.abs().is_one() {
                let offender = (t + 1..self.m)
                    .find(|&i| self.a[i][t + 1..].iter().any(|x| !x.is_multiple_of(&pivot)));
                if let Some(i) = offender {
                    // row_t += row_i brings a non-multiple into the pivot row.
                    let minus_one = -BigInt::one();
                    self.row_axpy(t, i, &minus_one, t);
                    continue;
                }
            }
            if self.a[t][t].is_negative() {
                self.negate_row(t);
            }
            t += 1;
        }
        self.rank = t;
    }

    /// One pass of nearest-quotient reduction of column `t` and row `t`.
    /// Returns whether both were cleared outside the pivot.
    fn reduce_against_pivot(&mut self, t: usize) -> bool {
        let mut clean = true;
        for i in t + 1..self.m {
            if self.a[i][t].is_zero() {
                continue;
            }
            let q = nearest_quotient(&self.a[i][t], &self.a[t][t]);
            self.row_axpy(i, t, &q, t);
            clean &= self.a[i][t].is_zero();
        }
        for j in t + 1..self.n {
            if self.a[t][j].is_zero() {
                continue;
            }
            let q = nearest_quotient(&self.a[t][j], &self.a[t][t]);
            self.col_axpy(j, t, &q, t);
            clean &= self.a[t][j].is_zero();
        }
        clean
    }
}

/// `round(a / b)`, so the remainder has magnitude at most `|b| / 2`.
fn nearest_quotient(a: &BigInt, b: &BigInt) -> BigInt {
    // Floor division leaves r with the sign of b, so stepping q up by one
    // replaces r with r - b.
    let (q, r) = a.div_mod_floor(b);
    let twice: BigInt = r.abs() * 2;
    if twice > b.abs() { q + 1 } else { q }
}

fn two_rows<T>(rows: &mut [Vec<T>], source: usize, target: usize) -> (&Vec<T>, &mut Vec<T>) {
    assert_ne!(source, target);
    if source < target {
        let (lo, hi) = rows.split_at_mut(target);
        (&lo[source], &mut hi[0])
    } else {
        let (lo, hi) = rows.split_at_mut(source);
        (&hi[0], &mut lo[target])
    }
}

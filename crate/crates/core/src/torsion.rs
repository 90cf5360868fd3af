//! Torsion bounds: the Gabber–Soulé column-norm bound and the (D,V)-complex bound.
//!
//! Verdicts are decided by exact integer comparison. Floating values in the
//! reports are for display; the bound is additionally given as an upward
//! rounded dyadic square root at a configurable number of bits.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::homology::{cokernel, relative_homology};
use crate::matrix::IntegerMatrix;
use crate::simplicial::{complexity_profile, random_dv_complex, SimplicialComplex, SimplicialPair};

pub const DEFAULT_PRECISION_BITS: u32 = 96;
pub const PRECISION_ENV: &str = "TORSIONLAB_PRECISION";

/// Bits used for the upward-rounded square roots; reads `TORSIONLAB_PRECISION`.
pub fn precision_from_env() -> u32 {
    std::env::var(PRECISION_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&b: &u32| b > 0)
        .unwrap_or(DEFAULT_PRECISION_BITS)
}

/// How the basis-selecting column subset is chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ColumnSelection {
    /// Greedy in column order.
    #[default]
    FirstFit,
    /// Greedy after sorting columns by norm, usually a tighter bound.
    SmallestNorm,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SouleBoundReport {
    pub chosen_columns: Vec<usize>,
    /// Exact product of squared column norms.
    #[serde(serialize_with = "serialize_bigint")]
    pub bound_squared: BigInt,
    /// Upper approximation of the bound, rounded up.
    pub bound: f64,
    #[serde(serialize_with = "serialize_bigint")]
    pub exact_torsion: BigInt,
    pub holds: bool,
    /// `exact_torsion² == bound²`.
    pub equality: bool,
}

impl SouleBoundReport {
    /// `log|tors| / log(bound)`, zero when the bound is at most one.
    pub fn ratio(&self) -> f64 {
        let lb = log_bigint(&self.bound_squared) / 2.0;
        if lb <= 0.0 {
            0.0
        } else {
            log_bigint(&self.exact_torsion) / lb
        }
    }
}

fn serialize_bigint<S: serde::Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v.to_i64() {
        Some(x) => s.serialize_i64(x),
        None => s.serialize_str(&v.to_string()),
    }
}

/// Natural log of a positive integer, accurate for huge values.
pub fn log_bigint(x: &BigInt) -> f64 {
    assert!(x.sign() == Sign::Plus, "log of non-positive integer");
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits").ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("fits");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `ceil(sqrt(n) * 2^bits) / 2^bits` as an `f64`, rounded up once more.
pub fn sqrt_upper(n: &BigInt, bits: u32) -> f64 {
    let n = n.to_biguint().expect("non-negative");
    let scaled: BigUint = &n << (2 * bits as u64);
    let mut s = scaled.sqrt();
    if &s * &s < scaled {
        s += 1u32;
    }
    let bits_s = s.bits();
    let value = if bits_s > 1000 {
        let shift = bits_s - 64;
        (&s >> shift).to_f64().expect("fits") * 2f64.powi((shift as i64 - bits as i64) as i32)
    } else {
        s.to_f64().expect("fits") / 2f64.powi(bits as i32)
    };
    value.next_up()
}

/// Column indices forming a basis of the image over the rationals, chosen greedily in `order`.
pub fn greedy_basis_columns(a: &IntegerMatrix, order: &[usize]) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut rank = 0;
    for &j in order {
        let mut trial = chosen.clone();
        trial.push(j);
        let sub = IntegerMatrix::from_fn(a.rows(), trial.len(), |i, c| a.get(i, trial[c]).clone());
        let r = sub.rank_rational();
        if r > rank {
            rank = r;
            chosen = trial;
        }
    }
    chosen
}

pub fn soule_bound(a: &IntegerMatrix) -> SouleBoundReport {
    soule_bound_with(a, ColumnSelection::FirstFit, DEFAULT_PRECISION_BITS)
}

pub fn soule_bound_with(a: &IntegerMatrix, selection: ColumnSelection, precision_bits: u32) -> SouleBoundReport {
    let mut order: Vec<usize> = (0..a.cols()).collect();
    if selection == ColumnSelection::SmallestNorm {
        order.sort_by_key(|&j| a.column_norm_sq(j));
    }
    let mut chosen = greedy_basis_columns(a, &order);
    chosen.sort_unstable();
    let bound_squared: BigInt = chosen.iter().map(|&j| a.column_norm_sq(j)).product();
    let exact_torsion = cokernel(a).torsion_order();
    let t_sq = &exact_torsion * &exact_torsion;
    SouleBoundReport {
        bound: sqrt_upper(&bound_squared, precision_bits),
        holds: t_sq <= bound_squared,
        equality: t_sq == bound_squared,
        chosen_columns: chosen,
        bound_squared,
        exact_torsion,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DvBoundReport {
    #[serde(rename = "D")]
    pub max_degree: usize,
    #[serde(rename = "V")]
    pub vertices: usize,
    pub p: usize,
    #[serde(serialize_with = "serialize_bigint")]
    pub torsion: BigInt,
    pub log_torsion: f64,
    /// `D^p * V * log(p + 1)`.
    pub log_bound: f64,
    pub holds: bool,
}

impl DvBoundReport {
    pub fn ratio(&self) -> f64 {
        if self.log_bound <= 0.0 {
            0.0
        } else {
            self.log_torsion / self.log_bound
        }
    }
}

/// Compares `|tors H_p(total, sub)|` against `(p+1)^(D^p V)`, with `D`, `V` from the total complex.
pub fn dv_torsion_check(pair: &SimplicialPair, p: usize) -> DvBoundReport {
    let profile = complexity_profile(pair.total());
    let torsion = relative_homology(pair, p).torsion_order();
    let (d, v) = (profile.max_degree, profile.vertices);
    let exponent = (d as u128).checked_pow(p as u32).and_then(|x| x.checked_mul(v as u128));
    let base = BigInt::from(p + 1);
    let holds = match exponent {
        // (p+1)^e with e beyond u32 dwarfs any torsion we can compute.
        None => true,
        Some(e) if e > u32::MAX as u128 => true,
        Some(e) => {
            let e = e as u32;
            // Cheap sufficient test before the exact power.
            let log2_base = ((p + 1) as f64).log2().floor() as u64;
            if torsion.bits() < (e as u64) * log2_base {
                true
            } else {
                torsion <= num_traits::pow::pow(base, e as usize)
            }
        }
    };
    let log_bound = exponent.map_or(f64::INFINITY, |e| e as f64) * ((p + 1) as f64).ln();
    DvBoundReport {
        max_degree: d,
        vertices: v,
        p,
        log_torsion: log_bigint(&torsion),
        log_bound,
        holds,
        torsion,
    }
}

/// Batch generator parameters.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BatchParams {
    /// Random integer matrices with `1..=max_size` rows and columns and
    /// entries in `-max_entry..=max_entry`.
    Soule { max_size: usize, max_entry: i64 },
    /// Random complexes with `D`, `V`, dimension drawn up to the given caps,
    /// checked in each listed degree against a random subcomplex.
    DvBound { max_degree: usize, max_vertices: usize, max_dim: usize, degrees: Vec<usize> },
}

impl BatchParams {
    pub fn soule_default() -> Self {
        BatchParams::Soule { max_size: 10, max_entry: 5 }
    }

    pub fn dv_default() -> Self {
        BatchParams::DvBound { max_degree: 6, max_vertices: 30, max_dim: 3, degrees: vec![1, 2] }
    }
}

/// Everything needed to reproduce one batch instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InstancePayload {
    Matrix { rows: usize, cols: usize, entries: Vec<Vec<i64>> },
    Pair { total: Vec<Vec<usize>>, sub: Vec<Vec<usize>> },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "check", rename_all = "kebab-case")]
pub enum InstanceCheck {
    Soule(SouleBoundReport),
    DvBound { reports: Vec<DvBoundReport> },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceReport {
    pub index: usize,
    pub holds: bool,
    pub ratio: f64,
    pub check: InstanceCheck,
    pub payload: InstancePayload,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BatchSummary {
    pub count: usize,
    pub seed: u64,
    pub failures: Vec<usize>,
    pub max_ratio: f64,
    pub min_ratio: f64,
}

/// Runs `count` independent instances; results are ordered by index regardless of scheduling.
pub fn batch_verify(params: &BatchParams, count: usize, seed: u64) -> Result<(BatchSummary, Vec<InstanceReport>)> {
    if count == 0 {
        return Err(Error::InvalidParameter("count must be at least 1".into()));
    }
    let reports: Vec<InstanceReport> =
        (0..count).into_par_iter().map(|i| run_instance(params, seed, i)).collect::<Result<_>>()?;
    let ratios = reports.iter().map(|r| r.ratio);
    let summary = BatchSummary {
        count,
        seed,
        failures: reports.iter().filter(|r| !r.holds).map(|r| r.index).collect(),
        max_ratio: ratios.clone().fold(0.0, f64::max),
        min_ratio: ratios.fold(f64::INFINITY, f64::min),
    };
    Ok((summary, reports))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagonalCase {
    pub index: usize,
    pub diagonal: Vec<i64>,
    pub report: SouleBoundReport,
}

/// Random square diagonal matrices with entries in `1..=max_entry`, where
/// the column-norm bound is attained: every case should report equality.
pub fn diagonal_equality_suite(count: usize, max_entry: i64, seed: u64) -> Vec<DiagonalCase> {
    (0..count)
        .into_par_iter()
        .map(|index| {
            let mut rng = instance_rng(seed, index);
            let n = rng.gen_range(1..=8);
            let diagonal: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=max_entry)).collect();
            let report = soule_bound(&IntegerMatrix::diagonal(&diagonal));
            DiagonalCase { index, diagonal, report }
        })
        .collect()
}

pub(crate) fn instance_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn run_instance(params: &BatchParams, seed: u64, index: usize) -> Result<InstanceReport> {
    let mut rng = instance_rng(seed, index);
    match params {
        BatchParams::Soule { max_size, max_entry } => {
            let rows = rng.gen_range(1..=*max_size);
            let cols = rng.gen_range(1..=*max_size);
            let a = IntegerMatrix::random(rows, cols, -max_entry, *max_entry, &mut rng);
            let report = soule_bound(&a);
            let payload = InstancePayload::Matrix {
                rows,
                cols,
                entries: a.to_rows().iter().map(|r| r.iter().map(|x| x.to_i64().expect("small")).collect()).collect(),
            };
            Ok(InstanceReport {
                index,
                holds: report.holds,
                ratio: report.ratio(),
                check: InstanceCheck::Soule(report),
                payload,
            })
        }
        BatchParams::DvBound { max_degree, max_vertices, max_dim, degrees } => {
            let d = rng.gen_range(1..=*max_degree);
            let v = rng.gen_range(1..=*max_vertices);
            let dim = rng.gen_range(1..=*max_dim);
            let total = random_dv_complex(d, v, dim, rng.gen())?;
            let maximal = total.maximal_simplices();
            let sub_simplices: Vec<Vec<usize>> = maximal
                .iter()
                .filter(|_| rng.gen_bool(0.3))
                .map(|s| s.vertices().to_vec())
                .collect();
            let sub = SimplicialComplex::build(&sub_simplices)?;
            let pair = SimplicialPair::new(total, sub)?;
            let reports: Vec<DvBoundReport> = degrees.iter().map(|&p| dv_torsion_check(&pair, p)).collect();
            let holds = reports.iter().all(|r| r.holds);
            let ratio = reports.iter().map(DvBoundReport::ratio).fold(0.0, f64::max);
            let payload = InstancePayload::Pair {
                total: maximal.iter().map(|s| s.vertices().to_vec()).collect(),
                sub: sub_simplices,
            };
            Ok(InstanceReport { index, holds, ratio, check: InstanceCheck::DvBound { reports }, payload })
        }
    }
}

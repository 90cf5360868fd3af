//! First homology of Dehn fillings, the figure-eight family, Ray–Singer
//! torsion of rational homology spheres and torsion schedules.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::constants::figure_eight_volume;
use crate::error::{Error, Result};
use crate::homology::{cokernel, serialize_bigints, AbelianGroupStructure};
use crate::matrix::IntegerMatrix;

/// Homology data of a knot-complement-like manifold with one torus cusp.
#[derive(Clone, Debug, PartialEq)]
pub struct PeripheralData {
    /// Relations (rows) on the generators (columns) of `H_1` of the complement.
    core_presentation: IntegerMatrix,
    mu_image: Vec<BigInt>,
    lambda_image: Vec<BigInt>,
}

impl PeripheralData {
    pub fn new(core_presentation: IntegerMatrix, mu_image: Vec<i64>, lambda_image: Vec<i64>) -> Result<Self> {
        let n = core_presentation.cols();
        if mu_image.len() != n || lambda_image.len() != n {
            return Err(Error::MalformedInput(format!(
                "meridian and longitude images need {n} entries, got {} and {}",
                mu_image.len(),
                lambda_image.len()
            )));
        }
        let lambda: Vec<BigInt> = lambda_image.into_iter().map(BigInt::from).collect();
        // The longitude must be torsion: it lies in the rational span of the relations.
        let rank = core_presentation.rank_rational();
        let mut rows = core_presentation.to_rows();
        rows.push(lambda.clone());
        let stacked = IntegerMatrix::from_entries(rows.len(), n, rows.into_iter().flatten().collect());
        if stacked.rank_rational() != rank {
            return Err(Error::MalformedInput("the longitude image must have finite order".into()));
        }
        Ok(PeripheralData { core_presentation, mu_image: mu_image.into_iter().map(BigInt::from).collect(), lambda_image: lambda })
    }

    /// `H_1 = Z` generated by the meridian, longitude null-homologous.
    pub fn figure_eight() -> Self {
        PeripheralData::new(IntegerMatrix::zeros(0, 1), vec![1], vec![0]).expect("valid data")
    }

    pub fn generators(&self) -> usize {
        self.core_presentation.cols()
    }

    pub fn core_presentation(&self) -> &IntegerMatrix {
        &self.core_presentation
    }

    /// `H_1` of the complement itself.
    pub fn core_group(&self) -> AbelianGroupStructure {
        cokernel(&self.core_presentation.transpose())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FillingSlope {
    pub p: i64,
    pub q: i64,
}

impl FillingSlope {
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if p.gcd(&q) != 1 {
            return Err(Error::InvalidSlope { p, q });
        }
        Ok(FillingSlope { p, q })
    }

    /// The sporadic slopes `(±p, ±q)` excluded from the hyperbolicity claim
    /// for the figure-eight knot.
    pub fn is_figure_eight_exceptional(&self) -> bool {
        const EXCLUDED: [(u64, u64); 6] = [(1, 0), (0, 1), (1, 1), (2, 1), (3, 1), (4, 1)];
        EXCLUDED.contains(&(self.p.unsigned_abs(), self.q.unsigned_abs()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HyperbolicFlag {
    Yes,
    Excluded,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FillingResult {
    pub p: i64,
    pub q: i64,
    pub betti: usize,
    #[serde(serialize_with = "serialize_bigints")]
    pub torsion: Vec<BigInt>,
    #[serde(skip)]
    pub group: AbelianGroupStructure,
    pub hyperbolic: HyperbolicFlag,
}

impl FillingResult {
    pub fn torsion_order(&self) -> BigInt {
        self.group.torsion_order()
    }
}

/// The Mayer–Vietoris presentation matrix of `H_1` of the filling: rows are
/// the solid-torus core followed by the generators, columns are `μ`, `λ`
/// and the relations.
pub fn filling_matrix(data: &PeripheralData, slope: FillingSlope) -> IntegerMatrix {
    let n = data.generators();
    let rels = data.core_presentation.rows();
    let cols = 2 + rels;
    IntegerMatrix::from_fn(n + 1, cols, |i, j| match (i, j) {
        (0, 0) => BigInt::from(slope.q),
        (0, 1) => BigInt::from(-slope.p),
        (0, _) => BigInt::zero(),
        (i, 0) => data.mu_image[i - 1].clone(),
        (i, 1) => data.lambda_image[i - 1].clone(),
        (i, j) => data.core_presentation.get(j - 2, i - 1).clone(),
    })
}

pub fn fill_homology(data: &PeripheralData, slope: FillingSlope) -> FillingResult {
    let group = cokernel(&filling_matrix(data, slope));
    FillingResult {
        p: slope.p,
        q: slope.q,
        betti: group.betti,
        torsion: group.invariant_factors.clone(),
        group,
        hyperbolic: HyperbolicFlag::Unknown,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FigureEightRow {
    #[serde(flatten)]
    pub result: FillingResult,
    /// Strict upper bound on the volume of the filled manifold.
    pub volume_upper_bound: f64,
}

/// Every coprime slope in the given ranges, in lexicographic order of `(p, q)`.
pub fn figure_eight_family(p_range: std::ops::RangeInclusive<i64>, q_range: std::ops::RangeInclusive<i64>) -> Vec<FigureEightRow> {
    let data = PeripheralData::figure_eight();
    let volume = figure_eight_volume();
    let slopes: Vec<FillingSlope> = p_range
        .flat_map(|p| q_range.clone().map(move |q| (p, q)))
        .filter_map(|(p, q)| FillingSlope::new(p, q).ok())
        .collect();
    slopes
        .par_iter()
        .map(|&slope| {
            let mut result = fill_homology(&data, slope);
            result.hyperbolic =
                if slope.is_figure_eight_exceptional() { HyperbolicFlag::Excluded } else { HyperbolicFlag::Yes };
            FigureEightRow { result, volume_upper_bound: volume }
        })
        .collect()
}

/// `τ(M) = -log|tors H_1| + log vol(M)` for a rational homology sphere.
pub fn ray_singer(tors_order: &BigInt, volume: f64, rational_homology_sphere: bool) -> Result<f64> {
    if !rational_homology_sphere {
        return Err(Error::Unsupported("Ray-Singer torsion needs the regulator unless b_1 = 0".into()));
    }
    if tors_order <= &BigInt::zero() {
        return Err(Error::InvalidParameter(format!("torsion order must be positive, got {tors_order}")));
    }
    if !(volume > 0.0) || !volume.is_finite() {
        return Err(Error::InvalidParameter(format!("volume must be positive, got {volume}")));
    }
    Ok(volume.ln() - crate::torsion::log_bigint(tors_order))
}

/// Target value of the normalized torsion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Alpha {
    Finite(f64),
    Infinite,
}

impl std::str::FromStr for Alpha {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Alpha::Infinite),
            t => {
                let a: f64 = t.parse().map_err(|_| Error::InvalidParameter(format!("bad alpha {t:?}")))?;
                if a.is_infinite() && a > 0.0 {
                    Ok(Alpha::Infinite)
                } else if a >= 0.0 && a.is_finite() {
                    Ok(Alpha::Finite(a))
                } else {
                    Err(Error::InvalidParameter(format!("alpha must lie in [0, inf], got {t}")))
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScheduleEntry {
    pub volume: f64,
    pub p: u64,
    /// `log(p_n) / v_n`; absent when `p_n = 0`.
    pub log_ratio: Option<f64>,
    /// `p_n / v_n`.
    pub linear_ratio: f64,
    /// `τ/vol` when `log|tors| = p_n`: `(-p_n + log v_n) / v_n`.
    pub ray_singer_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TorsionSchedule {
    pub entries: Vec<ScheduleEntry>,
    /// Which ratio tends to `alpha`: always `"p_n/v_n"`.
    pub reproducing_reading: &'static str,
    /// Last `p_n / v_n`.
    pub limit_estimate: f64,
}

/// `p_n = ⌊α v_n⌋`, with `⌊v_n^2⌋` for `α = ∞` and `⌊√v_n⌋` for `α = 0`.
pub fn torsion_schedule(alpha: Alpha, volumes: &[f64]) -> Result<TorsionSchedule> {
    if volumes.is_empty() {
        return Err(Error::InvalidParameter("empty volume sequence".into()));
    }
    if volumes.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidParameter("volumes must be positive and finite".into()));
    }
    if volumes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("volumes must be strictly increasing".into()));
    }
    let entries: Vec<ScheduleEntry> = volumes
        .iter()
        .map(|&v| {
            let p = match alpha {
                Alpha::Infinite => (v * v).floor(),
                Alpha::Finite(a) if a == 0.0 => v.sqrt().floor(),
                Alpha::Finite(a) => (a * v).floor(),
            };
            let p_int = p.to_u64().unwrap_or(u64::MAX);
            ScheduleEntry {
                volume: v,
                p: p_int,
                log_ratio: (p_int > 0).then(|| p.ln() / v),
                linear_ratio: p / v,
                ray_singer_ratio: (-p + v.ln()) / v,
            }
        })
        .collect();
    let limit_estimate = entries.last().map(|e| e.linear_ratio).unwrap_or(0.0);
    Ok(TorsionSchedule { entries, reproducing_reading: "p_n/v_n", limit_estimate })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn slope(p: i64, q: i64) -> FillingSlope {
        FillingSlope::new(p, q).unwrap()
    }

    #[test]
    fn figure_eight_examples() {
        let data = PeripheralData::figure_eight();
        let r = fill_homology(&data, slope(5, 1));
        assert_eq!(r.betti, 0);
        assert_eq!(r.torsion, vec![BigInt::from(5)]);
        assert!(fill_homology(&data, slope(1, 0)).group.is_trivial());
        let r = fill_homology(&data, slope(0, 1));
        assert_eq!(r.betti, 1);
        assert!(r.torsion.is_empty());
    }

    #[test]
    fn invalid_slopes() {
        assert!(matches!(FillingSlope::new(4, 2), Err(Error::InvalidSlope { p: 4, q: 2 })));
        assert!(FillingSlope::new(0, 0).is_err());
        assert!(FillingSlope::new(0, -1).is_ok());
    }

    #[test]
    fn torsion_lower_bound_instance() {
        // H_1 of the complement Z ⊕ Z/3, meridian (1, 0), longitude (0, 1).
        let data = PeripheralData::new(IntegerMatrix::from_rows(&[[0, 3]]), vec![1, 0], vec![0, 1]).unwrap();
        let r = fill_homology(&data, slope(7, 3));
        assert!(r.torsion_order() >= BigInt::from(7));
        assert_eq!(r.betti, 0);
    }

    #[test]
    fn longitude_must_be_torsion() {
        assert!(PeripheralData::new(IntegerMatrix::zeros(0, 1), vec![1], vec![1]).is_err());
        assert!(PeripheralData::new(IntegerMatrix::zeros(0, 1), vec![1, 0], vec![0]).is_err());
    }

    #[test]
    fn family_flags() {
        let rows = figure_eight_family(0..=5, 0..=2);
        let find = |p, q| rows.iter().find(|r| r.result.p == p && r.result.q == q).unwrap();
        assert_eq!(find(2, 1).result.hyperbolic, HyperbolicFlag::Excluded);
        assert_eq!(find(0, 1).result.hyperbolic, HyperbolicFlag::Excluded);
        assert_eq!(find(0, 1).result.betti, 1);
        assert_eq!(find(5, 2).result.hyperbolic, HyperbolicFlag::Yes);
        assert_eq!(find(5, 2).result.torsion, vec![BigInt::from(5)]);
        assert!(rows.iter().all(|r| r.volume_upper_bound < 2.03));
        assert!(!rows.iter().any(|r| r.result.p == 4 && r.result.q == 2));
    }

    #[test]
    fn ray_singer_examples() {
        assert!((ray_singer(&BigInt::from(1), std::f64::consts::E, true).unwrap() - 1.0).abs() < 1e-15);
        assert!((ray_singer(&BigInt::from(5), 2.0, true).unwrap() - (0.4f64).ln()).abs() < 1e-15);
        assert!(matches!(ray_singer(&BigInt::from(5), 2.0, false), Err(Error::Unsupported(_))));
        assert!(ray_singer(&BigInt::from(0), 2.0, true).is_err());
    }

    #[test]
    fn schedules() {
        let vols: Vec<f64> = (10..=10_000).map(|n| n as f64).collect();
        let s = torsion_schedule(Alpha::Finite(1.0), &vols).unwrap();
        assert!((s.limit_estimate - 1.0).abs() < 1e-12);
        assert!(s.entries.last().unwrap().log_ratio.unwrap() < 1e-3);
        let s = torsion_schedule(Alpha::Finite(2.5), &vols).unwrap();
        assert!((s.limit_estimate - 2.5).abs() < 1e-3);
        assert!((s.entries.last().unwrap().ray_singer_ratio + 2.5).abs() < 1e-2);
        let s = torsion_schedule(Alpha::Finite(0.0), &vols).unwrap();
        assert!(s.limit_estimate < 0.011);
        let s = torsion_schedule(Alpha::Infinite, &vols).unwrap();
        assert!(s.limit_estimate > 9000.0);
        assert!(torsion_schedule(Alpha::Finite(1.0), &[]).is_err());
        assert!(torsion_schedule(Alpha::Finite(1.0), &[2.0, 1.0]).is_err());
        assert_eq!(torsion_schedule(Alpha::Finite(1.0), &vols), torsion_schedule(Alpha::Finite(1.0), &vols));
        assert_eq!("inf".parse::<Alpha>().unwrap(), Alpha::Infinite);
        assert!("-1".parse::<Alpha>().is_err());
    }
}

//! Explicit constants: ball volumes, the multiplicity function `N(d, r, R)`,
//! the unit-vector packing bound `b(d)`, thick–thin weights, the step-4
//! constants `c` and `D`, and the volume of the figure-eight knot complement.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive};
use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

/// Which fixed-budget rule [`integrate`] applies on each subinterval.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadratureRule {
    TanhSinh,
    ClenshawCurtis,
}

const MAX_BISECTION_DEPTH: u32 = 16;

/// Adaptive integration: applies `rule` and bisects wherever its own error
/// estimate exceeds the proportional share of `abs_tol`.
pub fn integrate<F: Fn(f64) -> f64 + Copy>(f: F, a: f64, b: f64, abs_tol: f64, rule: QuadratureRule) -> f64 {
    integrate_rec(f, a, b, abs_tol, rule, 0)
}

fn integrate_rec<F: Fn(f64) -> f64 + Copy>(f: F, a: f64, b: f64, tol: f64, rule: QuadratureRule, depth: u32) -> f64 {
    let out = match rule {
        QuadratureRule::TanhSinh => quadrature::double_exponential::integrate(f, a, b, tol),
        QuadratureRule::ClenshawCurtis => quadrature::clenshaw_curtis::integrate(f, a, b, tol),
    };
    // Tolerances below rounding noise of the integral are not reachable.
    let floor = 8.0 * f64::EPSILON * out.integral.abs();
    if out.error_estimate <= tol.max(floor) || depth >= MAX_BISECTION_DEPTH {
        return out.integral;
    }
    let mid = 0.5 * (a + b);
    integrate_rec(f, a, mid, 0.5 * tol, rule, depth + 1) + integrate_rec(f, mid, b, 0.5 * tol, rule, depth + 1)
}

/// Surface area of the unit sphere `S^{d-1}` in `R^d`.
pub fn sphere_surface(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    2.0 * PI.powf(h) / gamma(h)
}

pub fn euclidean_ball_volume(d: usize, r: f64) -> f64 {
    let h = d as f64 / 2.0;
    PI.powf(h) * r.powi(d as i32) / gamma(h + 1.0)
}

/// Volume of a radius-`r` ball in `H^d`, by quadrature of `sinh^{d-1}`.
pub fn hyperbolic_ball_volume(d: usize, r: f64) -> f64 {
    hyperbolic_ball_volume_with(d, r, QuadratureRule::TanhSinh)
}

pub fn hyperbolic_ball_volume_with(d: usize, r: f64, rule: QuadratureRule) -> f64 {
    if d == 1 {
        return 2.0 * r;
    }
    let k = (d - 1) as i32;
    // Relative 1e-13 of the integral, bounded by sinh(r)^k * r.
    let scale = r.sinh().powi(k) * r;
    let tol = (1e-13 * scale).max(f64::MIN_POSITIVE);
    sphere_surface(d) * integrate(move |t: f64| t.sinh().powi(k), 0.0, r, tol, rule)
}

/// Closed forms for `d = 2, 3`.
pub fn hyperbolic_ball_volume_closed(d: usize, r: f64) -> Option<f64> {
    match d {
        1 => Some(2.0 * r),
        2 => Some(2.0 * PI * (r.cosh() - 1.0)),
        3 => Some(PI * ((2.0 * r).sinh() - 2.0 * r)),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Multiplicity {
    /// `vol_H B(R + r/2) / vol_E B(r/2)`.
    pub value: f64,
    /// `((2R + r) / r)^d`, implied by volume comparison.
    pub euclidean_lower_bound: f64,
    /// Whether `r < R`, the range where the discrete-set count applies.
    pub counting_regime: bool,
}

/// `N(d, r, R)`, for `0 < r < 2R`.
pub fn multiplicity(d: usize, r: f64, big_r: f64) -> Result<Multiplicity> {
    if d == 0 || !(r > 0.0) || !(r < 2.0 * big_r) {
        return Err(Error::InvalidParameter(format!("N(d,r,R) needs d >= 1 and 0 < r < 2R, got d={d}, r={r}, R={big_r}")));
    }
    let value = hyperbolic_ball_volume(d, big_r + r / 2.0) / euclidean_ball_volume(d, r / 2.0);
    Ok(Multiplicity {
        value,
        euclidean_lower_bound: ((2.0 * big_r + r) / r).powi(d as i32),
        counting_regime: r < big_r,
    })
}

/// Area of a cap of angular radius `theta` on `S^{d-1}`.
pub fn cap_area(d: usize, theta: f64) -> f64 {
    if d == 2 {
        return 2.0 * theta;
    }
    let k = (d - 2) as i32;
    let tol = 1e-15 * theta;
    sphere_surface(d - 1) * integrate(move |t: f64| t.sin().powi(k), 0.0, theta, tol, QuadratureRule::TanhSinh)
}

pub const B_DIMENSION_RANGE: std::ops::RangeInclusive<usize> = 2..=24;

/// Upper bound on the size of a 1-discrete set of unit vectors in `R^d`.
///
/// Unit vectors at pairwise distance at least 1 are at angle at least π/3,
/// so caps of angular radius π/6 around them are disjoint.
pub fn b_upper_bound(d: usize) -> Result<u64> {
    if !B_DIMENSION_RANGE.contains(&d) {
        return Err(Error::DimensionOutOfRange(d));
    }
    if d == 2 {
        return Ok(6);
    }
    let ratio = sphere_surface(d) / cap_area(d, PI / 6.0);
    // Nudged up before flooring so rounding can only loosen the bound.
    Ok((ratio * (1.0 + 1e-12)).floor() as u64)
}

/// Parses a decimal literal (`"0.1"`, `"-2.5e-3"`, `"7"`) into an exact rational.
pub fn parse_decimal(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidParameter(format!("not a decimal number: {s:?}"));
    let s = s.trim();
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let numer: BigInt = format!("{int_part}{frac_part}0").parse::<BigInt>().map_err(|_| bad())? / 10;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    let mut value = BigRational::from_integer(numer) * ten.pow(scale);
    if neg {
        value = -value;
    }
    Ok(value)
}

pub fn rational_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Margulis-type inputs `ε(d)` and `m(d)`; both are configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct ThickThinParams {
    pub d: usize,
    pub margulis_eps: BigRational,
    pub margulis_index: u64,
}

pub const DEFAULT_MARGULIS_EPS: &str = "0.1";
pub const DEFAULT_MARGULIS_INDEX: u64 = 2;

impl ThickThinParams {
    pub fn new(d: usize, margulis_eps: BigRational, margulis_index: u64) -> Result<Self> {
        if d == 0 {
            return Err(Error::DimensionOutOfRange(d));
        }
        if !margulis_eps.is_positive() {
            return Err(Error::InvalidParameter("margulis eps must be positive".into()));
        }
        if margulis_index == 0 {
            return Err(Error::InvalidParameter("margulis index must be positive".into()));
        }
        Ok(ThickThinParams { d, margulis_eps, margulis_index })
    }

    pub fn with_defaults(d: usize) -> Result<Self> {
        Self::new(d, parse_decimal(DEFAULT_MARGULIS_EPS)?, DEFAULT_MARGULIS_INDEX)
    }

    /// `ε_0 = ε(d)`.
    pub fn eps0(&self) -> BigRational {
        self.margulis_eps.clone()
    }

    /// `ε = ε(d) / (4 m(d) 17^d)`.
    pub fn eps(&self) -> BigRational {
        let denom = BigInt::from(4u64 * self.margulis_index) * BigInt::from(17u32).pow(self.d as u32);
        &self.margulis_eps / BigRational::from_integer(denom)
    }

    pub fn assignment(&self, centrality_rank: usize) -> Result<EpsilonAssignment> {
        if centrality_rank >= self.d {
            return Err(Error::InvalidParameter(format!(
                "centrality rank {centrality_rank} outside [0, {}]",
                self.d - 1
            )));
        }
        Ok(EpsilonAssignment { centrality_rank, value: weight(&self.margulis_eps, centrality_rank) })
    }
}

/// `ε(d) / (4 · 17^i)`.
fn weight(margulis_eps: &BigRational, rank: usize) -> BigRational {
    margulis_eps / BigRational::from_integer(BigInt::from(4) * BigInt::from(17u32).pow(rank as u32))
}

/// The thin-part weight `ε_γ` of an element with the given centrality rank.
/// Loxodromic elements have rank 0.
#[derive(Clone, Debug, PartialEq)]
pub struct EpsilonAssignment {
    pub centrality_rank: usize,
    pub value: BigRational,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThickThinConstants {
    pub d: usize,
    pub margulis_eps: String,
    pub margulis_index: u64,
    /// Exact, as `p/q`.
    pub eps: String,
    pub eps0: String,
    pub eps_value: f64,
    pub eps0_value: f64,
    /// `ε_γ` for each centrality rank `0..d`.
    pub weights: Vec<String>,
    /// `m(d) ε ≤ ε_γ` for every rank, the bound used for powers of thin elements.
    pub power_bound_holds: bool,
    pub delta_note: String,
    /// `ε / (2(b+1))` using the packing bound for `b`, when `d` is in range.
    pub delta_upper: Option<f64>,
}

pub fn thick_thin_constants(params: &ThickThinParams) -> ThickThinConstants {
    let eps = params.eps();
    let eps0 = params.eps0();
    let weights: Vec<BigRational> = (0..params.d).map(|i| weight(&params.margulis_eps, i)).collect();
    let m_eps = &eps * BigRational::from_integer(BigInt::from(params.margulis_index));
    let b = b_upper_bound(params.d).ok();
    ThickThinConstants {
        d: params.d,
        margulis_eps: params.margulis_eps.to_string(),
        margulis_index: params.margulis_index,
        eps: eps.to_string(),
        eps0: eps0.to_string(),
        eps_value: rational_to_f64(&eps),
        eps0_value: rational_to_f64(&eps0),
        power_bound_holds: weights.iter().all(|w| m_eps <= *w),
        weights: weights.iter().map(ToString::to_string).collect(),
        delta_note: "delta is not constructed; any supplied delta must satisfy delta <= eps/(2(b+1))".into(),
        delta_upper: b.map(|b| rational_to_f64(&eps) / (2.0 * (b as f64 + 1.0))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CommutatorTriple {
    pub rank_a: usize,
    pub rank_b: usize,
    pub rank_commutator: usize,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CommutatorReport {
    pub d: usize,
    pub triples: usize,
    pub failures: Vec<CommutatorTriple>,
}

impl CommutatorReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Exact check of `8(ε_α + ε_β) ≤ 16ε(d)/(4·17^{i_a}) < ε(d)/(4·17^{i_c})`
/// with `i_a = min(i_α, i_β)`, in units of `ε(d)`.
pub fn commutator_chain_holds(rank_a: usize, rank_b: usize, rank_commutator: usize) -> bool {
    let one = BigRational::one();
    let w = |i: usize| weight(&one, i);
    let i_min = rank_a.min(rank_b);
    let lhs = BigRational::from_integer(BigInt::from(8)) * (w(rank_a) + w(rank_b));
    let middle = BigRational::from_integer(BigInt::from(16)) * w(i_min);
    let rhs = w(rank_commutator);
    lhs <= middle && middle < rhs
}

/// Runs [`commutator_chain_holds`] over every admissible rank triple for `d`:
/// `0 ≤ i_α, i_β ≤ d-1` and `0 ≤ i_c ≤ min(i_α, i_β) - 1`.
pub fn commutator_inequality_check(d: usize) -> Result<CommutatorReport> {
    if d < 2 {
        return Err(Error::DimensionOutOfRange(d));
    }
    let mut triples = 0;
    let mut failures = Vec::new();
    for rank_a in 0..d {
        for rank_b in 0..d {
            for rank_c in 0..rank_a.min(rank_b) {
                triples += 1;
                let holds = commutator_chain_holds(rank_a, rank_b, rank_c);
                if !holds {
                    failures.push(CommutatorTriple { rank_a, rank_b, rank_commutator: rank_c, holds });
                }
            }
        }
    }
    Ok(CommutatorReport { d, triples, failures })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Step4Constants {
    /// `N(d, ε, 4ε_0)`.
    pub n_thin: f64,
    /// `N(d, δ, 2(b+1)δ)`.
    pub n_delta: f64,
    /// `(N(d, ε, 4ε_0) + 1) / vol_E B(0, δ/2)`.
    pub c: f64,
    /// `(N(d, ε, 4ε_0) + 1) · N(d, δ, 2(b+1)δ)`.
    #[serde(rename = "D")]
    pub big_d: f64,
}

pub fn step4_constants(d: usize, eps: f64, eps0: f64, delta: f64, b: u64) -> Result<Step4Constants> {
    if !(eps > 0.0 && eps0 > 0.0 && delta > 0.0) {
        return Err(Error::InvalidParameter("eps, eps0 and delta must be positive".into()));
    }
    let delta_cap = eps / (2.0 * (b as f64 + 1.0));
    if delta > delta_cap * (1.0 + 1e-15) {
        return Err(Error::InvalidParameter(format!("delta {delta} exceeds eps/(2(b+1)) = {delta_cap}")));
    }
    let n_thin = multiplicity(d, eps, 4.0 * eps0)?.value;
    let n_delta = multiplicity(d, delta, 2.0 * (b as f64 + 1.0) * delta)?.value;
    Ok(Step4Constants {
        n_thin,
        n_delta,
        c: (n_thin + 1.0) / euclidean_ball_volume(d, delta / 2.0),
        big_d: (n_thin + 1.0) * n_delta,
    })
}

/// `6 ∫_0^{π/3} -log(2 sin θ) dθ`, tanh–sinh on the raw integrand.
pub fn figure_eight_volume() -> f64 {
    6.0 * integrate(|t: f64| -(2.0 * t.sin()).ln(), 0.0, PI / 3.0, 1e-13, QuadratureRule::TanhSinh)
}

/// Same integral with the logarithmic singularity removed analytically:
/// `-log(2 sin θ) = -log(2θ) - log(sin θ / θ)`, the first term integrated in
/// closed form and the smooth remainder by Clenshaw–Curtis.
pub fn figure_eight_volume_subtracted() -> f64 {
    let a = PI / 3.0;
    let singular = a - a * (2.0 * a).ln();
    let smooth = integrate(
        |t: f64| if t == 0.0 { 0.0 } else { -(t.sin() / t).ln() },
        0.0,
        a,
        1e-14,
        QuadratureRule::ClenshawCurtis,
    );
    6.0 * (singular + smooth)
}

/// Upper bound on the volume quoted for the figure-eight complement.
pub const FIGURE_EIGHT_VOLUME_BOUND: f64 = 2.03;

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn euclidean_volumes() {
        assert_relative_eq!(euclidean_ball_volume(3, 1.0), 4.0 * PI / 3.0, max_relative = 1e-14);
        assert_relative_eq!(euclidean_ball_volume(2, 2.0), 4.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(euclidean_ball_volume(4, 1.0), PI * PI / 2.0, max_relative = 1e-14);
    }

    #[test]
    fn hyperbolic_volumes_match_closed_forms() {
        assert_relative_eq!(hyperbolic_ball_volume(2, 1.0), 2.0 * PI * (1f64.cosh() - 1.0), max_relative = 1e-12);
        assert!((hyperbolic_ball_volume(2, 1.0) - 3.41228).abs() < 1e-5);
        for r in [0.1, 0.5, 1.0, 2.0, 5.0, 12.0] {
            for d in [2, 3] {
                let closed = hyperbolic_ball_volume_closed(d, r).unwrap();
                assert_relative_eq!(hyperbolic_ball_volume(d, r), closed, max_relative = 1e-12);
                assert_relative_eq!(
                    hyperbolic_ball_volume_with(d, r, QuadratureRule::ClenshawCurtis),
                    closed,
                    max_relative = 1e-10
                );
            }
        }
    }

    #[test]
    fn small_ball_limit() {
        for d in 2..7 {
            let r = 1e-3;
            let ratio = hyperbolic_ball_volume(d, r) / euclidean_ball_volume(d, r);
            assert!((ratio - 1.0).abs() < 1e-5, "d={d} ratio={ratio}");
        }
    }

    #[test]
    fn multiplicity_example() {
        let n = multiplicity(2, 1.0, 2.0).unwrap();
        assert_relative_eq!(n.value, 8.0 * (2.5f64.cosh() - 1.0), max_relative = 1e-12);
        assert!((n.value - 41.06).abs() < 0.01);
        assert!(n.value >= n.euclidean_lower_bound);
        assert!(n.counting_regime);
        assert!(!multiplicity(2, 3.0, 2.0).unwrap().counting_regime);
        assert!(multiplicity(2, 4.0, 2.0).is_err());
        assert!(multiplicity(2, 0.0, 2.0).is_err());
    }

    #[test]
    fn packing_bounds() {
        assert_eq!(b_upper_bound(2).unwrap(), 6);
        // Generic formula agrees with the exact planar value.
        assert_eq!((sphere_surface(2) / cap_area(2, PI / 6.0) * (1.0 + 1e-12)).floor() as u64, 6);
        let b3 = b_upper_bound(3).unwrap();
        assert!(b3 >= 12, "b(3) bound {b3}");
        assert_eq!(b3, 14);
        assert!(b_upper_bound(1).is_err());
        assert!(b_upper_bound(25).is_err());
        let caps: Vec<f64> = (1..20).map(|k| cap_area(5, k as f64 * 0.05)).collect();
        assert!(caps.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn decimal_parsing() {
        let r = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        assert_eq!(parse_decimal("0.1").unwrap(), r(1, 10));
        assert_eq!(parse_decimal("1").unwrap(), r(1, 1));
        assert_eq!(parse_decimal("-2.5e-3").unwrap(), r(-1, 400));
        assert_eq!(parse_decimal("3e2").unwrap(), r(300, 1));
        assert_eq!(parse_decimal(".5").unwrap(), r(1, 2));
        assert!(parse_decimal("abc").is_err());
        assert!(parse_decimal(".").is_err());
    }

    #[test]
    fn thick_thin_examples() {
        let p = ThickThinParams::new(4, parse_decimal("1").unwrap(), 2).unwrap();
        assert_eq!(p.eps().to_string(), "1/668168");
        let k = thick_thin_constants(&p);
        assert_eq!(k.eps, "1/668168");
        assert!(k.power_bound_holds);
        let p = ThickThinParams::new(2, parse_decimal("0.1").unwrap(), 1).unwrap();
        assert_eq!(p.eps(), parse_decimal("0.1").unwrap() / BigRational::from_integer(BigInt::from(1156)));
        for d in 1..8 {
            for m in 1..5 {
                let p = ThickThinParams::new(d, parse_decimal("0.3").unwrap(), m).unwrap();
                assert!(p.eps() < p.eps0());
                let factor = BigRational::from_integer(BigInt::from(4 * m) * BigInt::from(17).pow(d as u32));
                assert_eq!(p.eps() * factor, p.eps0());
            }
        }
    }

    #[test]
    fn assignments() {
        let p = ThickThinParams::with_defaults(3).unwrap();
        let quarter = p.eps0() / BigRational::from_integer(BigInt::from(4));
        for i in 0..3 {
            let a = p.assignment(i).unwrap();
            assert!(p.eps() <= a.value && a.value <= quarter);
        }
        assert_eq!(p.assignment(0).unwrap().value, quarter);
        assert!(p.assignment(3).is_err());
    }

    #[test]
    fn commutator_chain() {
        assert!(commutator_chain_holds(1, 1, 0));
        assert!(commutator_chain_holds(1, 3, 0));
        for d in 2..=10 {
            assert!(commutator_inequality_check(d).unwrap().passed());
        }
        // Without the drop in rank the strict inequality fails.
        for i in 0..6 {
            assert!(!commutator_chain_holds(i, i, i));
            assert!(!commutator_chain_holds(i, i + 2, i));
        }
        assert!(commutator_inequality_check(1).is_err());
        assert_eq!(commutator_inequality_check(2).unwrap().triples, 1);
    }

    #[test]
    fn step4() {
        let (eps, eps0, b) = (0.01, 0.1, 6u64);
        let delta = eps / 14.0;
        let s = step4_constants(2, eps, eps0, delta, b).unwrap();
        assert!(s.c.is_finite() && s.c > 0.0 && s.big_d.is_finite() && s.big_d > 0.0);
        let n = multiplicity(2, eps, 4.0 * eps0).unwrap().value;
        assert_relative_eq!(s.c * euclidean_ball_volume(2, delta / 2.0), n + 1.0, max_relative = 1e-12);
        assert_relative_eq!(s.big_d / (n + 1.0), s.n_delta, max_relative = 1e-12);
        assert!(step4_constants(2, eps, eps0, eps, b).is_err());
    }

    /// Clausen-series oracle: vol = 6 Л(π/3) = 3 Cl_2(2π/3).
    fn clausen_oracle() -> f64 {
        let theta = 2.0 * PI / 3.0;
        let mut sum = 0.0;
        let n_max = 3_000_000;
        for n in 1..=n_max {
            let n = n as f64;
            sum += (n * theta).sin() / (n * n);
        }
        3.0 * sum
    }

    #[test]
    fn figure_eight() {
        let a = figure_eight_volume();
        let b = figure_eight_volume_subtracted();
        assert!(a < FIGURE_EIGHT_VOLUME_BOUND);
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        assert!((a - 2.0298832128).abs() < 1e-8, "{a}");
        assert!((a - clausen_oracle()).abs() < 1e-9);
    }
}

//! Nerves of finite covers by closed balls in `E^d` or `H^d`.
//!
//! Pairs are decided exactly by `d(c_i, c_j) <= r_i + r_j`. Larger tuples go
//! through cyclic projections onto the balls; when those do not reach a
//! common point, emptiness must be certified by a convexity bound or the
//! tuple is reported as indeterminate.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::homology::{homology_all, relative_homology, AbelianGroupStructure, HomologyRecord};
use crate::hyperbolic::{lorentz, HyperbolicPoint};
use crate::simplicial::{SimplicialComplex, SimplicialPair};
use crate::torsion::instance_rng;

/// A common point must violate every ball by at most this much.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-12;
/// An emptiness certificate must exceed this margin.
pub const CERTIFICATE_MARGIN: f64 = 1e-9;
const MAX_CERTIFICATE_SUBSET_SIZE: usize = 10;
const MAX_SWEEPS: usize = 5000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Space {
    Euclidean(usize),
    Hyperbolic(usize),
}

impl Space {
    pub fn dim(&self) -> usize {
        match *self {
            Space::Euclidean(d) | Space::Hyperbolic(d) => d,
        }
    }

    /// Length of a coordinate vector.
    pub fn coordinate_len(&self) -> usize {
        match *self {
            Space::Euclidean(d) => d,
            Space::Hyperbolic(d) => d + 1,
        }
    }

    pub fn distance(&self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            Space::Euclidean(_) => x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt(),
            Space::Hyperbolic(_) => {
                let q = -lorentz(x, y);
                if q > 2.0 {
                    q.acosh()
                } else {
                    let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
                    2.0 * (lorentz(&diff, &diff).max(0.0).sqrt() / 2.0).asinh()
                }
            }
        }
    }

    fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        match self {
            Space::Euclidean(_) => u.iter().zip(v).map(|(a, b)| a * b).sum(),
            Space::Hyperbolic(_) => lorentz(u, v),
        }
    }

    /// Unit tangent at `x` pointing away from `c`, or zero at `c`.
    fn away_from(&self, x: &[f64], c: &[f64]) -> Vec<f64> {
        let mut v: Vec<f64> = match self {
            Space::Euclidean(_) => x.iter().zip(c).map(|(a, b)| a - b).collect(),
            Space::Hyperbolic(_) => {
                // -(c + <x,c> x), the projection of -c to T_x.
                let k = lorentz(x, c);
                c.iter().zip(x).map(|(ci, xi)| -(ci + k * xi)).collect()
            }
        };
        let n = self.inner(&v, &v).max(0.0).sqrt();
        if n < 1e-300 {
            return vec![0.0; v.len()];
        }
        v.iter_mut().for_each(|t| *t /= n);
        v
    }

    fn exp(&self, x: &[f64], v: &[f64]) -> Vec<f64> {
        match self {
            Space::Euclidean(_) => x.iter().zip(v).map(|(a, b)| a + b).collect(),
            Space::Hyperbolic(_) => {
                let n = lorentz(v, v).max(0.0).sqrt();
                if n == 0.0 {
                    return x.to_vec();
                }
                let y: Vec<f64> = x.iter().zip(v).map(|(a, b)| n.cosh() * a + n.sinh() / n * b).collect();
                renormalize(y)
            }
        }
    }

    /// Nearest point of the closed ball `B(c, r)` to `x`.
    fn project(&self, x: &[f64], c: &[f64], r: f64) -> Vec<f64> {
        let d = self.distance(x, c);
        if d <= r {
            return x.to_vec();
        }
        match self {
            Space::Euclidean(_) => c.iter().zip(x).map(|(ci, xi)| ci + r / d * (xi - ci)).collect(),
            Space::Hyperbolic(_) => {
                // Unit tangent at c toward x; y = cosh(r) c + sinh(r) u.
                let k = lorentz(x, c);
                let mut u: Vec<f64> = x.iter().zip(c).map(|(xi, ci)| xi + k * ci).collect();
                let n = lorentz(&u, &u).max(0.0).sqrt();
                u.iter_mut().for_each(|t| *t /= n);
                renormalize(c.iter().zip(&u).map(|(ci, ui)| r.cosh() * ci + r.sinh() * ui).collect())
            }
        }
    }

    /// A point "between" the given centers: their mean, renormalized in `H^d`.
    fn barycenter(&self, centers: &[&[f64]]) -> Vec<f64> {
        let n = centers[0].len();
        let mut m = vec![0.0; n];
        for c in centers {
            for (mi, ci) in m.iter_mut().zip(c.iter()) {
                *mi += ci / centers.len() as f64;
            }
        }
        match self {
            Space::Euclidean(_) => m,
            Space::Hyperbolic(_) => renormalize(m),
        }
    }
}

fn renormalize(mut x: Vec<f64>) -> Vec<f64> {
    let s = (-lorentz(&x, &x)).sqrt();
    x.iter_mut().for_each(|t| *t /= s);
    x
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BallCover {
    space: Space,
    balls: Vec<Ball>,
}

impl BallCover {
    pub fn new(space: Space, balls: Vec<Ball>) -> Result<Self> {
        if space.dim() == 0 {
            return Err(Error::DimensionOutOfRange(0));
        }
        let mut balls = balls;
        for (i, b) in balls.iter_mut().enumerate() {
            if !(b.radius > 0.0) || !b.radius.is_finite() {
                return Err(Error::InvalidParameter(format!("ball {i}: radius must be positive, got {}", b.radius)));
            }
            if b.center.len() != space.coordinate_len() {
                return Err(Error::InvalidParameter(format!(
                    "ball {i}: expected {} coordinates, got {}",
                    space.coordinate_len(),
                    b.center.len()
                )));
            }
            if b.center.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidParameter(format!("ball {i}: non-finite center")));
            }
            if let Space::Hyperbolic(_) = space {
                let p = HyperbolicPoint::new(b.center.clone())
                    .map_err(|e| Error::InvalidParameter(format!("ball {i}: {e}")))?;
                b.center = p.coords().to_vec();
            }
        }
        Ok(BallCover { space, balls })
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    /// Default dimension cap: `d + 1`.
    pub fn default_max_dim(&self) -> usize {
        self.space.dim() + 1
    }

    /// The subfamily indexed by `indices`, with new radii.
    pub fn subfamily(&self, indices: &[usize], radii: &[f64]) -> Result<BallCover> {
        if indices.len() != radii.len() {
            return Err(Error::InvalidParameter("one shrink radius per index is required".into()));
        }
        let mut balls = Vec::with_capacity(indices.len());
        for (&j, &r) in indices.iter().zip(radii) {
            let b = self.balls.get(j).ok_or_else(|| Error::InvalidParameter(format!("index {j} out of range")))?;
            if r > b.radius {
                return Err(Error::InvalidParameter(format!(
                    "shrunk radius {r} exceeds original radius {} at index {j}",
                    b.radius
                )));
            }
            balls.push(Ball { center: b.center.clone(), radius: r });
        }
        BallCover::new(self.space, balls)
    }

    fn excess(&self, x: &[f64], tuple: &[usize]) -> Vec<f64> {
        tuple.iter().map(|&i| self.space.distance(x, &self.balls[i].center) - self.balls[i].radius).collect()
    }

    fn max_excess(&self, x: &[f64], tuple: &[usize]) -> f64 {
        self.excess(x, tuple).into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Whether the closed balls in `tuple` have a common point.
    pub fn intersects(&self, tuple: &[usize]) -> Result<bool> {
        match tuple.len() {
            0 => Ok(false),
            1 => Ok(true),
            2 => {
                let (a, b) = (&self.balls[tuple[0]], &self.balls[tuple[1]]);
                Ok(self.space.distance(&a.center, &b.center) <= a.radius + b.radius)
            }
            _ => self.intersects_convex(tuple),
        }
    }

    fn intersects_convex(&self, tuple: &[usize]) -> Result<bool> {
        let centers: Vec<&[f64]> = tuple.iter().map(|&i| self.balls[i].center.as_slice()).collect();
        let mut x = self.space.barycenter(&centers);
        let mut prev = f64::INFINITY;
        for sweep in 0..MAX_SWEEPS {
            for &i in tuple {
                x = self.space.project(&x, &self.balls[i].center, self.balls[i].radius);
            }
            let residual = self.max_excess(&x, tuple);
            if residual <= FEASIBILITY_TOLERANCE {
                return Ok(true);
            }
            // Stalled: the sets are probably disjoint.
            if sweep > 50 && residual > 0.999 * prev {
                break;
            }
            prev = residual;
        }
        let x_hat = self.minimize_max_excess(tuple, x);
        if self.max_excess(&x_hat, tuple) <= FEASIBILITY_TOLERANCE {
            return Ok(true);
        }
        if let Some(margin) = self.emptiness_certificate(tuple, &x_hat) {
            if margin > CERTIFICATE_MARGIN {
                return Ok(false);
            }
        }
        Err(Error::IndeterminateIntersection {
            tuple: tuple.to_vec(),
            detail: format!("max excess {:e} at the best point found", self.max_excess(&x_hat, tuple)),
        })
    }

    /// Descent on the soft maximum of `d(x, c_i) - r_i`, sharpening the
    /// temperature as it goes.
    fn minimize_max_excess(&self, tuple: &[usize], start: Vec<f64>) -> Vec<f64> {
        let mut x = start;
        for beta in [10.0, 100.0, 1e3, 1e4, 1e5, 1e6] {
            let soft = |x: &[f64]| {
                let e = self.excess(x, tuple);
                let m = e.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                m + e.iter().map(|v| (beta * (v - m)).exp()).sum::<f64>().ln() / beta
            };
            let mut step = 0.5;
            for _ in 0..400 {
                let e = self.excess(&x, tuple);
                let m = e.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let w: Vec<f64> = e.iter().map(|v| (beta * (v - m)).exp()).collect();
                let total: f64 = w.iter().sum();
                let mut g = vec![0.0; x.len()];
                for (k, &i) in tuple.iter().enumerate() {
                    let u = self.space.away_from(&x, &self.balls[i].center);
                    for (gj, uj) in g.iter_mut().zip(&u) {
                        *gj += w[k] / total * uj;
                    }
                }
                let gn = self.space.inner(&g, &g).max(0.0).sqrt();
                if gn < 1e-15 {
                    break;
                }
                let f0 = soft(&x);
                let mut accepted = false;
                while step > 1e-16 {
                    let v: Vec<f64> = g.iter().map(|t| -step * t / gn).collect();
                    let y = self.space.exp(&x, &v);
                    if soft(&y) < f0 {
                        x = y;
                        accepted = true;
                        step *= 1.5;
                        break;
                    }
                    step *= 0.5;
                }
                if !accepted {
                    break;
                }
            }
        }
        x
    }

    /// Lower bound on `max_i (d(y, c_i) - r_i)` over all `y` in the union of
    /// the balls, from convexity at `x`:
    /// `sum λ_i f_i(x) - |sum λ_i g_i| · min_i (d(x, c_i) + r_i)` for the
    /// best `λ` found in the simplex. Positive means the intersection is empty.
    fn emptiness_certificate(&self, tuple: &[usize], x: &[f64]) -> Option<f64> {
        let f = self.excess(x, tuple);
        let grads: Vec<Vec<f64>> =
            tuple.iter().map(|&i| self.space.away_from(x, &self.balls[i].center)).collect();
        let reach = tuple
            .iter()
            .map(|&i| self.space.distance(x, &self.balls[i].center) + self.balls[i].radius)
            .fold(f64::INFINITY, f64::min);
        let k = tuple.len();
        let value = |lambda: &[f64]| {
            let mut g = vec![0.0; x.len()];
            for (l, gi) in lambda.iter().zip(&grads) {
                for (a, b) in g.iter_mut().zip(gi) {
                    *a += l * b;
                }
            }
            let gn = self.space.inner(&g, &g).max(0.0).sqrt();
            let lin: f64 = lambda.iter().zip(&f).map(|(l, fi)| l * fi).sum();
            (lin - gn * reach, g, gn)
        };
        // Frank-Wolfe ascent of the concave objective over the simplex.
        let mut lambda = vec![1.0 / k as f64; k];
        let mut best = value(&lambda).0;
        for it in 0..2000 {
            let (_, g, gn) = value(&lambda);
            let scores: Vec<f64> = (0..k)
                .map(|i| f[i] - if gn > 0.0 { reach * self.space.inner(&grads[i], &g) / gn } else { 0.0 })
                .collect();
            let j = (0..k).max_by(|&a, &b| scores[a].total_cmp(&scores[b])).unwrap_or(0);
            let gamma = 2.0 / (it as f64 + 3.0);
            let cand: Vec<f64> =
                (0..k).map(|i| (1.0 - gamma) * lambda[i] + if i == j { gamma } else { 0.0 }).collect();
            let v = value(&cand).0;
            if v >= best {
                best = v;
                lambda = cand;
            }
        }
        // Min-norm points of the gradient hulls of small subsets; these hit
        // the exact multipliers when only a few balls are active.
        if k <= MAX_CERTIFICATE_SUBSET_SIZE {
            for mask in 1u32..(1 << k) {
                let subset: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
                if let Some(mu) = self.min_norm_weights(&subset, &grads) {
                    let mut cand = vec![0.0; k];
                    for (&i, m) in subset.iter().zip(&mu) {
                        cand[i] = *m;
                    }
                    best = best.max(value(&cand).0);
                }
            }
        }
        best.is_finite().then_some(best)
    }

    /// Affine weights `mu` (summing to one) minimising `|sum mu_i g_i|` over
    /// the listed gradients, if they exist and are nonnegative.
    fn min_norm_weights(&self, subset: &[usize], grads: &[Vec<f64>]) -> Option<Vec<f64>> {
        let m = subset.len();
        // [Gram 1; 1^T 0] [mu; nu] = [0; 1]
        let mut a = vec![vec![0.0; m + 2]; m + 1];
        for (r, &i) in subset.iter().enumerate() {
            for (c, &j) in subset.iter().enumerate() {
                a[r][c] = self.space.inner(&grads[i], &grads[j]);
            }
            a[r][m] = 1.0;
        }
        for c in 0..m {
            a[m][c] = 1.0;
        }
        a[m][m + 1] = 1.0;
        let n = m + 1;
        for col in 0..n {
            let piv = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
            if a[piv][col].abs() < 1e-13 {
                return None;
            }
            a.swap(col, piv);
            for r in 0..n {
                if r != col {
                    let f = a[r][col] / a[col][col];
                    for c in col..=n {
                        a[r][c] -= f * a[col][c];
                    }
                }
            }
        }
        let mu: Vec<f64> = (0..m).map(|r| a[r][n] / a[r][r]).collect();
        if mu.iter().any(|&v| v < -1e-12) {
            return None;
        }
        let total: f64 = mu.iter().map(|v| v.max(0.0)).sum();
        Some(mu.iter().map(|v| v.max(0.0) / total).collect())
    }
}

/// Nerve up to dimension `max_dim` (defaults to `d + 1`).
pub fn nerve(cover: &BallCover, max_dim: Option<usize>) -> Result<SimplicialComplex> {
    let cap = max_dim.unwrap_or_else(|| cover.default_max_dim());
    if cap < 1 {
        return Err(Error::InvalidParameter("nerve dimension cap must be at least 1".into()));
    }
    let n = cover.len();
    let mut all: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut adjacent = vec![vec![false; n]; n];
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let edge_flags: Vec<bool> = pairs.par_iter().map(|&(i, j)| cover.intersects(&[i, j])).collect::<Result<_>>()?;
    let mut level: Vec<Vec<usize>> = Vec::new();
    for (&(i, j), &hit) in pairs.iter().zip(&edge_flags) {
        if hit {
            adjacent[i][j] = true;
            adjacent[j][i] = true;
            level.push(vec![i, j]);
        }
    }
    all.extend(level.iter().cloned());
    for _ in 2..=cap {
        let present: std::collections::HashSet<&Vec<usize>> = level.iter().collect();
        // Extend each simplex by a larger vertex adjacent to all its vertices,
        // keeping only candidates whose facets are all present.
        let candidates: Vec<Vec<usize>> = level
            .iter()
            .flat_map(|s| {
                let last = *s.last().expect("nonempty");
                let adjacent = &adjacent;
                (last + 1..n).filter(move |&v| s.iter().all(|&u| adjacent[u][v])).map(move |v| {
                    let mut t = s.clone();
                    t.push(v);
                    t
                })
            })
            .filter(|t| {
                (0..t.len() - 2).all(|skip| {
                    let facet: Vec<usize> =
                        t.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &v)| v).collect();
                    present.contains(&facet)
                })
            })
            .collect();
        let flags: Vec<bool> = candidates.par_iter().map(|t| cover.intersects(t)).collect::<Result<_>>()?;
        level = candidates.into_iter().zip(flags).filter_map(|(t, hit)| hit.then_some(t)).collect();
        if level.is_empty() {
            break;
        }
        all.extend(level.iter().cloned());
    }
    SimplicialComplex::build_with_vertex_count(n, &all)
}

/// A nerve together with the nerve of a subfamily, embedded through the
/// subfamily's indices.
#[derive(Clone, Debug, PartialEq)]
pub struct NervePair {
    pub nerve: SimplicialComplex,
    pub sub_nerve: SimplicialComplex,
    pub indices: Vec<usize>,
}

impl NervePair {
    pub fn to_pair(&self) -> Result<SimplicialPair> {
        SimplicialPair::new(self.nerve.clone(), self.sub_nerve.clone())
    }

    pub fn relative_homology(&self, max_degree: usize) -> Result<Vec<AbelianGroupStructure>> {
        let pair = self.to_pair()?;
        Ok((0..=max_degree).map(|k| relative_homology(&pair, k)).collect())
    }
}

/// Nerve of `cover` and of the balls `indices` with radii `shrink`.
pub fn relative_nerve(
    cover: &BallCover,
    indices: &[usize],
    shrink: &[f64],
    max_dim: Option<usize>,
) -> Result<NervePair> {
    let mut seen = std::collections::HashSet::new();
    if !indices.iter().all(|i| seen.insert(*i)) {
        return Err(Error::InvalidParameter("subfamily indices must be distinct".into()));
    }
    let sub = cover.subfamily(indices, shrink)?;
    let cap = max_dim.unwrap_or_else(|| cover.default_max_dim());
    let total = nerve(cover, Some(cap))?;
    let sub_nerve = if indices.is_empty() { SimplicialComplex::empty() } else { nerve(&sub, Some(cap))?.relabel(indices)? };
    Ok(NervePair { nerve: total, sub_nerve, indices: indices.to_vec() })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NerveLemmaReport {
    pub f_vector: Vec<usize>,
    pub computed: Vec<HomologyRecord>,
    pub reference: Vec<HomologyRecord>,
    pub mismatched_degrees: Vec<usize>,
    pub passed: bool,
}

/// Compares the nerve's homology with `reference` (degrees `0..reference.len()`).
pub fn nerve_lemma_check(
    cover: &BallCover,
    reference: &[AbelianGroupStructure],
    max_dim: Option<usize>,
) -> Result<NerveLemmaReport> {
    let k = nerve(cover, max_dim)?;
    let top = reference.len().saturating_sub(1);
    let computed = homology_all(&k, top);
    let mismatched_degrees: Vec<usize> =
        (0..reference.len()).filter(|&d| computed.get(d).cloned().unwrap_or_default() != reference[d]).collect();
    Ok(NerveLemmaReport {
        f_vector: k.f_vector(),
        computed: computed.iter().take(reference.len()).enumerate().map(|(d, g)| HomologyRecord::new(d, g)).collect(),
        reference: reference.iter().enumerate().map(|(d, g)| HomologyRecord::new(d, g)).collect(),
        passed: mismatched_degrees.is_empty(),
        mismatched_degrees,
    })
}

/// `n` balls of radius `radius` centred at the `n`-th roots of unity.
pub fn circle_cover(n: usize, radius: f64) -> BallCover {
    let balls = (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            Ball { center: vec![t.cos(), t.sin()], radius }
        })
        .collect();
    BallCover::new(Space::Euclidean(2), balls).expect("valid cover")
}

/// Cover of the annulus `1 <= |z| <= 2`: `n` balls of radius `radius` on
/// each of the circles of radius 1 and 2 (inner ones first).
pub fn annulus_cover(n: usize, radius: f64) -> BallCover {
    let ring = |rho: f64, phase: f64| {
        (0..n).map(move |k| {
            let t = 2.0 * std::f64::consts::PI * (k as f64 + phase) / n as f64;
            Ball { center: vec![rho * t.cos(), rho * t.sin()], radius }
        })
    };
    let balls = ring(1.0, 0.0).chain(ring(2.0, 0.5)).collect();
    BallCover::new(Space::Euclidean(2), balls).expect("valid cover")
}

/// `n` balls in `E^d` or `H^d` whose closures all contain one random point,
/// so every nerve simplex is present and the union is contractible.
pub fn random_star_cover(hyperbolic: bool, d: usize, n: usize, seed: u64, index: usize) -> BallCover {
    let mut rng = instance_rng(seed, index);
    let mut coords = |scale: f64| -> Vec<f64> { (0..d).map(|_| rng.gen_range(-scale..scale)).collect() };
    let hub = coords(0.5);
    let offsets: Vec<Vec<f64>> = (0..n).map(|_| coords(1.5)).collect();
    let balls = offsets
        .into_iter()
        .map(|off| {
            let x: Vec<f64> = hub.iter().zip(&off).map(|(a, b)| a + b).collect();
            let slack = 0.05 + 0.5 * (off.iter().map(|v| v.abs()).sum::<f64>() / d as f64);
            if hyperbolic {
                let lift = |v: &[f64]| {
                    let mut c = vec![(1.0 + v.iter().map(|t| t * t).sum::<f64>()).sqrt()];
                    c.extend_from_slice(v);
                    c
                };
                let (centre, hub_pt) = (lift(&x), lift(&hub));
                let dist = Space::Hyperbolic(d).distance(&centre, &hub_pt);
                Ball { center: centre, radius: dist + slack }
            } else {
                let dist = Space::Euclidean(d).distance(&x, &hub);
                Ball { center: x, radius: dist + slack }
            }
        })
        .collect();
    let space = if hyperbolic { Space::Hyperbolic(d) } else { Space::Euclidean(d) };
    BallCover::new(space, balls).expect("valid cover")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn euclid(balls: &[(&[f64], f64)]) -> BallCover {
        let d = balls[0].0.len();
        BallCover::new(
            Space::Euclidean(d),
            balls.iter().map(|(c, r)| Ball { center: c.to_vec(), radius: *r }).collect(),
        )
        .unwrap()
    }

    #[test]
    fn disjoint_balls() {
        let k = nerve(&euclid(&[(&[0.0, 0.0], 1.0), (&[3.0, 0.0], 1.0)]), None).unwrap();
        assert_eq!(k.f_vector(), vec![2]);
    }

    #[test]
    fn tangent_pair_is_an_edge() {
        let k = nerve(&euclid(&[(&[0.0, 0.0], 1.0), (&[2.0, 0.0], 1.0)]), None).unwrap();
        assert_eq!(k.f_vector(), vec![2, 1]);
    }

    #[test]
    fn equilateral_triangle() {
        let h = 3f64.sqrt() / 2.0;
        let k = nerve(&euclid(&[(&[0.0, 0.0], 1.0), (&[1.0, 0.0], 1.0), (&[0.5, h], 1.0)]), None).unwrap();
        assert_eq!(k.f_vector(), vec![3, 3, 1]);
    }

    #[test]
    fn pairwise_but_not_triple() {
        // Pairwise overlapping balls around an uncovered centre.
        let r = 0.9;
        let h = 3f64.sqrt() / 2.0;
        let c = [[1.0, 0.0], [-0.5, h], [-0.5, -h]];
        let cover = euclid(&[(&c[0], r), (&c[1], r), (&c[2], r)]);
        let k = nerve(&cover, None).unwrap();
        assert_eq!(k.f_vector(), vec![3, 3]);
        assert_eq!(homology_all(&k, 1)[1], AbelianGroupStructure::free(1));
    }

    #[test]
    fn circle_cover_nerve() {
        let cover = circle_cover(8, 0.9);
        let k = nerve(&cover, None).unwrap();
        let h = homology_all(&k, 2);
        assert_eq!(h[0], AbelianGroupStructure::free(1));
        assert_eq!(h[1], AbelianGroupStructure::free(1));
        assert!(h[2].is_trivial());
        let r = nerve_lemma_check(&cover, &[AbelianGroupStructure::free(1), AbelianGroupStructure::free(1)], None)
            .unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn convex_covers_are_contractible() {
        let point = [AbelianGroupStructure::free(1), AbelianGroupStructure::trivial(), AbelianGroupStructure::trivial()];
        assert!(nerve_lemma_check(&euclid(&[(&[0.0, 0.0], 1.0)]), &point, None).unwrap().passed);
        assert!(nerve_lemma_check(&euclid(&[(&[0.0, 0.0], 1.0), (&[1.5, 0.0], 1.0)]), &point, None).unwrap().passed);
        let cluster = euclid(&[
            (&[0.0, 0.0, 0.0], 1.0),
            (&[0.5, 0.0, 0.0], 1.0),
            (&[0.0, 0.5, 0.0], 1.0),
            (&[0.0, 0.0, 0.5], 1.0),
            (&[0.3, 0.3, 0.3], 1.0),
        ]);
        let r = nerve_lemma_check(&cluster, &point, None).unwrap();
        assert!(r.passed);
        assert_eq!(r.f_vector, vec![5, 10, 10, 5, 1]);
    }

    #[test]
    fn hyperbolic_cover() {
        let o = HyperbolicPoint::origin(2);
        let basis = o.tangent_basis();
        let balls: Vec<Ball> = (0..6)
            .map(|k| {
                let t = std::f64::consts::PI * k as f64 / 3.0;
                let p = o.exp_in_basis(&basis, &[t.cos(), t.sin()], 1.0);
                Ball { center: p.coords().to_vec(), radius: 0.6 }
            })
            .collect();
        let cover = BallCover::new(Space::Hyperbolic(2), balls).unwrap();
        let k = nerve(&cover, None).unwrap();
        let h = homology_all(&k, 1);
        assert_eq!(h[0], AbelianGroupStructure::free(1));
        assert_eq!(h[1], AbelianGroupStructure::free(1));
        // Adding a ball at the centre fills the hole.
        let mut balls = cover.balls().to_vec();
        balls.push(Ball { center: o.coords().to_vec(), radius: 0.6 });
        let filled = BallCover::new(Space::Hyperbolic(2), balls).unwrap();
        let h = homology_all(&nerve(&filled, None).unwrap(), 1);
        assert!(h[1].is_trivial());
    }

    #[test]
    fn relative_nerves() {
        let cover = circle_cover(8, 0.9);
        let p = relative_nerve(&cover, &[], &[], None).unwrap();
        assert!(p.sub_nerve.is_empty());
        let all: Vec<usize> = (0..8).collect();
        let p = relative_nerve(&cover, &all, &[0.9; 8], None).unwrap();
        assert!(p.relative_homology(2).unwrap().iter().all(|g| g.is_trivial()));
        assert!(relative_nerve(&cover, &[0], &[1.0], None).is_err());
    }

    #[test]
    fn annulus_relative_to_inner_circle() {
        let cover = annulus_cover(8, 0.7);
        let inner: Vec<usize> = (0..8).collect();
        let p = relative_nerve(&cover, &inner, &[0.45; 8], None).unwrap();
        let abs = homology_all(&p.nerve, 2);
        assert_eq!(abs[0], AbelianGroupStructure::free(1));
        assert_eq!(abs[1], AbelianGroupStructure::free(1));
        assert!(abs[2].is_trivial());
        let sub = homology_all(&p.sub_nerve, 1);
        assert_eq!(sub[1], AbelianGroupStructure::free(1));
        // The inner circle is a deformation retract of the annulus.
        assert!(p.relative_homology(2).unwrap().iter().all(|g| g.is_trivial()));
    }

    #[test]
    fn circle_relative_to_arc() {
        let cover = circle_cover(8, 0.9);
        let p = relative_nerve(&cover, &[0, 1, 2], &[0.8, 0.8, 0.8], None).unwrap();
        let rel = p.relative_homology(2).unwrap();
        assert!(rel[0].is_trivial());
        assert_eq!(rel[1], AbelianGroupStructure::free(1));
        assert!(rel[2].is_trivial());
    }

    #[test]
    fn monotone_under_adding_balls() {
        let cover = annulus_cover(8, 0.7);
        let k = nerve(&cover, None).unwrap();
        let smaller = BallCover::new(Space::Euclidean(2), cover.balls()[..12].to_vec()).unwrap();
        assert!(nerve(&smaller, None).unwrap().is_subcomplex_of(&k));
    }

    #[test]
    fn validation() {
        assert!(BallCover::new(Space::Euclidean(2), vec![Ball { center: vec![0.0, 0.0], radius: 0.0 }]).is_err());
        assert!(BallCover::new(Space::Euclidean(2), vec![Ball { center: vec![0.0], radius: 1.0 }]).is_err());
        assert!(BallCover::new(Space::Hyperbolic(2), vec![Ball { center: vec![1.0, 1.0, 0.0], radius: 1.0 }]).is_err());
    }
}

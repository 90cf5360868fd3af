//! Hyperbolic space `H^d` in the hyperboloid model.
//!
//! Points satisfy `<x,x> = -1`, `x_0 > 0` for the form `diag(-1, 1, ..., 1)`.
//! Loxodromic and parabolic isometries are built by conjugating standard
//! forms: the boost in the `(x_0, x_d)` plane, whose axis joins the ideal
//! points `(1, -e_d)` and `(1, e_d)`, and the horizontal translations of the
//! upper half-space chart in which `(1, e_d)` is the point at infinity.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::constants::multiplicity;
use crate::error::{Error, Result};
use crate::torsion::instance_rng;

/// Residual allowed in `<x,x> = -1` after normalization.
pub const POINT_TOLERANCE: f64 = 1e-10;
/// Residual allowed in `M^T J M = J`.
pub const ISOMETRY_TOLERANCE: f64 = 1e-9;
/// Required bound on `||ab - ba||_inf` before the angle check runs.
pub const COMMUTATION_TOLERANCE: f64 = 1e-9;
pub const GRADIENT_STEP: f64 = 1e-5;
pub const OBTUSE_THRESHOLD: f64 = -1e-6;
pub const CONVEXITY_THRESHOLD: f64 = -1e-8;

/// The Lorentz form `-x_0 y_0 + sum x_i y_i`.
pub fn lorentz(x: &[f64], y: &[f64]) -> f64 {
    -x[0] * y[0] + x[1..].iter().zip(&y[1..]).map(|(a, b)| a * b).sum::<f64>()
}

fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HyperbolicPoint {
    coords: Vec<f64>,
}

impl HyperbolicPoint {
    /// Validates hyperboloid coordinates (up to a relative `1e-6`) and
    /// renormalizes them onto the upper sheet.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::MalformedInput("a point of H^d needs at least 2 coordinates".into()));
        }
        if coords.iter().any(|x| !x.is_finite()) || coords[0] <= 0.0 {
            return Err(Error::MalformedInput(format!("{coords:?} is not on the upper sheet")));
        }
        let q = lorentz(&coords, &coords);
        if (q + 1.0).abs() > 1e-6 * coords[0] * coords[0] {
            return Err(Error::MalformedInput(format!("{coords:?} has <x,x> = {q}, expected -1")));
        }
        Ok(Self::normalized(coords))
    }

    /// Rescales a future-pointing timelike vector onto the hyperboloid.
    fn normalized(mut coords: Vec<f64>) -> Self {
        let s = (-lorentz(&coords, &coords)).sqrt();
        for c in coords.iter_mut() {
            *c /= s;
        }
        HyperbolicPoint { coords }
    }

    pub fn origin(d: usize) -> Self {
        let mut coords = vec![0.0; d + 1];
        coords[0] = 1.0;
        HyperbolicPoint { coords }
    }

    /// Point `(y, h)` of the upper half-space chart, `y` in `R^{d-1}`, `h > 0`.
    pub fn from_upper_half_space(y: &[f64], h: f64) -> Self {
        let d = y.len() + 1;
        let y2: f64 = y.iter().map(|v| v * v).sum();
        let mut coords = vec![0.0; d + 1];
        coords[0] = (h * h + y2 + 1.0) / (2.0 * h);
        for (i, yi) in y.iter().enumerate() {
            coords[i + 1] = yi / h;
        }
        coords[d] = (h * h + y2 - 1.0) / (2.0 * h);
        HyperbolicPoint { coords }
    }

    pub fn to_upper_half_space(&self) -> (Vec<f64>, f64) {
        let d = self.dim();
        let h = 1.0 / (self.coords[0] - self.coords[d]);
        (self.coords[1..d].iter().map(|x| x * h).collect(), h)
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn residual(&self) -> f64 {
        (lorentz(&self.coords, &self.coords) + 1.0).abs()
    }

    pub fn project_tangent(&self, v: &[f64]) -> Vec<f64> {
        let mut out = v.to_vec();
        axpy(lorentz(&self.coords, v), &self.coords, &mut out);
        out
    }

    /// Lorentz-orthonormal basis of the tangent space.
    pub fn tangent_basis(&self) -> Vec<Vec<f64>> {
        let n = self.coords.len();
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
        for i in 1..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            let mut v = self.project_tangent(&e);
            // Two Gram-Schmidt sweeps.
            for _ in 0..2 {
                for b in &basis {
                    let c = lorentz(&v, b);
                    axpy(-c, b, &mut v);
                }
                v = self.project_tangent(&v);
            }
            let norm = lorentz(&v, &v).sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
            basis.push(v);
        }
        basis
    }

    /// Exponential map at this point of a tangent vector.
    pub fn exp(&self, v: &[f64]) -> HyperbolicPoint {
        let norm = lorentz(v, v).max(0.0).sqrt();
        if norm == 0.0 {
            return self.clone();
        }
        let mut coords: Vec<f64> = self.coords.iter().map(|x| norm.cosh() * x).collect();
        axpy(norm.sinh() / norm, v, &mut coords);
        Self::normalized(coords)
    }

    /// `exp` of `t * sum c_i b_i` in the tangent basis.
    pub fn exp_in_basis(&self, basis: &[Vec<f64>], c: &[f64], t: f64) -> HyperbolicPoint {
        let mut v = vec![0.0; self.coords.len()];
        for (b, ci) in basis.iter().zip(c) {
            axpy(t * ci, b, &mut v);
        }
        self.exp(&v)
    }
}

/// `arccosh(-<x,y>)`; near the diagonal the equivalent
/// `2 asinh(|x - y|_L / 2)` is used to avoid cancellation.
pub fn distance(x: &HyperbolicPoint, y: &HyperbolicPoint) -> f64 {
    let q = -lorentz(&x.coords, &y.coords);
    if q > 2.0 {
        return q.acosh();
    }
    let diff: Vec<f64> = x.coords.iter().zip(&y.coords).map(|(a, b)| a - b).collect();
    2.0 * (lorentz(&diff, &diff).max(0.0).sqrt() / 2.0).asinh()
}

/// Distance from `x` to the geodesic with null endpoints `u`, `w`:
/// `cosh^2 r = 2 <x,u> <x,w> / (-<u,w>)`.
pub fn distance_to_geodesic(x: &HyperbolicPoint, u: &[f64], w: &[f64]) -> f64 {
    let c2 = 2.0 * lorentz(&x.coords, u) * lorentz(&x.coords, w) / -lorentz(u, w);
    c2.max(1.0).sqrt().acosh()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IsometryKind {
    Identity,
    /// Pure translation of `length` from `repelling` to `attracting`
    /// (unit vectors on the sphere at infinity).
    Loxodromic { length: f64, repelling: Vec<f64>, attracting: Vec<f64> },
    /// Horizontal translation by `translation` in the upper half-space chart
    /// with `fixed` at infinity.
    Parabolic { fixed: Vec<f64>, translation: Vec<f64> },
    General,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LorentzIsometry {
    dim: usize,
    /// Row-major `(d+1) x (d+1)`.
    matrix: Vec<f64>,
    kind: IsometryKind,
}

type Mat = Vec<f64>;

fn identity_mat(n: usize) -> Mat {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

fn mat_mul(n: usize, a: &[f64], b: &[f64]) -> Mat {
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                c[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    c
}

fn mat_vec(n: usize, a: &[f64], x: &[f64]) -> Vec<f64> {
    (0..n).map(|i| (0..n).map(|j| a[i * n + j] * x[j]).sum()).collect()
}

/// `diag(1, H)` with `H` the Householder reflection of `R^d` taking `e_d` to `f`.
fn reflection_to(f: &[f64]) -> Mat {
    let d = f.len();
    let n = d + 1;
    let mut w: Vec<f64> = f.iter().map(|x| -x).collect();
    w[d - 1] += 1.0;
    let w2: f64 = w.iter().map(|x| x * x).sum();
    let mut m = identity_mat(n);
    if w2 < 1e-30 {
        return m;
    }
    for i in 0..d {
        for j in 0..d {
            m[(i + 1) * n + j + 1] -= 2.0 * w[i] * w[j] / w2;
        }
    }
    m
}

/// Horizontal translation by `v` in the standard upper half-space chart.
fn standard_parabolic(v: &[f64]) -> Mat {
    let d = v.len() + 1;
    let n = d + 1;
    let v2: f64 = v.iter().map(|x| x * x).sum();
    let mut m = vec![0.0; n * n];
    for j in 0..n {
        let mut x = vec![0.0; n];
        x[j] = 1.0;
        let s = x[0] - x[d];
        let t = x[0] + x[d];
        let dot: f64 = v.iter().zip(&x[1..d]).map(|(a, b)| a * b).sum();
        let t2 = t + 2.0 * dot + v2 * s;
        let mut y = vec![0.0; n];
        y[0] = (t2 + s) / 2.0;
        y[d] = (t2 - s) / 2.0;
        for i in 1..d {
            y[i] = x[i] + v[i - 1] * s;
        }
        for i in 0..n {
            m[i * n + j] = y[i];
        }
    }
    m
}

/// Boost of length `l` in the `(x_0, x_d)` plane, translating toward `(1, e_d)`.
fn standard_boost(d: usize, l: f64) -> Mat {
    let n = d + 1;
    let mut m = identity_mat(n);
    m[0] = l.cosh();
    m[d] = l.sinh();
    m[d * n] = l.sinh();
    m[d * n + d] = l.cosh();
    m
}

fn unit_vector(v: &[f64], what: &str) -> Result<Vec<f64>> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !norm.is_finite() || (norm - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidParameter(format!("{what} must be a unit vector, got norm {norm}")));
    }
    Ok(v.iter().map(|x| x / norm).collect())
}

fn null_vector(boundary: &[f64]) -> Vec<f64> {
    let mut v = Vec::with_capacity(boundary.len() + 1);
    v.push(1.0);
    v.extend_from_slice(boundary);
    v
}

impl LorentzIsometry {
    pub fn identity(d: usize) -> Self {
        LorentzIsometry { dim: d, matrix: identity_mat(d + 1), kind: IsometryKind::Identity }
    }

    /// Validates `M^T J M = J` and that `M` preserves the upper sheet.
    pub fn from_matrix(d: usize, rows: &[Vec<f64>]) -> Result<Self> {
        let n = d + 1;
        if d < 1 || rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::MalformedInput(format!("an isometry of H^{d} needs {n} rows of {n} entries")));
        }
        let matrix: Mat = rows.iter().flatten().copied().collect();
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(Error::MalformedInput("non-finite matrix entry".into()));
        }
        let g = LorentzIsometry { dim: d, matrix, kind: IsometryKind::General };
        let scale = g.matrix.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        if g.lorentz_residual() > ISOMETRY_TOLERANCE * scale * scale {
            return Err(Error::MalformedInput(format!(
                "matrix does not preserve the Lorentz form (residual {:e})",
                g.lorentz_residual()
            )));
        }
        if g.matrix[0] < 1.0 - ISOMETRY_TOLERANCE * scale {
            return Err(Error::MalformedInput("matrix swaps the two sheets".into()));
        }
        Ok(g)
    }

    /// Translation of length `length` along the geodesic from `repelling`
    /// to `attracting`, both unit vectors in `R^d`.
    pub fn loxodromic(length: f64, repelling: &[f64], attracting: &[f64]) -> Result<Self> {
        let d = repelling.len();
        if d < 2 || attracting.len() != d {
            return Err(Error::InvalidParameter("axis endpoints must be unit vectors of equal dimension d >= 2".into()));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidParameter(format!("translation length must be positive, got {length}")));
        }
        let e1 = unit_vector(repelling, "axis endpoint")?;
        let e2 = unit_vector(attracting, "axis endpoint")?;
        let gap: f64 = e1.iter().zip(&e2).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        if gap < 1e-6 {
            return Err(Error::InvalidParameter("axis endpoints coincide".into()));
        }
        let n = d + 1;
        let r = reflection_to(&e2);
        let e1r = &mat_vec(n, &r, &null_vector(&e1))[1..];
        let y: Vec<f64> = e1r[..d - 1].iter().map(|x| x / (1.0 - e1r[d - 1])).collect();
        let minus_y: Vec<f64> = y.iter().map(|x| -x).collect();
        let a = mat_mul(n, &r, &standard_parabolic(&y));
        let a_inv = mat_mul(n, &standard_parabolic(&minus_y), &r);
        let matrix = mat_mul(n, &mat_mul(n, &a, &standard_boost(d, length)), &a_inv);
        let mut g = LorentzIsometry {
            dim: d,
            matrix,
            kind: IsometryKind::Loxodromic { length, repelling: e1, attracting: e2 },
        };
        g.reorthonormalize();
        Ok(g)
    }

    /// Parabolic fixing the ideal point `fixed` (unit vector in `R^d`) and
    /// translating horospheres by `translation` in `R^{d-1}`.
    pub fn parabolic(fixed: &[f64], translation: &[f64]) -> Result<Self> {
        let d = fixed.len();
        if d < 2 || translation.len() != d - 1 {
            return Err(Error::InvalidParameter(format!(
                "parabolic in H^{d} needs a fixed point in R^{d} and a translation in R^{}",
                d.saturating_sub(1)
            )));
        }
        if translation.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("non-finite translation".into()));
        }
        let f = unit_vector(fixed, "fixed point")?;
        let n = d + 1;
        let r = reflection_to(&f);
        let matrix = mat_mul(n, &mat_mul(n, &r, &standard_parabolic(translation)), &r);
        let kind = if translation.iter().all(|x| *x == 0.0) {
            IsometryKind::Identity
        } else {
            IsometryKind::Parabolic { fixed: f, translation: translation.to_vec() }
        };
        Ok(LorentzIsometry { dim: d, matrix, kind })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &IsometryKind {
        &self.kind
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.matrix.chunks(self.dim + 1).map(<[f64]>::to_vec).collect()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * (self.dim + 1) + j]
    }

    fn column(&self, j: usize) -> Vec<f64> {
        let n = self.dim + 1;
        (0..n).map(|i| self.matrix[i * n + j]).collect()
    }

    /// `max |(M^T J M - J)_{ij}|`.
    pub fn lorentz_residual(&self) -> f64 {
        let n = self.dim + 1;
        let cols: Vec<Vec<f64>> = (0..n).map(|j| self.column(j)).collect();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i != j {
                    0.0
                } else if i == 0 {
                    -1.0
                } else {
                    1.0
                };
                worst = worst.max((lorentz(&cols[i], &cols[j]) - target).abs());
            }
        }
        worst
    }

    /// Residual divided by `max(1, max|M_ij|)^2`, the size of rounding
    /// error any float matrix of this magnitude must carry.
    pub fn scaled_lorentz_residual(&self) -> f64 {
        let scale = self.matrix.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        self.lorentz_residual() / (scale * scale)
    }

    /// Lorentz Gram-Schmidt on the columns, projecting twice.
    fn reorthonormalize(&mut self) {
        let n = self.dim + 1;
        let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
        for j in 0..n {
            let mut c = self.column(j);
            for _ in 0..2 {
                for (k, b) in cols.iter().enumerate() {
                    let sign = if k == 0 { -1.0 } else { 1.0 };
                    let coeff = sign * lorentz(&c, b);
                    axpy(-coeff, b, &mut c);
                }
            }
            let q = lorentz(&c, &c);
            let s = q.abs().sqrt();
            c.iter_mut().for_each(|x| *x /= s);
            cols.push(c);
        }
        for (j, c) in cols.iter().enumerate() {
            for i in 0..n {
                self.matrix[i * n + j] = c[i];
            }
        }
    }

    pub fn apply(&self, x: &HyperbolicPoint) -> HyperbolicPoint {
        if self.kind == IsometryKind::Identity {
            return x.clone();
        }
        HyperbolicPoint::normalized(mat_vec(self.dim + 1, &self.matrix, &x.coords))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LorentzIsometry) -> LorentzIsometry {
        let n = self.dim + 1;
        let kind = match (&self.kind, &other.kind) {
            (IsometryKind::Identity, k) | (k, IsometryKind::Identity) => k.clone(),
            (
                IsometryKind::Loxodromic { length: l1, repelling: r1, attracting: a1 },
                IsometryKind::Loxodromic { length: l2, repelling: r2, attracting: a2 },
            ) if r1 == r2 && a1 == a2 => {
                IsometryKind::Loxodromic { length: l1 + l2, repelling: r1.clone(), attracting: a1.clone() }
            }
            (
                IsometryKind::Parabolic { fixed: f1, translation: t1 },
                IsometryKind::Parabolic { fixed: f2, translation: t2 },
            ) if f1 == f2 => {
                let t: Vec<f64> = t1.iter().zip(t2).map(|(a, b)| a + b).collect();
                if t.iter().all(|x| *x == 0.0) {
                    IsometryKind::Identity
                } else {
                    IsometryKind::Parabolic { fixed: f1.clone(), translation: t }
                }
            }
            _ => IsometryKind::General,
        };
        let mut g = LorentzIsometry { dim: self.dim, matrix: mat_mul(n, &self.matrix, &other.matrix), kind };
        g.reorthonormalize();
        g
    }

    /// `J M^T J`.
    pub fn inverse(&self) -> LorentzIsometry {
        let n = self.dim + 1;
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let sign = if (i == 0) != (j == 0) { -1.0 } else { 1.0 };
                m[i * n + j] = sign * self.matrix[j * n + i];
            }
        }
        let kind = match &self.kind {
            IsometryKind::Loxodromic { length, repelling, attracting } => IsometryKind::Loxodromic {
                length: *length,
                repelling: attracting.clone(),
                attracting: repelling.clone(),
            },
            IsometryKind::Parabolic { fixed, translation } => IsometryKind::Parabolic {
                fixed: fixed.clone(),
                translation: translation.iter().map(|x| -x).collect(),
            },
            k => k.clone(),
        };
        LorentzIsometry { dim: self.dim, matrix: m, kind }
    }

    /// `g^k` by repeated squaring.
    pub fn pow(&self, k: i64) -> LorentzIsometry {
        if k < 0 {
            return self.inverse().pow(-k);
        }
        let mut result = LorentzIsometry::identity(self.dim);
        let mut base = self.clone();
        let mut e = k as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = result.compose(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.compose(&base);
            }
        }
        result
    }

    /// `||ab - ba||_inf` (max entry).
    pub fn commutator_defect(&self, other: &LorentzIsometry) -> f64 {
        let n = self.dim + 1;
        let ab = mat_mul(n, &self.matrix, &other.matrix);
        let ba = mat_mul(n, &other.matrix, &self.matrix);
        ab.iter().zip(&ba).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    /// A convenient point near the sublevel sets: on the axis for
    /// loxodromics, at height 1 for parabolics, otherwise the origin.
    pub fn base_point(&self) -> HyperbolicPoint {
        match &self.kind {
            IsometryKind::Loxodromic { repelling, attracting, .. } => {
                let u = null_vector(repelling);
                let w = null_vector(attracting);
                let s: Vec<f64> = u.iter().zip(&w).map(|(a, b)| a + b).collect();
                HyperbolicPoint::normalized(s)
            }
            _ => HyperbolicPoint::origin(self.dim),
        }
    }

    /// Distance from `x` to the axis, for loxodromics.
    pub fn axis_distance(&self, x: &HyperbolicPoint) -> Option<f64> {
        match &self.kind {
            IsometryKind::Loxodromic { repelling, attracting, .. } => {
                Some(distance_to_geodesic(x, &null_vector(repelling), &null_vector(attracting)))
            }
            _ => None,
        }
    }

    /// Height of `x` in the chart where the fixed point is at infinity, for parabolics.
    pub fn horoheight(&self, x: &HyperbolicPoint) -> Option<f64> {
        match &self.kind {
            IsometryKind::Parabolic { fixed, .. } => Some(1.0 / -lorentz(&x.coords, &null_vector(fixed))),
            _ => None,
        }
    }
}

/// `d(x, g x)`.
pub fn displacement(g: &LorentzIsometry, x: &HyperbolicPoint) -> f64 {
    distance(x, &g.apply(x))
}

/// `sinh(d/2) = cosh(r) sinh(l/2)`.
pub fn loxodromic_displacement_closed_form(length: f64, axis_distance: f64) -> f64 {
    2.0 * (axis_distance.cosh() * (length / 2.0).sinh()).asinh()
}

/// `{x : d_g(x) < epsilon}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SublevelSet {
    pub gamma: LorentzIsometry,
    pub epsilon: f64,
}

impl SublevelSet {
    pub fn new(gamma: LorentzIsometry, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
        }
        if let IsometryKind::Loxodromic { length, .. } = gamma.kind {
            if epsilon <= length {
                return Err(Error::InvalidParameter(format!(
                    "sublevel set is empty: epsilon {epsilon} <= translation length {length}"
                )));
            }
        }
        Ok(SublevelSet { gamma, epsilon })
    }

    pub fn contains(&self, x: &HyperbolicPoint) -> bool {
        displacement(&self.gamma, x) < self.epsilon
    }

    /// Distance from `x` to the set. Loxodromic sets are tubes about the
    /// axis, parabolic ones horoballs.
    pub fn distance(&self, x: &HyperbolicPoint) -> Result<f64> {
        match &self.gamma.kind {
            IsometryKind::Identity => Ok(0.0),
            IsometryKind::Loxodromic { length, .. } => {
                let radius = ((self.epsilon / 2.0).sinh() / (length / 2.0).sinh()).acosh();
                let r = self.gamma.axis_distance(x).expect("loxodromic");
                Ok((r - radius).max(0.0))
            }
            IsometryKind::Parabolic { translation, .. } => {
                let v = translation.iter().map(|t| t * t).sum::<f64>().sqrt();
                let boundary = v / (2.0 * (self.epsilon / 2.0).sinh());
                let h = self.gamma.horoheight(x).expect("parabolic");
                Ok((boundary / h).ln().max(0.0))
            }
            IsometryKind::General => {
                Err(Error::Unsupported("distance to a sublevel set of an unclassified isometry".into()))
            }
        }
    }

    /// Central-difference gradient of [`Self::distance`] at `x`, in the
    /// tangent basis `basis`.
    pub fn distance_gradient(&self, x: &HyperbolicPoint, basis: &[Vec<f64>]) -> Result<Vec<f64>> {
        let d = basis.len();
        let mut g = Vec::with_capacity(d);
        for k in 0..d {
            let mut c = vec![0.0; d];
            c[k] = 1.0;
            let plus = self.distance(&x.exp_in_basis(basis, &c, GRADIENT_STEP))?;
            let minus = self.distance(&x.exp_in_basis(basis, &c, -GRADIENT_STEP))?;
            g.push((plus - minus) / (2.0 * GRADIENT_STEP));
        }
        Ok(g)
    }
}

fn random_unit<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 && n <= 1.0 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Point at distance at most `radius` from `base`, uniform in radius and direction.
pub fn random_point_near<R: Rng + ?Sized>(base: &HyperbolicPoint, radius: f64, rng: &mut R) -> HyperbolicPoint {
    let basis = base.tangent_basis();
    let dir = random_unit(base.dim(), rng);
    base.exp_in_basis(&basis, &dir, rng.gen_range(0.0..radius))
}

/// Random pair of axis endpoints, kept apart so conjugations stay well conditioned.
pub fn random_axis<R: Rng + ?Sized>(d: usize, rng: &mut R) -> (Vec<f64>, Vec<f64>) {
    loop {
        let a = random_unit(d, rng);
        let b = random_unit(d, rng);
        let gap: f64 = a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
        if gap > 0.5 {
            return (a, b);
        }
    }
}

pub const SAMPLE_RADIUS: f64 = 3.0;
/// Samples this close to either sublevel set are redrawn so the
/// finite-difference stencil stays outside.
const SAMPLE_MARGIN: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObtuseReport {
    pub samples: usize,
    pub seed: u64,
    pub min_inner_product: f64,
    pub worst_point: Vec<f64>,
    pub commutator_defect: f64,
    pub passed: bool,
}

/// Samples points outside both sublevel sets and records the smallest inner
/// product between the gradients of the distances to them.
pub fn obtuse_angle_check(
    a: &LorentzIsometry,
    b: &LorentzIsometry,
    eps_a: f64,
    eps_b: f64,
    samples: usize,
    seed: u64,
) -> Result<ObtuseReport> {
    if a.dim() != b.dim() {
        return Err(Error::InvalidParameter("isometries act on different dimensions".into()));
    }
    let defect = a.commutator_defect(b);
    if defect > COMMUTATION_TOLERANCE {
        return Err(Error::InvalidParameter(format!("isometries do not commute: ||ab - ba|| = {defect:e}")));
    }
    let set_a = SublevelSet::new(a.clone(), eps_a)?;
    let set_b = SublevelSet::new(b.clone(), eps_b)?;
    let base = a.base_point();
    let mut rng = instance_rng(seed, 0);
    let mut min_ip = f64::INFINITY;
    let mut worst = base.coords.clone();
    let mut accepted = 0;
    let max_attempts = 1000 * samples.max(1);
    let mut attempts = 0;
    while accepted < samples {
        attempts += 1;
        if attempts > max_attempts {
            return Err(Error::Sampling(format!(
                "only {accepted} of {samples} samples fell outside both sublevel sets"
            )));
        }
        let x = random_point_near(&base, SAMPLE_RADIUS, &mut rng);
        if set_a.distance(&x)? <= SAMPLE_MARGIN || set_b.distance(&x)? <= SAMPLE_MARGIN {
            continue;
        }
        let basis = x.tangent_basis();
        let ga = set_a.distance_gradient(&x, &basis)?;
        let gb = set_b.distance_gradient(&x, &basis)?;
        let ip: f64 = ga.iter().zip(&gb).map(|(p, q)| p * q).sum();
        if ip < min_ip {
            min_ip = ip;
            worst = x.coords.clone();
        }
        accepted += 1;
    }
    Ok(ObtuseReport {
        samples,
        seed,
        min_inner_product: min_ip,
        worst_point: worst,
        commutator_defect: defect,
        passed: samples == 0 || min_ip >= OBTUSE_THRESHOLD,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitReport {
    pub dim: usize,
    pub length: f64,
    pub epsilon: f64,
    pub radius: f64,
    pub axis_distance: f64,
    /// `#{k != 0 : d_{g^k}(x) <= R}` from matrix powers.
    pub count: u64,
    /// The same count from the closed form.
    pub closed_form_count: u64,
    /// `N(d, epsilon, R)`; absent when `epsilon >= 2R`, where no nonzero power can qualify.
    pub bound: Option<f64>,
    pub passed: bool,
}

/// Counts orbit points of `<g>` within `radius` of `x` and compares with `N(d, epsilon, radius)`.
pub fn orbit_count_check(g: &LorentzIsometry, x: &HyperbolicPoint, radius: f64, epsilon: f64) -> Result<OrbitReport> {
    let IsometryKind::Loxodromic { length, .. } = g.kind else {
        return Err(Error::InvalidParameter("orbit counting needs a loxodromic isometry".into()));
    };
    if !(epsilon > 0.0) || epsilon > length {
        return Err(Error::InvalidParameter(format!("need 0 < epsilon <= translation length {length}")));
    }
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(Error::InvalidParameter(format!("radius must be finite and nonnegative, got {radius}")));
    }
    // Tolerance so that orbit points exactly on the sphere are counted.
    let slack = 1e-9 * radius.max(1.0);
    let within = |k: u64| displacement(&g.pow(k as i64), x) <= radius + slack;
    // d_{g^k} >= k l, so no k above R / l qualifies.
    let mut lo = 0u64;
    let mut hi = (radius / length).floor() as u64 + 1;
    while lo + 1 < hi {
        let mid = (lo + hi) / 2;
        if within(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r = g.axis_distance(x).expect("loxodromic");
    let mut closed = 0u64;
    while loxodromic_displacement_closed_form((closed + 1) as f64 * length, r) <= radius + slack {
        closed += 1;
    }
    let count = 2 * lo;
    let bound = if epsilon < 2.0 * radius { Some(multiplicity(g.dim(), epsilon, radius)?.value) } else { None };
    let passed = match bound {
        Some(n) => count as f64 <= n,
        None => count == 0,
    };
    Ok(OrbitReport {
        dim: g.dim(),
        length,
        epsilon,
        radius,
        axis_distance: r,
        count,
        closed_form_count: 2 * closed,
        bound,
        passed,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DisplacementCase {
    pub index: usize,
    pub dim: usize,
    pub length: f64,
    pub axis_distance: f64,
    pub matrix_value: f64,
    pub closed_form: f64,
    pub error: f64,
}

/// Random `(l, r)` with random axes; compares matrix displacement with the closed form.
pub fn displacement_suite(count: usize, seed: u64) -> Result<Vec<DisplacementCase>> {
    (0..count)
        .into_par_iter()
        .map(|index| {
            let mut rng = instance_rng(seed, index);
            let dim = rng.gen_range(2..=4);
            let length = rng.gen_range(0.05..2.0);
            let r = rng.gen_range(0.0..2.0);
            let (e1, e2) = random_axis(dim, &mut rng);
            let g = LorentzIsometry::loxodromic(length, &e1, &e2)?;
            let x = point_at_axis_distance(&g, r, rng.gen_range(-1.0..1.0), &mut rng);
            let matrix_value = displacement(&g, &x);
            let closed_form = loxodromic_displacement_closed_form(length, r);
            Ok(DisplacementCase {
                index,
                dim,
                length,
                axis_distance: r,
                matrix_value,
                closed_form,
                error: (matrix_value - closed_form).abs(),
            })
        })
        .collect()
}

/// A point at distance `r` from the axis of a loxodromic, above the axis
/// point at signed distance `t` from the base point.
pub fn point_at_axis_distance<R: Rng + ?Sized>(g: &LorentzIsometry, r: f64, t: f64, rng: &mut R) -> HyperbolicPoint {
    let IsometryKind::Loxodromic { attracting, .. } = g.kind() else {
        panic!("point_at_axis_distance needs a loxodromic");
    };
    let p = g.base_point();
    // Unit tangent along the axis, toward the attracting end.
    let along = {
        let w = null_vector(attracting);
        let mut v = p.project_tangent(&w);
        let n = lorentz(&v, &v).sqrt();
        v.iter_mut().for_each(|x| *x /= n);
        v
    };
    let q = p.exp(&along.iter().map(|x| x * t).collect::<Vec<_>>());
    let along_q = {
        let w = null_vector(attracting);
        let mut v = q.project_tangent(&w);
        let n = lorentz(&v, &v).sqrt();
        v.iter_mut().for_each(|x| *x /= n);
        v
    };
    // Random unit tangent at q orthogonal to the axis.
    let mut normal;
    loop {
        let basis = q.tangent_basis();
        let c = random_unit(q.dim(), rng);
        normal = vec![0.0; q.coords.len()];
        for (b, ci) in basis.iter().zip(&c) {
            axpy(*ci, b, &mut normal);
        }
        let k = lorentz(&normal, &along_q);
        axpy(-k, &along_q, &mut normal);
        let n = lorentz(&normal, &normal).max(0.0).sqrt();
        if n > 1e-3 {
            normal.iter_mut().for_each(|x| *x /= n);
            break;
        }
    }
    q.exp(&normal.iter().map(|x| x * r).collect::<Vec<_>>())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvexityCase {
    pub index: usize,
    pub kind: &'static str,
    pub min_second_difference: f64,
}

pub const CONVEXITY_STEP: f64 = 0.05;
const CONVEXITY_POINTS: usize = 40;

/// Second differences of `t -> d_g(c(t))` along random geodesics `c`, for
/// random loxodromic and parabolic `g`.
pub fn convexity_suite(count: usize, seed: u64) -> Result<Vec<ConvexityCase>> {
    (0..count)
        .into_par_iter()
        .map(|index| {
            let mut rng = instance_rng(seed, index);
            let dim = rng.gen_range(2..=4);
            let (g, kind) = if index % 2 == 0 {
                let (e1, e2) = random_axis(dim, &mut rng);
                (LorentzIsometry::loxodromic(rng.gen_range(0.05..2.0), &e1, &e2)?, "loxodromic")
            } else {
                let fixed = random_unit(dim, &mut rng);
                let v: Vec<f64> = (0..dim - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
                (LorentzIsometry::parabolic(&fixed, &v)?, "parabolic")
            };
            let start = random_point_near(&g.base_point(), 2.0, &mut rng);
            let basis = start.tangent_basis();
            let dir = random_unit(dim, &mut rng);
            let f = |t: f64| displacement(&g, &start.exp_in_basis(&basis, &dir, t));
            let ts: Vec<f64> =
                (0..CONVEXITY_POINTS).map(|i| (i as f64 - CONVEXITY_POINTS as f64 / 2.0) * CONVEXITY_STEP).collect();
            let vals: Vec<f64> = ts.iter().map(|&t| f(t)).collect();
            let min = vals.windows(3).map(|w| w[0] - 2.0 * w[1] + w[2]).fold(f64::INFINITY, f64::min);
            Ok(ConvexityCase { index, kind, min_second_difference: min })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObtuseCase {
    pub index: usize,
    pub kind: &'static str,
    pub dim: usize,
    pub a: LorentzIsometry,
    pub b: LorentzIsometry,
    pub eps_a: f64,
    pub eps_b: f64,
    pub report: ObtuseReport,
}

/// Commuting pairs `(g, g^2)` for loxodromic `g` with `l = 0.2`, and pairs
/// of parabolics with a common fixed point in `H^3`, alternately.
pub fn obtuse_suite(cases: usize, samples: usize, seed: u64) -> Result<Vec<ObtuseCase>> {
    (0..cases)
        .into_par_iter()
        .map(|index| {
            let mut rng = instance_rng(seed, index);
            let case_seed = rng.gen::<u64>();
            let (kind, dim, a, b, eps_a, eps_b) = if index % 2 == 0 {
                let dim = rng.gen_range(2..=3);
                let (e1, e2) = random_axis(dim, &mut rng);
                let g = LorentzIsometry::loxodromic(0.2, &e1, &e2)?;
                let g2 = g.pow(2);
                ("loxodromic_powers", dim, g, g2, rng.gen_range(0.3..1.0), rng.gen_range(0.5..1.2))
            } else {
                let fixed = random_unit(3, &mut rng);
                let v1: Vec<f64> = (0..2).map(|_| rng.gen_range(-0.5..0.5)).collect();
                let v2: Vec<f64> = (0..2).map(|_| rng.gen_range(-0.5..0.5)).collect();
                let a = LorentzIsometry::parabolic(&fixed, &v1)?;
                let b = LorentzIsometry::parabolic(&fixed, &v2)?;
                ("parabolic_pair", 3, a, b, rng.gen_range(0.2..1.0), rng.gen_range(0.2..1.0))
            };
            let report = obtuse_angle_check(&a, &b, eps_a, eps_b, samples, case_seed)?;
            Ok(ObtuseCase { index, kind, dim, a, b, eps_a, eps_b, report })
        })
        .collect()
}

/// Random orbit-count instances: `d` in 2..=4, `l` in [0.1, 1], `epsilon`
/// in [l/2, l], axis distance in [0, 2], `R` in [epsilon, 6].
pub fn orbit_suite(count: usize, seed: u64) -> Result<Vec<OrbitReport>> {
    (0..count)
        .into_par_iter()
        .map(|index| {
            let mut rng = instance_rng(seed, index);
            let dim = rng.gen_range(2..=4);
            let length = rng.gen_range(0.1..1.0);
            let epsilon = rng.gen_range(length / 2.0..=length);
            let r = rng.gen_range(0.0..2.0);
            let radius = rng.gen_range(epsilon..6.0);
            let (e1, e2) = random_axis(dim, &mut rng);
            let g = LorentzIsometry::loxodromic(length, &e1, &e2)?;
            let x = point_at_axis_distance(&g, r, rng.gen_range(-1.0..1.0), &mut rng);
            orbit_count_check(&g, &x, radius, epsilon)
        })
        .collect()
}

//! Finite simplicial complexes, pairs, boundary matrices and (D,V)-complexity.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::IntegerMatrix;

/// A simplex given by its strictly increasing vertex ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(Vec<usize>);

impl Simplex {
    /// Sorts the vertices; rejects empty input and repeated vertices.
    pub fn new(mut vertices: Vec<usize>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::MalformedInput("empty simplex".into()));
        }
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::MalformedInput(format!(
                "duplicate vertex in simplex {vertices:?}"
            )));
        }
        Ok(Simplex(vertices))
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    /// Codimension-one faces, the i-th omitting vertex i.
    pub fn facets(&self) -> impl Iterator<Item = Simplex> + '_ {
        let n = self.0.len();
        (0..n).filter(move |_| n > 1).map(move |i| {
            let mut v = self.0.clone();
            v.remove(i);
            Simplex(v)
        })
    }

    /// All nonempty faces including the simplex itself.
    pub fn faces(&self) -> Vec<Simplex> {
        let n = self.0.len();
        (1u64..(1u64 << n))
            .map(|mask| {
                Simplex((0..n).filter(|i| mask >> i & 1 == 1).map(|i| self.0[i]).collect())
            })
            .collect()
    }
}

/// A downward-closed set of simplices, stored per dimension in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SimplicialComplex {
    vertex_count: usize,
    by_dim: Vec<Vec<Simplex>>,
}

impl SimplicialComplex {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Downward closure of the given simplices.
    pub fn build<S: AsRef<[usize]>>(maximal: &[S]) -> Result<Self> {
        let mut all = BTreeSet::new();
        for s in maximal {
            let simplex = Simplex::new(s.as_ref().to_vec())?;
            for f in simplex.faces() {
                all.insert(f);
            }
        }
        Ok(Self::from_closed_set(all))
    }

    /// Like [`build`](Self::build) but checks ids against a declared vertex count.
    pub fn build_with_vertex_count<S: AsRef<[usize]>>(vertex_count: usize, maximal: &[S]) -> Result<Self> {
        let mut k = Self::build(maximal)?;
        if k.vertex_count > vertex_count {
            return Err(Error::MalformedInput(format!(
                "vertex id {} out of range for V={vertex_count}",
                k.vertex_count - 1
            )));
        }
        k.vertex_count = vertex_count;
        Ok(k)
    }

    fn from_closed_set(all: BTreeSet<Simplex>) -> Self {
        let mut by_dim: Vec<Vec<Simplex>> = Vec::new();
        let mut vertex_count = 0;
        for s in all {
            let d = s.dim();
            if by_dim.len() <= d {
                by_dim.resize_with(d + 1, Vec::new);
            }
            vertex_count = vertex_count.max(s.0[s.0.len() - 1] + 1);
            by_dim[d].push(s);
        }
        // BTreeSet order is lexicographic, so each bucket is already sorted.
        SimplicialComplex { vertex_count, by_dim }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Highest dimension present, `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.by_dim.len().checked_sub(1)
    }

    pub fn simplices(&self, k: usize) -> &[Simplex] {
        self.by_dim.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn count(&self, k: usize) -> usize {
        self.simplices(k).len()
    }

    pub fn f_vector(&self) -> Vec<usize> {
        self.by_dim.iter().map(Vec::len).collect()
    }

    pub fn len(&self) -> usize {
        self.by_dim.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.by_dim.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Simplex> {
        self.by_dim.iter().flatten()
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.simplices(s.dim()).binary_search(s).is_ok()
    }

    /// Index of `s` in the canonical basis of its dimension.
    pub fn index_of(&self, s: &Simplex) -> Option<usize> {
        self.simplices(s.dim()).binary_search(s).ok()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.by_dim
            .iter()
            .enumerate()
            .map(|(k, v)| if k % 2 == 0 { v.len() as i64 } else { -(v.len() as i64) })
            .sum()
    }

    /// Simplices not a proper face of another simplex.
    pub fn maximal_simplices(&self) -> Vec<Simplex> {
        let mut covered: BTreeSet<&Simplex> = BTreeSet::new();
        let mut facets = Vec::new();
        for k in 1..self.by_dim.len() {
            for s in &self.by_dim[k] {
                facets.extend(s.facets());
            }
        }
        let facet_set: BTreeSet<Simplex> = facets.into_iter().collect();
        for s in self.iter() {
            if facet_set.contains(s) {
                covered.insert(s);
            }
        }
        self.iter().filter(|s| !covered.contains(s)).cloned().collect()
    }

    pub fn is_subcomplex_of(&self, other: &SimplicialComplex) -> bool {
        self.iter().all(|s| other.contains(s))
    }

    /// Checks that every face of every stored simplex is stored.
    pub fn is_downward_closed(&self) -> bool {
        self.iter().all(|s| s.facets().all(|f| self.contains(&f)))
    }

    /// Relabels vertices through `map` (which must be injective on used ids).
    pub fn relabel(&self, map: &[usize]) -> Result<Self> {
        let simplices: Vec<Vec<usize>> =
            self.iter().map(|s| s.0.iter().map(|&v| map[v]).collect()).collect();
        let mut all = BTreeSet::new();
        for s in simplices {
            all.insert(Simplex::new(s)?);
        }
        Ok(Self::from_closed_set(all))
    }

    /// Adjacency counts in the 1-skeleton.
    pub fn vertex_degrees(&self) -> BTreeMap<usize, usize> {
        let mut deg: BTreeMap<usize, usize> = self.simplices(0).iter().map(|s| (s.0[0], 0)).collect();
        for e in self.simplices(1) {
            *deg.entry(e.0[0]).or_default() += 1;
            *deg.entry(e.0[1]).or_default() += 1;
        }
        deg
    }
}

/// A complex together with a subcomplex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialPair {
    total: SimplicialComplex,
    sub: SimplicialComplex,
}

impl SimplicialPair {
    pub fn new(total: SimplicialComplex, sub: SimplicialComplex) -> Result<Self> {
        if let Some(s) = sub.iter().find(|s| !total.contains(s)) {
            return Err(Error::MalformedInput(format!(
                "subcomplex simplex {:?} missing from total complex",
                s.vertices()
            )));
        }
        Ok(SimplicialPair { total, sub })
    }

    /// The pair `(K, ∅)`.
    pub fn absolute(total: SimplicialComplex) -> Self {
        SimplicialPair { total, sub: SimplicialComplex::empty() }
    }

    pub fn total(&self) -> &SimplicialComplex {
        &self.total
    }

    pub fn sub(&self) -> &SimplicialComplex {
        &self.sub
    }

    /// k-simplices of the total complex that are not in the subcomplex, in canonical order.
    pub fn relative_simplices(&self, k: usize) -> Vec<&Simplex> {
        self.total.simplices(k).iter().filter(|s| !self.sub.contains(s)).collect()
    }
}

/// Vertex count, maximum 1-skeleton degree, and simplex counts per dimension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComplexityProfile {
    #[serde(rename = "V")]
    pub vertices: usize,
    #[serde(rename = "D")]
    pub max_degree: usize,
    pub simplex_counts: Vec<usize>,
}

impl ComplexityProfile {
    /// Whether `count_p <= D^p * V` for every `p >= 1`.
    pub fn satisfies_simplex_bound(&self) -> bool {
        self.simplex_counts.iter().enumerate().skip(1).all(|(p, &c)| {
            let bound = (self.max_degree as u128)
                .checked_pow(p as u32)
                .and_then(|x| x.checked_mul(self.vertices as u128));
            bound.is_none_or(|b| c as u128 <= b)
        })
    }
}

pub fn complexity_profile(k: &SimplicialComplex) -> ComplexityProfile {
    let degrees = k.vertex_degrees();
    ComplexityProfile {
        vertices: k.count(0),
        max_degree: degrees.values().copied().max().unwrap_or(0),
        simplex_counts: k.f_vector(),
    }
}

/// Matrix of `∂_k : C_k -> C_{k-1}` in the canonical bases.
pub fn boundary_matrix(k: &SimplicialComplex, degree: usize) -> IntegerMatrix {
    if degree == 0 {
        return IntegerMatrix::zeros(0, k.count(0));
    }
    let rows = k.simplices(degree - 1);
    let cols = k.simplices(degree);
    let mut m = IntegerMatrix::zeros(rows.len(), cols.len());
    for (j, s) in cols.iter().enumerate() {
        for (i, f) in s.facets().enumerate() {
            let r = rows.binary_search(&f).expect("complex is downward closed");
            m.set(r, j, sign(i));
        }
    }
    m
}

/// Matrix of the boundary on `C_k(total) / C_k(sub)`.
pub fn relative_boundary_matrix(pair: &SimplicialPair, degree: usize) -> IntegerMatrix {
    let cols = pair.relative_simplices(degree);
    if degree == 0 {
        return IntegerMatrix::zeros(0, cols.len());
    }
    let rows = pair.relative_simplices(degree - 1);
    let row_index: HashMap<&Simplex, usize> = rows.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let mut m = IntegerMatrix::zeros(rows.len(), cols.len());
    for (j, s) in cols.iter().enumerate() {
        for (i, f) in s.facets().enumerate() {
            if let Some(&r) = row_index.get(&f) {
                m.set(r, j, sign(i));
            }
        }
    }
    m
}

fn sign(i: usize) -> BigInt {
    if i % 2 == 0 { BigInt::from(1) } else { BigInt::from(-1) }
}

/// Random complex with at most `max_vertices` vertices and 1-skeleton degree at most `max_degree`.
///
/// Candidate simplices of dimension `1..=dim` are drawn at random and kept
/// whenever the degree budget allows. Isolated vertices fill the remaining
/// vertex budget. Deterministic in `seed`.
pub fn random_dv_complex(max_degree: usize, max_vertices: usize, dim: usize, seed: u64) -> Result<SimplicialComplex> {
    if max_degree == 0 || max_vertices == 0 {
        return Err(Error::InvalidParameter("D and V must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = max_vertices;
    let mut adjacency: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let mut maximal: Vec<Vec<usize>> = Vec::new();
    let attempts = 8 * n * (dim + 1);
    let top = dim.min(max_degree).min(n - 1);
    for _ in 0..attempts {
        if top == 0 {
            break;
        }
        let d = rng.gen_range(1..=top);
        let start = rng.gen_range(0..n);
        let mut near: Vec<usize> = adjacency[start].iter().copied().collect();
        let mut far: Vec<usize> = (0..n).filter(|&v| v != start && !adjacency[start].contains(&v)).collect();
        near.shuffle(&mut rng);
        far.shuffle(&mut rng);
        // Preferring existing neighbours fills in higher simplices over old edges.
        let candidates = if rng.gen_bool(0.5) { [near, far].concat() } else { [far, near].concat() };
        let mut simplex = vec![start];
        let mut pending = vec![0usize; n];
        for v in candidates {
            if simplex.len() == d + 1 {
                break;
            }
            let fresh: Vec<usize> = simplex.iter().copied().filter(|u| !adjacency[*u].contains(&v)).collect();
            let fits = fresh.iter().all(|&u| adjacency[u].len() + pending[u] < max_degree)
                && adjacency[v].len() + fresh.len() <= max_degree;
            if fits {
                for &u in &fresh {
                    pending[u] += 1;
                }
                pending[v] += fresh.len();
                simplex.push(v);
            }
        }
        if simplex.len() < 2 {
            continue;
        }
        for (a, &u) in simplex.iter().enumerate() {
            for &w in &simplex[a + 1..] {
                adjacency[u].insert(w);
                adjacency[w].insert(u);
            }
        }
        maximal.push(simplex);
    }
    for v in 0..n {
        if adjacency[v].is_empty() && rng.gen_bool(0.5) {
            maximal.push(vec![v]);
        }
    }
    if maximal.is_empty() {
        maximal.push(vec![0]);
    }
    SimplicialComplex::build(&maximal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn hollow_triangle_closure() {
        let k = SimplicialComplex::build(&[[0, 1], [1, 2], [0, 2]]).unwrap();
        assert_eq!(k.f_vector(), vec![3, 3]);
        let full = SimplicialComplex::build(&[[0, 1, 2]]).unwrap();
        assert_eq!(full.f_vector(), vec![3, 3, 1]);
    }

    #[test]
    fn rp2_closure_by_enumeration() {
        // Brute force: collect every nonempty vertex subset of every listed triangle.
        let tris = fixtures::RP2_TRIANGLES;
        let mut seen = BTreeSet::new();
        for t in tris {
            for mask in 1u8..8 {
                let face: Vec<usize> = (0..3).filter(|i| mask >> i & 1 == 1).map(|i| t[i]).collect();
                let mut face = face;
                face.sort();
                seen.insert(face);
            }
        }
        let counts = (1..=3).map(|n| seen.iter().filter(|f| f.len() == n).count()).collect::<Vec<_>>();
        assert_eq!(counts, vec![6, 15, 10]);
        assert_eq!(fixtures::rp2().f_vector(), counts);
    }

    #[test]
    fn duplicate_vertex_rejected() {
        assert!(matches!(SimplicialComplex::build(&[[0, 1, 1]]), Err(Error::MalformedInput(_))));
    }

    #[test]
    fn profiles() {
        let tri = fixtures::hollow_triangle();
        let p = complexity_profile(&tri);
        assert_eq!((p.vertices, p.max_degree), (3, 2));
        let p = complexity_profile(&fixtures::rp2());
        assert_eq!((p.vertices, p.max_degree), (6, 5));
        let pt = SimplicialComplex::build(&[[0]]).unwrap();
        let p = complexity_profile(&pt);
        assert_eq!((p.vertices, p.max_degree), (1, 0));
        assert!(p.satisfies_simplex_bound());
    }

    #[test]
    fn boundary_shapes() {
        let tri = fixtures::hollow_triangle();
        let d1 = boundary_matrix(&tri, 1);
        assert_eq!((d1.rows(), d1.cols()), (3, 3));
        for j in 0..3 {
            let nz: Vec<_> = d1.column(j).into_iter().filter(|x| *x != BigInt::from(0)).collect();
            assert_eq!(nz.len(), 2);
        }
        let full = SimplicialComplex::build(&[[0, 1, 2]]).unwrap();
        // edges sorted: 01, 02, 12; ∂[012] = [12] - [02] + [01]
        assert_eq!(boundary_matrix(&full, 2), IntegerMatrix::from_rows(&[[1], [-1], [1]]));
    }

    #[test]
    fn boundary_squares_to_zero_on_rp2() {
        let k = fixtures::rp2();
        let prod = boundary_matrix(&k, 1).mul(&boundary_matrix(&k, 2));
        assert!(prod.is_zero());
    }

    #[test]
    fn relative_boundary_cases() {
        let full = SimplicialComplex::build(&[[0, 1, 2]]).unwrap();
        let bd = SimplicialComplex::build(&[[0, 1], [1, 2], [0, 2]]).unwrap();
        let pair = SimplicialPair::new(full.clone(), bd).unwrap();
        let m = relative_boundary_matrix(&pair, 2);
        assert_eq!((m.rows(), m.cols()), (0, 1));
        let abs = SimplicialPair::absolute(fixtures::rp2());
        for k in 0..3 {
            assert_eq!(relative_boundary_matrix(&abs, k), boundary_matrix(abs.total(), k));
        }
    }

    #[test]
    fn pair_requires_subcomplex() {
        let a = SimplicialComplex::build(&[[0, 1]]).unwrap();
        let b = SimplicialComplex::build(&[[1, 2]]).unwrap();
        assert!(SimplicialPair::new(a, b).is_err());
    }

    #[test]
    fn random_generator_small_case() {
        let full = fixtures::hollow_triangle();
        for seed in 0..20 {
            let k = random_dv_complex(2, 3, 1, seed).unwrap();
            assert!(k.is_subcomplex_of(&full));
        }
    }

    #[test]
    fn random_generator_profile_and_determinism() {
        let k = random_dv_complex(6, 30, 3, 1).unwrap();
        let p = complexity_profile(&k);
        assert!(p.max_degree <= 6 && p.vertices <= 30);
        assert!(p.satisfies_simplex_bound());
        assert!(k.is_downward_closed());
        assert_eq!(k, random_dv_complex(6, 30, 3, 1).unwrap());
        assert!(k.count(2) > 0, "generator should produce triangles: {:?}", k.f_vector());
    }

    #[test]
    fn rebuild_from_maximal_is_identity() {
        for k in [fixtures::rp2(), fixtures::torus(), fixtures::klein_bottle()] {
            let max: Vec<Vec<usize>> = k.maximal_simplices().iter().map(|s| s.vertices().to_vec()).collect();
            assert_eq!(SimplicialComplex::build(&max).unwrap(), k);
        }
    }

    #[test]
    fn empty_complex() {
        let e = SimplicialComplex::empty();
        assert_eq!(e.dim(), None);
        assert_eq!(e.euler_characteristic(), 0);
        assert_eq!(complexity_profile(&e).vertices, 0);
    }
}

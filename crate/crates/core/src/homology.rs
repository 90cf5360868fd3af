//! Integer homology of complexes and pairs via Smith normal form.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::IntegerMatrix;
use crate::simplicial::{boundary_matrix, relative_boundary_matrix, SimplicialComplex, SimplicialPair};
use crate::snf::invariant_factors;

/// A finitely generated abelian group `Z^betti ⊕ Z/d_1 ⊕ ... ⊕ Z/d_t`
/// with `1 < d_1 | d_2 | ... | d_t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct AbelianGroupStructure {
    pub betti: usize,
    pub invariant_factors: Vec<BigInt>,
}

impl AbelianGroupStructure {
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn free(betti: usize) -> Self {
        AbelianGroupStructure { betti, invariant_factors: Vec::new() }
    }

    /// Builds a group from arbitrary diagonal entries, dropping units and
    /// normalising into a divisibility chain.
    pub fn from_diagonal(betti: usize, diag: &[BigInt]) -> Self {
        let mut factors: Vec<BigInt> = diag.iter().map(|d| d.abs()).filter(|d| !d.is_one()).collect();
        // Zero entries contribute free summands.
        let zeros = factors.iter().filter(|d| d.bits() == 0).count();
        factors.retain(|d| d.bits() != 0);
        let factors = normalize_chain(factors);
        AbelianGroupStructure { betti: betti + zeros, invariant_factors: factors }
    }

    pub fn torsion_order(&self) -> BigInt {
        self.invariant_factors.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.betti == 0 && self.invariant_factors.is_empty()
    }

    pub fn torsion_factors_u64(&self) -> Option<Vec<u64>> {
        self.invariant_factors.iter().map(ToPrimitive::to_u64).collect()
    }
}

/// Re-expresses a multiset of positive integers > 1 as a divisibility chain
/// for the same abelian group.
fn normalize_chain(mut factors: Vec<BigInt>) -> Vec<BigInt> {
    // Repeated gcd/lcm swaps converge to the invariant-factor form.
    loop {
        let mut changed = false;
        for i in 0..factors.len() {
            for j in i + 1..factors.len() {
                if !factors[j].is_multiple_of(&factors[i]) {
                    let g = factors[i].gcd(&factors[j]);
                    let l = factors[i].lcm(&factors[j]);
                    factors[i] = g;
                    factors[j] = l;
                    changed = true;
                }
            }
        }
        factors.retain(|d| !d.is_one());
        factors.sort();
        if !changed {
            return factors;
        }
    }
}

impl fmt::Display for AbelianGroupStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.betti {
            0 => {}
            1 => parts.push("Z".to_string()),
            b => parts.push(format!("Z^{b}")),
        }
        for d in &self.invariant_factors {
            parts.push(format!("Z/{d}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// One degree of a homology computation, in the output JSON layout.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologyRecord {
    pub degree: usize,
    pub betti: usize,
    #[serde(serialize_with = "serialize_bigints")]
    pub torsion: Vec<BigInt>,
}

impl HomologyRecord {
    pub fn new(degree: usize, group: &AbelianGroupStructure) -> Self {
        HomologyRecord { degree, betti: group.betti, torsion: group.invariant_factors.clone() }
    }
}

/// Serialises integers as JSON numbers when they fit in 64 bits, as decimal strings otherwise.
pub fn serialize_bigints<S: Serializer>(values: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(values.len()))?;
    for v in values {
        match v.to_i64() {
            Some(x) => seq.serialize_element(&x)?,
            None => seq.serialize_element(&v.to_string())?,
        }
    }
    seq.end()
}

/// `coker(A : Z^cols -> Z^rows)`.
pub fn cokernel(a: &IntegerMatrix) -> AbelianGroupStructure {
    let (rank, diag) = invariant_factors(a);
    AbelianGroupStructure {
        betti: a.rows() - rank,
        invariant_factors: diag.into_iter().filter(|d| !d.is_one()).collect(),
    }
}

/// Homology from the ranks and invariant factors of consecutive boundaries.
fn homology_from_boundaries(n_k: usize, d_k: &IntegerMatrix, d_k1: &IntegerMatrix) -> AbelianGroupStructure {
    let rank_k = if d_k.rows() == 0 || d_k.cols() == 0 { 0 } else { invariant_factors(d_k).0 };
    let (rank_k1, diag) = invariant_factors(d_k1);
    AbelianGroupStructure {
        betti: n_k - rank_k - rank_k1,
        invariant_factors: diag.into_iter().filter(|d| !d.is_one()).collect(),
    }
}

/// Unreduced simplicial homology `H_k(K; Z)`.
pub fn homology(k: &SimplicialComplex, degree: usize) -> AbelianGroupStructure {
    let d_k = boundary_matrix(k, degree);
    let d_k1 = boundary_matrix(k, degree + 1);
    homology_from_boundaries(k.count(degree), &d_k, &d_k1)
}

/// `H_k(K; Z)` for `k = 0..=max_degree`, each boundary reduced once.
pub fn homology_all(k: &SimplicialComplex, max_degree: usize) -> Vec<AbelianGroupStructure> {
    let ranks_and_factors: Vec<(usize, Vec<BigInt>)> =
        (0..=max_degree + 1).map(|d| invariant_factors(&boundary_matrix(k, d))).collect();
    (0..=max_degree)
        .map(|d| {
            let rank_k = if d == 0 { 0 } else { ranks_and_factors[d].0 };
            let (rank_k1, diag) = &ranks_and_factors[d + 1];
            AbelianGroupStructure {
                betti: k.count(d) - rank_k - rank_k1,
                invariant_factors: diag.iter().filter(|x| !x.is_one()).cloned().collect(),
            }
        })
        .collect()
}

/// `H_k(total, sub; Z)`.
pub fn relative_homology(pair: &SimplicialPair, degree: usize) -> AbelianGroupStructure {
    let d_k = relative_boundary_matrix(pair, degree);
    let d_k1 = relative_boundary_matrix(pair, degree + 1);
    homology_from_boundaries(pair.relative_simplices(degree).len(), &d_k, &d_k1)
}

pub const CROSSCHECK_PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];
pub const CROSSCHECK_MAX_SIMPLICES: usize = 500;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeCheck {
    pub prime: u64,
    /// Invariant factors of `∂_{k+1}` divisible by the prime.
    pub factors_divisible: usize,
    /// `rank_Q(∂_{k+1}) - rank_{F_p}(∂_{k+1})`.
    pub rank_drop: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrosscheckReport {
    pub degree: usize,
    pub betti_snf: usize,
    pub betti_rational: usize,
    pub primes: Vec<PrimeCheck>,
}

/// Recomputes Betti numbers by exact rational elimination and torsion primes
/// by modular rank drops, and compares both with [`homology`].
pub fn homology_oracle_crosscheck(k: &SimplicialComplex, degree: usize) -> Result<CrosscheckReport> {
    if k.len() > CROSSCHECK_MAX_SIMPLICES {
        return Err(Error::InvalidParameter(format!(
            "crosscheck limited to {CROSSCHECK_MAX_SIMPLICES} simplices, got {}",
            k.len()
        )));
    }
    let group = homology(k, degree);
    let d_k = boundary_matrix(k, degree);
    let d_k1 = boundary_matrix(k, degree + 1);
    let rank_q_k = d_k.rank_rational();
    let rank_q_k1 = d_k1.rank_rational();
    let betti_rational = k.count(degree) - rank_q_k - rank_q_k1;
    let primes: Vec<PrimeCheck> = CROSSCHECK_PRIMES
        .iter()
        .map(|&p| {
            let pb = BigInt::from(p);
            PrimeCheck {
                prime: p,
                factors_divisible: group.invariant_factors.iter().filter(|d| d.is_multiple_of(&pb)).count(),
                rank_drop: rank_q_k1 - d_k1.rank_mod_prime(p),
            }
        })
        .collect();
    let report = CrosscheckReport { degree, betti_snf: group.betti, betti_rational, primes };
    if report.betti_snf != report.betti_rational {
        return Err(Error::Inconsistency(format!(
            "degree {degree}: SNF betti {} vs rational betti {}",
            report.betti_snf, report.betti_rational
        )));
    }
    if let Some(bad) = report.primes.iter().find(|c| c.factors_divisible != c.rank_drop) {
        return Err(Error::Inconsistency(format!(
            "degree {degree}, prime {}: {} invariant factors divisible but rank drops by {}",
            bad.prime, bad.factors_divisible, bad.rank_drop
        )));
    }
    Ok(report)
}

//! Classical post-processing: recovering the logarithm d from an output
//! pair (j, k) given the public instance (m, ℓ, r).
//!
//! With L = 2^(m+ℓ), the integer z = (r·j - {r·j}_L)/L is known from j, and
//! a B-good pair satisfies
//!
//! ```text
//!   d·z + round(r·k/L) ≡ t  (mod r),    |t| ≤ round((B + 1/2)/2^ℓ)
//! ```
//!
//! so d ≡ (t - round(r·k/L))·z⁻¹ (mod r) for some t in the bounded window.
//! When gcd(z, r) ≠ 1 the congruence is solved modulo r/τ for the smallest
//! divisor τ of r with gcd(z, r/τ) = 1, and the τ lifts d₀ + i·(r/τ) are
//! tested in turn.
//!
//! Candidates are enumerated with |t| ascending (positive sign first) and
//! lift index ascending: small |t| carries most of the probability mass, so
//! this order minimizes expected verifier calls.

use std::collections::HashSet;

use rand_core::RngCore;
use rug::{Integer, Rational};

use crate::kernel::{FrequencyPair, PublicInstance};
use crate::numtheory::{mod_pow, reduce_mod, reduce_signed, round_nearest, smallest_tau};

/// Default bound on the τ-expansion; the search is abandoned beyond it.
pub const DEFAULT_TAU_LIMIT: u64 = 1 << 20;

/// Why the post-processing failed to produce a logarithm.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Failure {
    /// z ≡ 0 (mod r): the congruence carries no information about d and the
    /// quantum algorithm has to be re-run.
    #[error("z = 0 modulo r; the quantum algorithm must be re-run")]
    ZZero,
    /// gcd(z, r) forced a τ beyond the configured limit.
    #[error("tau expansion {tau} exceeds limit {limit}")]
    TauTooLarge { tau: Integer, limit: u64 },
    /// Every candidate in the search window was rejected by the verifier.
    #[error("candidate search exhausted without an accepted logarithm")]
    Exhausted,
}

/// Accepts or rejects a candidate logarithm.
pub trait DlogVerifier {
    fn accepts(&self, candidate: &Integer) -> bool;
}

impl<F: Fn(&Integer) -> bool> DlogVerifier for F {
    fn accepts(&self, candidate: &Integer) -> bool {
        self(candidate)
    }
}

/// Simulation verifier: equality with a known logarithm.
#[derive(Debug, Clone)]
pub struct EqualityVerifier {
    pub d: Integer,
}

impl DlogVerifier for EqualityVerifier {
    fn accepts(&self, candidate: &Integer) -> bool {
        *candidate == self.d
    }
}

/// Reference-group verifier: accepts candidates c with g^c ≡ x (mod p).
#[derive(Debug, Clone)]
pub struct GroupVerifier {
    pub modulus: Integer,
    pub generator: Integer,
    pub target: Integer,
}

impl DlogVerifier for GroupVerifier {
    fn accepts(&self, candidate: &Integer) -> bool {
        mod_pow(&self.generator, candidate, &self.modulus)
            .map(|v| v == reduce_mod(&self.target, &self.modulus).expect("modulus checked"))
            .unwrap_or(false)
    }
}

/// Output of the candidate enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSet {
    pub z: Integer,
    pub tau: Integer,
    /// Maximum |t| searched: round((B + 1/2)/2^ℓ).
    pub search_bound: u64,
    /// Deduplicated candidates in (|t|, sign, lift) order, all in [0, r).
    pub candidates: Vec<Integer>,
}

/// z = (r·j - {r·j}_L) / L; the division is exact. The result lies in
/// [0, r], and z ≡ 0 (mod r) marks the pair as unusable.
pub fn compute_z(pub_inst: &PublicInstance, j: &Integer) -> Integer {
    let modulus = pub_inst.modulus();
    let rj = Integer::from(pub_inst.r() * j);
    let signed = reduce_signed(&rj, &modulus).expect("modulus is positive");
    (rj - signed) / modulus
}

/// round((B + 1/2) / 2^ℓ) = round((2B + 1) / 2^(ℓ+1))
fn search_bound(b: u64, ell: u32) -> u64 {
    let q = Rational::from((
        Integer::from(2 * b + 1),
        Integer::from(1) << (ell + 1),
    ));
    round_nearest(&q).to_u64().expect("bound <= B")
}

/// Enumerates candidate logarithms with the default τ limit.
pub fn enumerate_candidates(
    pub_inst: &PublicInstance,
    pair: &FrequencyPair,
    b: u64,
) -> Result<CandidateSet, Failure> {
    enumerate_candidates_bounded(pub_inst, pair, b, DEFAULT_TAU_LIMIT)
}

/// Enumerates candidate logarithms for a pair assumed to be B-good.
///
/// For each t with |t| ≤ round((B+1/2)/2^ℓ), in the order 0, +1, -1, ...,
/// computes d₀ ≡ (t - round(r·k/L))·z⁻¹ (mod r/τ) and includes the lifts
/// d₀ + i·(r/τ) for i in [0, τ).
pub fn enumerate_candidates_bounded(
    pub_inst: &PublicInstance,
    pair: &FrequencyPair,
    b: u64,
    tau_limit: u64,
) -> Result<CandidateSet, Failure> {
    let r = pub_inst.r();
    let z = compute_z(pub_inst, &pair.j);
    if Integer::from(&z % r) == 0 {
        return Err(Failure::ZZero);
    }
    let tau = smallest_tau(&z, r).expect("r >= 2 by instance invariant");
    if tau > tau_limit {
        return Err(Failure::TauTooLarge {
            tau,
            limit: tau_limit,
        });
    }
    let reduced_r = Integer::from(r / &tau);
    let z_inv = if reduced_r == 1 {
        Integer::from(0)
    } else {
        Integer::from(&z % &reduced_r)
            .invert(&reduced_r)
            .expect("gcd(z, r/tau) = 1 by construction")
    };
    let rounded_rk = round_nearest(&Rational::from((
        Integer::from(r * &pair.k),
        pub_inst.modulus(),
    )));

    let bound = search_bound(b, pub_inst.ell());
    let tau_count = tau.to_u64().expect("tau <= tau_limit");
    let mut seen = HashSet::new();
    let mut candidates = Vec::new();
    for idx in 0..(2 * bound + 1) {
        let t: i64 = if idx == 0 {
            0
        } else if idx % 2 == 1 {
            ((idx + 1) / 2) as i64
        } else {
            -((idx / 2) as i64)
        };
        let base = if reduced_r == 1 {
            Integer::from(0)
        } else {
            reduce_mod(
                &(Integer::from(t - &rounded_rk) * &z_inv),
                &reduced_r,
            )
            .expect("reduced_r >= 2")
        };
        for i in 0..tau_count {
            let cand = Integer::from(&base + Integer::from(&reduced_r * i));
            if seen.insert(cand.clone()) {
                candidates.push(cand);
            }
        }
    }
    Ok(CandidateSet {
        z,
        tau,
        search_bound: bound,
        candidates,
    })
}

/// Runs the bounded search and returns the first candidate the verifier
/// accepts, in enumeration order.
pub fn solve<V: DlogVerifier + ?Sized>(
    pub_inst: &PublicInstance,
    pair: &FrequencyPair,
    b: u64,
    verifier: &V,
) -> Result<Integer, Failure> {
    let set = enumerate_candidates(pub_inst, pair, b)?;
    set.candidates
        .into_iter()
        .find(|c| verifier.accepts(c))
        .ok_or(Failure::Exhausted)
}

/// Uniform integer in [0, n) by rejection over n's bit length.
pub fn uniform_below<R: RngCore + ?Sized>(n: &Integer, rng: &mut R) -> Integer {
    assert!(*n > 0, "uniform_below needs n >= 1");
    let bits = n.significant_bits();
    let words = bits.div_ceil(64);
    loop {
        let mut v = Integer::new();
        for _ in 0..words {
            v <<= 64;
            v |= Integer::from(rng.next_u64());
        }
        v >>= (words * 64 - bits) as u32;
        if v < *n {
            return v;
        }
    }
}

/// Randomizes a discrete-logarithm instance: returns d = d' + t (mod r)
/// for a fresh uniform offset t, so the solver sees a uniform logarithm.
pub fn randomize_instance<R: RngCore + ?Sized>(
    d_prime: &Integer,
    r: &Integer,
    rng: &mut R,
) -> (Integer, Integer) {
    let t_offset = uniform_below(r, rng);
    let d = reduce_mod(&Integer::from(d_prime + &t_offset), r).expect("r positive");
    (d, t_offset)
}

/// Inverts [`randomize_instance`]: d' = d - t (mod r).
pub fn derandomize(d: &Integer, t_offset: &Integer, r: &Integer) -> Integer {
    reduce_mod(&Integer::from(d - t_offset), r).expect("r positive")
}

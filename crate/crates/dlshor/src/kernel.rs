//! The probability model: problem instances, the maps between frequency
//! pairs (j, k), argument pairs (α_d, α_r) and angle pairs (θ_d, θ_r),
//! B-goodness, and the closed-form heuristic density P(θ_d, θ_r).
//!
//! An output pair (j, k) of the quantum algorithm determines
//!
//! ```text
//!   α_d = {d·j + k} mod± 2^(m+ℓ)      θ_d = 2π α_d / 2^(m+ℓ)
//!   α_r = {r·j}     mod± 2^(m+ℓ)      θ_r = 2π α_r / 2^(m+ℓ)
//! ```
//!
//! where `mod±` is the signed reduction to [-2^(m+ℓ-1), 2^(m+ℓ-1)). The
//! heuristic density of observing a pair with angles (θ_d, θ_r) is, with
//! L = 2^(m+ℓ) and φ = θ_d - θ_r·d/r,
//!
//! ```text
//!   P(θ_d, θ_r) = r/L⁴ · 2(1 - cos(L/r·θ_r))/θ_r² · (cos(Lφ) - 1)/(cos(φ) - 1)
//! ```
//!
//! with the second factor replaced by its limit L² when φ vanishes. All
//! cos(x) - 1 terms are evaluated as -2·sin²(x/2) and large trig arguments
//! are reduced modulo 2π at a working precision of at least m+ℓ+64 bits,
//! which keeps the evaluation stable for cryptographic-size m.

use rug::float::Constant;
use rug::{Float, Integer, Rational};

use crate::numtheory::{reduce_signed, round_nearest};
use crate::{Error, Result};

/// Full simulation instance (m, ℓ, r, d). The logarithm d is known here;
/// the solver works from the public part only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemInstance {
    m: u32,
    ell: u32,
    r: Integer,
    d: Integer,
}

/// The public part (m, ℓ, r) of an instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicInstance {
    m: u32,
    ell: u32,
    r: Integer,
}

/// Measured output pair, both components in [0, 2^(m+ℓ)).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FrequencyPair {
    pub j: Integer,
    pub k: Integer,
}

/// Signed-residue arguments (α_d, α_r), both in [-2^(m+ℓ-1), 2^(m+ℓ-1)).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArgumentPair {
    pub alpha_d: Integer,
    pub alpha_r: Integer,
}

/// Angles θ = 2πα/2^(m+ℓ) corresponding to an argument pair, |θ| ≤ π.
#[derive(Debug, Clone)]
pub struct AnglePair {
    pub theta_d: Float,
    pub theta_r: Float,
}

/// Decomposition α_d = round(α_r·d/r) + Δ with the exact rounding residue
/// δ_Δ = round(α_r·d/r) - α_r·d/r ∈ [-1/2, 1/2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoodnessDecomposition {
    pub delta: Integer,
    pub delta_frac: Rational,
}

fn check_public(m: u32, ell: u32, r: &Integer) -> Result<()> {
    if m < 2 {
        return Err(Error::InvalidInput(format!("m must be >= 2, got {m}")));
    }
    let lo = Integer::from(1) << (m - 1);
    let hi = Integer::from(1) << m;
    if *r < lo || *r >= hi {
        return Err(Error::InvalidInput(format!(
            "r = {r} is not an m = {m} bit order: need 2^(m-1) <= r < 2^m"
        )));
    }
    let _ = ell; // any u32 padding length is allowed
    Ok(())
}

impl ProblemInstance {
    pub fn new(m: u32, ell: u32, r: Integer, d: Integer) -> Result<Self> {
        check_public(m, ell, &r)?;
        if d < 0 || d >= r {
            return Err(Error::InvalidInput(format!("d = {d} is not in [0, r)")));
        }
        Ok(Self { m, ell, r, d })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn r(&self) -> &Integer {
        &self.r
    }

    pub fn d(&self) -> &Integer {
        &self.d
    }

    /// L = 2^(m+ℓ), the size of each control register.
    pub fn modulus(&self) -> Integer {
        Integer::from(1) << (self.m + self.ell)
    }

    pub fn half_modulus(&self) -> Integer {
        Integer::from(1) << (self.m + self.ell - 1)
    }

    pub fn m_plus_ell(&self) -> u32 {
        self.m + self.ell
    }

    pub fn public(&self) -> PublicInstance {
        PublicInstance {
            m: self.m,
            ell: self.ell,
            r: self.r.clone(),
        }
    }
}

impl PublicInstance {
    pub fn new(m: u32, ell: u32, r: Integer) -> Result<Self> {
        check_public(m, ell, &r)?;
        Ok(Self { m, ell, r })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn r(&self) -> &Integer {
        &self.r
    }

    pub fn modulus(&self) -> Integer {
        Integer::from(1) << (self.m + self.ell)
    }

    pub fn half_modulus(&self) -> Integer {
        Integer::from(1) << (self.m + self.ell - 1)
    }

    pub fn m_plus_ell(&self) -> u32 {
        self.m + self.ell
    }

    /// Attaches a logarithm, validating it against r.
    pub fn with_d(&self, d: Integer) -> Result<ProblemInstance> {
        ProblemInstance::new(self.m, self.ell, self.r.clone(), d)
    }
}

/// Working precision for trig arguments scaled by 2^(m+ℓ): at least
/// m+ℓ+64 mantissa bits, more if the caller asked for more.
fn working_precision(inst_bits: u32, requested: u32) -> u32 {
    requested.max(inst_bits + 64)
}

pub(crate) fn two_pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi) * 2u32
}

/// x reduced to [-π, π] by subtracting the nearest multiple of 2π.
pub(crate) fn reduce_two_pi(x: Float) -> Float {
    let tp = two_pi(x.prec());
    x.remainder(&tp)
}

/// 1 - cos(x) evaluated as 2·sin²(x/2); assumes |x| small enough that no
/// further argument reduction is needed.
pub(crate) fn one_minus_cos(x: &Float) -> Float {
    let half = Float::with_val(x.prec(), x / 2u32);
    let s = half.sin();
    Float::with_val(x.prec(), &s * &s) * 2u32
}

/// (α_d, α_r) of a measured pair. The pair is taken modulo 2^(m+ℓ), so any
/// integer inputs are accepted.
pub fn arguments_of(inst: &ProblemInstance, pair: &FrequencyPair) -> ArgumentPair {
    let modulus = inst.modulus();
    let alpha_d = reduce_signed(&Integer::from(&inst.d * &pair.j + &pair.k), &modulus)
        .expect("modulus is positive");
    let alpha_r =
        reduce_signed(&Integer::from(&inst.r * &pair.j), &modulus).expect("modulus is positive");
    ArgumentPair { alpha_d, alpha_r }
}

impl AnglePair {
    /// θ = 2πα/2^(m+ℓ) at a working precision of at least m+ℓ+64 bits.
    pub fn from_arguments(inst: &ProblemInstance, args: &ArgumentPair, precision_bits: u32) -> Self {
        let wp = working_precision(inst.m_plus_ell(), precision_bits);
        let scale = Rational::from((Integer::from(1), inst.modulus()));
        let tp = two_pi(wp);
        let theta_d = Float::with_val(wp, Rational::from(&args.alpha_d * &scale)) * &tp;
        let theta_r = Float::with_val(wp, Rational::from(&args.alpha_r * &scale)) * &tp;
        AnglePair { theta_d, theta_r }
    }

    pub fn from_radians(theta_d: Float, theta_r: Float) -> Self {
        AnglePair { theta_d, theta_r }
    }
}

/// The interference angle φ = (2π/2^(m+ℓ))·(α_d - α_r·d/r), evaluated from
/// the exact rational (α_d·r - α_r·d)/(2^(m+ℓ)·r).
pub fn phi(inst: &ProblemInstance, args: &ArgumentPair, precision_bits: u32) -> Float {
    let wp = working_precision(inst.m_plus_ell(), precision_bits);
    let num = Integer::from(&args.alpha_d * &inst.r) - Integer::from(&args.alpha_r * &inst.d);
    let den = inst.modulus() * &inst.r;
    Float::with_val(wp, Rational::from((num, den))) * two_pi(wp)
}

/// Δ and δ_Δ for α_d = round(α_r·d/r) + Δ, both exact.
pub fn decompose(inst: &ProblemInstance, args: &ArgumentPair) -> GoodnessDecomposition {
    let x = Rational::from((Integer::from(&args.alpha_r * &inst.d), inst.r.clone()));
    let rounded = round_nearest(&x);
    let delta = Integer::from(&args.alpha_d - &rounded);
    let delta_frac = Rational::from(rounded) - x;
    GoodnessDecomposition { delta, delta_frac }
}

/// True when the pair's Δ satisfies |Δ| ≤ B.
pub fn is_b_good(inst: &ProblemInstance, pair: &FrequencyPair, b: u64) -> bool {
    let args = arguments_of(inst, pair);
    let delta = decompose(inst, &args).delta;
    delta.clone().abs() <= b
}

/// Relative threshold below which the φ-dependent factor switches to its
/// analytic limit: Eq-style branch taken when |φ|·2^(m+ℓ) < 2^-32.
const PHI_BRANCH_THRESHOLD_LOG2: i32 = -32;

/// Closed-form heuristic density P(θ_d, θ_r) of observing a pair with the
/// given angles. Non-negative; removable singularities at θ_r = 0 and φ = 0
/// are evaluated via their analytic limits.
pub fn heuristic_density(inst: &ProblemInstance, angles: &AnglePair, precision_bits: u32) -> Float {
    let mpl = inst.m_plus_ell();
    let wp = working_precision(mpl, precision_bits.max(angles.theta_d.prec()));
    let threshold = Float::with_val(wp, Float::i_exp(1, PHI_BRANCH_THRESHOLD_LOG2));

    let theta_d = Float::with_val(wp, &angles.theta_d);
    let theta_r = Float::with_val(wp, &angles.theta_r);

    // first factor: 2(1 - cos(L/r·θ_r))/θ_r², limit (L/r)² as θ_r -> 0
    let l_over_r = Float::with_val(wp, Rational::from((inst.modulus(), inst.r.clone())));
    let x1 = Float::with_val(wp, &l_over_r * &theta_r);
    let f1 = if x1.clone().abs() < threshold {
        Float::with_val(wp, &l_over_r * &l_over_r)
    } else {
        let x1r = reduce_two_pi(x1);
        let num = one_minus_cos(&x1r) * 2u32;
        let den = Float::with_val(wp, &theta_r * &theta_r);
        num / den
    };

    // second factor: (cos(Lφ) - 1)/(cos(φ) - 1), limit L² as φ -> 0;
    // d/r enters as one exactly-rounded rational
    let d_over_r = Float::with_val(wp, Rational::from((inst.d.clone(), inst.r.clone())));
    let phi = theta_d - Float::with_val(wp, &theta_r * &d_over_r);
    let big_phi = phi.clone() << mpl;
    let f2 = if big_phi.clone().abs() < threshold {
        let l = Float::with_val(wp, Integer::from(1) << mpl);
        Float::with_val(wp, &l * &l)
    } else {
        let xr = reduce_two_pi(big_phi);
        one_minus_cos(&xr) / one_minus_cos(&phi)
    };

    // prefactor r / L⁴
    let l4 = Integer::from(1) << (4 * mpl);
    let pref = Float::with_val(wp, Rational::from((inst.r.clone(), l4)));

    let p = pref * f1 * f2;
    Float::with_val(precision_bits, p.max(&Float::with_val(wp, 0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst_m4() -> ProblemInstance {
        ProblemInstance::new(4, 2, Integer::from(13), Integer::from(5)).unwrap()
    }

    fn pair(j: i64, k: i64) -> FrequencyPair {
        FrequencyPair {
            j: Integer::from(j),
            k: Integer::from(k),
        }
    }

    #[test]
    fn instance_validation() {
        assert!(ProblemInstance::new(4, 2, Integer::from(13), Integer::from(5)).is_ok());
        assert!(ProblemInstance::new(4, 0, Integer::from(7), Integer::from(0)).is_err()); // r < 2^3
        assert!(ProblemInstance::new(4, 0, Integer::from(16), Integer::from(0)).is_err()); // r = 2^4
        assert!(ProblemInstance::new(4, 0, Integer::from(13), Integer::from(13)).is_err()); // d = r
        assert!(ProblemInstance::new(1, 0, Integer::from(1), Integer::from(0)).is_err()); // m < 2
        assert!(PublicInstance::new(4, 2, Integer::from(13)).is_ok());
    }

    #[test]
    fn arguments_of_examples() {
        let inst = inst_m4();
        let a = arguments_of(&inst, &pair(5, 39));
        assert_eq!(a.alpha_d, 0);
        assert_eq!(a.alpha_r, 1);
        let a = arguments_of(&inst, &pair(0, 0));
        assert_eq!(a.alpha_d, 0);
        assert_eq!(a.alpha_r, 0);
        let a = arguments_of(&inst, &pair(0, 32));
        assert_eq!(a.alpha_d, -32);
        assert_eq!(a.alpha_r, 0);
    }

    #[test]
    fn phi_examples() {
        let inst = inst_m4();
        let zero = phi(
            &inst,
            &ArgumentPair {
                alpha_d: Integer::from(0),
                alpha_r: Integer::from(0),
            },
            192,
        );
        assert_eq!(zero, 0);

        // (alpha_d=0, alpha_r=1): phi = -(2*pi/64)*(5/13) = -0.0377595270864158...
        let v = phi(
            &inst,
            &ArgumentPair {
                alpha_d: Integer::from(0),
                alpha_r: Integer::from(1),
            },
            192,
        );
        assert!((v.to_f64() + 0.037759527086415784).abs() < 1e-15, "{v}");

        // (alpha_d=1, alpha_r=0): phi = 2*pi/64
        let v = phi(
            &inst,
            &ArgumentPair {
                alpha_d: Integer::from(1),
                alpha_r: Integer::from(0),
            },
            192,
        );
        assert!((v.to_f64() - 0.09817477042468103).abs() < 1e-15, "{v}");
    }

    #[test]
    fn decompose_examples() {
        let inst = inst_m4();
        let g = decompose(
            &inst,
            &ArgumentPair {
                alpha_d: Integer::from(0),
                alpha_r: Integer::from(1),
            },
        );
        assert_eq!(g.delta, 0);
        assert_eq!(g.delta_frac, Rational::from((-5, 13)));

        let g = decompose(
            &inst,
            &ArgumentPair {
                alpha_d: Integer::from(3),
                alpha_r: Integer::from(0),
            },
        );
        assert_eq!(g.delta, 3);
        assert_eq!(g.delta_frac, 0);

        let g = decompose(
            &inst,
            &ArgumentPair {
                alpha_d: Integer::from(2),
                alpha_r: Integer::from(5),
            },
        );
        assert_eq!(g.delta, 0);
        assert_eq!(g.delta_frac, Rational::from((1, 13)));
    }

    #[test]
    fn decompose_recompose_exact() {
        let inst = inst_m4();
        let modulus = inst.modulus();
        for j in 0..64i64 {
            for k in (0..64i64).step_by(7) {
                let args = arguments_of(&inst, &pair(j, k));
                let g = decompose(&inst, &args);
                let x = Rational::from((Integer::from(&args.alpha_r * inst.d()), inst.r().clone()));
                let recomposed = Rational::from(round_nearest(&x)) + Rational::from(g.delta.clone());
                assert_eq!(recomposed, Rational::from(args.alpha_d.clone()));
                assert!(g.delta_frac >= Rational::from((-1, 2)));
                assert!(g.delta_frac < Rational::from((1, 2)));
                let _ = &modulus;
            }
        }
    }

    #[test]
    fn is_b_good_examples() {
        let inst = inst_m4();
        assert!(is_b_good(&inst, &pair(5, 39), 0));
        assert!(!is_b_good(&inst, &pair(5, 40), 0));
        assert!(is_b_good(&inst, &pair(5, 40), 1));
        assert!(is_b_good(&inst, &pair(0, 0), 0));
    }

    #[test]
    fn density_at_origin_is_one_over_r() {
        for (m, ell, r, d) in [(4u32, 2u32, 13i64, 5i64), (6, 0, 61, 17), (8, 1, 251, 101)] {
            let inst = ProblemInstance::new(m, ell, Integer::from(r), Integer::from(d)).unwrap();
            let angles = AnglePair::from_arguments(
                &inst,
                &ArgumentPair {
                    alpha_d: Integer::from(0),
                    alpha_r: Integer::from(0),
                },
                192,
            );
            let p = heuristic_density(&inst, &angles, 192);
            let expect = 1.0 / r as f64;
            assert!(
                (p.to_f64() - expect).abs() < 1e-12 * expect,
                "m={m} ell={ell}: {p} vs {expect}"
            );
        }
    }

    #[test]
    fn density_is_even() {
        let inst = ProblemInstance::new(6, 1, Integer::from(61), Integer::from(17)).unwrap();
        for (ad, ar) in [(3i64, 17i64), (-20, 9), (1, -45), (60, 2), (0, 31)] {
            let args = ArgumentPair {
                alpha_d: Integer::from(ad),
                alpha_r: Integer::from(ar),
            };
            let neg = ArgumentPair {
                alpha_d: Integer::from(-ad),
                alpha_r: Integer::from(-ar),
            };
            let p1 = heuristic_density(&inst, &AnglePair::from_arguments(&inst, &args, 192), 192);
            let p2 = heuristic_density(&inst, &AnglePair::from_arguments(&inst, &neg, 192), 192);
            let diff = Float::with_val(192, &p1 - &p2).abs();
            assert!(diff < Float::with_val(192, 1e-40), "({ad},{ar}): {p1} vs {p2}");
        }
    }

    #[test]
    fn density_continuous_across_phi_branch() {
        // at the branch threshold |phi|*L = 2^-32 the two formulas agree to 1e-6 relative
        let inst = ProblemInstance::new(6, 0, Integer::from(61), Integer::from(17)).unwrap();
        let wp = 192;
        let l = 64.0;
        let theta_r = Float::with_val(wp, 0.7f64);
        let d_over_r = Float::with_val(wp, Rational::from((17, 61)));
        // theta_d placing phi exactly at the threshold
        let eps = Float::with_val(wp, Float::i_exp(1, -32)) / Float::with_val(wp, l);
        let theta_d = Float::with_val(wp, &theta_r * &d_over_r) + &eps;
        let at_eps = heuristic_density(
            &inst,
            &AnglePair::from_radians(theta_d, theta_r.clone()),
            wp,
        );
        let at_zero = heuristic_density(
            &inst,
            &AnglePair::from_radians(Float::with_val(wp, &theta_r * &d_over_r), theta_r),
            wp,
        );
        let rel = (Float::with_val(wp, &at_eps - &at_zero) / &at_zero).abs();
        assert!(rel < 1e-6, "relative jump {rel}");
    }

    #[test]
    fn density_is_nonnegative_on_a_grid() {
        let inst = ProblemInstance::new(5, 1, Integer::from(29), Integer::from(12)).unwrap();
        for ad in (-32i64..32).step_by(5) {
            for ar in (-32i64..32).step_by(3) {
                let args = ArgumentPair {
                    alpha_d: Integer::from(ad),
                    alpha_r: Integer::from(ar),
                };
                let p = heuristic_density(&inst, &AnglePair::from_arguments(&inst, &args, 192), 192);
                assert!(p >= 0, "negative density at ({ad},{ar})");
            }
        }
    }

    #[test]
    fn alpha_r_map_is_bijective_for_odd_r() {
        // Claim-1 structure with kappa = 0: j -> {rj} is a bijection;
        // exhaustive at the full 16-bit register size
        for (m, ell, r) in [(4u32, 0u32, 13i64), (4, 2, 13), (5, 1, 29), (16, 0, 65521)] {
            let inst = ProblemInstance::new(m, ell, Integer::from(r), Integer::from(1)).unwrap();
            let l = 1usize << (m + ell);
            let mut seen = std::collections::HashSet::new();
            for j in 0..l {
                let args = arguments_of(&inst, &pair(j as i64, 0));
                assert!(seen.insert(args.alpha_r.clone()), "collision at j={j}");
            }
            assert_eq!(seen.len(), l);
        }
    }

    #[test]
    fn exactly_one_k_per_alpha_d() {
        // Claim-2 structure: fixed j, each alpha_d hit by exactly one k
        let inst = inst_m4();
        for j in [0i64, 1, 5, 31, 63] {
            let mut seen = std::collections::HashSet::new();
            for k in 0..64i64 {
                let args = arguments_of(&inst, &pair(j, k));
                assert!(seen.insert(args.alpha_d.clone()));
            }
            assert_eq!(seen.len(), 64);
        }
    }
}

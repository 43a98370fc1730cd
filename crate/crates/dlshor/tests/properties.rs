//! Property tests for the exact-arithmetic invariants.

use proptest::prelude::*;
use rug::{Integer, Rational};

use dlshor::kernel::{arguments_of, decompose, FrequencyPair, ProblemInstance};
use dlshor::numtheory::{
    kappa, mod_inverse, reduce_mod, reduce_signed, round_nearest, smallest_tau,
};
use dlshor::solver::{compute_z, derandomize, randomize_instance};
use rand_chacha::ChaCha12Rng;
use rand_core::SeedableRng;

proptest! {
    #[test]
    fn reductions_agree_modulo_n(u in any::<i64>(), n in 1i64..=i64::MAX) {
        let (u, n) = (Integer::from(u), Integer::from(n));
        let plain = reduce_mod(&u, &n).unwrap();
        let signed = reduce_signed(&u, &n).unwrap();
        prop_assert!(plain >= 0 && plain < n);
        prop_assert!(Integer::from(2 * &signed) >= -Integer::from(&n));
        prop_assert!(Integer::from(2 * &signed) < n);
        let diff = Integer::from(&plain - &signed);
        prop_assert!(diff == 0 || diff == n);
        // periodicity
        prop_assert_eq!(reduce_signed(&Integer::from(&u + &n), &n).unwrap(), signed);
    }

    #[test]
    fn inverse_multiplies_to_one(z in 1u64.., n in 2u64..) {
        let (z, n) = (Integer::from(z), Integer::from(n));
        if let Some(inv) = mod_inverse(&z, &n).unwrap() {
            prop_assert_eq!(reduce_mod(&Integer::from(&z * &inv), &n).unwrap(), 1);
        } else {
            prop_assert!(Integer::from(z.gcd_ref(&n)) != 1);
        }
    }

    #[test]
    fn kappa_doubles(r in 1u64..=u64::MAX / 2) {
        let r = Integer::from(r);
        prop_assert_eq!(kappa(&Integer::from(2 * &r)).unwrap(), kappa(&r).unwrap() + 1);
    }

    #[test]
    fn tau_divides_with_coprime_cofactor(z in 0u32..5000, r in 2u32..5000) {
        let (z, r) = (Integer::from(z), Integer::from(r));
        let tau = smallest_tau(&z, &r).unwrap();
        prop_assert!(r.is_divisible(&tau));
        let cofactor = Integer::from(&r / &tau);
        prop_assert_eq!(Integer::from(z.gcd_ref(&cofactor)), 1);
    }

    #[test]
    fn rounding_residue_stays_in_half_open_interval(a in any::<i64>(), b in 1i64..=1_000_000) {
        let q = Rational::from((a, b));
        let residue = Rational::from(round_nearest(&q)) - &q;
        prop_assert!(residue >= Rational::from((-1, 2)));
        prop_assert!(residue < Rational::from((1, 2)));
    }

    #[test]
    fn decompose_recomposes_exactly(j in 0u64..256, k in 0u64..256, d in 0i64..61) {
        let inst = ProblemInstance::new(6, 2, Integer::from(61), Integer::from(d)).unwrap();
        let pair = FrequencyPair { j: Integer::from(j), k: Integer::from(k) };
        let args = arguments_of(&inst, &pair);
        let g = decompose(&inst, &args);
        let x = Rational::from((Integer::from(&args.alpha_r * inst.d()), inst.r().clone()));
        prop_assert_eq!(
            Rational::from(round_nearest(&x)) + Rational::from(g.delta),
            Rational::from(args.alpha_d)
        );
        prop_assert!(g.delta_frac >= Rational::from((-1, 2)));
        prop_assert!(g.delta_frac < Rational::from((1, 2)));
    }

    #[test]
    fn compute_z_division_is_exact(j in 0u64..(1u64 << 18), r in (1u64 << 15)..(1u64 << 16)) {
        let pub_inst = dlshor::PublicInstance::new(16, 2, Integer::from(r)).unwrap();
        let z = compute_z(&pub_inst, &Integer::from(j));
        // z*L = rj - {rj}: reconstruct and compare
        let l = pub_inst.modulus();
        let rj = Integer::from(pub_inst.r() * j);
        let signed = reduce_signed(&rj, &l).unwrap();
        prop_assert_eq!(Integer::from(&z * &l), rj - signed);
        prop_assert!(z >= 0);
        prop_assert!(z <= *pub_inst.r());
    }

    #[test]
    fn randomize_then_derandomize_is_identity(d_prime in 0u64..9973, seed in any::<u64>()) {
        let r = Integer::from(9973);
        let dp = Integer::from(d_prime);
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let (d, t) = randomize_instance(&dp, &r, &mut rng);
        prop_assert!(d >= 0 && d < r);
        prop_assert_eq!(derandomize(&d, &t, &r), dp);
    }
}

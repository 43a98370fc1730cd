//! Exact big-integer primitives: the two modular reductions, inverses,
//! power-of-two valuation, modular exponentiation and the smallest-τ search.
//!
//! Everything here is a pure function on immutable values; all arithmetic is
//! exact via GMP-backed [`rug::Integer`] / [`rug::Rational`].

use rug::ops::DivRounding;
use rug::{Integer, Rational};

use crate::{Error, Result};

/// `u` reduced modulo `n`, constrained to `[0, n)`.
pub fn reduce_mod(u: &Integer, n: &Integer) -> Result<Integer> {
    if *n <= 0 {
        return Err(Error::InvalidModulus);
    }
    let mut v = Integer::from(u % n);
    if v < 0 {
        v += n;
    }
    Ok(v)
}

/// `u` reduced modulo `n`, constrained to `[-n/2, n/2)`.
///
/// For odd `n` this is the integers `-(n-1)/2 ..= (n-1)/2`.
pub fn reduce_signed(u: &Integer, n: &Integer) -> Result<Integer> {
    let mut v = reduce_mod(u, n)?;
    if Integer::from(2 * &v) >= *n {
        v -= n;
    }
    Ok(v)
}

/// κ_r: the exponent of the greatest power of two dividing `r`.
pub fn kappa(r: &Integer) -> Result<u32> {
    if *r <= 0 {
        return Err(Error::InvalidInput(format!("kappa requires r >= 1, got {r}")));
    }
    // r > 0, so a lowest set bit exists.
    Ok(r.find_one(0).expect("positive integer has a set bit"))
}

/// Modular inverse of `z` modulo `n`; `None` when gcd(z, n) != 1.
pub fn mod_inverse(z: &Integer, n: &Integer) -> Result<Option<Integer>> {
    if *n < 2 {
        return Err(Error::InvalidModulus);
    }
    match Integer::from(z).invert(n) {
        Ok(inv) => Ok(Some(inv)),
        Err(_) => Ok(None),
    }
}

/// `g^e mod n` for `e >= 0`.
pub fn mod_pow(g: &Integer, e: &Integer, n: &Integer) -> Result<Integer> {
    if *n < 2 {
        return Err(Error::InvalidModulus);
    }
    if *e < 0 {
        return Err(Error::InvalidInput(format!("mod_pow requires e >= 0, got {e}")));
    }
    let base = reduce_mod(g, n)?;
    Ok(base.pow_mod(e, n).expect("non-negative exponent"))
}

/// Rounds a rational to the nearest integer; a value exactly halfway between
/// two integers rounds down. This is the unique integer in `[q - 1/2, q + 1/2)`,
/// so `round_nearest(q) - q` always lies in `[-1/2, 1/2)`.
pub fn round_nearest(q: &Rational) -> Integer {
    let two_a = Integer::from(2 * q.numer());
    let b = q.denom();
    (two_a + b - 1u32).div_floor(Integer::from(2 * b))
}

/// The smallest positive divisor τ of `r` such that gcd(z, r/τ) = 1.
///
/// τ = r always works since gcd(z, 1) = 1, so the search cannot fail.
pub fn smallest_tau(z: &Integer, r: &Integer) -> Result<Integer> {
    if *r < 2 {
        return Err(Error::InvalidInput(format!("smallest_tau requires r >= 2, got {r}")));
    }
    if Integer::from(z.gcd_ref(r)) == 1 {
        return Ok(Integer::from(1));
    }
    for tau in divisors(r) {
        let cofactor = Integer::from(r / &tau);
        if cofactor == 1 || Integer::from(z.gcd_ref(&cofactor)) == 1 {
            return Ok(tau);
        }
    }
    unreachable!("tau = r always satisfies gcd(z, 1) = 1")
}

/// All positive divisors of `n` in increasing order.
pub fn divisors(n: &Integer) -> Vec<Integer> {
    let mut divs = vec![Integer::from(1)];
    for (p, e) in factorize(n) {
        let base = divs.clone();
        let mut pk = Integer::from(1);
        for _ in 0..e {
            pk *= &p;
            divs.extend(base.iter().map(|d| Integer::from(d * &pk)));
        }
    }
    divs.sort();
    divs
}

/// Prime factorization of `n >= 1` as (prime, exponent) pairs, smallest first.
/// Trial division below 2^16, Pollard rho with Miller-Rabin above.
pub fn factorize(n: &Integer) -> Vec<(Integer, u32)> {
    let mut factors: Vec<(Integer, u32)> = Vec::new();
    let mut rest = Integer::from(n);
    let push = |p: Integer, factors: &mut Vec<(Integer, u32)>| match factors
        .iter_mut()
        .find(|(q, _)| *q == p)
    {
        Some((_, e)) => *e += 1,
        None => factors.push((p, 1)),
    };

    let mut p = Integer::from(2);
    while rest > 1 && Integer::from(&p * &p) <= rest {
        if p > 1u32 << 16 {
            break;
        }
        while rest.is_divisible(&p) {
            rest /= &p;
            push(p.clone(), &mut factors);
        }
        p += if p == 2 { 1u32 } else { 2u32 };
    }

    let mut stack = Vec::new();
    if rest > 1 {
        stack.push(rest);
    }
    while let Some(c) = stack.pop() {
        if c.is_probably_prime(40) != rug::integer::IsPrime::No {
            push(c, &mut factors);
            continue;
        }
        let f = pollard_rho(&c);
        stack.push(Integer::from(&c / &f));
        stack.push(f);
    }

    factors.sort_by(|a, b| a.0.cmp(&b.0));
    factors
}

/// Brent-cycle Pollard rho; `n` must be composite and odd.
fn pollard_rho(n: &Integer) -> Integer {
    for c in 1u32.. {
        let f = |x: &Integer| (Integer::from(x * x) + c) % n;
        let mut x = Integer::from(2);
        let mut y = Integer::from(2);
        loop {
            x = f(&x);
            y = f(&f(&y));
            let diff = Integer::from(&x - &y).abs();
            if diff == 0 {
                break; // cycle without factor, retry with next c
            }
            let g = diff.gcd(n);
            if g > 1 && g < *n {
                return g;
            }
            if g == *n {
                break;
            }
        }
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(v: i64) -> Integer {
        Integer::from(v)
    }

    #[test]
    fn reduce_mod_examples() {
        assert_eq!(reduce_mod(&int(65), &int(64)).unwrap(), 1);
        assert_eq!(reduce_mod(&int(-1), &int(13)).unwrap(), 12);
        assert_eq!(reduce_mod(&int(0), &int(7)).unwrap(), 0);
        assert!(matches!(reduce_mod(&int(1), &int(0)), Err(Error::InvalidModulus)));
        assert!(matches!(reduce_mod(&int(1), &int(-5)), Err(Error::InvalidModulus)));
    }

    #[test]
    fn reduce_signed_examples() {
        assert_eq!(reduce_signed(&int(5), &int(8)).unwrap(), -3);
        assert_eq!(reduce_signed(&int(4), &int(8)).unwrap(), -4);
        assert_eq!(reduce_signed(&int(65), &int(64)).unwrap(), 1);
        // odd modulus: [-(n-1)/2, (n-1)/2]
        assert_eq!(reduce_signed(&int(3), &int(5)).unwrap(), -2);
        assert_eq!(reduce_signed(&int(2), &int(5)).unwrap(), 2);
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(kappa(&int(13)).unwrap(), 0);
        assert_eq!(kappa(&int(12)).unwrap(), 2);
        assert_eq!(kappa(&int(1)).unwrap(), 0);
        assert!(kappa(&int(0)).is_err());
    }

    #[test]
    fn mod_inverse_examples() {
        assert_eq!(mod_inverse(&int(13), &int(64)).unwrap().unwrap(), 5);
        assert_eq!(mod_inverse(&int(3), &int(13)).unwrap().unwrap(), 9);
        assert_eq!(mod_inverse(&int(0), &int(13)).unwrap(), None);
        assert_eq!(mod_inverse(&int(6), &int(15)).unwrap(), None);
        assert!(mod_inverse(&int(3), &int(1)).is_err());
    }

    #[test]
    fn mod_pow_examples() {
        assert_eq!(mod_pow(&int(2), &int(10), &int(1000)).unwrap(), 24);
        assert_eq!(mod_pow(&int(5), &int(0), &int(13)).unwrap(), 1);
        assert_eq!(mod_pow(&int(7), &int(12), &int(13)).unwrap(), 1);
        assert!(mod_pow(&int(2), &int(-1), &int(13)).is_err());
    }

    #[test]
    fn smallest_tau_examples() {
        assert_eq!(smallest_tau(&int(5), &int(13)).unwrap(), 1);
        // divisors of 9: 1, 3, 9; gcd(3,9)=3, gcd(3,3)=3, gcd(3,1)=1
        assert_eq!(smallest_tau(&int(3), &int(9)).unwrap(), 9);
        // divisors of 15: 1, 3, 5, 15; gcd(6,15)=3, gcd(6,5)=1
        assert_eq!(smallest_tau(&int(6), &int(15)).unwrap(), 3);
    }

    #[test]
    fn round_nearest_ties_go_down() {
        let q = |a: i64, b: i64| Rational::from((a, b));
        assert_eq!(round_nearest(&q(5, 13)), 0);
        assert_eq!(round_nearest(&q(25, 13)), 2);
        assert_eq!(round_nearest(&q(1, 2)), 0);
        assert_eq!(round_nearest(&q(3, 2)), 1);
        assert_eq!(round_nearest(&q(-1, 2)), -1);
        assert_eq!(round_nearest(&q(-3, 2)), -2);
        assert_eq!(round_nearest(&q(507, 64)), 8);
        // delta = round(q) - q stays in [-1/2, 1/2)
        for a in -40i64..=40 {
            for b in 1i64..=7 {
                let x = q(a, b);
                let d = Rational::from(round_nearest(&x)) - &x;
                assert!(d >= Rational::from((-1, 2)) && d < Rational::from((1, 2)), "{a}/{b}");
            }
        }
    }

    #[test]
    fn factorize_and_divisors() {
        assert_eq!(factorize(&int(1)), vec![]);
        assert_eq!(factorize(&int(12)), vec![(int(2), 2), (int(3), 1)]);
        assert_eq!(
            divisors(&int(12)),
            vec![int(1), int(2), int(3), int(4), int(6), int(12)]
        );
        // a semiprime beyond the trial-division bound exercises rho
        let p = Integer::from(1_000_003u64);
        let q = Integer::from(998_117u64);
        let n = Integer::from(&p * &q);
        let f = factorize(&n);
        assert_eq!(f.len(), 2);
        assert_eq!(Integer::from(&f[0].0 * &f[1].0), n);
    }

    #[test]
    fn reduction_properties() {
        for u in -100i64..100 {
            for n in 1i64..20 {
                let (u, n) = (int(u), int(n));
                let a = reduce_mod(&u, &n).unwrap();
                let b = reduce_signed(&u, &n).unwrap();
                assert!(a >= 0 && a < n);
                assert!(Integer::from(2 * &b) >= -Integer::from(&n) && Integer::from(2 * &b) < n);
                let diff = Integer::from(&a - &b);
                assert!(diff == 0 || diff == n);
                // periodicity
                let shifted = reduce_signed(&Integer::from(&u + &n), &n).unwrap();
                assert_eq!(shifted, b);
            }
        }
    }

    #[test]
    fn kappa_doubling() {
        for r in 1i64..200 {
            let r = int(r);
            assert_eq!(kappa(&Integer::from(2 * &r)).unwrap(), kappa(&r).unwrap() + 1);
        }
    }

    #[test]
    fn tau_divides_and_coprime() {
        // brute-force oracle: first tau in 1..=r with tau | r and gcd(z, r/tau) = 1
        for r in 2i64..60 {
            for z in 0i64..60 {
                let (zi, ri) = (int(z), int(r));
                let tau = smallest_tau(&zi, &ri).unwrap();
                let expect = (1..=r)
                    .map(int)
                    .find(|t| ri.is_divisible(t) && Integer::from(zi.gcd_ref(&Integer::from(&ri / t))) == 1)
                    .unwrap();
                assert_eq!(tau, expect, "z={z} r={r}");
                assert!(ri.is_divisible(&tau));
                assert_eq!(Integer::from(zi.gcd_ref(&Integer::from(&ri / &tau))), 1);
            }
        }
    }
}

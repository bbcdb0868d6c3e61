//! Arbitrary-precision modular arithmetic, primality testing, the
//! quadratic extension field, and bit-exact fraction utilities.

mod fp2;
mod fraction;

pub use fp2::{Fp2Ctx, Fp2Element};
pub use fraction::Fraction64;

use crate::{Error, Result};
use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::RngCore;

/// Modular inverse of `a` modulo the prime `p`, via the extended Euclidean
/// algorithm.
pub fn mod_inv(a: &BigUint, p: &BigUint) -> Result<BigUint> {
    let a = BigInt::from(a % p);
    let p_int = BigInt::from(p.clone());
    let ext = a.extended_gcd(&p_int);
    if !ext.gcd.is_one() {
        return Err(Error::NonInvertible);
    }
    let inv = ext.x.mod_floor(&p_int);
    Ok(inv.to_biguint().expect("mod_floor by positive modulus"))
}

/// Square root modulo a prime `p` with `p = 3 (mod 4)`, computed as
/// `z^((p+1)/4)`. The result is verified; a non-residue input is rejected.
pub fn mod_sqrt_3mod4(z: &BigUint, p: &BigUint) -> Result<BigUint> {
    debug_assert_eq!((p % 4u32).to_u32_digits(), [3]);
    let z = z % p;
    let e = (p + 1u32) >> 2;
    let y = z.modpow(&e, p);
    if (&y * &y) % p == z {
        Ok(y)
    } else {
        Err(Error::NotAResidue)
    }
}

/// Largest value for which the fixed witness set below is a deterministic
/// primality certificate.
const DETERMINISTIC_LIMIT: &str = "3317044064679887385961981";
const FIXED_WITNESSES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Miller-Rabin primality test. Deterministic below the known witness-set
/// threshold; above it, `rounds` extra witnesses are derived from `n`
/// itself so that repeated calls agree.
pub fn is_prime(n: &BigUint, rounds: u32) -> bool {
    let two = BigUint::from(2u32);
    if n < &two {
        return false;
    }
    if n.is_even() {
        return *n == two;
    }
    for w in FIXED_WITNESSES {
        if *n == BigUint::from(w) {
            return true;
        }
        if (n % w).is_zero() {
            return false;
        }
    }

    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;

    let passes = |witness: &BigUint| -> bool {
        let mut x = witness.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            return true;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                return true;
            }
        }
        false
    };

    for w in FIXED_WITNESSES {
        if !passes(&BigUint::from(w)) {
            return false;
        }
    }
    let limit: BigUint = DETERMINISTIC_LIMIT.parse().unwrap();
    if n < &limit {
        return true;
    }

    // Extra witnesses from a splitmix stream seeded by n's low bits.
    let mut state = n.iter_u64_digits().next().unwrap_or(1) | 1;
    for _ in 0..rounds {
        state = splitmix64(state);
        let w = BigUint::from(state) % (&n_minus_1 - 1u32) + 2u32;
        if !passes(&w) {
            return false;
        }
    }
    true
}

pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Generates a prime of exactly `bits` bits (top bit set) from the given
/// randomness stream.
pub fn gen_prime(bits: u64, rng: &mut impl RngCore) -> BigUint {
    assert!(bits >= 2, "a prime needs at least 2 bits");
    loop {
        let mut candidate = rng.gen_biguint(bits);
        candidate.set_bit(bits - 1, true);
        if bits > 2 {
            candidate.set_bit(0, true);
        }
        if is_prime(&candidate, 32) {
            return candidate;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn b(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn mod_inv_identity_and_negation() {
        let p = b(419);
        assert_eq!(mod_inv(&b(1), &p).unwrap(), b(1));
        assert_eq!(mod_inv(&b(2), &p).unwrap(), b(210));
        assert_eq!(mod_inv(&b(418), &p).unwrap(), b(418));
    }

    #[test]
    fn mod_inv_rejects_zero() {
        assert!(matches!(mod_inv(&b(0), &b(419)), Err(Error::NonInvertible)));
    }

    #[test]
    fn mod_inv_random_property() {
        let p = b(419);
        for a in 1u64..419 {
            let inv = mod_inv(&b(a), &p).unwrap();
            assert_eq!((b(a) * inv) % &p, b(1));
        }
        // same property at a 167-bit prime
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let big_p = gen_prime(167, &mut rng);
        for _ in 0..50 {
            let a = rng.gen_biguint_below(&big_p);
            if a.is_zero() {
                continue;
            }
            let inv = mod_inv(&a, &big_p).unwrap();
            assert_eq!((a * inv) % &big_p, BigUint::one());
        }
    }

    #[test]
    fn sqrt_toy_values() {
        let p = b(419);
        assert_eq!(mod_sqrt_3mod4(&b(1), &p).unwrap(), b(1));
        assert_eq!(mod_sqrt_3mod4(&b(0), &p).unwrap(), b(0));
        // brute-force square table mod 419
        let y = mod_sqrt_3mod4(&b(4), &p).unwrap();
        assert!(y == b(2) || y == b(417));
    }

    #[test]
    fn sqrt_roundtrip_random() {
        let p = b(419);
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for _ in 0..100 {
            let y = rng.gen_biguint_below(&p);
            let z = (&y * &y) % &p;
            let r = mod_sqrt_3mod4(&z, &p).unwrap();
            assert!(r == y || &r + &y == p);
        }
    }

    #[test]
    fn sqrt_rejects_non_residue() {
        // 2 is a non-residue mod 419 (419 = 3 mod 8)
        assert!(matches!(
            mod_sqrt_3mod4(&b(2), &b(419)),
            Err(Error::NotAResidue)
        ));
    }

    #[test]
    fn primality_small_values() {
        assert!(is_prime(&b(2), 16));
        assert!(is_prime(&b(419), 16));
        assert!(!is_prime(&b(420), 16));
        assert!(!is_prime(&b(1), 16));
        assert!(!is_prime(&b(0), 16));
        // trial-division oracle on everything below 2000
        for n in 2u64..2000 {
            let expected = (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
            assert_eq!(is_prime(&b(n), 16), expected, "n = {n}");
        }
    }

    #[test]
    fn gen_prime_is_deterministic_and_sized() {
        let mut a = ChaCha20Rng::seed_from_u64(42);
        let mut b_rng = ChaCha20Rng::seed_from_u64(42);
        let p1 = gen_prime(8, &mut a);
        let p2 = gen_prime(8, &mut b_rng);
        assert_eq!(p1, p2);
        assert_eq!(p1.bits(), 8);

        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let p3 = gen_prime(3, &mut rng);
        assert!(p3 == b(5) || p3 == b(7));

        let p16 = gen_prime(16, &mut rng);
        assert_eq!(p16.bits(), 16);
        assert!(is_prime(&p16, 16));
    }
}

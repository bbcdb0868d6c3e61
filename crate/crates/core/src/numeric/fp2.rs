use crate::{Error, Result};
use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::{mod_inv, mod_sqrt_3mod4};

/// Element `a0 + a1*i` of the quadratic extension, with `i^2` equal to the
/// context's non-residue.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fp2Element {
    pub a0: BigUint,
    pub a1: BigUint,
}

impl Fp2Element {
    pub fn is_zero(&self) -> bool {
        self.a0.is_zero() && self.a1.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a0.is_one() && self.a1.is_zero()
    }

    pub fn in_base_field(&self) -> bool {
        self.a1.is_zero()
    }
}

/// Arithmetic context for `F_{p^2} = F_p[i] / (i^2 - d)`, with `d` the
/// smallest positive quadratic non-residue modulo `p`.
#[derive(Debug, Clone)]
pub struct Fp2Ctx {
    pub p: BigUint,
    pub nonresidue: BigUint,
}

impl Fp2Ctx {
    pub fn new(p: &BigUint) -> Self {
        let exp = (p - 1u32) >> 1;
        let minus_one = p - 1u32;
        let mut d = BigUint::from(2u32);
        while d.modpow(&exp, p) != minus_one {
            d += 1u32;
        }
        Fp2Ctx {
            p: p.clone(),
            nonresidue: d,
        }
    }

    pub fn zero(&self) -> Fp2Element {
        Fp2Element {
            a0: BigUint::zero(),
            a1: BigUint::zero(),
        }
    }

    pub fn one(&self) -> Fp2Element {
        Fp2Element {
            a0: BigUint::one(),
            a1: BigUint::zero(),
        }
    }

    pub fn embed(&self, a: &BigUint) -> Fp2Element {
        Fp2Element {
            a0: a % &self.p,
            a1: BigUint::zero(),
        }
    }

    pub fn new_element(&self, a0: BigUint, a1: BigUint) -> Fp2Element {
        Fp2Element {
            a0: a0 % &self.p,
            a1: a1 % &self.p,
        }
    }

    pub fn add(&self, x: &Fp2Element, y: &Fp2Element) -> Fp2Element {
        Fp2Element {
            a0: (&x.a0 + &y.a0) % &self.p,
            a1: (&x.a1 + &y.a1) % &self.p,
        }
    }

    pub fn sub(&self, x: &Fp2Element, y: &Fp2Element) -> Fp2Element {
        Fp2Element {
            a0: (&x.a0 + &self.p - &y.a0) % &self.p,
            a1: (&x.a1 + &self.p - &y.a1) % &self.p,
        }
    }

    pub fn neg(&self, x: &Fp2Element) -> Fp2Element {
        self.sub(&self.zero(), x)
    }

    pub fn mul(&self, x: &Fp2Element, y: &Fp2Element) -> Fp2Element {
        // (a0 + a1 i)(b0 + b1 i) = a0 b0 + d a1 b1 + (a0 b1 + a1 b0) i
        let t00 = &x.a0 * &y.a0;
        let t11 = &x.a1 * &y.a1;
        let cross = &x.a0 * &y.a1 + &x.a1 * &y.a0;
        Fp2Element {
            a0: (t00 + t11 * &self.nonresidue) % &self.p,
            a1: cross % &self.p,
        }
    }

    pub fn scalar_mul(&self, x: &Fp2Element, k: &BigUint) -> Fp2Element {
        Fp2Element {
            a0: (&x.a0 * k) % &self.p,
            a1: (&x.a1 * k) % &self.p,
        }
    }

    pub fn inv(&self, x: &Fp2Element) -> Result<Fp2Element> {
        if x.is_zero() {
            return Err(Error::NonInvertible);
        }
        // 1/(a0 + a1 i) = (a0 - a1 i) / (a0^2 - d a1^2)
        let t0 = (&x.a0 * &x.a0) % &self.p;
        let t1 = (&x.a1 * &x.a1 * &self.nonresidue) % &self.p;
        let norm = (t0 + &self.p - t1) % &self.p;
        let n_inv = mod_inv(&norm, &self.p)?;
        let conj = Fp2Element {
            a0: x.a0.clone(),
            a1: (&self.p - &x.a1) % &self.p,
        };
        Ok(self.scalar_mul(&conj, &n_inv))
    }

    pub fn pow(&self, x: &Fp2Element, e: &BigUint) -> Fp2Element {
        let mut acc = self.one();
        if e.is_zero() {
            return acc;
        }
        let bits = e.bits();
        for i in (0..bits).rev() {
            acc = self.mul(&acc, &acc);
            if e.bit(i) {
                acc = self.mul(&acc, x);
            }
        }
        acc
    }

    /// The lexicographically smallest primitive cube root of unity,
    /// `(-1 + sqrt(-3)) / 2` with the smaller imaginary component.
    ///
    /// Requires `p = 2 (mod 3)` and `p = 3 (mod 4)`, which is what the
    /// cryptosystem's key generation produces.
    pub fn cube_root_of_unity(&self) -> Result<Fp2Element> {
        let p = &self.p;
        // sqrt(-3) = s*i with s^2 = -3/d in F_p: -3 and d are both
        // non-residues, so their ratio is a residue.
        let minus_three = (p - 3u32) % p;
        let ratio = (&minus_three * mod_inv(&self.nonresidue, p)?) % p;
        let s = mod_sqrt_3mod4(&ratio, p)?;
        let half = mod_inv(&BigUint::from(2u32), p)?;
        let a0 = ((p - 1u32) * &half) % p;
        let a1 = (&s * &half) % p;
        let a1_alt = (p - &a1) % p;
        let a1 = a1.min(a1_alt);
        let zeta = Fp2Element { a0, a1 };
        debug_assert!(self.pow(&zeta, &BigUint::from(3u32)).is_one());
        Ok(zeta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::RandBigInt;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn toy() -> Fp2Ctx {
        Fp2Ctx::new(&BigUint::from(419u32))
    }

    fn random_elem(ctx: &Fp2Ctx, rng: &mut ChaCha20Rng) -> Fp2Element {
        Fp2Element {
            a0: rng.gen_biguint_below(&ctx.p),
            a1: rng.gen_biguint_below(&ctx.p),
        }
    }

    #[test]
    fn nonresidue_scan_toy() {
        // 419 = 3 (mod 8), so 2 is the smallest non-residue
        assert_eq!(toy().nonresidue, BigUint::from(2u32));
    }

    #[test]
    fn mul_identity_and_inverse() {
        let ctx = toy();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for _ in 0..50 {
            let x = random_elem(&ctx, &mut rng);
            assert_eq!(ctx.mul(&ctx.one(), &x), x);
            if !x.is_zero() {
                let inv = ctx.inv(&x).unwrap();
                assert!(ctx.mul(&inv, &x).is_one());
            }
        }
        assert!(ctx.inv(&ctx.zero()).is_err());
    }

    #[test]
    fn field_axioms_random_triples() {
        let ctx = toy();
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        for _ in 0..50 {
            let x = random_elem(&ctx, &mut rng);
            let y = random_elem(&ctx, &mut rng);
            let z = random_elem(&ctx, &mut rng);
            assert_eq!(ctx.mul(&x, &y), ctx.mul(&y, &x));
            assert_eq!(
                ctx.mul(&ctx.mul(&x, &y), &z),
                ctx.mul(&x, &ctx.mul(&y, &z))
            );
            assert_eq!(
                ctx.mul(&x, &ctx.add(&y, &z)),
                ctx.add(&ctx.mul(&x, &y), &ctx.mul(&x, &z))
            );
        }
    }

    #[test]
    fn multiplicative_group_order() {
        let ctx = toy();
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let order = &ctx.p * &ctx.p - 1u32;
        for _ in 0..20 {
            let x = random_elem(&ctx, &mut rng);
            if x.is_zero() {
                continue;
            }
            assert!(ctx.pow(&x, &order).is_one());
        }
    }

    #[test]
    fn cube_root_of_unity_toy() {
        let ctx = toy();
        let zeta = ctx.cube_root_of_unity().unwrap();
        assert!(!zeta.is_one());
        assert!(!zeta.in_base_field());
        assert!(ctx.pow(&zeta, &BigUint::from(3u32)).is_one());

        // exhaustive search oracle at toy size: solutions of z^2 + z + 1 = 0
        let mut roots = Vec::new();
        for a0 in 0u32..419 {
            for a1 in 0u32..419 {
                let z = Fp2Element {
                    a0: BigUint::from(a0),
                    a1: BigUint::from(a1),
                };
                let z2 = ctx.mul(&z, &z);
                let sum = ctx.add(&ctx.add(&z2, &z), &ctx.one());
                if sum.is_zero() {
                    roots.push(z);
                }
            }
        }
        assert_eq!(roots.len(), 2);
        assert!(roots.contains(&zeta));
    }
}

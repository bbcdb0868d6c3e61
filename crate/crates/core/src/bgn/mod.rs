//! Homomorphic cryptosystem over the supersingular curve: key generation,
//! probabilistic encryption, table-assisted discrete-log decryption, N
//! ciphertext additions and one multiplication via the modified Weil
//! pairing.

mod dlog;
mod serialize;

pub use dlog::{fp2_dlog_bsgs, point_dlog_bsgs, DlogTable, DEFAULT_TABLE_CAP};
pub use serialize::{
    ciphertext_from_bytes, ciphertext_to_bytes, private_key_from_json, private_key_to_json,
    public_key_from_json, public_key_to_json,
};

use crate::ec::{modified_weil, point_add, scalar_mul, CurveParams, CurvePoint, FixedBaseTable};
use crate::numeric::{gen_prime, is_prime, mod_sqrt_3mod4, Fp2Ctx, Fp2Element};
use crate::{Error, Result};
use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, ToPrimitive, Zero};
use rand::RngCore;
use std::sync::OnceLock;

const PRIMALITY_ROUNDS: u32 = 32;
const GENERATOR_RETRIES: u32 = 4096;

/// Default plaintext bound at production key sizes; clamped below `q2`.
pub const DEFAULT_MESSAGE_BOUND: u64 = (1 << 16) - 1;

/// Public key `(n, p, l, g, h)` plus the curve and the plaintext bound.
#[derive(Debug, Clone)]
pub struct BgnPublicKey {
    pub n: BigUint,
    pub p: BigUint,
    pub l: BigUint,
    pub g: CurvePoint,
    pub h: CurvePoint,
    pub curve: CurveParams,
    /// Plaintext space is `[0, message_bound]`.
    pub message_bound: u64,
    // lazily built fixed-base tables for the two public generators
    g_table: OnceLock<FixedBaseTable>,
    h_table: OnceLock<FixedBaseTable>,
}

/// Private key: the prime factor `q1` of `n`.
#[derive(Debug, Clone)]
pub struct BgnPrivateKey {
    pub q1: BigUint,
}

/// Level-1 ciphertexts are curve points; level-2 ciphertexts live in the
/// pairing target group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ciphertext {
    Level1(CurvePoint),
    Level2(Fp2Element),
}

impl Ciphertext {
    pub fn level(&self) -> u8 {
        match self {
            Ciphertext::Level1(_) => 1,
            Ciphertext::Level2(_) => 2,
        }
    }

    fn as_point(&self) -> Result<&CurvePoint> {
        match self {
            Ciphertext::Level1(p) => Ok(p),
            Ciphertext::Level2(_) => Err(Error::LevelMismatch),
        }
    }

    fn as_fp2(&self) -> Result<&Fp2Element> {
        match self {
            Ciphertext::Level2(e) => Ok(e),
            Ciphertext::Level1(_) => Err(Error::LevelMismatch),
        }
    }
}

/// Generates a key pair from two fresh primes of `tau` bits.
pub fn keygen(tau: u64, rng: &mut impl RngCore) -> Result<(BgnPublicKey, BgnPrivateKey)> {
    let q1 = gen_prime(tau, rng);
    let q2 = gen_prime(tau, rng);
    keygen_with_primes(&q1, &q2, rng)
}

/// Key generation with the two primes fixed by the caller (also the
/// deterministic test hook for the toy instance `q1 = 5, q2 = 7`).
pub fn keygen_with_primes(
    q1: &BigUint,
    q2: &BigUint,
    rng: &mut impl RngCore,
) -> Result<(BgnPublicKey, BgnPrivateKey)> {
    let n = q1 * q2;

    // scan l = 1, 2, ... until p = l*n - 1 is prime with p = 2 (mod 3);
    // p = 3 (mod 4) is required as well so every point compresses
    let mut l = BigUint::one();
    let p = loop {
        let candidate = &l * &n - 1u32;
        if (&candidate % 3u32) == BigUint::from(2u32)
            && (&candidate % 4u32) == BigUint::from(3u32)
            && is_prime(&candidate, PRIMALITY_ROUNDS)
        {
            break candidate;
        }
        l += 1u32;
    };
    let curve = CurveParams::supersingular(p.clone());

    // prime factors of the group order p + 1 = l * n
    let l_u64 = l
        .to_u64()
        .ok_or_else(|| Error::GenerationFailure("curve cofactor does not fit u64".into()))?;
    let mut order_factors: Vec<BigUint> = factor_u64(l_u64).into_iter().map(BigUint::from).collect();
    for q in [q1, q2] {
        if !order_factors.contains(q) {
            order_factors.push(q.clone());
        }
    }

    let group_order = &p + 1u32;
    let x = find_point_of_order(&curve, &group_order, &order_factors, rng)?;
    let g = scalar_mul(&l, &x, &curve);

    // second independent order-n generator u, then h = q2 * u
    let n_div_q1 = &n / q1;
    let n_div_q2 = &n / q2;
    let mut u = None;
    for _ in 0..GENERATOR_RETRIES {
        let k = rng.gen_biguint_below(&n);
        let y = scalar_mul(&k, &g, &curve);
        if y.is_infinity() {
            continue;
        }
        if scalar_mul(&n_div_q1, &y, &curve).is_infinity()
            || scalar_mul(&n_div_q2, &y, &curve).is_infinity()
        {
            continue;
        }
        u = Some(y);
        break;
    }
    let u = u.ok_or_else(|| Error::GenerationFailure("no order-n generator found".into()))?;
    let h = scalar_mul(q2, &u, &curve);

    let message_bound = match (q2 - 1u32).to_u64() {
        Some(limit) => limit.min(DEFAULT_MESSAGE_BOUND),
        None => DEFAULT_MESSAGE_BOUND,
    };

    Ok((
        BgnPublicKey {
            n,
            p,
            l,
            g,
            h,
            curve,
            message_bound,
            g_table: OnceLock::new(),
            h_table: OnceLock::new(),
        },
        BgnPrivateKey { q1: q1.clone() },
    ))
}

fn find_point_of_order(
    curve: &CurveParams,
    order: &BigUint,
    factors: &[BigUint],
    rng: &mut impl RngCore,
) -> Result<CurvePoint> {
    for _ in 0..GENERATOR_RETRIES {
        let x = rng.gen_biguint_below(&curve.p);
        let z = curve.rhs(&x);
        let y = match mod_sqrt_3mod4(&z, &curve.p) {
            Ok(y) => y,
            Err(_) => continue,
        };
        let pt = CurvePoint::Affine { x, y };
        let full_order = factors
            .iter()
            .all(|r| !scalar_mul(&(order / r), &pt, curve).is_infinity());
        if full_order {
            return Ok(pt);
        }
    }
    Err(Error::GenerationFailure(
        "no point of full order found".into(),
    ))
}

fn factor_u64(mut v: u64) -> Vec<u64> {
    let mut factors = Vec::new();
    let mut d = 2u64;
    while d * d <= v {
        if v % d == 0 {
            factors.push(d);
            while v % d == 0 {
                v /= d;
            }
        }
        d += 1;
    }
    if v > 1 {
        factors.push(v);
    }
    factors
}

/// Probabilistic encryption `C = m*g + r*h` with `r` drawn from `[0, n)`.
pub fn encrypt(pk: &BgnPublicKey, m: u64, rng: &mut impl RngCore) -> Result<Ciphertext> {
    let r = rng.gen_biguint_below(&pk.n);
    encrypt_with_randomness(pk, m, &r)
}

/// Encryption with the blinding scalar fixed by the caller.
pub fn encrypt_with_randomness(pk: &BgnPublicKey, m: u64, r: &BigUint) -> Result<Ciphertext> {
    if m > pk.message_bound {
        return Err(Error::MessageOutOfRange(
            m.to_string(),
            pk.message_bound.to_string(),
        ));
    }
    let mg = pk.g_mul(&BigUint::from(m));
    let rh = pk.h_mul(r);
    Ok(Ciphertext::Level1(point_add(&mg, &rh, &pk.curve)))
}

/// Decryption: the discrete log of `q1 * C` base `q1 * g`, via the lookup
/// table when one is supplied and baby-step/giant-step otherwise.
pub fn decrypt(
    pk: &BgnPublicKey,
    sk: &BgnPrivateKey,
    c: &Ciphertext,
    table: Option<&DlogTable<CurvePoint>>,
) -> Result<u64> {
    let point = c.as_point()?;
    let target = scalar_mul(&sk.q1, point, &pk.curve);
    let base = scalar_mul(&sk.q1, &pk.g, &pk.curve);
    let found = match table {
        Some(t) => t.lookup(&target),
        None => point_dlog_bsgs(&base, &target, pk.message_bound, &pk.curve),
    };
    found.ok_or(Error::DlogNotFound)
}

/// Homomorphic addition `C = C1 + C2 + r*h`, re-randomized.
pub fn hom_add(
    pk: &BgnPublicKey,
    c1: &Ciphertext,
    c2: &Ciphertext,
    rng: &mut impl RngCore,
) -> Result<Ciphertext> {
    let p1 = c1.as_point()?;
    let p2 = c2.as_point()?;
    let r = rng.gen_biguint_below(&pk.n);
    let sum = point_add(p1, p2, &pk.curve);
    let rh = pk.h_mul(&r);
    Ok(Ciphertext::Level1(point_add(&sum, &rh, &pk.curve)))
}

/// The single homomorphic multiplication: `C = e(C1, C2) * h1^r` with
/// `h1 = e(g, h)`. The result is a level-2 ciphertext.
pub fn hom_mul(
    pk: &BgnPublicKey,
    c1: &Ciphertext,
    c2: &Ciphertext,
    rng: &mut impl RngCore,
) -> Result<Ciphertext> {
    let p1 = c1.as_point()?;
    let p2 = c2.as_point()?;
    let ctx = pk.fp2_ctx();
    let paired = modified_weil(p1, p2, &pk.n, &pk.curve)?;
    let h1 = modified_weil(&pk.g, &pk.h, &pk.n, &pk.curve)?;
    let r = rng.gen_biguint_below(&pk.n);
    Ok(Ciphertext::Level2(
        ctx.mul(&paired, &ctx.pow(&h1, &r)),
    ))
}

/// Extension: addition of two level-2 ciphertexts by multiplying payloads
/// and re-randomizing with `h1^r`. Not part of the base scheme.
pub fn hom_add_level2(
    pk: &BgnPublicKey,
    c1: &Ciphertext,
    c2: &Ciphertext,
    rng: &mut impl RngCore,
) -> Result<Ciphertext> {
    let e1 = c1.as_fp2()?;
    let e2 = c2.as_fp2()?;
    let ctx = pk.fp2_ctx();
    let h1 = modified_weil(&pk.g, &pk.h, &pk.n, &pk.curve)?;
    let r = rng.gen_biguint_below(&pk.n);
    Ok(Ciphertext::Level2(ctx.mul(
        &ctx.mul(e1, e2),
        &ctx.pow(&h1, &r),
    )))
}

/// Level-2 decryption: the discrete log of `C^q1` base `g1^q1` with
/// `g1 = e(g, g)`.
pub fn decrypt_product(
    pk: &BgnPublicKey,
    sk: &BgnPrivateKey,
    c: &Ciphertext,
    bound: u64,
    table: Option<&DlogTable<Fp2Element>>,
) -> Result<u64> {
    let payload = c.as_fp2()?;
    let ctx = pk.fp2_ctx();
    let target = ctx.pow(payload, &sk.q1);
    let found = match table {
        Some(t) => t.lookup(&target),
        None => {
            let g1 = modified_weil(&pk.g, &pk.g, &pk.n, &pk.curve)?;
            let base = ctx.pow(&g1, &sk.q1);
            fp2_dlog_bsgs(&base, &target, bound, &ctx)
        }
    };
    found.ok_or(Error::DlogNotFound)
}

/// Precomputed level-1 decryption table of powers of `q1 * g`.
pub fn level1_table(
    pk: &BgnPublicKey,
    sk: &BgnPrivateKey,
    max: u64,
) -> Result<DlogTable<CurvePoint>> {
    let base = scalar_mul(&sk.q1, &pk.g, &pk.curve);
    DlogTable::for_point_base(&base, max, &pk.curve)
}

/// Precomputed level-2 decryption table of powers of `g1^q1`.
pub fn level2_table(
    pk: &BgnPublicKey,
    sk: &BgnPrivateKey,
    max: u64,
) -> Result<DlogTable<Fp2Element>> {
    let ctx = pk.fp2_ctx();
    let g1 = modified_weil(&pk.g, &pk.g, &pk.n, &pk.curve)?;
    let base = ctx.pow(&g1, &sk.q1);
    DlogTable::for_fp2_base(&base, max, &ctx)
}

impl BgnPublicKey {
    fn g_mul(&self, k: &BigUint) -> CurvePoint {
        self.g_table
            .get_or_init(|| FixedBaseTable::new(&self.g, self.n.bits(), &self.curve))
            .mul(k, &self.g, &self.curve)
    }

    fn h_mul(&self, k: &BigUint) -> CurvePoint {
        self.h_table
            .get_or_init(|| FixedBaseTable::new(&self.h, self.n.bits(), &self.curve))
            .mul(k, &self.h, &self.curve)
    }

    pub fn fp2_ctx(&self) -> Fp2Ctx {
        Fp2Ctx::new(&self.p)
    }

    /// Sanity check of the public-key invariants.
    pub fn validate(&self) -> bool {
        (&self.l * &self.n - 1u32) == self.p
            && (&self.p % 3u32) == BigUint::from(2u32)
            && self.curve.contains(&self.g)
            && self.curve.contains(&self.h)
            && scalar_mul(&self.n, &self.g, &self.curve).is_infinity()
            && scalar_mul(&self.n, &self.h, &self.curve).is_infinity()
    }
}

impl BgnPrivateKey {
    pub fn matches(&self, pk: &BgnPublicKey) -> bool {
        (&pk.n % &self.q1).is_zero() && self.q1 > BigUint::one()
    }
}

//! Elliptic-curve group law over `F_p`, point compression, and the
//! (modified) Weil pairing on the supersingular curve `y^2 = x^3 + 1`.

mod pairing;

pub use pairing::{modified_weil, weil_pairing};

use crate::numeric::{mod_inv, mod_sqrt_3mod4};
use crate::{Error, Result};
use num_bigint::BigUint;
use num_traits::Zero;

/// Short-Weierstrass curve `y^2 = x^3 + ax + b` over `F_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveParams {
    pub p: BigUint,
    pub a: BigUint,
    pub b: BigUint,
}

impl CurveParams {
    pub fn new(p: BigUint, a: BigUint, b: BigUint) -> Self {
        let disc = (BigUint::from(4u32) * &a * &a * &a + BigUint::from(27u32) * &b * &b) % &p;
        assert!(!disc.is_zero(), "singular curve: 4a^3 + 27b^2 = 0 mod p");
        CurveParams { p, a, b }
    }

    /// The cryptosystem's curve `y^2 = x^3 + 1`.
    pub fn supersingular(p: BigUint) -> Self {
        CurveParams::new(p, BigUint::zero(), BigUint::from(1u32))
    }

    pub fn contains(&self, point: &CurvePoint) -> bool {
        match point {
            CurvePoint::Infinity => true,
            CurvePoint::Affine { x, y } => {
                let lhs = (y * y) % &self.p;
                let rhs = (x * x * x + &self.a * x + &self.b) % &self.p;
                lhs == rhs
            }
        }
    }

    /// Right-hand side `x^3 + ax + b mod p`.
    pub fn rhs(&self, x: &BigUint) -> BigUint {
        (x * x * x + &self.a * x + &self.b) % &self.p
    }
}

/// Affine point or the point at infinity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CurvePoint {
    Infinity,
    Affine { x: BigUint, y: BigUint },
}

impl CurvePoint {
    /// Constructs a finite point, checking the curve equation.
    pub fn new(x: BigUint, y: BigUint, curve: &CurveParams) -> Result<Self> {
        let pt = CurvePoint::Affine {
            x: x % &curve.p,
            y: y % &curve.p,
        };
        if curve.contains(&pt) {
            Ok(pt)
        } else {
            Err(Error::InvalidCompressedPoint)
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, CurvePoint::Infinity)
    }

    pub fn neg(&self, curve: &CurveParams) -> CurvePoint {
        match self {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => CurvePoint::Affine {
                x: x.clone(),
                y: (&curve.p - y) % &curve.p,
            },
        }
    }
}

/// Group law: chord-and-tangent addition in affine coordinates.
pub fn point_add(p: &CurvePoint, q: &CurvePoint, curve: &CurveParams) -> CurvePoint {
    let (x1, y1) = match p {
        CurvePoint::Infinity => return q.clone(),
        CurvePoint::Affine { x, y } => (x, y),
    };
    let (x2, y2) = match q {
        CurvePoint::Infinity => return p.clone(),
        CurvePoint::Affine { x, y } => (x, y),
    };
    let modulus = &curve.p;

    let lambda = if x1 == x2 {
        if (y1 + y2) % modulus == BigUint::zero() {
            return CurvePoint::Infinity;
        }
        // tangent: (3 x1^2 + a) / (2 y1)
        let num = (BigUint::from(3u32) * x1 * x1 + &curve.a) % modulus;
        let den = (BigUint::from(2u32) * y1) % modulus;
        (num * mod_inv(&den, modulus).expect("2y invertible for non-2-torsion")) % modulus
    } else {
        // chord: (y2 - y1) / (x2 - x1)
        let num = (y2 + modulus - y1) % modulus;
        let den = (x2 + modulus - x1) % modulus;
        (num * mod_inv(&den, modulus).expect("x2 != x1")) % modulus
    };

    let x3 = (&lambda * &lambda + BigUint::from(2u32) * modulus - x1 - x2) % modulus;
    let y3 = (&lambda * ((x1 + modulus - &x3) % modulus) + modulus - y1) % modulus;
    CurvePoint::Affine { x: x3, y: y3 }
}

/// Jacobian-projective point `(X : Y : Z)`, `x = X/Z^2`, `y = Y/Z^3`;
/// `Z = 0` is the identity. Keeps scalar multiplication inversion-free.
struct Jacobian {
    x: BigUint,
    y: BigUint,
    z: BigUint,
}

/// `a - b mod p` for operands already reduced below `p`.
fn sub_mod(a: &BigUint, b: &BigUint, p: &BigUint) -> BigUint {
    if a >= b {
        a - b
    } else {
        p - b + a
    }
}

impl Jacobian {
    fn infinity() -> Self {
        Jacobian {
            x: BigUint::from(1u32),
            y: BigUint::from(1u32),
            z: BigUint::zero(),
        }
    }

    fn from_affine(p: &CurvePoint) -> Self {
        match p {
            CurvePoint::Infinity => Jacobian::infinity(),
            CurvePoint::Affine { x, y } => Jacobian {
                x: x.clone(),
                y: y.clone(),
                z: BigUint::from(1u32),
            },
        }
    }

    fn to_affine(&self, curve: &CurveParams) -> CurvePoint {
        if self.z.is_zero() {
            return CurvePoint::Infinity;
        }
        let p = &curve.p;
        let z_inv = mod_inv(&self.z, p).expect("nonzero z");
        let z2 = (&z_inv * &z_inv) % p;
        let z3 = (&z2 * &z_inv) % p;
        CurvePoint::Affine {
            x: (&self.x * z2) % p,
            y: (&self.y * z3) % p,
        }
    }

    fn double(&self, curve: &CurveParams) -> Jacobian {
        let p = &curve.p;
        if self.z.is_zero() || self.y.is_zero() {
            return Jacobian::infinity();
        }
        let y2 = (&self.y * &self.y) % p;
        let s = (BigUint::from(4u32) * &self.x * &y2) % p;
        let mut m = BigUint::from(3u32) * &self.x * &self.x;
        if !curve.a.is_zero() {
            let z2 = (&self.z * &self.z) % p;
            m += &curve.a * ((&z2 * &z2) % p);
        }
        let m = m % p;
        let two_s = (&s << 1) % p;
        let x3 = sub_mod(&((&m * &m) % p), &two_s, p);
        let y4_8 = (BigUint::from(8u32) * ((&y2 * &y2) % p)) % p;
        let y3 = sub_mod(&((&m * sub_mod(&s, &x3, p)) % p), &y4_8, p);
        let z3 = (BigUint::from(2u32) * &self.y * &self.z) % p;
        Jacobian {
            x: x3,
            y: y3,
            z: z3,
        }
    }

    fn add(&self, other: &Jacobian, curve: &CurveParams) -> Jacobian {
        let p = &curve.p;
        if self.z.is_zero() {
            return Jacobian {
                x: other.x.clone(),
                y: other.y.clone(),
                z: other.z.clone(),
            };
        }
        if other.z.is_zero() {
            return Jacobian {
                x: self.x.clone(),
                y: self.y.clone(),
                z: self.z.clone(),
            };
        }
        let z1_sq = (&self.z * &self.z) % p;
        let z2_sq = (&other.z * &other.z) % p;
        let u1 = (&self.x * &z2_sq) % p;
        let u2 = (&other.x * &z1_sq) % p;
        let s1 = (&self.y * ((&z2_sq * &other.z) % p)) % p;
        let s2 = (&other.y * ((&z1_sq * &self.z) % p)) % p;
        if u1 == u2 {
            if s1 != s2 {
                return Jacobian::infinity();
            }
            return self.double(curve);
        }
        let h = sub_mod(&u2, &u1, p);
        let r = sub_mod(&s2, &s1, p);
        let h2 = (&h * &h) % p;
        let h3 = (&h2 * &h) % p;
        let u1h2 = (&u1 * &h2) % p;
        let x3 = sub_mod(
            &sub_mod(&((&r * &r) % p), &h3, p),
            &(((&u1h2) << 1) % p),
            p,
        );
        let y3 = sub_mod(
            &((&r * sub_mod(&u1h2, &x3, p)) % p),
            &((&s1 * &h3) % p),
            p,
        );
        let z3 = (((&self.z * &other.z) % p) * &h) % p;
        Jacobian {
            x: x3,
            y: y3,
            z: z3,
        }
    }

    /// Mixed addition with an affine point (`z2 = 1`); saves the other
    /// operand's projective bookkeeping.
    fn add_mixed(&self, x2: &BigUint, y2: &BigUint, curve: &CurveParams) -> Jacobian {
        let p = &curve.p;
        if self.z.is_zero() {
            return Jacobian {
                x: x2.clone(),
                y: y2.clone(),
                z: BigUint::from(1u32),
            };
        }
        let z1_sq = (&self.z * &self.z) % p;
        let u2 = (x2 * &z1_sq) % p;
        let s2 = (y2 * ((&z1_sq * &self.z) % p)) % p;
        if u2 == self.x {
            if s2 != self.y {
                return Jacobian::infinity();
            }
            return self.double(curve);
        }
        let h = sub_mod(&u2, &self.x, p);
        let r = sub_mod(&s2, &self.y, p);
        let h2 = (&h * &h) % p;
        let h3 = (&h2 * &h) % p;
        let u1h2 = (&self.x * &h2) % p;
        let x3 = sub_mod(
            &sub_mod(&((&r * &r) % p), &h3, p),
            &(((&u1h2) << 1) % p),
            p,
        );
        let y3 = sub_mod(
            &((&r * sub_mod(&u1h2, &x3, p)) % p),
            &((&self.y * &h3) % p),
            p,
        );
        let z3 = (&self.z * &h) % p;
        Jacobian {
            x: x3,
            y: y3,
            z: z3,
        }
    }
}

/// Windowed fixed-base multiplication table for a long-lived base point
/// (the public generators): `window[i][d - 1] = d * 16^i * B`, so a scalar
/// multiplication costs one mixed addition per nonzero nibble and no
/// doublings.
#[derive(Debug, Clone)]
pub struct FixedBaseTable {
    window: Vec<Vec<CurvePoint>>,
}

impl FixedBaseTable {
    /// Precomputes the table covering scalars of up to `max_bits` bits.
    pub fn new(base: &CurvePoint, max_bits: u64, curve: &CurveParams) -> Self {
        let positions = max_bits.div_ceil(4).max(1) as usize;
        let mut window = Vec::with_capacity(positions);
        let mut b = base.clone();
        for _ in 0..positions {
            let mut row = Vec::with_capacity(15);
            let mut acc = b.clone();
            for _ in 0..15 {
                row.push(acc.clone());
                acc = point_add(&acc, &b, curve);
            }
            b = acc; // 16^{i+1} * B
            window.push(row);
        }
        FixedBaseTable { window }
    }

    /// `k * B`; falls back to the generic ladder for scalars wider than
    /// the table.
    pub fn mul(&self, k: &BigUint, base: &CurvePoint, curve: &CurveParams) -> CurvePoint {
        if k.bits() > self.window.len() as u64 * 4 {
            return scalar_mul(k, base, curve);
        }
        let digits = k.to_u64_digits();
        let mut acc = Jacobian::infinity();
        for (i, row) in self.window.iter().enumerate() {
            let d = digits
                .get(i / 16)
                .map_or(0, |limb| (limb >> (4 * (i % 16))) & 0xf) as usize;
            if d == 0 {
                continue;
            }
            match &row[d - 1] {
                CurvePoint::Infinity => {}
                CurvePoint::Affine { x, y } => acc = acc.add_mixed(x, y, curve),
            }
        }
        acc.to_affine(curve)
    }
}

/// Double-and-add scalar multiplication in Jacobian coordinates (one
/// field inversion at the end); `0 * P = O`.
pub fn scalar_mul(k: &BigUint, p: &CurvePoint, curve: &CurveParams) -> CurvePoint {
    if k.is_zero() || p.is_infinity() {
        return CurvePoint::Infinity;
    }
    let base = Jacobian::from_affine(p);
    let mut acc = Jacobian::infinity();
    for i in (0..k.bits()).rev() {
        acc = acc.double(curve);
        if k.bit(i) {
            acc = acc.add(&base, curve);
        }
    }
    acc.to_affine(curve)
}

/// Compressed form `(x, y mod 2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressedPoint {
    pub x: BigUint,
    pub parity: u8,
}

pub fn compress_point(p: &CurvePoint) -> Result<CompressedPoint> {
    match p {
        CurvePoint::Infinity => Err(Error::CannotCompressInfinity),
        CurvePoint::Affine { x, y } => Ok(CompressedPoint {
            x: x.clone(),
            parity: if y.bit(0) { 1 } else { 0 },
        }),
    }
}

/// Recovers the full point: `y = z^((p+1)/4)` with `z = x^3 + ax + b`, then
/// the parity bit selects `y` or `p - y`.
pub fn decompress_point(c: &CompressedPoint, curve: &CurveParams) -> Result<CurvePoint> {
    let z = curve.rhs(&c.x);
    let y = mod_sqrt_3mod4(&z, &curve.p).map_err(|_| Error::InvalidCompressedPoint)?;
    let y = if y.bit(0) == (c.parity == 1) {
        y
    } else {
        (&curve.p - &y) % &curve.p
    };
    CurvePoint::new(c.x.clone(), y, curve)
}

/// Serializes a point as lowercase hex of x, a colon, and the parity bit;
/// the identity is written as `inf`.
pub fn point_to_string(p: &CurvePoint) -> String {
    match compress_point(p) {
        Ok(c) => format!("{}:{}", c.x.to_str_radix(16), c.parity),
        Err(_) => "inf".to_string(),
    }
}

pub fn point_from_string(s: &str, curve: &CurveParams) -> Result<CurvePoint> {
    if s == "inf" {
        return Ok(CurvePoint::Infinity);
    }
    let (xs, ps) = s
        .split_once(':')
        .ok_or_else(|| Error::MalformedKey(format!("bad point string {s:?}")))?;
    let x = BigUint::parse_bytes(xs.as_bytes(), 16)
        .ok_or_else(|| Error::MalformedKey(format!("bad point hex {xs:?}")))?;
    let parity = match ps {
        "0" => 0,
        "1" => 1,
        _ => return Err(Error::MalformedKey(format!("bad parity {ps:?}"))),
    };
    decompress_point(&CompressedPoint { x, parity }, curve)
}

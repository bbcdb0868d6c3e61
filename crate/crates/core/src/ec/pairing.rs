//! Weil pairing via Miller's algorithm over `F_{p^2}`, plus the modified
//! pairing obtained by composing with the distortion map
//! `(x, y) -> (zeta * x, y)`.

use crate::numeric::{mod_sqrt_3mod4, Fp2Ctx, Fp2Element};
use crate::{Error, Result};
use num_bigint::{BigUint, RandBigInt};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use super::{CurveParams, CurvePoint};

const RETRY_BUDGET: u64 = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Fp2Point {
    Infinity,
    Affine { x: Fp2Element, y: Fp2Element },
}

impl Fp2Point {
    fn is_infinity(&self) -> bool {
        matches!(self, Fp2Point::Infinity)
    }
}

struct PairingCtx {
    fp2: Fp2Ctx,
    a: Fp2Element,
}

impl PairingCtx {
    fn new(curve: &CurveParams) -> Self {
        let fp2 = Fp2Ctx::new(&curve.p);
        let a = fp2.embed(&curve.a);
        PairingCtx { fp2, a }
    }

    fn embed(&self, p: &CurvePoint) -> Fp2Point {
        match p {
            CurvePoint::Infinity => Fp2Point::Infinity,
            CurvePoint::Affine { x, y } => Fp2Point::Affine {
                x: self.fp2.embed(x),
                y: self.fp2.embed(y),
            },
        }
    }

    fn add(&self, p: &Fp2Point, q: &Fp2Point) -> Fp2Point {
        let f = &self.fp2;
        let (x1, y1) = match p {
            Fp2Point::Infinity => return q.clone(),
            Fp2Point::Affine { x, y } => (x, y),
        };
        let (x2, y2) = match q {
            Fp2Point::Infinity => return p.clone(),
            Fp2Point::Affine { x, y } => (x, y),
        };
        let lambda = if x1 == x2 {
            if f.add(y1, y2).is_zero() {
                return Fp2Point::Infinity;
            }
            let three = BigUint::from(3u32);
            let num = f.add(&f.scalar_mul(&f.mul(x1, x1), &three), &self.a);
            let den = f.scalar_mul(y1, &BigUint::from(2u32));
            f.mul(&num, &f.inv(&den).expect("nonzero tangent denominator"))
        } else {
            let num = f.sub(y2, y1);
            let den = f.sub(x2, x1);
            f.mul(&num, &f.inv(&den).expect("nonzero chord denominator"))
        };
        let x3 = f.sub(&f.sub(&f.mul(&lambda, &lambda), x1), x2);
        let y3 = f.sub(&f.mul(&lambda, &f.sub(x1, &x3)), y1);
        Fp2Point::Affine { x: x3, y: y3 }
    }

    /// Evaluates the line through `a` and `b` (tangent when equal) at `s`.
    /// Returns `None` when the value is zero.
    fn line_eval(&self, a: &Fp2Point, b: &Fp2Point, s: &Fp2Point) -> Option<Fp2Element> {
        let f = &self.fp2;
        let (xs, ys) = match s {
            Fp2Point::Infinity => return None,
            Fp2Point::Affine { x, y } => (x, y),
        };
        let (x1, y1) = match a {
            Fp2Point::Infinity => {
                // line through O and b is the vertical at b
                return match b {
                    Fp2Point::Infinity => None,
                    Fp2Point::Affine { x, .. } => nonzero(f.sub(xs, x)),
                };
            }
            Fp2Point::Affine { x, y } => (x, y),
        };
        let (x2, y2) = match b {
            Fp2Point::Infinity => return nonzero(f.sub(xs, x1)),
            Fp2Point::Affine { x, y } => (x, y),
        };
        if x1 == x2 {
            if f.add(y1, y2).is_zero() && y1 != y2 {
                // vertical chord
                return nonzero(f.sub(xs, x1));
            }
            if y1.is_zero() {
                return nonzero(f.sub(xs, x1));
            }
            // tangent
            let three = BigUint::from(3u32);
            let num = f.add(&f.scalar_mul(&f.mul(x1, x1), &three), &self.a);
            let den = f.scalar_mul(y1, &BigUint::from(2u32));
            let lambda = f.mul(&num, &f.inv(&den).ok()?);
            let val = f.sub(&f.sub(ys, y1), &f.mul(&lambda, &f.sub(xs, x1)));
            return nonzero(val);
        }
        let lambda = f.mul(&f.sub(y2, y1), &f.inv(&f.sub(x2, x1)).ok()?);
        let val = f.sub(&f.sub(ys, y1), &f.mul(&lambda, &f.sub(xs, x1)));
        nonzero(val)
    }

    /// Vertical line at `a` evaluated at `s`.
    fn vertical_eval(&self, a: &Fp2Point, s: &Fp2Point) -> Option<Fp2Element> {
        let f = &self.fp2;
        match (a, s) {
            (Fp2Point::Infinity, _) => Some(f.one()),
            (_, Fp2Point::Infinity) => None,
            (Fp2Point::Affine { x: xa, .. }, Fp2Point::Affine { x: xs, .. }) => {
                nonzero(f.sub(xs, xa))
            }
        }
    }

    /// Miller's algorithm: evaluates the function with divisor
    /// `n(A) - n(O)` at the two points `s1`, `s2`, returning the pair
    /// `(f(s1), f(s2))`. `A` must lie in the n-torsion. `None` signals a
    /// zero or pole hit during accumulation.
    fn miller(
        &self,
        a: &Fp2Point,
        n: &BigUint,
        s1: &Fp2Point,
        s2: &Fp2Point,
    ) -> Option<(Fp2Element, Fp2Element)> {
        let f = &self.fp2;
        let mut num1 = f.one();
        let mut den1 = f.one();
        let mut num2 = f.one();
        let mut den2 = f.one();
        let mut z = a.clone();
        for i in (0..n.bits() - 1).rev() {
            // doubling step
            let z2 = self.add(&z, &z);
            let l1 = self.line_eval(&z, &z, s1)?;
            let l2 = self.line_eval(&z, &z, s2)?;
            let v1 = self.vertical_eval(&z2, s1)?;
            let v2 = self.vertical_eval(&z2, s2)?;
            num1 = f.mul(&f.mul(&num1, &num1), &l1);
            den1 = f.mul(&f.mul(&den1, &den1), &v1);
            num2 = f.mul(&f.mul(&num2, &num2), &l2);
            den2 = f.mul(&f.mul(&den2, &den2), &v2);
            z = z2;
            if n.bit(i) {
                let zn = self.add(&z, a);
                let l1 = self.line_eval(&z, a, s1)?;
                let l2 = self.line_eval(&z, a, s2)?;
                let v1 = self.vertical_eval(&zn, s1)?;
                let v2 = self.vertical_eval(&zn, s2)?;
                num1 = f.mul(&num1, &l1);
                den1 = f.mul(&den1, &v1);
                num2 = f.mul(&num2, &l2);
                den2 = f.mul(&den2, &v2);
                z = zn;
            }
        }
        if !z.is_infinity() {
            return None; // a was not in the n-torsion
        }
        let r1 = f.mul(&num1, &f.inv(&den1).ok()?);
        let r2 = f.mul(&num2, &f.inv(&den2).ok()?);
        if r1.is_zero() || r2.is_zero() {
            return None;
        }
        Some((r1, r2))
    }

    /// Correction factor `g(X) = v_{A+R}(X) / l_{A,R}(X)` whose divisor is
    /// `(A+R) + (O) - (A) - (R)`.
    fn shift_eval(
        &self,
        a: &Fp2Point,
        r: &Fp2Point,
        a_plus_r: &Fp2Point,
        s: &Fp2Point,
    ) -> Option<Fp2Element> {
        let v = self.vertical_eval(a_plus_r, s)?;
        let l = self.line_eval(a, r, s)?;
        Some(self.fp2.mul(&v, &self.fp2.inv(&l).ok()?))
    }

    /// Random point of `E(F_p)` lifted to `F_{p^2}` coordinates.
    fn random_base_point(&self, curve: &CurveParams, rng: &mut ChaCha20Rng) -> Fp2Point {
        loop {
            let x = rng.gen_biguint_below(&curve.p);
            let z = curve.rhs(&x);
            if let Ok(y) = mod_sqrt_3mod4(&z, &curve.p) {
                return Fp2Point::Affine {
                    x: self.fp2.embed(&x),
                    y: self.fp2.embed(&y),
                };
            }
        }
    }

    /// Weil pairing of two n-torsion points with randomized divisor
    /// shifts; retries with fresh auxiliary points on degeneracy.
    fn weil(
        &self,
        p: &Fp2Point,
        q: &Fp2Point,
        order: &BigUint,
        curve: &CurveParams,
        zeta: &Fp2Element,
    ) -> Result<Fp2Element> {
        let f = &self.fp2;
        if p.is_infinity() || q.is_infinity() {
            return Ok(f.one());
        }
        for attempt in 0..RETRY_BUDGET {
            let mut rng = ChaCha20Rng::seed_from_u64(0x5745_494c ^ (attempt * 0x9e37));
            // auxiliary points: one from E(F_p), one distorted off the
            // base field, combined so the supports are generic
            let r1 = {
                let base = self.random_base_point(curve, &mut rng);
                let twisted = self.distort(&self.random_base_point(curve, &mut rng), zeta);
                self.add(&base, &twisted)
            };
            let r2 = {
                let base = self.random_base_point(curve, &mut rng);
                let twisted = self.distort(&self.random_base_point(curve, &mut rng), zeta);
                self.add(&base, &twisted)
            };
            if r1.is_infinity() || r2.is_infinity() {
                continue;
            }
            let p_shift = self.add(p, &r1);
            let q_shift = self.add(q, &r2);
            if p_shift.is_infinity() || q_shift.is_infinity() {
                continue;
            }
            let result = (|| {
                let (fp_qs, fp_r2) = self.miller(p, order, &q_shift, &r2)?;
                let (fq_ps, fq_r1) = self.miller(q, order, &p_shift, &r1)?;
                let gp_qs = self.shift_eval(p, &r1, &p_shift, &q_shift)?;
                let gp_r2 = self.shift_eval(p, &r1, &p_shift, &r2)?;
                let gq_ps = self.shift_eval(q, &r2, &q_shift, &p_shift)?;
                let gq_r1 = self.shift_eval(q, &r2, &q_shift, &r1)?;

                let num = f.mul(
                    &f.mul(&fp_qs, &f.inv(&fp_r2).ok()?),
                    &f.pow(&f.mul(&gp_qs, &f.inv(&gp_r2).ok()?), order),
                );
                let den = f.mul(
                    &f.mul(&fq_ps, &f.inv(&fq_r1).ok()?),
                    &f.pow(&f.mul(&gq_ps, &f.inv(&gq_r1).ok()?), order),
                );
                if den.is_zero() {
                    return None;
                }
                Some(f.mul(&num, &f.inv(&den).ok()?))
            })();
            if let Some(value) = result {
                return Ok(value);
            }
        }
        Err(Error::PairingDegenerate)
    }

    /// Distortion map `(x, y) -> (zeta * x, y)`.
    fn distort(&self, p: &Fp2Point, zeta: &Fp2Element) -> Fp2Point {
        match p {
            Fp2Point::Infinity => Fp2Point::Infinity,
            Fp2Point::Affine { x, y } => Fp2Point::Affine {
                x: self.fp2.mul(zeta, x),
                y: y.clone(),
            },
        }
    }
}

/// Weil pairing of two n-torsion points of `E(F_p)`.
///
/// Alternating and bilinear; `weil_pairing(P, P) = 1`.
pub fn weil_pairing(
    p: &CurvePoint,
    q: &CurvePoint,
    order: &BigUint,
    curve: &CurveParams,
) -> Result<Fp2Element> {
    let ctx = PairingCtx::new(curve);
    let zeta = ctx.fp2.cube_root_of_unity()?;
    ctx.weil(&ctx.embed(p), &ctx.embed(q), order, curve, &zeta)
}

/// Modified Weil pairing `e(P, Q) = W(phi(P), Q)` with the distortion map
/// `phi(x, y) = (zeta * x, y)`; non-degenerate on cyclic subgroups, so
/// `e(g, g) != 1` for `g` of order n.
pub fn modified_weil(
    p: &CurvePoint,
    q: &CurvePoint,
    order: &BigUint,
    curve: &CurveParams,
) -> Result<Fp2Element> {
    let ctx = PairingCtx::new(curve);
    let zeta = ctx.fp2.cube_root_of_unity()?;
    let p_twisted = ctx.distort(&ctx.embed(p), &zeta);
    ctx.weil(&p_twisted, &ctx.embed(q), order, curve, &zeta)
}

fn nonzero(v: Fp2Element) -> Option<Fp2Element> {
    if v.is_zero() {
        None
    } else {
        Some(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ec::{point_add, scalar_mul};

    fn toy_curve() -> CurveParams {
        CurveParams::supersingular(BigUint::from(419u32))
    }

    /// Generator of the order-35 subgroup: 12 * X for X of full order 420.
    fn toy_generator() -> CurvePoint {
        let curve = toy_curve();
        for x in 2u32..419 {
            let z = curve.rhs(&BigUint::from(x));
            if let Ok(y) = mod_sqrt_3mod4(&z, &curve.p) {
                let pt = CurvePoint::Affine {
                    x: BigUint::from(x),
                    y,
                };
                // order check against the divisors of 420
                let full_order = [2u32, 3, 5, 7]
                    .iter()
                    .all(|&r| !scalar_mul(&BigUint::from(420 / r), &pt, &curve).is_infinity());
                if full_order {
                    return scalar_mul(&BigUint::from(12u32), &pt, &curve);
                }
            }
        }
        panic!("no full-order point on the toy curve");
    }

    fn element_order(ctx: &Fp2Ctx, e: &Fp2Element, bound: u32) -> u32 {
        let mut acc = ctx.one();
        for k in 1..=bound {
            acc = ctx.mul(&acc, e);
            if acc.is_one() {
                return k;
            }
        }
        panic!("order above bound");
    }

    #[test]
    fn weil_alternating_and_identity() {
        let curve = toy_curve();
        let n = BigUint::from(35u32);
        let g = toy_generator();
        assert!(weil_pairing(&g, &g, &n, &curve).unwrap().is_one());
        assert!(weil_pairing(&g, &CurvePoint::Infinity, &n, &curve)
            .unwrap()
            .is_one());
        assert!(modified_weil(&g, &CurvePoint::Infinity, &n, &curve)
            .unwrap()
            .is_one());
    }

    #[test]
    fn weil_doubling_consistency() {
        let curve = toy_curve();
        let n = BigUint::from(35u32);
        let g = toy_generator();
        let h = scalar_mul(&BigUint::from(4u32), &g, &curve);
        let e = weil_pairing(&g, &h, &n, &curve).unwrap();
        let g2 = point_add(&g, &g, &curve);
        let e2 = weil_pairing(&g2, &h, &n, &curve).unwrap();
        let ctx = Fp2Ctx::new(&curve.p);
        assert_eq!(e2, ctx.mul(&e, &e));
    }

    #[test]
    fn modified_weil_generator_has_order_n() {
        let curve = toy_curve();
        let n = BigUint::from(35u32);
        let g = toy_generator();
        let e = modified_weil(&g, &g, &n, &curve).unwrap();
        assert!(!e.is_one());
        let ctx = Fp2Ctx::new(&curve.p);
        assert_eq!(element_order(&ctx, &e, 36), 35);
    }

    #[test]
    fn modified_weil_bilinear_sampled() {
        let curve = toy_curve();
        let n = BigUint::from(35u32);
        let g = toy_generator();
        let ctx = Fp2Ctx::new(&curve.p);
        let base = modified_weil(&g, &g, &n, &curve).unwrap();
        for a in [0u32, 1, 2, 5, 17, 34] {
            for b in [0u32, 1, 3, 11, 34] {
                let pa = scalar_mul(&BigUint::from(a), &g, &curve);
                let qb = scalar_mul(&BigUint::from(b), &g, &curve);
                let e = modified_weil(&pa, &qb, &n, &curve).unwrap();
                let expected = ctx.pow(&base, &BigUint::from(a * b));
                assert_eq!(e, expected, "a={a} b={b}");
            }
        }
    }
}

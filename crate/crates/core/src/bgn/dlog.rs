//! Discrete-logarithm helpers for decryption: an exact lookup table of
//! small powers and a baby-step/giant-step fallback.

use crate::ec::{point_add, scalar_mul, CurveParams, CurvePoint};
use crate::numeric::{Fp2Ctx, Fp2Element};
use crate::{Error, Result};
use num_bigint::BigUint;
use std::collections::HashMap;
use std::hash::Hash;

/// Default cap on table size (entries).
pub const DEFAULT_TABLE_CAP: u64 = 1 << 24;

/// Lookup table mapping `i * base` (or `base^i`) to `i` for `i in [0, max]`.
#[derive(Debug, Clone)]
pub struct DlogTable<T> {
    map: HashMap<T, u64>,
    max: u64,
}

impl<T: Hash + Eq + Clone> DlogTable<T> {
    /// Builds the table by repeated application of `step` starting from
    /// the group identity.
    pub fn build(identity: T, step: impl Fn(&T) -> T, max: u64, cap: u64) -> Result<Self> {
        if max.saturating_add(1) > cap {
            return Err(Error::TableTooLarge(cap));
        }
        let mut map = HashMap::with_capacity(max as usize + 1);
        let mut current = identity;
        for i in 0..=max {
            map.entry(current.clone()).or_insert(i);
            if i < max {
                current = step(&current);
            }
        }
        Ok(DlogTable { map, max })
    }

    pub fn lookup(&self, element: &T) -> Option<u64> {
        self.map.get(element).copied()
    }

    pub fn max_exponent(&self) -> u64 {
        self.max
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

impl DlogTable<CurvePoint> {
    pub fn for_point_base(base: &CurvePoint, max: u64, curve: &CurveParams) -> Result<Self> {
        let curve = curve.clone();
        let base = base.clone();
        Self::build(
            CurvePoint::Infinity,
            move |acc| point_add(acc, &base, &curve),
            max,
            DEFAULT_TABLE_CAP,
        )
    }
}

impl DlogTable<Fp2Element> {
    pub fn for_fp2_base(base: &Fp2Element, max: u64, ctx: &Fp2Ctx) -> Result<Self> {
        let ctx = ctx.clone();
        let base = base.clone();
        Self::build(
            ctx.one(),
            move |acc| ctx.mul(acc, &base),
            max,
            DEFAULT_TABLE_CAP,
        )
    }
}

/// Baby-step/giant-step search for `k <= bound` with `k * base = target`,
/// in O(sqrt(bound)) group operations.
pub fn point_dlog_bsgs(
    base: &CurvePoint,
    target: &CurvePoint,
    bound: u64,
    curve: &CurveParams,
) -> Option<u64> {
    let m = (bound as f64).sqrt().ceil() as u64 + 1;
    let mut baby: HashMap<CurvePoint, u64> = HashMap::with_capacity(m as usize);
    let mut acc = CurvePoint::Infinity;
    for j in 0..m {
        baby.entry(acc.clone()).or_insert(j);
        acc = point_add(&acc, base, curve);
    }
    // giant step: subtract m * base repeatedly
    let giant = scalar_mul(&BigUint::from(m), base, curve).neg(curve);
    let mut gamma = target.clone();
    for i in 0..=m {
        if let Some(&j) = baby.get(&gamma) {
            let k = i * m + j;
            if k <= bound {
                return Some(k);
            }
        }
        gamma = point_add(&gamma, &giant, curve);
    }
    None
}

/// Baby-step/giant-step for `base^k = target` in the extension field.
pub fn fp2_dlog_bsgs(
    base: &Fp2Element,
    target: &Fp2Element,
    bound: u64,
    ctx: &Fp2Ctx,
) -> Option<u64> {
    let m = (bound as f64).sqrt().ceil() as u64 + 1;
    let mut baby: HashMap<Fp2Element, u64> = HashMap::with_capacity(m as usize);
    let mut acc = ctx.one();
    for j in 0..m {
        baby.entry(acc.clone()).or_insert(j);
        acc = ctx.mul(&acc, base);
    }
    let giant = ctx.inv(&ctx.pow(base, &BigUint::from(m))).ok()?;
    let mut gamma = target.clone();
    for i in 0..=m {
        if let Some(&j) = baby.get(&gamma) {
            let k = i * m + j;
            if k <= bound {
                return Some(k);
            }
        }
        gamma = ctx.mul(&gamma, &giant);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_curve() -> CurveParams {
        CurveParams::supersingular(BigUint::from(419u32))
    }

    // order-35 point on the toy curve, so exponents below 35 are distinct
    fn base_point() -> CurvePoint {
        CurvePoint::Affine {
            x: BigUint::from(24u32),
            y: BigUint::from(323u32),
        }
    }

    #[test]
    fn table_of_zero_maps_identity_only() {
        let curve = toy_curve();
        let table = DlogTable::for_point_base(&base_point(), 0, &curve).unwrap();
        assert_eq!(table.len(), 1);
        assert_eq!(table.lookup(&CurvePoint::Infinity), Some(0));
    }

    #[test]
    fn table_entries_distinct_and_correct() {
        let curve = toy_curve();
        let table = DlogTable::for_point_base(&base_point(), 6, &curve).unwrap();
        assert_eq!(table.len(), 7);
        for i in 0..=6u64 {
            let p = scalar_mul(&BigUint::from(i), &base_point(), &curve);
            assert_eq!(table.lookup(&p), Some(i));
        }
    }

    #[test]
    fn table_cap_enforced() {
        let curve = toy_curve();
        let result = DlogTable::build(
            CurvePoint::Infinity,
            |acc| point_add(acc, &base_point(), &curve),
            100,
            10,
        );
        assert!(matches!(result, Err(Error::TableTooLarge(10))));
    }

    #[test]
    fn bsgs_agrees_with_table_on_random_exponents() {
        let curve = toy_curve();
        let base = base_point();
        let table = DlogTable::for_point_base(&base, 400, &curve).unwrap();
        let mut state = 12345u64;
        for _ in 0..100 {
            state = crate::numeric::splitmix64(state);
            let k = state % 300;
            let target = scalar_mul(&BigUint::from(k), &base, &curve);
            let via_bsgs = point_dlog_bsgs(&base, &target, 300, &curve).unwrap();
            // the base has order 35, so exponents wrap; compare group
            // elements rather than raw exponents
            assert_eq!(
                scalar_mul(&BigUint::from(via_bsgs), &base, &curve),
                target
            );
            assert_eq!(table.lookup(&target).is_some(), true);
        }
    }

    #[test]
    fn fp2_bsgs_small_field() {
        let ctx = Fp2Ctx::new(&BigUint::from(419u32));
        let base = Fp2Element {
            a0: BigUint::from(3u32),
            a1: BigUint::from(1u32),
        };
        for k in [0u64, 1, 2, 17, 99, 255] {
            let target = ctx.pow(&base, &BigUint::from(k));
            let found = fp2_dlog_bsgs(&base, &target, 300, &ctx).unwrap();
            assert_eq!(ctx.pow(&base, &BigUint::from(found)), target);
        }
    }
}

//! Key files (UTF-8 JSON) and the ciphertext wire format: a level byte
//! (0x01/0x02) followed by the compressed point, or by the two extension
//! field components as decimal strings.

use super::{BgnPrivateKey, BgnPublicKey, Ciphertext};
use crate::ec::{point_from_string, point_to_string, CurveParams};
use crate::numeric::Fp2Element;
use crate::{Error, Result};
use num_bigint::BigUint;
use serde_json::{json, Value};

fn dec(v: &Value, field: &str) -> Result<BigUint> {
    v.get(field)
        .and_then(Value::as_str)
        .and_then(|s| BigUint::parse_bytes(s.as_bytes(), 10))
        .ok_or_else(|| Error::MalformedKey(format!("missing or bad field {field:?}")))
}

pub fn public_key_to_json(pk: &BgnPublicKey) -> String {
    let value = json!({
        "n": pk.n.to_str_radix(10),
        "p": pk.p.to_str_radix(10),
        "l": pk.l.to_str_radix(10),
        "g": point_to_string(&pk.g),
        "h": point_to_string(&pk.h),
        "t": pk.message_bound.to_string(),
        "curve": {
            "a": pk.curve.a.to_str_radix(10),
            "b": pk.curve.b.to_str_radix(10),
        },
    });
    serde_json::to_string_pretty(&value).expect("json serialization")
}

pub fn public_key_from_json(text: &str) -> Result<BgnPublicKey> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| Error::MalformedKey(e.to_string()))?;
    let p = dec(&value, "p")?;
    let curve_value = value
        .get("curve")
        .ok_or_else(|| Error::MalformedKey("missing curve".into()))?;
    let a = dec(curve_value, "a")?;
    let b = dec(curve_value, "b")?;
    let curve = CurveParams::new(p.clone(), a, b);
    let g = value
        .get("g")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::MalformedKey("missing g".into()))?;
    let h = value
        .get("h")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::MalformedKey("missing h".into()))?;
    let t = value
        .get("t")
        .and_then(Value::as_str)
        .and_then(|s| s.parse::<u64>().ok())
        .unwrap_or(super::DEFAULT_MESSAGE_BOUND);
    Ok(BgnPublicKey {
        n: dec(&value, "n")?,
        l: dec(&value, "l")?,
        g: point_from_string(g, &curve)?,
        h: point_from_string(h, &curve)?,
        p,
        curve,
        message_bound: t,
        g_table: Default::default(),
        h_table: Default::default(),
    })
}

pub fn private_key_to_json(sk: &BgnPrivateKey) -> String {
    let value = json!({ "q1": sk.q1.to_str_radix(10) });
    serde_json::to_string_pretty(&value).expect("json serialization")
}

pub fn private_key_from_json(text: &str) -> Result<BgnPrivateKey> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| Error::MalformedKey(e.to_string()))?;
    Ok(BgnPrivateKey {
        q1: dec(&value, "q1")?,
    })
}

pub fn ciphertext_to_bytes(c: &Ciphertext) -> Vec<u8> {
    match c {
        Ciphertext::Level1(point) => {
            let mut bytes = vec![0x01];
            bytes.extend_from_slice(point_to_string(point).as_bytes());
            bytes
        }
        Ciphertext::Level2(e) => {
            let mut bytes = vec![0x02];
            let body = format!("{}:{}", e.a0.to_str_radix(10), e.a1.to_str_radix(10));
            bytes.extend_from_slice(body.as_bytes());
            bytes
        }
    }
}

pub fn ciphertext_from_bytes(bytes: &[u8], pk: &BgnPublicKey) -> Result<Ciphertext> {
    let (&level, body) = bytes
        .split_first()
        .ok_or_else(|| Error::MalformedKey("empty ciphertext".into()))?;
    let body =
        std::str::from_utf8(body).map_err(|_| Error::MalformedKey("non-UTF-8 payload".into()))?;
    match level {
        0x01 => Ok(Ciphertext::Level1(point_from_string(body, &pk.curve)?)),
        0x02 => {
            let (a0, a1) = body
                .split_once(':')
                .ok_or_else(|| Error::MalformedKey("bad level-2 payload".into()))?;
            let parse = |s: &str| {
                BigUint::parse_bytes(s.as_bytes(), 10)
                    .ok_or_else(|| Error::MalformedKey(format!("bad component {s:?}")))
            };
            Ok(Ciphertext::Level2(Fp2Element {
                a0: parse(a0)? % &pk.p,
                a1: parse(a1)? % &pk.p,
            }))
        }
        other => Err(Error::MalformedKey(format!("unknown level byte {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bgn::{encrypt, hom_mul, keygen_with_primes};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn key_json_roundtrip() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let (pk, sk) =
            keygen_with_primes(&BigUint::from(5u32), &BigUint::from(7u32), &mut rng).unwrap();
        let pk2 = public_key_from_json(&public_key_to_json(&pk)).unwrap();
        assert_eq!(pk2.n, pk.n);
        assert_eq!(pk2.p, pk.p);
        assert_eq!(pk2.l, pk.l);
        assert_eq!(pk2.g, pk.g);
        assert_eq!(pk2.h, pk.h);
        assert_eq!(pk2.message_bound, pk.message_bound);
        let sk2 = private_key_from_json(&private_key_to_json(&sk)).unwrap();
        assert_eq!(sk2.q1, sk.q1);
    }

    #[test]
    fn ciphertext_wire_roundtrip_both_levels() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let (pk, _) =
            keygen_with_primes(&BigUint::from(5u32), &BigUint::from(7u32), &mut rng).unwrap();
        let c1 = encrypt(&pk, 3, &mut rng).unwrap();
        let bytes = ciphertext_to_bytes(&c1);
        assert_eq!(bytes[0], 0x01);
        assert_eq!(ciphertext_from_bytes(&bytes, &pk).unwrap(), c1);

        let c2 = hom_mul(&pk, &c1, &encrypt(&pk, 2, &mut rng).unwrap(), &mut rng).unwrap();
        let bytes = ciphertext_to_bytes(&c2);
        assert_eq!(bytes[0], 0x02);
        assert_eq!(ciphertext_from_bytes(&bytes, &pk).unwrap(), c2);
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        assert!(public_key_from_json("{}").is_err());
        assert!(private_key_from_json("not json").is_err());
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let (pk, _) =
            keygen_with_primes(&BigUint::from(5u32), &BigUint::from(7u32), &mut rng).unwrap();
        assert!(ciphertext_from_bytes(&[], &pk).is_err());
        assert!(ciphertext_from_bytes(&[0x03, b'0'], &pk).is_err());
    }
}

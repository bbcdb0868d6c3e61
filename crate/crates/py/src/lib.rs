//! Python bindings: key generation, the homomorphic operations over wire
//! format ciphertexts, aggregation pipelines, watermarking and attacks.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use sda_core::aggregation::{
    build_topology as core_build_topology, run_pipeline_mean, run_pipeline_sum,
    run_pipeline_variance, run_pipeline_weighted_mean, PipelineResult, Topology,
};
use sda_core::bgn::{
    self, ciphertext_from_bytes, ciphertext_to_bytes, private_key_from_json, private_key_to_json,
    public_key_from_json, public_key_to_json, Ciphertext,
};
use sda_core::numeric::{splitmix64, Fraction64};
use sda_core::watermark::{
    attack_gaussian, attack_jpeg, attack_rotation, attack_zeroing, embed_watermark,
    extract_similarity, load_pgm, save_pgm, significance_split, CiisParams, SensorGrid,
    WatermarkMode, DEFAULT_LSC_THRESHOLD, DEFAULT_MSC_THRESHOLD, DEFAULT_PLCM_P,
};

fn err(e: sda_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rng_for(seed: u64, name: &str) -> ChaCha20Rng {
    let sub = name
        .bytes()
        .fold(splitmix64(seed), |acc, b| splitmix64(acc ^ b as u64));
    ChaCha20Rng::seed_from_u64(sub)
}

/// Generate a key pair with `tau`-bit subgroup primes. Returns the public
/// and private key as JSON strings.
#[pyfunction]
fn keygen(tau: u64, seed: u64) -> PyResult<(String, String)> {
    let mut rng = rng_for(seed, "keygen");
    let (pk, sk) = bgn::keygen(tau, &mut rng).map_err(err)?;
    Ok((public_key_to_json(&pk), private_key_to_json(&sk)))
}

/// Encrypt `value` under the public key; returns the ciphertext wire bytes.
#[pyfunction]
fn encrypt(pub_json: &str, value: u64, seed: u64) -> PyResult<Vec<u8>> {
    let pk = public_key_from_json(pub_json).map_err(err)?;
    let mut rng = rng_for(seed, "encrypt");
    let c = bgn::encrypt(&pk, value, &mut rng).map_err(err)?;
    Ok(ciphertext_to_bytes(&c))
}

/// Decrypt a ciphertext of either level. For level-2 ciphertexts `bound`
/// caps the discrete-log search; it defaults to the squared message bound.
#[pyfunction]
#[pyo3(signature = (pub_json, priv_json, ciphertext, bound=None))]
fn decrypt(
    pub_json: &str,
    priv_json: &str,
    ciphertext: &[u8],
    bound: Option<u64>,
) -> PyResult<u64> {
    let pk = public_key_from_json(pub_json).map_err(err)?;
    let sk = private_key_from_json(priv_json).map_err(err)?;
    let c = ciphertext_from_bytes(ciphertext, &pk).map_err(err)?;
    match c {
        Ciphertext::Level1(_) => bgn::decrypt(&pk, &sk, &c, None).map_err(err),
        Ciphertext::Level2(_) => {
            let bound = bound.unwrap_or_else(|| pk.message_bound.saturating_mul(pk.message_bound));
            bgn::decrypt_product(&pk, &sk, &c, bound, None).map_err(err)
        }
    }
}

/// Homomorphic addition of two ciphertexts of equal level.
#[pyfunction]
fn hom_add(pub_json: &str, lhs: &[u8], rhs: &[u8], seed: u64) -> PyResult<Vec<u8>> {
    let pk = public_key_from_json(pub_json).map_err(err)?;
    let c1 = ciphertext_from_bytes(lhs, &pk).map_err(err)?;
    let c2 = ciphertext_from_bytes(rhs, &pk).map_err(err)?;
    let mut rng = rng_for(seed, "add");
    let sum = match (&c1, &c2) {
        (Ciphertext::Level2(_), _) | (_, Ciphertext::Level2(_)) => {
            bgn::hom_add_level2(&pk, &c1, &c2, &mut rng).map_err(err)?
        }
        _ => bgn::hom_add(&pk, &c1, &c2, &mut rng).map_err(err)?,
    };
    Ok(ciphertext_to_bytes(&sum))
}

/// The single homomorphic multiplication of two level-1 ciphertexts.
#[pyfunction]
fn hom_mul(pub_json: &str, lhs: &[u8], rhs: &[u8], seed: u64) -> PyResult<Vec<u8>> {
    let pk = public_key_from_json(pub_json).map_err(err)?;
    let c1 = ciphertext_from_bytes(lhs, &pk).map_err(err)?;
    let c2 = ciphertext_from_bytes(rhs, &pk).map_err(err)?;
    let mut rng = rng_for(seed, "mul");
    let product = bgn::hom_mul(&pk, &c1, &c2, &mut rng).map_err(err)?;
    Ok(ciphertext_to_bytes(&product))
}

/// Seeded random aggregation-tree topology as JSON.
#[pyfunction]
fn build_topology(sensors: usize, aggregators: usize, seed: u64) -> String {
    core_build_topology(sensors, aggregators, seed).to_json()
}

fn result_tuple(r: PipelineResult) -> ((u128, u128), (u128, u128)) {
    (
        (r.truth.num, r.truth.den),
        (r.decrypted.num, r.decrypted.den),
    )
}

/// Run one aggregation pipeline (`sum`, `mean`, `variance` or
/// `weighted_mean`) over the topology; returns
/// `((truth_num, truth_den), (decrypted_num, decrypted_den))`.
#[pyfunction]
#[pyo3(signature = (pipeline, topology_json, pub_json, priv_json, readings, seed, weights=None))]
#[allow(clippy::too_many_arguments)]
fn run_pipeline(
    pipeline: &str,
    topology_json: &str,
    pub_json: &str,
    priv_json: &str,
    readings: Vec<u64>,
    seed: u64,
    weights: Option<Vec<u64>>,
) -> PyResult<((u128, u128), (u128, u128))> {
    let topology = Topology::from_json(topology_json).map_err(err)?;
    let pk = public_key_from_json(pub_json).map_err(err)?;
    let sk = private_key_from_json(priv_json).map_err(err)?;
    let mut rng = rng_for(seed, "pipeline");
    let result = match pipeline {
        "sum" => run_pipeline_sum(&topology, &pk, &sk, &readings, &mut rng),
        "mean" => run_pipeline_mean(&topology, &pk, &sk, &readings, &mut rng),
        "variance" => run_pipeline_variance(&topology, &pk, &sk, &readings, &mut rng),
        "weighted_mean" => {
            let weights = weights.ok_or_else(|| {
                PyValueError::new_err("weighted_mean needs one weight per aggregator")
            })?;
            run_pipeline_weighted_mean(&topology, &pk, &sk, &readings, &weights, &mut rng)
        }
        other => return Err(PyValueError::new_err(format!("unknown pipeline `{other}`"))),
    }
    .map_err(err)?;
    Ok(result_tuple(result))
}

fn parse_mode(mode: &str) -> PyResult<WatermarkMode> {
    match mode {
        "auth" => Ok(WatermarkMode::Authentication),
        "robust" => Ok(WatermarkMode::Unauthentication),
        other => Err(PyValueError::new_err(format!(
            "mode must be `auth` or `robust`, got `{other}`"
        ))),
    }
}

fn wm_setup(
    pgm: &[u8],
    key: u64,
    mode: &str,
    p: f64,
    iterations: Option<usize>,
    watermark: Option<&str>,
) -> PyResult<(
    SensorGrid,
    sda_core::watermark::SignificanceSplit,
    CiisParams,
    Vec<bool>,
)> {
    if !(0.0 < p && p < 0.5) {
        return Err(PyValueError::new_err("p must lie in (0, 1/2)"));
    }
    let grid = load_pgm(pgm).map_err(err)?;
    let split = significance_split(&grid, DEFAULT_MSC_THRESHOLD, DEFAULT_LSC_THRESHOLD)
        .map_err(err)?;
    let params = CiisParams {
        key: Fraction64::from_bits(splitmix64(key) & ((1 << 62) - 1)),
        p: Fraction64::from_f64(p),
        iterations: iterations.unwrap_or(grid.bit_len() / 2),
        mode: parse_mode(mode)?,
    };
    let bits: Vec<bool> = match watermark {
        Some(text) => {
            let bits: Vec<bool> = text
                .chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| c == '1')
                .collect();
            if bits.is_empty() {
                return Err(PyValueError::new_err("empty watermark"));
            }
            bits
        }
        None => {
            let word = splitmix64(splitmix64(key ^ 0x77_6d));
            (0..64).map(|i| (word >> i) & 1 == 1).collect()
        }
    };
    Ok((grid, split, params, bits))
}

/// Embed a watermark into a PGM image; returns the marked PGM bytes.
#[pyfunction]
#[pyo3(signature = (pgm, key, mode="auth", p=DEFAULT_PLCM_P, iterations=None, watermark=None))]
fn wm_embed(
    pgm: &[u8],
    key: u64,
    mode: &str,
    p: f64,
    iterations: Option<usize>,
    watermark: Option<&str>,
) -> PyResult<Vec<u8>> {
    let (grid, split, params, bits) = wm_setup(pgm, key, mode, p, iterations, watermark)?;
    let marked = embed_watermark(&grid, &params, &split, &bits);
    Ok(save_pgm(&marked))
}

/// Watermark similarity of a PGM image, in percent.
#[pyfunction]
#[pyo3(signature = (pgm, key, mode="auth", p=DEFAULT_PLCM_P, iterations=None, watermark=None))]
fn wm_check(
    pgm: &[u8],
    key: u64,
    mode: &str,
    p: f64,
    iterations: Option<usize>,
    watermark: Option<&str>,
) -> PyResult<f64> {
    let (grid, split, params, bits) = wm_setup(pgm, key, mode, p, iterations, watermark)?;
    Ok(extract_similarity(&grid, &params, &split, &bits))
}

/// Apply one attack (`zero`, `rotate`, `noise`, `jpeg`) to a PGM image.
#[pyfunction]
#[pyo3(signature = (pgm, kind, param, seed=0))]
fn wm_attack(pgm: &[u8], kind: &str, param: f64, seed: u64) -> PyResult<Vec<u8>> {
    let grid = load_pgm(pgm).map_err(err)?;
    let attacked = match kind {
        "zero" => attack_zeroing(&grid, param as usize),
        "rotate" => attack_rotation(&grid, param),
        "noise" => {
            let sub = "noise"
                .bytes()
                .fold(splitmix64(seed), |acc, b| splitmix64(acc ^ b as u64));
            attack_gaussian(&grid, param, sub)
        }
        "jpeg" => attack_jpeg(&grid, param),
        other => return Err(PyValueError::new_err(format!("unknown attack `{other}`"))),
    };
    Ok(save_pgm(&attacked))
}

#[pymodule]
fn sda_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(keygen, m)?)?;
    m.add_function(wrap_pyfunction!(encrypt, m)?)?;
    m.add_function(wrap_pyfunction!(decrypt, m)?)?;
    m.add_function(wrap_pyfunction!(hom_add, m)?)?;
    m.add_function(wrap_pyfunction!(hom_mul, m)?)?;
    m.add_function(wrap_pyfunction!(build_topology, m)?)?;
    m.add_function(wrap_pyfunction!(run_pipeline, m)?)?;
    m.add_function(wrap_pyfunction!(wm_embed, m)?)?;
    m.add_function(wrap_pyfunction!(wm_check, m)?)?;
    m.add_function(wrap_pyfunction!(wm_attack, m)?)?;
    m.add("DEFAULT_PLCM_P", DEFAULT_PLCM_P)?;
    Ok(())
}

//! Deterministic aggregation-tree simulator: sensors encrypt readings,
//! aggregators fold ciphertexts without ever seeing the private key, the
//! sink decrypts; plus an energy benchmark against an RSA baseline.

use crate::bgn::{
    decrypt, decrypt_product, encrypt, hom_add, hom_mul, keygen, BgnPrivateKey, BgnPublicKey,
    Ciphertext,
};
use crate::{Error, Result};
use num_bigint::{BigUint, RandBigInt};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use std::time::Instant;

pub const SENSOR_BATTERY: f64 = 100.0;
pub const AGGREGATOR_BATTERY: f64 = 1000.0;

/// Per-level key sizes: the elliptic-curve prime sizes come out of the
/// tau below, the RSA moduli are fixed.
pub const RSA_BITS_BY_LEVEL: [u64; 4] = [472, 945, 1416, 1891];
pub const TAU_BY_LEVEL: [u64; 4] = [20, 39, 59, 80];
pub const TARGET_P_BITS_BY_LEVEL: [u64; 4] = [46, 85, 125, 167];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorNode {
    pub id: u32,
    pub position: [f64; 2],
    pub battery: f64,
    pub aggregator: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregatorNode {
    pub id: u32,
    pub position: [f64; 2],
    pub battery: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SinkNode {
    pub position: [f64; 2],
}

/// Depth-2 tree: every sensor reports to its nearest aggregator, every
/// aggregator reports to the single sink.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    pub sensors: Vec<SensorNode>,
    pub aggregators: Vec<AggregatorNode>,
    pub sink: SinkNode,
}

impl Topology {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("topology serialization")
    }

    pub fn from_json(text: &str) -> Result<Topology> {
        let topo: Topology =
            serde_json::from_str(text).map_err(|e| Error::MalformedTopology(e.to_string()))?;
        if topo.aggregators.is_empty() {
            return Err(Error::MalformedTopology("no aggregators".into()));
        }
        for s in &topo.sensors {
            if topo.aggregators.iter().all(|a| a.id != s.aggregator) {
                return Err(Error::MalformedTopology(format!(
                    "sensor {} assigned to unknown aggregator {}",
                    s.id, s.aggregator
                )));
            }
            if s.battery < 0.0 {
                return Err(Error::MalformedTopology(format!(
                    "sensor {} has negative battery",
                    s.id
                )));
            }
        }
        if topo.aggregators.iter().any(|a| a.battery < 0.0) {
            return Err(Error::MalformedTopology("negative aggregator battery".into()));
        }
        Ok(topo)
    }

    /// Sensor indices per aggregator, in aggregator order.
    pub fn children(&self) -> Vec<Vec<usize>> {
        self.aggregators
            .iter()
            .map(|a| {
                self.sensors
                    .iter()
                    .enumerate()
                    .filter(|(_, s)| s.aggregator == a.id)
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect()
    }
}

/// Uniform positions on the unit square; each sensor reports to the
/// nearest aggregator, ties broken by the lowest aggregator id.
pub fn build_topology(n_sensors: usize, n_aggregators: usize, seed: u64) -> Topology {
    assert!(n_sensors >= 1 && n_aggregators >= 1);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let aggregators: Vec<AggregatorNode> = (0..n_aggregators)
        .map(|i| AggregatorNode {
            id: i as u32,
            position: [rng.gen::<f64>(), rng.gen::<f64>()],
            battery: AGGREGATOR_BATTERY,
        })
        .collect();
    let sensors = (0..n_sensors)
        .map(|i| {
            let position = [rng.gen::<f64>(), rng.gen::<f64>()];
            SensorNode {
                id: i as u32,
                position,
                battery: SENSOR_BATTERY,
                aggregator: nearest_aggregator(&position, &aggregators),
            }
        })
        .collect();
    Topology {
        sensors,
        aggregators,
        sink: SinkNode {
            position: [0.5, 0.5],
        },
    }
}

fn squared_distance(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    dx * dx + dy * dy
}

fn nearest_aggregator(position: &[f64; 2], aggregators: &[AggregatorNode]) -> u32 {
    aggregators
        .iter()
        .min_by(|a, b| {
            squared_distance(position, &a.position)
                .total_cmp(&squared_distance(position, &b.position))
                .then(a.id.cmp(&b.id))
        })
        .expect("at least one aggregator")
        .id
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PipelineKind {
    Sum,
    Mean,
    Variance,
    WeightedMean,
}

impl PipelineKind {
    pub fn name(&self) -> &'static str {
        match self {
            PipelineKind::Sum => "sum",
            PipelineKind::Mean => "mean",
            PipelineKind::Variance => "variance",
            PipelineKind::WeightedMean => "weighted_mean",
        }
    }
}

/// Exact rational result; `den = 0` marks an undefined value (weighted
/// mean with all-zero weights).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rational {
    pub num: u128,
    pub den: u128,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineResult {
    pub kind: PipelineKind,
    pub truth: Rational,
    pub decrypted: Rational,
}

fn check_readings(topology: &Topology, readings: &[u64]) -> Result<()> {
    if readings.len() != topology.sensors.len() {
        return Err(Error::ReadingsMismatch(format!(
            "{} readings for {} sensors",
            readings.len(),
            topology.sensors.len()
        )));
    }
    Ok(())
}

/// Folds the children's level-1 ciphertexts; an empty aggregator forwards
/// a fresh encryption of zero.
fn aggregate_level1(
    pk: &BgnPublicKey,
    children: &[Ciphertext],
    rng: &mut impl RngCore,
) -> Result<Ciphertext> {
    let mut iter = children.iter();
    match iter.next() {
        None => encrypt(pk, 0, rng),
        Some(first) => {
            let mut acc = first.clone();
            for c in iter {
                acc = hom_add(pk, &acc, c, rng)?;
            }
            Ok(acc)
        }
    }
}

/// Encrypted sums per aggregator of one value per sensor, produced with
/// the public key only.
fn encrypted_sums(
    pk: &BgnPublicKey,
    topology: &Topology,
    values: impl Fn(usize) -> u64,
    rng: &mut impl RngCore,
) -> Result<Vec<Ciphertext>> {
    topology
        .children()
        .iter()
        .map(|child_ids| {
            let encs = child_ids
                .iter()
                .map(|&i| encrypt(pk, values(i), rng))
                .collect::<Result<Vec<_>>>()?;
            aggregate_level1(pk, &encs, rng)
        })
        .collect()
}

fn sink_decrypt_sum(
    pk: &BgnPublicKey,
    sk: &BgnPrivateKey,
    parts: &[Ciphertext],
    rng: &mut impl RngCore,
) -> Result<u64> {
    let total = aggregate_level1(pk, parts, rng)?;
    decrypt(pk, sk, &total, None)
}

pub fn run_pipeline_sum(
    topology: &Topology,
    pk: &BgnPublicKey,
    sk: &BgnPrivateKey,
    readings: &[u64],
    rng: &mut impl RngCore,
) -> Result<PipelineResult> {
    check_readings(topology, readings)?;
    let parts = encrypted_sums(pk, topology, |i| readings[i], rng)?;
    let decrypted = sink_decrypt_sum(pk, sk, &parts, rng)?;
    let truth: u128 = readings.iter().map(|&r| r as u128).sum();
    Ok(PipelineResult {
        kind: PipelineKind::Sum,
        truth: Rational { num: truth, den: 1 },
        decrypted: Rational {
            num: decrypted as u128,
            den: 1,
        },
    })
}

pub fn run_pipeline_mean(
    topology: &Topology,
    pk: &BgnPublicKey,
    sk: &BgnPrivateKey,
    readings: &[u64],
    rng: &mut impl RngCore,
) -> Result<PipelineResult> {
    check_readings(topology, readings)?;
    let sums = encrypted_sums(pk, topology, |i| readings[i], rng)?;
    let counts = encrypted_sums(pk, topology, |_| 1, rng)?;
    let sum = sink_decrypt_sum(pk, sk, &sums, rng)?;
    let count = sink_decrypt_sum(pk, sk, &counts, rng)?;
    let truth_sum: u128 = readings.iter().map(|&r| r as u128).sum();
    Ok(PipelineResult {
        kind: PipelineKind::Mean,
        truth: Rational {
            num: truth_sum,
            den: readings.len() as u128,
        },
        decrypted: Rational {
            num: sum as u128,
            den: count as u128,
        },
    })
}

pub fn run_pipeline_variance(
    topology: &Topology,
    pk: &BgnPublicKey,
    sk: &BgnPrivateKey,
    readings: &[u64],
    rng: &mut impl RngCore,
) -> Result<PipelineResult> {
    check_readings(topology, readings)?;
    // two parallel encrypted sums: values and their squares
    let sums = encrypted_sums(pk, topology, |i| readings[i], rng)?;
    let squares = encrypted_sums(pk, topology, |i| readings[i] * readings[i], rng)?;
    let counts = encrypted_sums(pk, topology, |_| 1, rng)?;
    let sx = sink_decrypt_sum(pk, sk, &sums, rng)? as u128;
    let vy = sink_decrypt_sum(pk, sk, &squares, rng)? as u128;
    let n = sink_decrypt_sum(pk, sk, &counts, rng)? as u128;
    // Var = (n*Vy - Sx^2) / n^2, exact
    let decrypted = Rational {
        num: n * vy - sx * sx,
        den: n * n,
    };
    let t_n = readings.len() as u128;
    let t_sx: u128 = readings.iter().map(|&r| r as u128).sum();
    let t_vy: u128 = readings.iter().map(|&r| (r as u128) * (r as u128)).sum();
    Ok(PipelineResult {
        kind: PipelineKind::Variance,
        truth: Rational {
            num: t_n * t_vy - t_sx * t_sx,
            den: t_n * t_n,
        },
        decrypted,
    })
}

pub fn run_pipeline_weighted_mean(
    topology: &Topology,
    pk: &BgnPublicKey,
    sk: &BgnPrivateKey,
    readings: &[u64],
    weights: &[u64],
    rng: &mut impl RngCore,
) -> Result<PipelineResult> {
    check_readings(topology, readings)?;
    if weights.len() != topology.aggregators.len() {
        return Err(Error::ReadingsMismatch(format!(
            "{} weights for {} aggregators",
            weights.len(),
            topology.aggregators.len()
        )));
    }
    let sums = encrypted_sums(pk, topology, |i| readings[i], rng)?;
    // each aggregator pairs its encrypted sub-sum with its encrypted
    // weight; the sink decrypts the level-2 products individually
    let product_bound = pk.message_bound.saturating_mul(pk.message_bound);
    let mut weighted_total: u128 = 0;
    for (sub_sum, &w) in sums.iter().zip(weights) {
        let cw = encrypt(pk, w, rng)?;
        let product = hom_mul(pk, sub_sum, &cw, rng)?;
        weighted_total += decrypt_product(pk, sk, &product, product_bound, None)? as u128;
    }
    let weight_encs = weights
        .iter()
        .map(|&w| encrypt(pk, w, rng))
        .collect::<Result<Vec<_>>>()?;
    let weight_sum = sink_decrypt_sum(pk, sk, &weight_encs, rng)? as u128;

    let children = topology.children();
    let truth_num: u128 = children
        .iter()
        .zip(weights)
        .map(|(ids, &w)| {
            let sub: u128 = ids.iter().map(|&i| readings[i] as u128).sum();
            sub * w as u128
        })
        .sum();
    let truth_den: u128 = weights.iter().map(|&w| w as u128).sum();
    Ok(PipelineResult {
        kind: PipelineKind::WeightedMean,
        truth: Rational {
            num: truth_num,
            den: truth_den,
        },
        decrypted: Rational {
            num: weighted_total,
            den: weight_sum,
        },
    })
}

/// Deterministic odd test modulus of exactly `bits` bits, derived from the
/// size alone so repeated runs agree.
pub fn rsa_test_modulus(bits: u64) -> BigUint {
    let mut rng = ChaCha20Rng::seed_from_u64(0x5253_4100 ^ bits);
    let mut m = rng.gen_biguint(bits);
    m.set_bit(bits - 1, true);
    m.set_bit(0, true);
    m
}

/// One modular exponentiation with a full-size exponent, timed for the
/// energy accounting.
pub fn rsa_baseline_encrypt(
    modulus_bits: u64,
    m: &BigUint,
    rng: &mut impl RngCore,
) -> (BigUint, f64) {
    let modulus = rsa_test_modulus(modulus_bits);
    let exponent = {
        let mut e = rand_from(rng).gen_biguint(modulus_bits);
        e.set_bit(modulus_bits - 1, true);
        e.set_bit(0, true);
        e
    };
    let start = Instant::now();
    let c = m.modpow(&exponent, &modulus);
    (c, start.elapsed().as_secs_f64())
}

// num-bigint's RandBigInt is implemented for sized Rngs; re-seed a
// concrete generator from the caller's stream
fn rand_from(rng: &mut impl RngCore) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(rng.next_u64())
}

/// Energy per unit time: E = kt with a single k shared by every scheme.
#[derive(Debug, Clone, Copy)]
pub struct EnergyModel {
    pub k: f64,
}

impl EnergyModel {
    /// k chosen so the supplied reference time (level-1 sensor
    /// encryption) costs 0.02 battery units.
    pub fn calibrated(reference_secs: f64) -> EnergyModel {
        EnergyModel {
            k: 0.02 / reference_secs.max(1e-12),
        }
    }

    pub fn energy(&self, secs: f64) -> f64 {
        self.k * secs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Sensor,
    Aggregator,
}

impl Role {
    pub fn name(&self) -> &'static str {
        match self {
            Role::Sensor => "sensor",
            Role::Aggregator => "aggregator",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReportRow {
    pub scheme: &'static str,
    pub level: u8,
    pub key_bits: u64,
    pub role: Role,
    pub energy_units: f64,
    pub battery_left: f64,
    pub msgs_per_s: f64,
    pub error: Option<String>,
}

/// Network-wide energy spent in one aggregation round, for the
/// per-round comparison curves.
#[derive(Debug, Clone)]
pub struct RoundEnergy {
    pub scheme: &'static str,
    pub level: u8,
    pub round: u32,
    pub network_energy: f64,
}

#[derive(Debug, Clone, Default)]
pub struct SimReport {
    pub rows: Vec<ReportRow>,
    pub series: Vec<RoundEnergy>,
}

impl SimReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("scheme,level,key_bits,role,energy_units,battery_left,msgs_per_s\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{:.6},{:.4},{:.3}\n",
                r.scheme, r.level, r.key_bits, r.role.name(), r.energy_units, r.battery_left,
                r.msgs_per_s
            ));
        }
        out
    }

    pub fn series_csv(&self) -> String {
        let mut out = String::from("scheme,level,round,network_energy\n");
        for s in &self.series {
            out.push_str(&format!(
                "{},{},{},{:.6}\n",
                s.scheme, s.level, s.round, s.network_energy
            ));
        }
        out
    }
}

fn median(samples: &mut [f64]) -> f64 {
    samples.sort_by(f64::total_cmp);
    samples[samples.len() / 2]
}

#[derive(Clone)]
struct LevelTimings {
    ec_key_bits: u64,
    ec_sensor: f64,
    ec_aggregator_op: f64,
    rsa_sensor: f64,
    rsa_aggregator_op: f64,
}

/// Measures the per-operation cost of one level: EC sensor = one
/// encryption, EC aggregator = one ciphertext addition; RSA sensor = one
/// baseline exponentiation, RSA aggregator = decrypt + re-encrypt per
/// message hop (two exponentiations).
fn measure_level(level: u8, trials: u32, rng: &mut ChaCha20Rng) -> Result<LevelTimings> {
    let tau = TAU_BY_LEVEL[level as usize - 1];
    let rsa_bits = RSA_BITS_BY_LEVEL[level as usize - 1];
    let (pk, _sk) = keygen(tau, rng)?;

    let mut enc_times = Vec::with_capacity(trials as usize);
    let mut add_times = Vec::with_capacity(trials as usize);
    let mut rsa_times = Vec::with_capacity(trials as usize);
    for _ in 0..trials {
        let m = rng.gen_range(0..=pk.message_bound.min(100));
        let start = Instant::now();
        let c1 = encrypt(&pk, m, rng)?;
        enc_times.push(start.elapsed().as_secs_f64());

        let c2 = encrypt(&pk, 1, rng)?;
        let start = Instant::now();
        let _ = hom_add(&pk, &c1, &c2, rng)?;
        add_times.push(start.elapsed().as_secs_f64());

        let plain = BigUint::from(m);
        let (_, elapsed) = rsa_baseline_encrypt(rsa_bits, &plain, rng);
        rsa_times.push(elapsed);
    }
    let rsa_sensor = median(&mut rsa_times);
    Ok(LevelTimings {
        ec_key_bits: pk.p.bits(),
        ec_sensor: median(&mut enc_times),
        ec_aggregator_op: median(&mut add_times),
        rsa_sensor,
        rsa_aggregator_op: 2.0 * rsa_sensor,
    })
}

pub const BENCH_SENSORS: usize = 50;
pub const BENCH_AGGREGATORS: usize = 5;
pub const BENCH_ROUNDS: u32 = 10;

/// Per-level benchmark: measures the per-operation costs, converts them to
/// energy via E = kt (k calibrated on the level-1 sensor time), then plays
/// a fixed number of aggregation rounds against node batteries.
pub fn run_benchmark(levels: &[u8], trials: u32, seed: u64) -> Result<SimReport> {
    assert!(trials >= 1);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);

    // calibration is always against level 1, whether or not it is in the set
    let calibration = measure_level(1, trials, &mut rng)?;
    let model = EnergyModel::calibrated(calibration.ec_sensor);

    let mut report = SimReport::default();
    for &level in levels {
        assert!((1..=4).contains(&level), "level must be 1..=4");
        let timings = if level == 1 {
            calibration.clone()
        } else {
            match measure_level(level, trials, &mut rng) {
                Ok(t) => t,
                Err(e) => {
                    report.rows.push(ReportRow {
                        scheme: "EC",
                        level,
                        key_bits: 0,
                        role: Role::Sensor,
                        energy_units: f64::NAN,
                        battery_left: f64::NAN,
                        msgs_per_s: f64::NAN,
                        error: Some(e.to_string()),
                    });
                    continue;
                }
            }
        };
        let rsa_bits = RSA_BITS_BY_LEVEL[level as usize - 1];
        let topology = build_topology(BENCH_SENSORS, BENCH_AGGREGATORS, seed ^ level as u64);
        for (scheme, sensor_secs, agg_secs, key_bits) in [
            ("EC", timings.ec_sensor, timings.ec_aggregator_op, timings.ec_key_bits),
            ("RSA", timings.rsa_sensor, timings.rsa_aggregator_op, rsa_bits),
        ] {
            let outcome = play_rounds(&topology, &model, sensor_secs, agg_secs, BENCH_ROUNDS);
            for (round, energy) in outcome.round_energy.iter().enumerate() {
                report.series.push(RoundEnergy {
                    scheme,
                    level,
                    round: round as u32 + 1,
                    network_energy: *energy,
                });
            }
            report.rows.push(ReportRow {
                scheme,
                level,
                key_bits,
                role: Role::Sensor,
                energy_units: model.energy(sensor_secs),
                battery_left: outcome.mean_sensor_battery,
                msgs_per_s: 1.0 / sensor_secs.max(1e-12),
                error: None,
            });
            report.rows.push(ReportRow {
                scheme,
                level,
                key_bits,
                role: Role::Aggregator,
                energy_units: model.energy(agg_secs),
                battery_left: outcome.mean_aggregator_battery,
                msgs_per_s: 1.0 / agg_secs.max(1e-12),
                error: None,
            });
        }
    }
    Ok(report)
}

struct RoundsOutcome {
    round_energy: Vec<f64>,
    mean_sensor_battery: f64,
    mean_aggregator_battery: f64,
}

/// Battery bookkeeping over a fixed number of rounds: every live sensor
/// pays one send, every aggregator pays one combine per live child; a
/// drained node stops emitting.
fn play_rounds(
    topology: &Topology,
    model: &EnergyModel,
    sensor_secs: f64,
    agg_secs: f64,
    rounds: u32,
) -> RoundsOutcome {
    let sensor_cost = model.energy(sensor_secs);
    let agg_cost = model.energy(agg_secs);
    let mut sensor_batteries: Vec<f64> = topology.sensors.iter().map(|s| s.battery).collect();
    let mut agg_batteries: Vec<f64> = topology.aggregators.iter().map(|a| a.battery).collect();
    let children = topology.children();
    let mut round_energy = Vec::with_capacity(rounds as usize);
    for _ in 0..rounds {
        let mut spent = 0.0;
        let mut live = vec![false; sensor_batteries.len()];
        for (i, b) in sensor_batteries.iter_mut().enumerate() {
            if *b >= sensor_cost {
                *b -= sensor_cost;
                spent += sensor_cost;
                live[i] = true;
            }
        }
        for (ai, child_ids) in children.iter().enumerate() {
            for &ci in child_ids {
                if live[ci] && agg_batteries[ai] >= agg_cost {
                    agg_batteries[ai] -= agg_cost;
                    spent += agg_cost;
                }
            }
        }
        round_energy.push(spent);
    }
    RoundsOutcome {
        round_energy,
        mean_sensor_battery: mean(&sensor_batteries),
        mean_aggregator_battery: mean(&agg_batteries),
    }
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bgn::keygen_with_primes;

    fn toy_keys() -> (BgnPublicKey, BgnPrivateKey) {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        keygen_with_primes(&BigUint::from(5u32), &BigUint::from(7u32), &mut rng).unwrap()
    }

    // big enough that realistic sums never wrap: q2 = 8191 > any test sum
    fn mid_keys() -> (BgnPublicKey, BgnPrivateKey) {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        keygen_with_primes(&BigUint::from(8191u32), &BigUint::from(8209u32), &mut rng).unwrap()
    }

    #[test]
    fn single_sensor_single_aggregator() {
        let t = build_topology(1, 1, 7);
        assert_eq!(t.sensors.len(), 1);
        assert_eq!(t.sensors[0].aggregator, t.aggregators[0].id);
        assert_eq!(t.sensors[0].battery, SENSOR_BATTERY);
        assert_eq!(t.aggregators[0].battery, AGGREGATOR_BATTERY);
    }

    #[test]
    fn topology_is_deterministic_and_nearest() {
        let a = build_topology(500, 50, 42);
        let b = build_topology(500, 50, 42);
        assert_eq!(a, b);
        // brute-force nearest-aggregator oracle
        for s in &a.sensors {
            let best = a
                .aggregators
                .iter()
                .map(|g| (squared_distance(&s.position, &g.position), g.id))
                .fold((f64::INFINITY, u32::MAX), |acc, cur| {
                    if cur.0 < acc.0 || (cur.0 == acc.0 && cur.1 < acc.1) {
                        cur
                    } else {
                        acc
                    }
                });
            assert_eq!(s.aggregator, best.1);
        }
    }

    #[test]
    fn topology_json_roundtrip_and_validation() {
        let t = build_topology(20, 3, 9);
        let back = Topology::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
        assert!(Topology::from_json("{").is_err());
        let mut bad = t.clone();
        bad.sensors[0].aggregator = 999;
        assert!(matches!(
            Topology::from_json(&bad.to_json()),
            Err(Error::MalformedTopology(_))
        ));
    }

    #[test]
    fn sum_pipeline_toy() {
        let (pk, sk) = toy_keys();
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let t = build_topology(3, 1, 5);
        let zero = run_pipeline_sum(&t, &pk, &sk, &[0, 0, 0], &mut rng).unwrap();
        assert_eq!(zero.decrypted, Rational { num: 0, den: 1 });
        let r = run_pipeline_sum(&t, &pk, &sk, &[1, 2, 3], &mut rng).unwrap();
        assert_eq!(r.truth, Rational { num: 6, den: 1 });
        assert_eq!(r.decrypted, r.truth);
    }

    #[test]
    fn sum_pipeline_fifty_ones() {
        let (pk, sk) = mid_keys();
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let t = build_topology(50, 5, 6);
        let r = run_pipeline_sum(&t, &pk, &sk, &vec![1; 50], &mut rng).unwrap();
        assert_eq!(r.decrypted, Rational { num: 50, den: 1 });
    }

    #[test]
    fn mean_pipeline() {
        let (pk, sk) = mid_keys();
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let t = build_topology(4, 2, 8);
        let r = run_pipeline_mean(&t, &pk, &sk, &[1, 2, 3, 6], &mut rng).unwrap();
        assert_eq!(r.decrypted, Rational { num: 12, den: 4 });
        let r = run_pipeline_mean(&t, &pk, &sk, &[4, 4, 4, 4], &mut rng).unwrap();
        assert_eq!(r.decrypted, Rational { num: 16, den: 4 });
    }

    #[test]
    fn variance_pipeline() {
        let (pk, sk) = mid_keys();
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let t = build_topology(2, 1, 11);
        let constant = run_pipeline_variance(&t, &pk, &sk, &[5, 5], &mut rng).unwrap();
        assert_eq!(constant.decrypted.num, 0);
        // readings {1,3}: mean 2, E[x^2] = 5, variance 1
        let r = run_pipeline_variance(&t, &pk, &sk, &[1, 3], &mut rng).unwrap();
        assert_eq!(r.decrypted, Rational { num: 4, den: 4 });
        assert_eq!(r.decrypted, r.truth);
        // readings {0,6}: variance 9
        let r = run_pipeline_variance(&t, &pk, &sk, &[0, 6], &mut rng).unwrap();
        assert_eq!(r.decrypted, Rational { num: 36, den: 4 });
    }

    #[test]
    fn weighted_mean_pipeline() {
        let (pk, sk) = mid_keys();
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        // two aggregators; construct readings so the sub-sums are known
        let t = build_topology(4, 2, 13);
        let children = t.children();
        let mut readings = vec![0u64; 4];
        // sub-sum 2 under the first aggregator, 3 under the second
        for (ai, ids) in children.iter().enumerate() {
            let target = if ai == 0 { 2 } else { 3 };
            if let Some(&first) = ids.first() {
                readings[first] = target;
            }
        }
        let has_both = children.iter().all(|ids| !ids.is_empty());
        if has_both {
            let r =
                run_pipeline_weighted_mean(&t, &pk, &sk, &readings, &[1, 2], &mut rng).unwrap();
            assert_eq!(r.decrypted, Rational { num: 8, den: 3 });
            assert_eq!(r.decrypted, r.truth);
        }
        // all-zero weights: undefined mean, den = 0
        let r = run_pipeline_weighted_mean(&t, &pk, &sk, &readings, &[0, 0], &mut rng).unwrap();
        assert_eq!(r.decrypted.num, 0);
        assert_eq!(r.decrypted.den, 0);
    }

    #[test]
    fn empty_aggregator_contributes_zero() {
        let (pk, sk) = mid_keys();
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        // one sensor, two aggregators: one aggregator has no children
        let mut t = build_topology(1, 2, 17);
        t.sensors[0].aggregator = t.aggregators[0].id;
        let r = run_pipeline_sum(&t, &pk, &sk, &[5], &mut rng).unwrap();
        assert_eq!(r.decrypted, Rational { num: 5, den: 1 });
    }

    #[test]
    fn overflow_propagates_dlog_not_found() {
        // q2 = 65537 exceeds the default bound clamp of 65535, so a sum of
        // exactly 65536 is representable in the group but outside the
        // search bound: the only case where overflow is detectable
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let (pk, sk) =
            keygen_with_primes(&BigUint::from(5u32), &BigUint::from(65537u32), &mut rng).unwrap();
        assert_eq!(pk.message_bound, 65535);
        let t = build_topology(3, 1, 19);
        let result = run_pipeline_sum(&t, &pk, &sk, &[65535, 1, 0], &mut rng);
        assert!(matches!(result, Err(Error::DlogNotFound)));
    }

    #[test]
    fn rsa_baseline_deterministic_and_monotone() {
        let m = BigUint::from(12345u32);
        let mut r1 = ChaCha20Rng::seed_from_u64(1);
        let mut r2 = ChaCha20Rng::seed_from_u64(1);
        let (c1, _) = rsa_baseline_encrypt(472, &m, &mut r1);
        let (c2, _) = rsa_baseline_encrypt(472, &m, &mut r2);
        assert_eq!(c1, c2);

        let (z, _) = rsa_baseline_encrypt(472, &BigUint::from(0u32), &mut r1);
        assert_eq!(z, BigUint::from(0u32));

        // median over a few samples to smooth scheduler noise
        let mut small = Vec::new();
        let mut large = Vec::new();
        for _ in 0..5 {
            small.push(rsa_baseline_encrypt(472, &m, &mut r1).1);
            large.push(rsa_baseline_encrypt(1891, &m, &mut r1).1);
        }
        assert!(median(&mut large) > median(&mut small));
    }

    #[test]
    fn benchmark_shape_and_battery_monotonicity() {
        let report = run_benchmark(&[1], 3, 99).unwrap();
        assert_eq!(report.rows.len(), 4); // EC/RSA x sensor/aggregator
        for row in &report.rows {
            assert!(row.energy_units >= 0.0);
            assert!(row.battery_left <= AGGREGATOR_BATTERY);
            assert!(row.error.is_none());
        }
        let csv = report.to_csv();
        assert!(csv.starts_with("scheme,level,key_bits,role,energy_units,battery_left,msgs_per_s"));
        assert_eq!(csv.lines().count(), 5);
        assert_eq!(report.series.len(), 2 * BENCH_ROUNDS as usize);
    }
}

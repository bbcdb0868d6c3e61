//! `sda`: command-line front end for key management, homomorphic
//! operations, the aggregation simulator/benchmark, and the watermark
//! workflows. All randomness flows from one 64-bit seed through named
//! sub-streams. Exit codes: 0 success, 2 usage error, 3 domain error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sda_core::aggregation::{
    build_topology, run_benchmark, run_pipeline_mean, run_pipeline_sum, run_pipeline_variance,
    run_pipeline_weighted_mean, PipelineResult,
};
use sda_core::bgn::{
    ciphertext_from_bytes, ciphertext_to_bytes, decrypt, decrypt_product, encrypt, hom_add,
    hom_mul, keygen, private_key_from_json, private_key_to_json, public_key_from_json,
    public_key_to_json,
};
use sda_core::numeric::{splitmix64, Fraction64};
use sda_core::watermark::{
    attack_gaussian, attack_jpeg, attack_rotation, attack_zeroing, embed_watermark,
    extract_similarity, load_pgm, save_pgm, significance_split, CiisParams, SensorGrid,
    WatermarkMode, DEFAULT_LSC_THRESHOLD, DEFAULT_MSC_THRESHOLD, DEFAULT_PLCM_P,
};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "sda", version, about = "Secure data aggregation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a key pair.
    Keygen {
        /// Bit size of each prime factor.
        #[arg(long, default_value_t = 12)]
        tau: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "pub.json")]
        out_pub: PathBuf,
        #[arg(long, default_value = "priv.json")]
        out_priv: PathBuf,
    },
    /// Encrypt one value to a level-1 ciphertext file.
    Encrypt {
        #[arg(long, default_value = "pub.json")]
        pub_key: PathBuf,
        #[arg(long)]
        value: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "ct.bin")]
        out: PathBuf,
    },
    /// Decrypt a ciphertext file and print the plaintext.
    Decrypt {
        #[arg(long, default_value = "pub.json")]
        pub_key: PathBuf,
        #[arg(long, default_value = "priv.json")]
        priv_key: PathBuf,
        #[arg(long, default_value = "ct.bin")]
        input: PathBuf,
        /// Search bound for level-2 ciphertexts (defaults to the squared
        /// message bound).
        #[arg(long)]
        bound: Option<u64>,
    },
    /// Homomorphic addition of two level-1 ciphertext files.
    Add {
        #[arg(long, default_value = "pub.json")]
        pub_key: PathBuf,
        #[arg(long)]
        lhs: PathBuf,
        #[arg(long)]
        rhs: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "ct.bin")]
        out: PathBuf,
    },
    /// Homomorphic multiplication; produces a level-2 ciphertext file.
    Mul {
        #[arg(long, default_value = "pub.json")]
        pub_key: PathBuf,
        #[arg(long)]
        lhs: PathBuf,
        #[arg(long)]
        rhs: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "ct.bin")]
        out: PathBuf,
    },
    /// Run one encrypted aggregation pipeline over a random topology.
    Simulate {
        #[arg(long, default_value_t = 500)]
        sensors: usize,
        #[arg(long, default_value_t = 50)]
        aggregators: usize,
        #[arg(long, value_enum, default_value_t = Pipeline::Sum)]
        pipeline: Pipeline,
        /// Prime size for the internally generated key.
        #[arg(long, default_value_t = 14)]
        tau: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Also dump the generated topology as JSON.
        #[arg(long)]
        topology_out: Option<PathBuf>,
    },
    /// Energy benchmark against the RSA baseline.
    Bench {
        /// Security levels, e.g. `1-4` or `2,3`.
        #[arg(long, default_value = "1-4")]
        levels: String,
        #[arg(long, default_value_t = 20)]
        trials: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "bench.csv")]
        report: PathBuf,
        /// Optional per-round network-energy series CSV.
        #[arg(long)]
        series: Option<PathBuf>,
    },
    /// Watermark workflows.
    #[command(subcommand)]
    Wm(WmCommand),
}

#[derive(Subcommand)]
enum WmCommand {
    /// Embed a watermark into a PGM grid.
    Embed(WmEmbedArgs),
    /// Check a watermark and print the similarity percentage.
    Check(WmEmbedArgs),
    /// Apply an attack to a PGM grid.
    Attack {
        #[arg(long, value_name = "F.pgm")]
        input: PathBuf,
        #[arg(long, value_name = "F.pgm")]
        out: PathBuf,
        #[arg(long, value_enum)]
        r#type: AttackType,
        /// Block size (zero), angle in degrees (rotate), sigma (noise),
        /// or quantization level (jpeg).
        #[arg(long)]
        param: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct WmEmbedArgs {
    #[arg(long, value_name = "F.pgm")]
    input: PathBuf,
    /// Output path (embed only).
    #[arg(long, value_name = "F.pgm")]
    out: Option<PathBuf>,
    /// 64-bit embedding key.
    #[arg(long)]
    key: u64,
    #[arg(long, value_enum, default_value_t = Mode::Auth)]
    mode: Mode,
    /// PLCM control parameter in (0, 1/2).
    #[arg(long, default_value_t = DEFAULT_PLCM_P)]
    p: f64,
    /// Chaotic iterations; defaults to the LSC count.
    #[arg(long)]
    iterations: Option<usize>,
    /// Watermark file of '0'/'1' characters; defaults to a 64-bit
    /// key-derived sequence.
    #[arg(long)]
    watermark: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Pipeline {
    Sum,
    Mean,
    Variance,
    Wmean,
}

impl Pipeline {
    fn name(self) -> &'static str {
        match self {
            Pipeline::Sum => "sum",
            Pipeline::Mean => "mean",
            Pipeline::Variance => "variance",
            Pipeline::Wmean => "wmean",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Auth,
    Robust,
}

#[derive(Clone, Copy, ValueEnum)]
enum AttackType {
    Zero,
    Rotate,
    Noise,
    Jpeg,
}

/// Named sub-stream of the run seed, so each component's randomness can
/// be reproduced in isolation.
fn substream(seed: u64, name: &str) -> u64 {
    name.bytes().fold(splitmix64(seed), |acc, b| splitmix64(acc ^ b as u64))
}

fn rng_for(seed: u64, name: &str) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(substream(seed, name))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sda: {e}");
            ExitCode::from(3)
        }
    }
}

fn run(command: Command) -> sda_core::Result<()> {
    match command {
        Command::Keygen {
            tau,
            seed,
            out_pub,
            out_priv,
        } => {
            let mut rng = rng_for(seed, "keygen");
            let (pk, sk) = keygen(tau, &mut rng)?;
            fs::write(&out_pub, public_key_to_json(&pk))?;
            fs::write(&out_priv, private_key_to_json(&sk))?;
            println!("wrote {} and {}", out_pub.display(), out_priv.display());
            Ok(())
        }
        Command::Encrypt {
            pub_key,
            value,
            seed,
            out,
        } => {
            let pk = public_key_from_json(&fs::read_to_string(pub_key)?)?;
            let mut rng = rng_for(seed, "encrypt");
            let c = encrypt(&pk, value, &mut rng)?;
            fs::write(&out, ciphertext_to_bytes(&c))?;
            println!("wrote {}", out.display());
            Ok(())
        }
        Command::Decrypt {
            pub_key,
            priv_key,
            input,
            bound,
        } => {
            let pk = public_key_from_json(&fs::read_to_string(pub_key)?)?;
            let sk = private_key_from_json(&fs::read_to_string(priv_key)?)?;
            let c = ciphertext_from_bytes(&fs::read(input)?, &pk)?;
            let value = match c.level() {
                1 => decrypt(&pk, &sk, &c, None)?,
                _ => {
                    let bound =
                        bound.unwrap_or_else(|| pk.message_bound.saturating_mul(pk.message_bound));
                    decrypt_product(&pk, &sk, &c, bound, None)?
                }
            };
            println!("{value}");
            Ok(())
        }
        Command::Add {
            pub_key,
            lhs,
            rhs,
            seed,
            out,
        } => {
            let pk = public_key_from_json(&fs::read_to_string(pub_key)?)?;
            let a = ciphertext_from_bytes(&fs::read(lhs)?, &pk)?;
            let b = ciphertext_from_bytes(&fs::read(rhs)?, &pk)?;
            let mut rng = rng_for(seed, "add");
            let c = hom_add(&pk, &a, &b, &mut rng)?;
            fs::write(&out, ciphertext_to_bytes(&c))?;
            println!("wrote {}", out.display());
            Ok(())
        }
        Command::Mul {
            pub_key,
            lhs,
            rhs,
            seed,
            out,
        } => {
            let pk = public_key_from_json(&fs::read_to_string(pub_key)?)?;
            let a = ciphertext_from_bytes(&fs::read(lhs)?, &pk)?;
            let b = ciphertext_from_bytes(&fs::read(rhs)?, &pk)?;
            let mut rng = rng_for(seed, "mul");
            let c = hom_mul(&pk, &a, &b, &mut rng)?;
            fs::write(&out, ciphertext_to_bytes(&c))?;
            println!("wrote {}", out.display());
            Ok(())
        }
        Command::Simulate {
            sensors,
            aggregators,
            pipeline,
            tau,
            seed,
            report,
            topology_out,
        } => simulate(sensors, aggregators, pipeline, tau, seed, report, topology_out),
        Command::Bench {
            levels,
            trials,
            seed,
            report,
            series,
        } => bench(&levels, trials, seed, &report, series.as_deref()),
        Command::Wm(wm) => run_wm(wm),
    }
}

fn simulate(
    sensors: usize,
    aggregators: usize,
    pipeline: Pipeline,
    tau: u64,
    seed: u64,
    report: Option<PathBuf>,
    topology_out: Option<PathBuf>,
) -> sda_core::Result<()> {
    let mut key_rng = rng_for(seed, "keygen");
    let (pk, sk) = keygen(tau, &mut key_rng)?;
    let topology = build_topology(sensors, aggregators, substream(seed, "topology"));
    if let Some(path) = &topology_out {
        fs::write(path, topology.to_json())?;
    }

    // per-sensor readings small enough that 500-node sums stay in range
    let mut reading_rng = rng_for(seed, "readings");
    use rand::Rng;
    let readings: Vec<u64> = (0..sensors).map(|_| reading_rng.gen_range(0..=3)).collect();
    let mut weight_rng = rng_for(seed, "weights");
    let weights: Vec<u64> = (0..aggregators).map(|_| weight_rng.gen_range(1..=3)).collect();

    let mut rng = rng_for(seed, "pipeline");
    let result: PipelineResult = match pipeline {
        Pipeline::Sum => run_pipeline_sum(&topology, &pk, &sk, &readings, &mut rng)?,
        Pipeline::Mean => run_pipeline_mean(&topology, &pk, &sk, &readings, &mut rng)?,
        Pipeline::Variance => run_pipeline_variance(&topology, &pk, &sk, &readings, &mut rng)?,
        Pipeline::Wmean => {
            run_pipeline_weighted_mean(&topology, &pk, &sk, &readings, &weights, &mut rng)?
        }
    };

    let matches = result.truth == result.decrypted;
    let mut csv = format!(
        "# sda {VERSION} | simulate --sensors {sensors} --aggregators {aggregators} \
         --pipeline {} --tau {tau} --seed {seed}\n",
        pipeline.name()
    );
    csv.push_str("pipeline,sensors,aggregators,truth_num,truth_den,decrypted_num,decrypted_den,match\n");
    csv.push_str(&format!(
        "{},{},{},{},{},{},{},{}\n",
        pipeline.name(),
        sensors,
        aggregators,
        result.truth.num,
        result.truth.den,
        result.decrypted.num,
        result.decrypted.den,
        matches
    ));
    if let Some(path) = &report {
        fs::write(path, &csv)?;
    }
    print!("{csv}");
    Ok(())
}

fn parse_levels(spec: &str) -> Vec<u8> {
    let mut levels = Vec::new();
    for part in spec.split(',') {
        if let Some((a, b)) = part.split_once('-') {
            let (a, b): (u8, u8) = (a.trim().parse().unwrap_or(1), b.trim().parse().unwrap_or(4));
            levels.extend(a..=b.min(4));
        } else if let Ok(v) = part.trim().parse::<u8>() {
            levels.push(v);
        }
    }
    levels.retain(|l| (1..=4).contains(l));
    levels.dedup();
    levels
}

fn bench(
    levels: &str,
    trials: u32,
    seed: u64,
    report: &Path,
    series: Option<&Path>,
) -> sda_core::Result<()> {
    let levels = parse_levels(levels);
    let sim = run_benchmark(&levels, trials, substream(seed, "bench"))?;
    let header = format!(
        "# sda {VERSION} | bench --levels {} --trials {trials} --seed {seed}\n",
        levels.iter().map(u8::to_string).collect::<Vec<_>>().join(",")
    );
    fs::write(report, header.clone() + &sim.to_csv())?;
    if let Some(path) = series {
        fs::write(path, header + &sim.series_csv())?;
    }
    println!("wrote {}", report.display());
    Ok(())
}

fn wm_params(args: &WmEmbedArgs, grid: &SensorGrid) -> CiisParams {
    assert!(args.p > 0.0 && args.p < 0.5, "p must lie in (0, 1/2)");
    CiisParams {
        key: Fraction64::from_bits(splitmix64(args.key) & ((1 << 62) - 1)),
        p: Fraction64::from_f64(args.p),
        iterations: args.iterations.unwrap_or(grid.bit_len() / 2),
        mode: match args.mode {
            Mode::Auth => WatermarkMode::Authentication,
            Mode::Robust => WatermarkMode::Unauthentication,
        },
    }
}

fn wm_bits(args: &WmEmbedArgs) -> sda_core::Result<Vec<bool>> {
    match &args.watermark {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            let bits: Vec<bool> = text
                .chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| c == '1')
                .collect();
            if bits.is_empty() {
                return Err(sda_core::Error::MalformedPgm(
                    "empty watermark file".into(),
                ));
            }
            Ok(bits)
        }
        None => {
            // default 64-bit watermark from the key stream
            let word = splitmix64(splitmix64(args.key ^ 0x77_6d)); // "wm"
            Ok((0..64).map(|i| (word >> i) & 1 == 1).collect())
        }
    }
}

fn run_wm(command: WmCommand) -> sda_core::Result<()> {
    match command {
        WmCommand::Embed(args) => {
            let grid = load_pgm(&fs::read(&args.input)?)?;
            let split = significance_split(&grid, DEFAULT_MSC_THRESHOLD, DEFAULT_LSC_THRESHOLD)?;
            let params = wm_params(&args, &grid);
            let bits = wm_bits(&args)?;
            let marked = embed_watermark(&grid, &params, &split, &bits);
            let out = args.out.clone().unwrap_or_else(|| args.input.clone());
            fs::write(&out, save_pgm(&marked))?;
            println!("wrote {}", out.display());
            Ok(())
        }
        WmCommand::Check(args) => {
            let grid = load_pgm(&fs::read(&args.input)?)?;
            let split = significance_split(&grid, DEFAULT_MSC_THRESHOLD, DEFAULT_LSC_THRESHOLD)?;
            let params = wm_params(&args, &grid);
            let bits = wm_bits(&args)?;
            println!("{:.2}", extract_similarity(&grid, &params, &split, &bits));
            Ok(())
        }
        WmCommand::Attack {
            input,
            out,
            r#type,
            param,
            seed,
        } => {
            let grid = load_pgm(&fs::read(&input)?)?;
            let attacked = match r#type {
                AttackType::Zero => attack_zeroing(&grid, param as usize),
                AttackType::Rotate => attack_rotation(&grid, param),
                AttackType::Noise => attack_gaussian(&grid, param, substream(seed, "noise")),
                AttackType::Jpeg => attack_jpeg(&grid, param),
            };
            fs::write(&out, save_pgm(&attacked))?;
            println!("wrote {}", out.display());
            Ok(())
        }
    }
}

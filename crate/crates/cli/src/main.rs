//! `mixpul` command line: train and evaluate PU models, simulate PU splits,
//! and run the ablation / sweep suites. All runs are seeded; every trained
//! model is written with a manifest that replays it bit-exactly.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use mixpul::config::TrainConfig;
use mixpul::data::{load_dataset, make_pu, DataSource};
use mixpul::error::{Error, Result};
use mixpul::eval::{auc, error_rate};
use mixpul::experiment::{
    class_frequency_sweep, margin_ablation, mixup_ablation, pi_misspecification_sweep,
    rn_ablation, run_single, sweep_csv, Method, SweepPoint,
};
use mixpul::nn::{load_checkpoint, save_checkpoint};
use mixpul::rn::RnMethod;

#[derive(Parser)]
#[command(name = "mixpul", about = "Positive-unlabeled learning toolkit", version)]
struct Cli {
    /// Directory holding the bundled datasets.
    #[arg(long, global = true, default_value = "data")]
    data_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Mixpul,
    Upu,
    Nnpu,
    Supervised,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Mixpul => Method::Mixpul,
            MethodArg::Upu => Method::Upu,
            MethodArg::Nnpu => Method::Nnpu,
            MethodArg::Supervised => Method::Supervised,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AblateSuite {
    RnMethods,
    Mixup,
    Margin,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepSuite {
    ClassFrequency,
    PiMultiplier,
}

#[derive(Subcommand)]
enum Command {
    /// Train one model on a PU problem simulated from a dataset.
    Train {
        /// Registered name (titanic, spambase, krvskp, mnist-<p>v<n>) or CSV path.
        #[arg(long)]
        dataset: String,
        #[arg(long, value_enum, default_value = "mixpul")]
        method: MethodArg,
        /// Flat key-value config file; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Label column for CSV datasets.
        #[arg(long, default_value = "target")]
        label_column: String,
        /// Output directory for report.csv, manifest.json, model.ckpt.
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a dataset's test split with a saved checkpoint.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        dataset: String,
        #[arg(long, default_value = "target")]
        label_column: String,
        /// Split seed; must match the training run to score the same split.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Construct a PU split and write its manifest.
    Simulate {
        #[arg(long)]
        dataset: String,
        #[arg(long)]
        class_frequency: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "target")]
        label_column: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an ablation suite and write its plot-data CSV.
    Ablate {
        #[arg(long, value_enum)]
        suite: AblateSuite,
        #[arg(long)]
        dataset: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        repeats: usize,
        #[arg(long, default_value = "target")]
        label_column: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweep a parameter and write its plot-data CSV.
    Sweep {
        #[arg(long, value_enum)]
        suite: SweepSuite,
        /// Comma-separated values, e.g. 0.01,0.05,0.1,0.2,0.4.
        #[arg(long)]
        values: String,
        #[arg(long)]
        dataset: String,
        #[arg(long, value_enum, default_value = "mixpul")]
        method: MethodArg,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        repeats: usize,
        #[arg(long, default_value = "target")]
        label_column: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_config(path: &Option<PathBuf>) -> Result<TrainConfig> {
    match path {
        Some(p) => TrainConfig::from_path(p),
        None => Ok(TrainConfig::default()),
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn parse_values(values: &str) -> Result<Vec<f64>> {
    values
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|e| Error::InvalidArgument(format!("bad sweep value `{v}`: {e}")))
        })
        .collect()
}

fn write_sweep(points: &[SweepPoint], out: &Path, name: &str) -> Result<()> {
    ensure_dir(out)?;
    let path = out.join(format!("{name}.csv"));
    let csv = sweep_csv(points);
    write(&path, &csv)?;
    print!("{csv}");
    println!("wrote {}", path.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let data_dir = cli.data_dir;
    match cli.command {
        Command::Train {
            dataset,
            method,
            config,
            seed,
            label_column,
            out,
        } => {
            let mut config = load_config(&config)?;
            if let Some(seed) = seed {
                config.seed = seed;
            }
            let source = DataSource::parse(&dataset, &label_column);
            let run = run_single(&source, method.into(), &config, &data_dir)?;
            ensure_dir(&out)?;
            run.report.write_csv(&out.join("report.csv"))?;
            write(&out.join("manifest.json"), &run.manifest.to_json()?)?;
            save_checkpoint(&run.model, &out.join("model.ckpt"))?;
            if let Some(reason) = &run.report.diverged {
                println!("diverged: {reason}");
            }
            let f = run.final_record;
            println!(
                "epoch={} test_auc={:.4} test_error={:.4} out={}",
                f.epoch,
                f.test_auc,
                f.test_error,
                out.display()
            );
        }
        Command::Eval {
            model,
            dataset,
            label_column,
            seed,
            out,
        } => {
            let model = load_checkpoint(&model)?;
            let source = DataSource::parse(&dataset, &label_column);
            let (_, test) = load_dataset(&source, &data_dir, seed)?;
            let scores = model.forward(&test.features)?;
            let mut csv = String::from("index,score,label\n");
            for (i, (s, l)) in scores.iter().zip(&test.labels).enumerate() {
                csv.push_str(&format!("{i},{s},{l}\n"));
            }
            write(&out, &csv)?;
            println!(
                "n={} test_auc={:.4} test_error={:.4}",
                test.len(),
                auc(&scores, &test.labels)?,
                error_rate(&scores, &test.labels, 0.5)?
            );
        }
        Command::Simulate {
            dataset,
            class_frequency,
            seed,
            label_column,
            out,
        } => {
            let source = DataSource::parse(&dataset, &label_column);
            let (train, _) = load_dataset(&source, &data_dir, seed)?;
            let (pu, manifest) = make_pu(&train, class_frequency, seed)?;
            write(&out, &serde_json_string(&manifest)?)?;
            println!(
                "labeled={} unlabeled={} class_prior={:.4} class_frequency={:.4}",
                pu.positive_indices().len(),
                pu.unlabeled_indices().len(),
                pu.class_prior(),
                pu.class_frequency()
            );
        }
        Command::Ablate {
            suite,
            dataset,
            config,
            repeats,
            label_column,
            out,
        } => {
            let base = load_config(&config)?;
            let source = DataSource::parse(&dataset, &label_column);
            let (points, name) = match suite {
                AblateSuite::RnMethods => (
                    rn_ablation(
                        &source,
                        &base,
                        &[RnMethod::Rand, RnMethod::Dist, RnMethod::Ntc],
                        &[5, 25, 50, 100],
                        repeats,
                        &data_dir,
                    )?,
                    "rn-methods",
                ),
                AblateSuite::Mixup => {
                    (mixup_ablation(&source, &base, repeats, &data_dir)?, "mixup")
                }
                AblateSuite::Margin => {
                    (margin_ablation(&source, &base, repeats, &data_dir)?, "margin")
                }
            };
            write_sweep(&points, &out, name)?;
        }
        Command::Sweep {
            suite,
            values,
            dataset,
            method,
            config,
            repeats,
            label_column,
            out,
        } => {
            let base = load_config(&config)?;
            let source = DataSource::parse(&dataset, &label_column);
            let values = parse_values(&values)?;
            let (points, name) = match suite {
                SweepSuite::ClassFrequency => (
                    class_frequency_sweep(
                        &source,
                        method.into(),
                        &base,
                        &values,
                        repeats,
                        &data_dir,
                    )?,
                    "class-frequency",
                ),
                SweepSuite::PiMultiplier => (
                    pi_misspecification_sweep(
                        &source,
                        method.into(),
                        &base,
                        &values,
                        repeats,
                        &data_dir,
                    )?,
                    "pi-multiplier",
                ),
            };
            write_sweep(&points, &out, name)?;
        }
    }
    Ok(())
}

fn serde_json_string<T: serde::Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Config(e.to_string()))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

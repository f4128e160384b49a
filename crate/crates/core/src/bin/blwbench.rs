//! Command-line entry point: synthesize, ingest, contaminate, detect,
//! denoise, evaluate, and benchmark.

use blwbench::bench::{emit_report, run_experiment, ExperimentSpec, ReportFormat};
use blwbench::denoise::{denoise, Method, MethodConfig};
use blwbench::error::Error;
use blwbench::generators::{
    contaminate, synth_ecg, synth_sine_blw, ContaminationSpec, EcgSynthSpec, Morphology,
};
use blwbench::ingest::{read_csv, read_wfdb, take_prefix, write_csv};
use blwbench::metrics::{mad, prd, ssd};
use blwbench::qrs::{detect_r_peaks, BeatAnnotations};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "blwbench",
    version,
    about = "Baseline-wander removal methods for ECG signals and a benchmark harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// High-pass cutoff frequency in Hz.
    #[arg(long)]
    cutoff: Option<f64>,
    /// Load method configuration from a key = value file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one configuration key (repeatable), e.g. --set iir_order=2.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl ConfigArgs {
    fn build(&self, seed: u64) -> Result<MethodConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => MethodConfig::from_kv_text(&std::fs::read_to_string(path)?)?,
            None => MethodConfig::default(),
        };
        cfg.ica_seed = seed;
        if let Some(c) = self.cutoff {
            cfg.cutoff_hz = c;
        }
        for kv in &self.set {
            let (k, v) = kv.split_once('=').ok_or_else(|| {
                Error::InvalidParameter(format!("--set expects KEY=VALUE, got {kv:?}"))
            })?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize an artificial ECG and write it as CSV.
    Synth {
        /// Heart rate, beats per minute.
        #[arg(long, default_value_t = 120.0)]
        hr: f64,
        /// Sampling rate, Hz.
        #[arg(long, default_value_t = 360.0)]
        fs: f64,
        /// Duration, seconds.
        #[arg(long, default_value_t = 300.0)]
        duration: f64,
        /// Fractional RR-interval jitter.
        #[arg(long, default_value_t = 0.0)]
        rr_jitter: f64,
        /// Morphology file overriding the built-in event table.
        #[arg(long)]
        morphology: Option<PathBuf>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a sinusoidal baseline-wander signal as CSV.
    Blw {
        /// Sine frequency, Hz.
        #[arg(long, default_value_t = 0.60)]
        freq: f64,
        #[arg(long, default_value_t = 360.0)]
        fs: f64,
        #[arg(long, default_value_t = 300.0)]
        duration: f64,
        #[arg(long, default_value_t = 1.0)]
        amplitude: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Read one channel of a WFDB record and write it as CSV.
    Ingest {
        /// Path to the header (.hea) file.
        #[arg(long)]
        header: PathBuf,
        #[arg(long, default_value_t = 0)]
        channel: usize,
        /// Keep only the first SECONDS of the record.
        #[arg(long)]
        take_s: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Mix noise into a clean signal, normalized to a target MAD.
    Contaminate {
        /// Clean signal CSV.
        #[arg(long)]
        clean: PathBuf,
        /// Noise signal CSV (resampled to the clean rate if needed).
        #[arg(long)]
        noise: PathBuf,
        /// Sampling rate of the clean CSV, Hz.
        #[arg(long)]
        fs: f64,
        /// Sampling rate of the noise CSV; defaults to --fs.
        #[arg(long)]
        noise_fs: Option<f64>,
        #[arg(long, default_value_t = 0.5)]
        target_mad: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Detect R peaks and write one sample index per line.
    Detect {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        fs: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Apply one baseline-wander removal method to a CSV signal.
    Denoise {
        /// One of: splines, fir, iir, af, maf, ica, issm, emd, wt.
        #[arg(long)]
        method: String,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        fs: f64,
        /// Beat annotation CSV (from `detect`); detected on the input when
        /// omitted and the method needs one.
        #[arg(long)]
        ann: Option<PathBuf>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print MAD, SSD and PRD between a reference and a test signal.
    Evaluate {
        /// Reference (clean) CSV.
        #[arg(long = "ref")]
        reference: PathBuf,
        /// Signal under test.
        #[arg(long = "test")]
        test: PathBuf,
        #[arg(long)]
        fs: f64,
    },
    /// Run a full experiment spec and write reports.
    Bench {
        /// Experiment spec JSON.
        #[arg(long)]
        spec: PathBuf,
        /// Output directory for the report files.
        #[arg(long, default_value = "results")]
        out: PathBuf,
        /// Parallel (method x record) cells.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Comma-separated list of report formats.
        #[arg(long, default_value = "json,csv,markdown")]
        format: String,
        /// Also write per-method worst-segment trace CSVs.
        #[arg(long)]
        plot_data: bool,
    },
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Synth {
            hr,
            fs,
            duration,
            rr_jitter,
            morphology,
            seed,
            out,
        } => {
            let mut spec = EcgSynthSpec::new(hr, fs, duration);
            spec.rr_jitter = rr_jitter;
            spec.seed = seed;
            if let Some(path) = morphology {
                spec.morphology = Morphology::from_file(&path)?;
            }
            let signal = synth_ecg(&spec)?;
            write_csv(&signal, &out)?;
            println!(
                "synth: hr={hr} fs={fs} duration={duration}s samples={} -> {}",
                signal.len(),
                out.display()
            );
        }
        Command::Blw {
            freq,
            fs,
            duration,
            amplitude,
            out,
        } => {
            let signal = synth_sine_blw(freq, fs, duration, amplitude)?;
            write_csv(&signal, &out)?;
            println!(
                "blw: freq={freq}Hz fs={fs} samples={} -> {}",
                signal.len(),
                out.display()
            );
        }
        Command::Ingest {
            header,
            channel,
            take_s,
            out,
        } => {
            let mut signal = read_wfdb(&header, channel)?;
            if let Some(seconds) = take_s {
                signal = take_prefix(&signal, seconds)?;
            }
            write_csv(&signal, &out)?;
            println!(
                "ingest: {} channel={channel} fs={} samples={} -> {}",
                signal.label(),
                signal.fs(),
                signal.len(),
                out.display()
            );
        }
        Command::Contaminate {
            clean,
            noise,
            fs,
            noise_fs,
            target_mad,
            out,
        } => {
            let clean_sig = read_csv(&clean, fs)?;
            let noise_sig = read_csv(&noise, noise_fs.unwrap_or(fs))?;
            let noise_sig = blwbench::signal::resample(&noise_sig, fs)?;
            let spec = ContaminationSpec {
                target_mad,
                sine_freq: None,
            };
            let (noisy, scale) = contaminate(&clean_sig, &noise_sig, &spec)?;
            write_csv(&noisy, &out)?;
            println!(
                "contaminate: target_mad={target_mad} scale={scale:.6e} -> {}",
                out.display()
            );
        }
        Command::Detect { input, fs, out } => {
            let signal = read_csv(&input, fs)?;
            let ann = detect_r_peaks(&signal)?;
            ann.write_csv(&out)?;
            println!(
                "detect: beats={} mean_rr={:.3}s -> {}",
                ann.len(),
                ann.mean_rr_seconds().unwrap_or(f64::NAN),
                out.display()
            );
        }
        Command::Denoise {
            method,
            input,
            fs,
            ann,
            seed,
            config,
            out,
        } => {
            let method = Method::from_str(&method)?;
            let cfg = config.build(seed)?;
            let signal = read_csv(&input, fs)?;
            let annotations = match &ann {
                Some(path) => Some(BeatAnnotations::read_csv(path, fs)?),
                None if method.needs_annotations() => Some(detect_r_peaks(&signal)?),
                None => None,
            };
            let output = denoise(method, &signal, &cfg, annotations.as_ref())?;
            write_csv(&output, &out)?;
            println!(
                "denoise: method={method} in={} samples={} -> {}",
                input.display(),
                output.len(),
                out.display()
            );
        }
        Command::Evaluate {
            reference,
            test,
            fs,
        } => {
            let r = read_csv(&reference, fs)?;
            let t = read_csv(&test, fs)?;
            let (m, s) = (mad(&r, &t)?, ssd(&r, &t)?);
            let p = prd(&r, &t)?;
            println!("MAD={m:.6} SSD={s:.6} PRD={p:.6}%");
        }
        Command::Bench {
            spec,
            out,
            jobs,
            format,
            plot_data,
        } => {
            let (experiment, base_dir) = ExperimentSpec::load(&spec)?;
            let formats = format
                .split(',')
                .map(|f| ReportFormat::from_str(f.trim()))
                .collect::<Result<Vec<_>, _>>()?;
            let result = run_experiment(&experiment, &base_dir, jobs)?;
            let files = emit_report(&result, &formats, plot_data, &out)?;
            print_rank_table(&result);
            for r in &result.methods {
                if let Some(err) = &r.error {
                    eprintln!("warning: {} failed: {err}", r.method);
                }
            }
            println!(
                "bench: {} methods x {} records, determinism_hash={} -> {}",
                result.methods.len(),
                result.records.len(),
                &result.provenance.determinism_hash[..16],
                files
                    .iter()
                    .map(|p| p.display().to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            );
        }
    }
    Ok(())
}

fn print_rank_table(result: &blwbench::bench::BenchResult) {
    print!("{:<10}", "method");
    for m in &result.metrics_ranked {
        print!("{:>14}", m.to_uppercase());
    }
    for m in &result.metrics_ranked {
        print!("{:>7}", format!("{}°", m.to_uppercase()));
    }
    println!();
    for r in &result.methods {
        print!("{:<10}", r.method.to_string());
        for m in &result.metrics_ranked {
            match &r.metrics {
                Some(t) => {
                    let v = match m.as_str() {
                        "mad" => t.mad,
                        "ssd" => t.ssd,
                        _ => t.prd,
                    };
                    print!("{v:>14.2}");
                }
                None => print!("{:>14}", "error"),
            }
        }
        for m in &result.metrics_ranked {
            print!(
                "{:>7}",
                format!("{}°", r.ranks.get(m).copied().unwrap_or(0))
            );
        }
        println!();
    }
}

/// 1 = user error (bad input, bad files, bad flags), 2 = internal failure.
fn classify(err: &Error) -> u8 {
    match err {
        Error::UnstableFilter
        | Error::RankDeficient(_)
        | Error::Decomposition(_)
        | Error::ZeroVariance => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(classify(&e))
        }
    }
}

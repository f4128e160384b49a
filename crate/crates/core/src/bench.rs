//! Experiment driver: build the contaminated inputs, run every method,
//! compute metric triples and rank orders, locate worst-distortion
//! segments, and emit machine- and human-readable reports.

use crate::denoise::{denoise, Method, MethodConfig};
use crate::error::{Error, Result};
use crate::generators::{contaminate, synth_ecg, synth_sine_blw, ContaminationSpec, EcgSynthSpec};
use crate::ingest::{read_csv, read_wfdb, take_prefix};
use crate::metrics::MetricTriple;
use crate::qrs::detect_r_peaks;
use crate::signal::{extract_window, resample, SegmentRef, Signal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

/// On-disk record reference used by experiment specs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordRef {
    pub path: String,
    #[serde(default)]
    pub format: RecordFormat,
    #[serde(default)]
    pub channel: usize,
    /// Sampling rate; required for CSV, ignored for WFDB.
    #[serde(default)]
    pub fs: Option<f64>,
    /// Keep only the first `take_s` seconds.
    #[serde(default)]
    pub take_s: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordFormat {
    #[default]
    Wfdb,
    Csv,
}

impl RecordRef {
    /// Resolve the path: as given, then relative to the spec file, then
    /// relative to `$BLWBENCH_DATA_DIR`.
    fn resolve(&self, base_dir: &Path) -> Result<PathBuf> {
        let raw = Path::new(&self.path);
        let mut tried = Vec::new();
        for candidate in [
            raw.to_path_buf(),
            base_dir.join(raw),
            std::env::var_os("BLWBENCH_DATA_DIR")
                .map(|d| PathBuf::from(d).join(raw))
                .unwrap_or_else(|| raw.to_path_buf()),
        ] {
            if candidate.exists() {
                return Ok(candidate);
            }
            tried.push(candidate.display().to_string());
        }
        Err(Error::Io(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!(
                "record {:?} not found (tried: {})",
                self.path,
                tried.join(", ")
            ),
        )))
    }

    fn load(&self, base_dir: &Path) -> Result<Signal> {
        let path = self.resolve(base_dir)?;
        let mut signal = match self.format {
            RecordFormat::Wfdb => read_wfdb(&path, self.channel)?,
            RecordFormat::Csv => {
                let fs = self.fs.ok_or_else(|| {
                    Error::InvalidParameter(format!("CSV record {:?} needs `fs`", self.path))
                })?;
                read_csv(&path, fs)?
            }
        };
        if let Some(seconds) = self.take_s {
            signal = take_prefix(&signal, seconds)?;
        }
        Ok(signal)
    }
}

/// Clean-signal source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SignalSource {
    Synthetic(EcgSynthSpec),
    Record(RecordRef),
}

/// Noise source; sines are generated to match each clean signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseSource {
    Sine { freq_hz: f64, amplitude: f64 },
    Record(RecordRef),
}

/// One method entry: a name plus optional configuration overrides applied
/// over the experiment-wide defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodSpec {
    pub name: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<serde_json::Map<String, serde_json::Value>>,
}

/// A full experiment description (serialized as JSON).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// One or more clean signals; metric values are averaged across them
    /// before ranking.
    pub signals: Vec<SignalSource>,
    pub noise: NoiseSource,
    #[serde(default)]
    pub contamination: ContaminationSpec,
    pub methods: Vec<MethodSpec>,
    /// Metrics to rank and report.
    #[serde(default = "default_metrics")]
    pub metrics: Vec<String>,
    /// Worst-distortion window length for the figure data, seconds.
    #[serde(default = "default_window_s")]
    pub window_s: f64,
}

fn default_seed() -> u64 {
    42
}

fn default_metrics() -> Vec<String> {
    vec!["mad".into(), "ssd".into(), "prd".into()]
}

fn default_window_s() -> f64 {
    1.0
}

impl ExperimentSpec {
    /// Load a spec file; returns the spec and its directory (the base for
    /// relative record paths).
    pub fn load(path: &Path) -> Result<(Self, PathBuf)> {
        let text = std::fs::read_to_string(path)?;
        let spec: Self = serde_json::from_str(&text)?;
        spec.validate()?;
        let base = path
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."));
        Ok((spec, base))
    }

    pub fn validate(&self) -> Result<()> {
        if self.signals.is_empty() {
            return Err(Error::InvalidParameter(
                "experiment needs at least one signal source".into(),
            ));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidParameter(
                "experiment needs at least one method".into(),
            ));
        }
        if self.contamination.target_mad.is_nan() || self.contamination.target_mad <= 0.0 {
            return Err(Error::InvalidParameter(
                "contamination target MAD must be positive".into(),
            ));
        }
        for m in &self.metrics {
            if !matches!(m.as_str(), "mad" | "ssd" | "prd") {
                return Err(Error::InvalidParameter(format!(
                    "unknown metric {m:?}; expected mad, ssd or prd"
                )));
            }
        }
        Ok(())
    }

    /// Effective configuration for one method: experiment defaults (with the
    /// experiment seed driving ICA) plus the method's JSON overrides.
    fn method_config(&self, spec: &MethodSpec) -> Result<MethodConfig> {
        let mut base = MethodConfig {
            ica_seed: self.seed,
            ..MethodConfig::default()
        };
        if let Some(overrides) = &spec.config {
            let mut value = serde_json::to_value(&base)?;
            let obj = value.as_object_mut().expect("config serializes to object");
            for (k, v) in overrides {
                obj.insert(k.clone(), v.clone());
            }
            base = serde_json::from_value(value)?;
        }
        Ok(base)
    }
}

/// One row of the worst-segment trace: the three figure traces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlotRow {
    pub time_s: f64,
    pub clean: f64,
    pub processed: f64,
    pub difference: f64,
}

/// Worst-distortion location for one method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstSegment {
    pub record: String,
    pub record_index: usize,
    pub segment: SegmentRef,
    pub center_time_s: f64,
    /// |processed - clean| at the centre; equals the MAD on that record.
    pub peak_abs_diff: f64,
    pub trace: Vec<PlotRow>,
}

/// Per-method outcome across all records of the experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodResult {
    pub method: Method,
    /// `(record, stage, message)` when any record failed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Metric values averaged over records.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<MetricTriple>,
    pub per_record: Vec<Option<MetricTriple>>,
    /// True when the method's triple dominates the identity baseline.
    pub improving: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst: Option<WorstSegment>,
    pub ranks: BTreeMap<String, usize>,
}

/// Run provenance; the timestamp is excluded from the determinism hash.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub spec_hash: String,
    pub determinism_hash: String,
    pub timestamp_unix_s: u64,
}

/// Full experiment output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub name: String,
    pub seed: u64,
    pub target_mad: f64,
    pub records: Vec<String>,
    /// Contamination scale factor per record.
    pub scale_factors: Vec<f64>,
    /// Metrics of the untouched noisy signal (the identity method).
    pub identity: MetricTriple,
    pub methods: Vec<MethodResult>,
    pub metrics_ranked: Vec<String>,
    pub window_s: f64,
    pub provenance: Provenance,
}

fn metric_of(triple: &MetricTriple, name: &str) -> f64 {
    match name {
        "mad" => triple.mad,
        "ssd" => triple.ssd,
        "prd" => triple.prd,
        _ => unreachable!("validated metric name"),
    }
}

/// Rank methods per metric: ascending value, errored methods last, ties
/// broken by method name. Returns `metric -> method-index -> rank` aligned
/// with the input order.
pub fn rank_methods(
    entries: &[(Method, Option<MetricTriple>)],
    metrics: &[String],
) -> BTreeMap<String, Vec<usize>> {
    let mut out = BTreeMap::new();
    for metric in metrics {
        let mut order: Vec<usize> = (0..entries.len()).collect();
        order.sort_by(|&a, &b| {
            let (ma, mb) = (&entries[a], &entries[b]);
            match (&ma.1, &mb.1) {
                (Some(x), Some(y)) => metric_of(x, metric)
                    .partial_cmp(&metric_of(y, metric))
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then_with(|| ma.0.name().cmp(mb.0.name())),
                (Some(_), None) => std::cmp::Ordering::Less,
                (None, Some(_)) => std::cmp::Ordering::Greater,
                (None, None) => ma.0.name().cmp(mb.0.name()),
            }
        });
        let mut ranks = vec![0usize; entries.len()];
        for (rank0, &idx) in order.iter().enumerate() {
            ranks[idx] = rank0 + 1;
        }
        out.insert(metric.clone(), ranks);
    }
    out
}

/// Centre of the largest absolute difference (first occurrence on ties),
/// windowed to `window_s` seconds.
pub fn worst_distortion_segment(
    clean: &Signal,
    processed: &Signal,
    window_s: f64,
) -> Result<SegmentRef> {
    clean.check_compatible(processed)?;
    let mut center = 0usize;
    let mut best = -1.0;
    for (i, (c, p)) in clean.samples().iter().zip(processed.samples()).enumerate() {
        let d = (p - c).abs();
        if d > best {
            best = d;
            center = i;
        }
    }
    extract_window(clean, center, window_s)
}

struct PreparedRecord {
    label: String,
    clean: Signal,
    noisy: Signal,
    scale: f64,
    annotations: Option<crate::qrs::BeatAnnotations>,
}

fn prepare_record(
    spec: &ExperimentSpec,
    source: &SignalSource,
    base_dir: &Path,
) -> Result<PreparedRecord> {
    let clean = match source {
        SignalSource::Synthetic(synth) => {
            let mut synth = synth.clone();
            if synth.seed == 0 {
                synth.seed = spec.seed;
            }
            synth_ecg(&synth)?
        }
        SignalSource::Record(rec) => rec.load(base_dir)?,
    };
    let noise = match &spec.noise {
        NoiseSource::Sine { freq_hz, amplitude } => {
            synth_sine_blw(*freq_hz, clean.fs(), clean.duration_seconds(), *amplitude)?
        }
        NoiseSource::Record(rec) => {
            let raw = rec.load(base_dir)?;
            // Match the clean signal's rate before mixing.
            resample(&raw, clean.fs())?
        }
    };
    let (noisy, scale) = contaminate(&clean, &noise, &spec.contamination)?;
    // Fiducial points are detected once, on the contaminated signal, and
    // shared by every method.
    let annotations = detect_r_peaks(&noisy).ok();
    Ok(PreparedRecord {
        label: clean.label().to_string(),
        clean,
        noisy,
        scale,
        annotations,
    })
}

fn run_cell(
    record: &PreparedRecord,
    method: Method,
    config: &MethodConfig,
    window_s: f64,
) -> std::result::Result<(MetricTriple, WorstSegment, bool), String> {
    let processed = denoise(method, &record.noisy, config, record.annotations.as_ref())
        .map_err(|e| format!("stage=denoise record={}: {e}", record.label))?;
    let triple = MetricTriple::compute(&record.clean, &processed)
        .map_err(|e| format!("stage=metrics record={}: {e}", record.label))?;
    let segment = worst_distortion_segment(&record.clean, &processed, window_s)
        .map_err(|e| format!("stage=segment record={}: {e}", record.label))?;
    let fs = record.clean.fs();
    let trace: Vec<PlotRow> = (segment.start_index..segment.start_index + segment.length)
        .map(|i| PlotRow {
            time_s: i as f64 / fs,
            clean: record.clean.samples()[i],
            processed: processed.samples()[i],
            difference: processed.samples()[i] - record.clean.samples()[i],
        })
        .collect();
    let peak = (processed.samples()[segment.center_index]
        - record.clean.samples()[segment.center_index])
        .abs();
    let worst = WorstSegment {
        record: record.label.clone(),
        record_index: 0,
        segment,
        center_time_s: segment.center_index as f64 / fs,
        peak_abs_diff: peak,
        trace,
    };
    Ok((triple, worst, true))
}

/// Run the full experiment pipeline. Failing methods are ranked last with
/// an error marker instead of aborting the run; the result is deterministic
/// for a fixed spec (and therefore seed).
pub fn run_experiment(spec: &ExperimentSpec, base_dir: &Path, jobs: usize) -> Result<BenchResult> {
    spec.validate()?;
    let records: Vec<PreparedRecord> = spec
        .signals
        .iter()
        .map(|src| prepare_record(spec, src, base_dir))
        .collect::<Result<_>>()?;

    let configs: Vec<MethodConfig> = spec
        .methods
        .iter()
        .map(|m| spec.method_config(m))
        .collect::<Result<_>>()?;

    // Identity baseline: metrics of the raw contamination, averaged.
    let identity = {
        let mut acc = MetricTriple {
            mad: 0.0,
            ssd: 0.0,
            prd: 0.0,
        };
        for r in &records {
            let t = MetricTriple::compute(&r.clean, &r.noisy)?;
            acc.mad += t.mad;
            acc.ssd += t.ssd;
            acc.prd += t.prd;
        }
        let n = records.len() as f64;
        MetricTriple {
            mad: acc.mad / n,
            ssd: acc.ssd / n,
            prd: acc.prd / n,
        }
    };

    // Independent (method, record) cells, optionally in parallel; assembly
    // is keyed by index, so the result does not depend on completion order.
    let cells: Vec<(usize, usize)> = (0..spec.methods.len())
        .flat_map(|mi| (0..records.len()).map(move |ri| (mi, ri)))
        .collect();
    let run_all = || {
        use rayon::prelude::*;
        cells
            .par_iter()
            .map(|&(mi, ri)| {
                (
                    mi,
                    ri,
                    run_cell(
                        &records[ri],
                        spec.methods[mi].name,
                        &configs[mi],
                        spec.window_s,
                    ),
                )
            })
            .collect::<Vec<_>>()
    };
    let outcomes = if jobs > 1 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
            .install(run_all)
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
            .install(run_all)
    };

    let mut per_method: Vec<Vec<Option<(MetricTriple, WorstSegment)>>> =
        vec![vec![None; records.len()]; spec.methods.len()];
    let mut errors: Vec<Option<String>> = vec![None; spec.methods.len()];
    for (mi, ri, outcome) in outcomes {
        match outcome {
            Ok((triple, mut worst, _)) => {
                worst.record_index = ri;
                per_method[mi][ri] = Some((triple, worst));
            }
            Err(msg) => {
                let slot = &mut errors[mi];
                match slot {
                    Some(existing) => existing.push_str(&format!("; {msg}")),
                    None => *slot = Some(msg),
                }
            }
        }
    }

    // Aggregate: average metric values over records, keep the globally
    // worst segment.
    let mut aggregated: Vec<(Method, Option<MetricTriple>)> = Vec::new();
    let mut results: Vec<MethodResult> = Vec::new();
    for (mi, mspec) in spec.methods.iter().enumerate() {
        let mut per_record = Vec::with_capacity(records.len());
        let mut worst: Option<WorstSegment> = None;
        let mut sum = MetricTriple {
            mad: 0.0,
            ssd: 0.0,
            prd: 0.0,
        };
        let mut ok = 0usize;
        for cell in &per_method[mi] {
            match cell {
                Some((t, w)) => {
                    per_record.push(Some(*t));
                    sum.mad += t.mad;
                    sum.ssd += t.ssd;
                    sum.prd += t.prd;
                    ok += 1;
                    if worst
                        .as_ref()
                        .map(|b| w.peak_abs_diff > b.peak_abs_diff)
                        .unwrap_or(true)
                    {
                        worst = Some(w.clone());
                    }
                }
                None => per_record.push(None),
            }
        }
        let metrics = if ok == records.len() && ok > 0 {
            Some(MetricTriple {
                mad: sum.mad / ok as f64,
                ssd: sum.ssd / ok as f64,
                prd: sum.prd / ok as f64,
            })
        } else {
            None
        };
        aggregated.push((mspec.name, metrics));
        let improving = metrics.map(|m| m.dominates(&identity)).unwrap_or(false);
        results.push(MethodResult {
            method: mspec.name,
            error: errors[mi].take(),
            metrics,
            per_record,
            improving,
            worst,
            ranks: BTreeMap::new(),
        });
    }

    let rank_table = rank_methods(&aggregated, &spec.metrics);
    for (metric, ranks) in &rank_table {
        for (mi, rank) in ranks.iter().enumerate() {
            results[mi].ranks.insert(metric.clone(), *rank);
        }
    }

    let mut result = BenchResult {
        name: spec.name.clone(),
        seed: spec.seed,
        target_mad: spec.contamination.target_mad,
        records: records.iter().map(|r| r.label.clone()).collect(),
        scale_factors: records.iter().map(|r| r.scale).collect(),
        identity,
        methods: results,
        metrics_ranked: spec.metrics.clone(),
        window_s: spec.window_s,
        provenance: Provenance {
            spec_hash: sha256_hex(&serde_json::to_vec(spec)?),
            determinism_hash: String::new(),
            timestamp_unix_s: 0,
        },
    };
    result.provenance.determinism_hash = determinism_hash(&result)?;
    result.provenance.timestamp_unix_s = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    Ok(result)
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// SHA-256 over the result JSON with the provenance block (hash and
/// timestamp) zeroed out.
pub fn determinism_hash(result: &BenchResult) -> Result<String> {
    let mut clone = result.clone();
    clone.provenance.determinism_hash = String::new();
    clone.provenance.timestamp_unix_s = 0;
    Ok(sha256_hex(&serde_json::to_vec(&clone)?))
}

/// Report formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Markdown,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(Error::InvalidParameter(format!(
                "unknown report format {other:?}; expected json, csv or markdown"
            ))),
        }
    }
}

/// Write the requested report files into `out_dir`; returns the paths
/// written. With `plot_data`, also emits one CSV of the worst-segment
/// traces (time, clean, processed, difference) per method.
pub fn emit_report(
    result: &BenchResult,
    formats: &[ReportFormat],
    plot_data: bool,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();

    for format in formats {
        match format {
            ReportFormat::Json => {
                let path = out_dir.join("result.json");
                std::fs::write(&path, serde_json::to_string_pretty(result)?)?;
                written.push(path);
            }
            ReportFormat::Csv => {
                let path = out_dir.join("metrics.csv");
                let mut f = std::io::BufWriter::new(std::fs::File::create(&path)?);
                write!(f, "method,mad,ssd,prd")?;
                for m in &result.metrics_ranked {
                    write!(f, ",rank_{m}")?;
                }
                writeln!(f, ",improving,error")?;
                for r in &result.methods {
                    match &r.metrics {
                        Some(t) => write!(f, "{},{},{},{}", r.method, t.mad, t.ssd, t.prd)?,
                        None => write!(f, "{},,,", r.method)?,
                    }
                    for m in &result.metrics_ranked {
                        write!(f, ",{}", r.ranks.get(m).copied().unwrap_or(0))?;
                    }
                    writeln!(
                        f,
                        ",{},{}",
                        r.improving,
                        r.error.as_deref().unwrap_or("").replace(',', ";")
                    )?;
                }
                f.flush()?;
                written.push(path);
            }
            ReportFormat::Markdown => {
                let path = out_dir.join("report.md");
                let mut f = std::io::BufWriter::new(std::fs::File::create(&path)?);
                writeln!(f, "# {}\n", result.name)?;
                writeln!(
                    f,
                    "records: {} | target MAD: {} | seed: {}\n",
                    result.records.join(", "),
                    result.target_mad,
                    result.seed
                )?;
                write!(f, "| Method |")?;
                for m in &result.metrics_ranked {
                    write!(f, " {} |", m.to_uppercase())?;
                }
                for m in &result.metrics_ranked {
                    write!(f, " {}° |", m.to_uppercase())?;
                }
                writeln!(f, " Improving |")?;
                write!(f, "|---|")?;
                for _ in 0..result.metrics_ranked.len() * 2 {
                    write!(f, "---|")?;
                }
                writeln!(f, "---|")?;
                for r in &result.methods {
                    write!(f, "| {} |", r.method)?;
                    for m in &result.metrics_ranked {
                        match &r.metrics {
                            Some(t) => write!(f, " {:.2} |", metric_of(t, m))?,
                            None => write!(f, " error |")?,
                        }
                    }
                    for m in &result.metrics_ranked {
                        write!(f, " {}° |", r.ranks.get(m).copied().unwrap_or(0))?;
                    }
                    writeln!(f, " {} |", if r.improving { "yes" } else { "NO" })?;
                }
                f.flush()?;
                written.push(path);
            }
        }
    }

    if plot_data {
        for r in &result.methods {
            let Some(worst) = &r.worst else { continue };
            let path = out_dir.join(format!("plot_{}.csv", r.method));
            let mut f = std::io::BufWriter::new(std::fs::File::create(&path)?);
            writeln!(f, "time_s,clean,processed,difference")?;
            for row in &worst.trace {
                writeln!(
                    f,
                    "{},{},{},{}",
                    row.time_s, row.clean, row.processed, row.difference
                )?;
            }
            f.flush()?;
            written.push(path);
        }
    }

    Ok(written)
}

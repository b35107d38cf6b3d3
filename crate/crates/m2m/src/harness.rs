//! Multi-seed experiment runner.
//!
//! Layout of an output directory:
//!
//! ```text
//! config.json            resolved configuration
//! results.jsonl          one row per (strategy, seed)
//! summary.json, table.md mean ± sample std per strategy
//! cache/                 pre-trained guide networks
//! runs/<name>-seed<s>/   report.json, curve.csv, model.bin, outcomes.jsonl
//! ```

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use m2m_core::datasets::{self, LabeledDataset};
use m2m_core::m2m::{train_guide, train_m2m, GenerationOutcome, GenerationStats, M2mConfig};
use m2m_core::metrics::{evaluate, EvalReport};
use m2m_core::netcore::{decode_net, encode_net, Net};
use m2m_core::rebalance::StrategyKind;
use m2m_core::train::{train, TrainConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{DatasetSpec, ExperimentConfig, ImbalanceProfile, ResolvedStrategy, SplitSpec};
use crate::error::{Error, Result};
use crate::io;

/// Train, validation and test data of one trial.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub train: LabeledDataset,
    pub val: LabeledDataset,
    pub test: LabeledDataset,
}

pub fn load_source(spec: &DatasetSpec, seed: u64) -> Result<LabeledDataset> {
    Ok(match spec {
        DatasetSpec::Gaussian {
            classes,
            per_class,
            dim,
            separation,
        } => datasets::gaussian_mixture(*classes, *per_class, *dim, *separation, seed)?,
        DatasetSpec::Crescents { per_class, noise } => datasets::crescents(*per_class, *noise, seed)?,
        DatasetSpec::Rings {
            classes,
            per_class,
            noise,
        } => datasets::rings(*classes, *per_class, *noise, seed)?,
        DatasetSpec::Csv { path } => io::read_csv(path)?,
        DatasetSpec::Idx { images, labels } => io::load_idx(images, labels)?,
    })
}

/// Source → stratified split → long tail on the training part.
pub fn prepare(
    spec: &DatasetSpec,
    split: &SplitSpec,
    imbalance: Option<&ImbalanceProfile>,
    seed: u64,
) -> Result<Prepared> {
    let source = load_source(spec, seed)?;
    let parts = datasets::split(&source, split.val_fraction, split.test_per_class, seed)?;
    let train = match imbalance {
        Some(profile) => {
            let balanced = if parts.train.is_balanced() {
                parts.train
            } else {
                parts.train.trim_to_balanced(seed)?
            };
            datasets::make_long_tail(&balanced, profile.ratio, seed)?
        }
        None => parts.train,
    };
    Ok(Prepared {
        val: parts.val.align_to(&train)?,
        test: parts.test.align_to(&train)?,
        train,
    })
}

/// One line of `results.jsonl`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub strategy: String,
    pub seed: u64,
    pub status: RowStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<RowMetrics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generation: Option<GenerationStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Ok,
    Failed,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowMetrics {
    pub bacc: f64,
    pub gm: f64,
    pub accuracy: f64,
    pub major_recall: f64,
    pub minor_recall: f64,
}

impl From<&EvalReport> for RowMetrics {
    fn from(r: &EvalReport) -> Self {
        Self {
            bacc: r.bacc,
            gm: r.gm,
            accuracy: r.accuracy,
            major_recall: r.major_recall,
            minor_recall: r.minor_recall,
        }
    }
}

/// Mean and sample standard deviation (`n - 1`; zero for a single value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    fn of(values: &[f64]) -> Option<Self> {
        (!values.is_empty()).then(|| {
            let (mean, std) = mean_std(values);
            Self { mean, std }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub strategy: String,
    pub runs: usize,
    pub failures: usize,
    pub bacc: Option<MeanStd>,
    pub gm: Option<MeanStd>,
    pub major_recall: Option<MeanStd>,
    pub minor_recall: Option<MeanStd>,
}

/// Groups rows by strategy, keeping first-appearance order.
pub fn summarize(rows: &[ResultRow]) -> Vec<Summary> {
    let mut names: Vec<&str> = Vec::new();
    for r in rows {
        if !names.contains(&r.strategy.as_str()) {
            names.push(&r.strategy);
        }
    }
    names
        .into_iter()
        .map(|name| {
            let group: Vec<&ResultRow> = rows.iter().filter(|r| r.strategy == name).collect();
            let ok: Vec<RowMetrics> = group.iter().filter_map(|r| r.metrics).collect();
            let col = |f: fn(&RowMetrics) -> f64| MeanStd::of(&ok.iter().map(f).collect::<Vec<_>>());
            Summary {
                strategy: name.to_string(),
                runs: group.len(),
                failures: group.len() - ok.len(),
                bacc: col(|m| m.bacc),
                gm: col(|m| m.gm),
                major_recall: col(|m| m.major_recall),
                minor_recall: col(|m| m.minor_recall),
            }
        })
        .collect()
}

/// Markdown table with percentages, `mean ± std`.
pub fn render_table(summaries: &[Summary]) -> String {
    let cell = |v: &Option<MeanStd>| match v {
        Some(m) => format!("{:.2} ± {:.2}", 100.0 * m.mean, 100.0 * m.std),
        None => "—".to_string(),
    };
    let mut out = String::from("| Method | bACC | GM | Major | Minor | Runs |\n|---|---|---|---|---|---|\n");
    for s in summaries {
        let runs = if s.failures > 0 {
            format!("{} ({} failed)", s.runs, s.failures)
        } else {
            s.runs.to_string()
        };
        out += &format!(
            "| {} | {} | {} | {} | {} | {} |\n",
            s.strategy,
            cell(&s.bacc),
            cell(&s.gm),
            cell(&s.major_recall),
            cell(&s.minor_recall),
            runs
        );
    }
    out
}

fn dataset_digest(h: &mut Sha256, data: &LabeledDataset) {
    h.update((data.len() as u64).to_le_bytes());
    h.update((data.dim() as u64).to_le_bytes());
    for v in data.inputs().as_slice() {
        h.update(v.to_le_bytes());
    }
    for &y in data.labels() {
        h.update((y as u64).to_le_bytes());
    }
    for &id in data.class_ids() {
        h.update((id as u64).to_le_bytes());
    }
}

/// Cache key of a guide: training data, training config, seed and member.
pub fn guide_key(data: &LabeledDataset, cfg: &TrainConfig, seed: u64, member: usize) -> String {
    let mut h = Sha256::new();
    h.update(b"guide-v1");
    dataset_digest(&mut h, data);
    h.update(serde_json::to_vec(cfg).expect("config serializes"));
    h.update(seed.to_le_bytes());
    h.update((member as u64).to_le_bytes());
    hex::encode(h.finalize())
}

/// Loads the guide from `cache_dir` or trains and stores it.
pub fn cached_guide(
    cache_dir: &Path,
    data: &LabeledDataset,
    cfg: &TrainConfig,
    seed: u64,
    member: usize,
) -> Result<Net> {
    let path = cache_dir.join(format!("guide-{}.bin", &guide_key(data, cfg, seed, member)[..32]));
    if let Ok(bytes) = fs::read(&path) {
        match decode_net(&bytes) {
            Ok(net) => return Ok(net),
            Err(e) => log::warn!("ignoring unreadable cache entry {}: {e}", path.display()),
        }
    }
    log::info!("training guide {member} for seed {seed}");
    let net = train_guide(data, cfg, seed, member)?;
    fs::create_dir_all(cache_dir).map_err(|e| Error::io(cache_dir, e))?;
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    fs::write(&tmp, encode_net(&net)).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))?;
    Ok(net)
}

/// Number of guides a set of strategies needs.
fn guides_needed(strategies: &[ResolvedStrategy]) -> usize {
    strategies
        .iter()
        .filter_map(|s| s.m2m.as_ref())
        .filter(|m| !m.use_self_as_g)
        .map(|m| m.ensemble_size)
        .max()
        .unwrap_or(0)
}

/// Everything produced by one trained model.
pub struct RunArtifacts {
    pub net: Net,
    pub report: EvalReport,
    pub epoch_losses: Vec<f64>,
    pub generation: Option<GenerationStats>,
    pub outcomes: Vec<GenerationOutcome>,
}

/// Trains one strategy and evaluates it on `eval`.
pub fn run_strategy(
    strategy: &ResolvedStrategy,
    train_cfg: &TrainConfig,
    data: &LabeledDataset,
    eval: &LabeledDataset,
    guides: &[Net],
    seed: u64,
    keep_outcomes: bool,
) -> Result<RunArtifacts> {
    let mut outcomes = Vec::new();
    let mut sink = |o: &GenerationOutcome| {
        if keep_outcomes {
            outcomes.push(o.clone());
        }
    };
    let (net, report, epoch_losses, generation) = match (&strategy.m2m, strategy.spec.kind) {
        (Some(m2m), StrategyKind::M2m) => {
            let members = if m2m.use_self_as_g {
                None
            } else {
                Some(guides[..m2m.ensemble_size].to_vec())
            };
            let r = train_m2m(data, eval, train_cfg, m2m, &strategy.spec, members, seed, &mut sink)?;
            (r.run.net, r.report, r.run.epoch_losses, Some(r.run.generation))
        }
        _ => {
            let r = train(data, train_cfg, &strategy.spec, None, seed, &mut sink)?;
            let report = evaluate(&r.net, eval, data.class_counts())?;
            (r.net, report, r.epoch_losses, None)
        }
    };
    report.check()?;
    Ok(RunArtifacts {
        net,
        report,
        epoch_losses,
        generation,
        outcomes,
    })
}

#[derive(Serialize)]
struct RunReport<'a> {
    strategy: &'a str,
    seed: u64,
    report: &'a EvalReport,
    class_counts: &'a [usize],
    class_ids: &'a [usize],
    epoch_losses: &'a [f64],
    generation: &'a Option<GenerationStats>,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Invalid(e.to_string()))?;
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

fn write_run_dir(dir: &Path, name: &str, seed: u64, data: &LabeledDataset, a: &RunArtifacts) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_json(
        &dir.join("report.json"),
        &RunReport {
            strategy: name,
            seed,
            report: &a.report,
            class_counts: data.class_counts(),
            class_ids: data.class_ids(),
            epoch_losses: &a.epoch_losses,
            generation: &a.generation,
        },
    )?;
    let mut curve = String::from("class,class_id,train_count,recall,false_positives,cumulative_fp\n");
    let mut prev = 0;
    for (k, &cum) in a.report.cumulative_fp.iter().enumerate() {
        curve += &format!(
            "{k},{},{},{},{},{cum}\n",
            data.class_ids()[k],
            data.class_counts()[k],
            a.report.recall[k],
            cum - prev
        );
        prev = cum;
    }
    let path = dir.join("curve.csv");
    fs::write(&path, curve).map_err(|e| Error::io(&path, e))?;
    io::save_checkpoint(&dir.join("model.bin"), &a.net)?;
    if !a.outcomes.is_empty() {
        let path = dir.join("outcomes.jsonl");
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut w = BufWriter::new(file);
        for o in &a.outcomes {
            serde_json::to_writer(&mut w, o).map_err(|e| Error::Invalid(e.to_string()))?;
            w.write_all(b"\n").map_err(|e| Error::io(&path, e))?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

/// Rows and summaries of a finished `run`.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub rows: Vec<ResultRow>,
    pub summaries: Vec<Summary>,
    pub table: String,
}

struct Trial {
    seed: u64,
    data: Result<(Prepared, Vec<Net>)>,
}

fn prepare_trials(cfg: &ExperimentConfig, strategies: &[ResolvedStrategy]) -> Vec<Trial> {
    let train_cfg = cfg.train_config();
    let needed = guides_needed(strategies);
    let cache = cfg.output_dir.join("cache");
    cfg.seeds
        .par_iter()
        .map(|&seed| {
            let data = prepare(&cfg.dataset, &cfg.split, cfg.imbalance.as_ref(), seed).and_then(|p| {
                let guides = (0..needed)
                    .map(|j| cached_guide(&cache, &p.train, &train_cfg, seed, j))
                    .collect::<Result<Vec<_>>>()?;
                Ok((p, guides))
            });
            Trial { seed, data }
        })
        .collect()
}

fn failed_row(strategy: &str, seed: u64, e: &Error) -> ResultRow {
    log::error!("{strategy} seed {seed} failed: {e}");
    ResultRow {
        strategy: strategy.to_string(),
        seed,
        status: RowStatus::Failed,
        metrics: None,
        generation: None,
        error: Some(e.to_string()),
    }
}

/// Trains and evaluates every (strategy, seed) pair and writes the outputs.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let out = &cfg.output_dir;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    write_json(&out.join("config.json"), cfg)?;
    let strategies = cfg.strategies()?;
    let train_cfg = cfg.train_config();
    let trials = prepare_trials(cfg, &strategies);
    let jobs: Vec<(&ResolvedStrategy, &Trial)> = strategies
        .iter()
        .flat_map(|s| trials.iter().map(move |t| (s, t)))
        .collect();
    let rows: Vec<ResultRow> = jobs
        .par_iter()
        .map(|&(s, trial)| {
            let seed = trial.seed;
            let (prepared, guides) = match &trial.data {
                Ok(d) => d,
                Err(e) => return failed_row(&s.name, seed, e),
            };
            log::info!("running {} seed {seed}", s.name);
            let result = run_strategy(s, &train_cfg, &prepared.train, &prepared.test, guides, seed, true)
                .and_then(|a| {
                    let dir = out.join("runs").join(format!("{}-seed{seed}", s.name));
                    write_run_dir(&dir, &s.name, seed, &prepared.train, &a)?;
                    Ok(a)
                });
            match result {
                Ok(a) => ResultRow {
                    strategy: s.name.clone(),
                    seed,
                    status: RowStatus::Ok,
                    metrics: Some(RowMetrics::from(&a.report)),
                    generation: a.generation,
                    error: None,
                },
                Err(e) => failed_row(&s.name, seed, &e),
            }
        })
        .collect();
    write_results(out, &rows)
}

fn write_results(dir: &Path, rows: &[ResultRow]) -> Result<RunOutput> {
    let path = dir.join("results.jsonl");
    let mut text = String::new();
    for r in rows {
        text += &serde_json::to_string(r).map_err(|e| Error::Invalid(e.to_string()))?;
        text.push('\n');
    }
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    render_outputs(dir, rows.to_vec())
}

fn render_outputs(dir: &Path, rows: Vec<ResultRow>) -> Result<RunOutput> {
    let summaries = summarize(&rows);
    let table = render_table(&summaries);
    write_json(&dir.join("summary.json"), &summaries)?;
    let path = dir.join("table.md");
    fs::write(&path, &table).map_err(|e| Error::io(&path, e))?;
    Ok(RunOutput {
        rows,
        summaries,
        table,
    })
}

pub fn read_results(dir: &Path) -> Result<Vec<ResultRow>> {
    let path = dir.join("results.jsonl");
    let file = File::open(&path).map_err(|e| Error::io(&path, e))?;
    let mut rows = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(&path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let row = serde_json::from_str(&line)
            .map_err(|e| Error::format(&path, format!("line {}: {e}", i + 1)))?;
        rows.push(row);
    }
    Ok(rows)
}

/// Re-renders `summary.json` and `table.md` from `results.jsonl`.
pub fn report(dir: &Path) -> Result<RunOutput> {
    let rows = read_results(dir)?;
    render_outputs(dir, rows)
}

/// One point of the sweep grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepCandidate {
    pub lambda: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Validation bACC per seed, in config order.
    pub val_bacc: Vec<f64>,
    pub mean_val_bacc: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepOutput {
    pub strategy: String,
    pub candidates: Vec<SweepCandidate>,
    pub best: SweepCandidate,
}

/// Highest mean; ties go to smaller lambda, then beta, then gamma.
pub fn select_best(candidates: &[SweepCandidate]) -> Option<&SweepCandidate> {
    let mut sorted: Vec<&SweepCandidate> = candidates.iter().collect();
    sorted.sort_by(|a, b| {
        a.lambda
            .total_cmp(&b.lambda)
            .then(a.beta.total_cmp(&b.beta))
            .then(a.gamma.total_cmp(&b.gamma))
    });
    sorted
        .into_iter()
        .fold(None, |best: Option<&SweepCandidate>, c| match best {
            Some(b) if b.mean_val_bacc >= c.mean_val_bacc => Some(b),
            _ => Some(c),
        })
}

/// Grid search over `{lambda, beta, gamma}` on the validation split.
pub fn sweep(cfg: &ExperimentConfig) -> Result<SweepOutput> {
    cfg.validate()?;
    let grid = cfg
        .sweep
        .clone()
        .ok_or_else(|| Error::Invalid("config has no [sweep] section".into()))?;
    let base = cfg
        .strategies()?
        .into_iter()
        .find(|s| s.name == grid.strategy)
        .expect("validated sweep strategy");
    let base_m2m = base.m2m.clone().expect("m2m strategy");
    let mut points = Vec::new();
    for &lambda in &grid.lambda {
        for &beta in &grid.beta {
            for &gamma in &grid.gamma {
                points.push(M2mConfig {
                    lambda,
                    beta,
                    gamma,
                    ..base_m2m.clone()
                });
            }
        }
    }
    for p in &points {
        p.validate()?;
    }
    let train_cfg = cfg.train_config();
    let trials = prepare_trials(cfg, std::slice::from_ref(&base));
    for t in &trials {
        match &t.data {
            Err(e) => return Err(Error::Invalid(format!("seed {}: {e}", t.seed))),
            Ok((p, _)) if p.val.is_empty() => {
                return Err(Error::Invalid("sweep needs a non-empty validation split".into()))
            }
            Ok(_) => {}
        }
    }
    let jobs: Vec<(usize, &Trial)> = (0..points.len())
        .flat_map(|i| trials.iter().map(move |t| (i, t)))
        .collect();
    let scores: Vec<f64> = jobs
        .par_iter()
        .map(|&(i, trial)| {
            let (p, guides) = trial.data.as_ref().expect("checked above");
            let strategy = ResolvedStrategy {
                m2m: Some(points[i].clone()),
                ..base.clone()
            };
            log::info!(
                "sweep lambda={} beta={} gamma={} seed {}",
                points[i].lambda,
                points[i].beta,
                points[i].gamma,
                trial.seed
            );
            run_strategy(&strategy, &train_cfg, &p.train, &p.val, guides, trial.seed, false)
                .map(|a| a.report.bacc)
        })
        .collect::<Result<_>>()?;
    let candidates: Vec<SweepCandidate> = points
        .iter()
        .zip(scores.chunks(trials.len()))
        .map(|(p, s)| SweepCandidate {
            lambda: p.lambda,
            beta: p.beta,
            gamma: p.gamma,
            val_bacc: s.to_vec(),
            mean_val_bacc: s.iter().sum::<f64>() / s.len() as f64,
        })
        .collect();
    let best = select_best(&candidates).expect("non-empty grid").clone();
    let output = SweepOutput {
        strategy: grid.strategy,
        candidates,
        best,
    };
    fs::create_dir_all(&cfg.output_dir).map_err(|e| Error::io(&cfg.output_dir, e))?;
    write_json(&cfg.output_dir.join("sweep.json"), &output)?;
    Ok(output)
}

/// Writes `train.csv`, `val.csv` and `test.csv` into `dir`.
pub fn export(prepared: &Prepared, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    for (name, data) in [("train", &prepared.train), ("val", &prepared.val), ("test", &prepared.test)] {
        let path = dir.join(format!("{name}.csv"));
        io::write_csv(&path, data)?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_std_uses_n_minus_one() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert_eq!(s, 1.0);
        let (m, s) = mean_std(&[0.70, 0.72, 0.77]);
        assert!((m - 0.73).abs() < 1e-12);
        // sqrt(((-0.03)^2 + (-0.01)^2 + 0.04^2) / 2) = sqrt(0.0013)
        assert!((s - 0.0013f64.sqrt()).abs() < 1e-12);
        assert_eq!(mean_std(&[5.0]), (5.0, 0.0));
    }

    fn cand(lambda: f64, beta: f64, gamma: f64, acc: f64) -> SweepCandidate {
        SweepCandidate {
            lambda,
            beta,
            gamma,
            val_bacc: vec![acc],
            mean_val_bacc: acc,
        }
    }

    #[test]
    fn sweep_ties_prefer_small_lambda_then_beta() {
        let c = [
            cand(0.5, 0.9, 0.9, 0.8),
            cand(0.1, 0.99, 0.9, 0.8),
            cand(0.1, 0.9, 0.99, 0.8),
            cand(0.01, 0.9, 0.9, 0.7),
        ];
        let best = select_best(&c).unwrap();
        assert_eq!((best.lambda, best.beta, best.gamma), (0.1, 0.9, 0.99));
        let c = [cand(0.5, 0.999, 0.99, 0.81), cand(0.01, 0.9, 0.9, 0.8)];
        assert_eq!(select_best(&c).unwrap().lambda, 0.5);
    }

    #[test]
    fn summaries_skip_failed_rows() {
        let ok = |seed, bacc| ResultRow {
            strategy: "A".into(),
            seed,
            status: RowStatus::Ok,
            metrics: Some(RowMetrics {
                bacc,
                gm: bacc,
                accuracy: bacc,
                major_recall: bacc,
                minor_recall: bacc,
            }),
            generation: None,
            error: None,
        };
        let mut bad = ok(3, 0.0);
        bad.status = RowStatus::Failed;
        bad.metrics = None;
        bad.error = Some("boom".into());
        let s = summarize(&[ok(1, 0.5), ok(2, 0.7), bad]);
        assert_eq!(s.len(), 1);
        assert_eq!((s[0].runs, s[0].failures), (3, 1));
        assert!((s[0].bacc.unwrap().mean - 0.6).abs() < 1e-12);
        assert!(render_table(&s).contains("| A | 60.00 ± 14.14 |"));
    }
}

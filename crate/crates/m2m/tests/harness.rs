use std::fs;
use std::path::Path;

use m2m::config::ExperimentConfig;
use m2m::harness::{self, RowStatus};
use m2m::io;
use m2m_core::datasets::{gaussian_mixture, make_long_tail};
use m2m_core::netcore::Net;
use m2m_core::rng;

fn tiny_config(dir: &Path, body: &str) -> ExperimentConfig {
    let text = format!(
        r#"
output_dir = "out"
seeds = [1, 2, 3]

[dataset]
kind = "gaussian"
classes = 3
per_class = 160
dim = 4
separation = 2.5

[split]
test_per_class = 50
val_fraction = 0.4

[network]
hidden = [16]

[train]
epochs = 6
batch_size = 32
warmup_epochs = 1
{body}
"#
    );
    let path = dir.join("exp.toml");
    fs::write(&path, text).unwrap();
    ExperimentConfig::load(&path).unwrap()
}

#[test]
fn csv_round_trip_keeps_values_and_labels() {
    let data = make_long_tail(&gaussian_mixture(4, 30, 3, 1.0, 3).unwrap(), 5.0, 3).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    io::write_csv(&path, &data).unwrap();
    let back = io::read_csv(&path).unwrap();
    assert_eq!(back.inputs(), data.inputs());
    assert_eq!(back.class_counts(), data.class_counts());
    let ids = |d: &m2m_core::datasets::LabeledDataset| -> Vec<usize> {
        d.labels().iter().map(|&y| d.class_ids()[y]).collect()
    };
    assert_eq!(ids(&back), ids(&data));
}

#[test]
fn csv_errors_name_the_row() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    fs::write(&path, "x0,label\n1.0,0\nabc,1\n").unwrap();
    let err = io::read_csv(&path).unwrap_err().to_string();
    assert!(err.contains("row 3"), "{err}");
    fs::write(&path, "x0,y\n1.0,0\n").unwrap();
    assert!(io::read_csv(&path).is_err());
}

#[test]
fn checkpoint_files_round_trip() {
    let net = Net::dense(5, &[7, 3], 4, &mut rng::stream(1, &[]));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("net.bin");
    io::save_checkpoint(&path, &net).unwrap();
    assert_eq!(io::load_checkpoint(&path).unwrap(), net);
    let mut bytes = fs::read(&path).unwrap();
    bytes.pop();
    fs::write(&path, bytes).unwrap();
    assert!(io::load_checkpoint(&path).is_err());
}

#[test]
fn balanced_data_shows_no_strategy_effect() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny_config(
        dir.path(),
        "[[strategies]]\nname = \"ERM\"\nkind = \"erm\"\n[[strategies]]\nname = \"RS\"\nkind = \"rs\"\n",
    );
    let out = harness::run(&cfg).unwrap();
    let erm = out.summaries[0].bacc.unwrap();
    let rs = out.summaries[1].bacc.unwrap();
    let pooled = ((erm.std.powi(2) + rs.std.powi(2)) / 2.0).sqrt();
    assert!((erm.mean - rs.mean).abs() <= 2.0 * pooled.max(1e-3), "{erm:?} vs {rs:?}");
}

#[test]
fn run_writes_the_documented_layout_and_report_rerenders() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny_config(
        dir.path(),
        "[imbalance]\nratio = 10.0\n[[strategies]]\nname = \"M2m\"\nkind = \"m2m\"\ndeferred = true\n",
    );
    let out = harness::run(&cfg).unwrap();
    assert!(out.rows.iter().all(|r| r.status == RowStatus::Ok));
    let base = dir.path().join("out");
    for f in ["config.json", "results.jsonl", "summary.json", "table.md"] {
        assert!(base.join(f).is_file(), "{f}");
    }
    let run_dir = base.join("runs/M2m-seed2");
    for f in ["report.json", "curve.csv", "model.bin", "outcomes.jsonl"] {
        assert!(run_dir.join(f).is_file(), "{f}");
    }
    assert_eq!(fs::read_dir(base.join("cache")).unwrap().count(), 3);
    io::load_checkpoint(&run_dir.join("model.bin")).unwrap();

    let table = fs::read_to_string(base.join("table.md")).unwrap();
    fs::remove_file(base.join("table.md")).unwrap();
    let again = harness::report(&base).unwrap();
    assert_eq!(again.table, table);
    assert_eq!(again.rows, out.rows);

    // Second run reuses cached guides and reproduces every row.
    let rows = fs::read(base.join("results.jsonl")).unwrap();
    harness::run(&cfg).unwrap();
    assert_eq!(fs::read(base.join("results.jsonl")).unwrap(), rows);
}

#[test]
fn data_errors_become_failure_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exp.toml");
    fs::write(
        &path,
        "output_dir = \"out\"\nseeds = [4]\n[dataset]\nkind = \"csv\"\npath = \"missing.csv\"\n\
         [[strategies]]\nname = \"ERM\"\nkind = \"erm\"\n",
    )
    .unwrap();
    let cfg = ExperimentConfig::load(&path).unwrap();
    let out = harness::run(&cfg).unwrap();
    assert_eq!(out.rows.len(), 1);
    assert_eq!(out.rows[0].status, RowStatus::Failed);
    assert!(out.rows[0].metrics.is_none());
    assert!(out.rows[0].error.as_deref().unwrap().contains("missing.csv"));
    assert_eq!(out.summaries[0].failures, 1);
    assert!(out.table.contains("1 failed"));
}

#[test]
fn sweep_scores_every_grid_point_on_validation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny_config(
        dir.path(),
        "[imbalance]\nratio = 10.0\n[[strategies]]\nname = \"M2m\"\nkind = \"m2m\"\ndeferred = true\n\
         [sweep]\nstrategy = \"M2m\"\nlambda = [0.0, 0.1]\nbeta = [0.9]\ngamma = [0.9, 2.0]\n",
    );
    let out = harness::sweep(&cfg).unwrap();
    assert_eq!(out.candidates.len(), 4);
    assert!(out.candidates.iter().all(|c| c.val_bacc.len() == 3));
    let best = out.candidates.iter().map(|c| c.mean_val_bacc).fold(0.0, f64::max);
    assert_eq!(out.best.mean_val_bacc, best);
    assert!(dir.path().join("out/sweep.json").is_file());
}

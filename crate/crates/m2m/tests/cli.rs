use std::fs;
use std::process::Command;

fn m2m() -> Command {
    Command::new(env!("CARGO_BIN_EXE_m2m"))
}

#[test]
fn gen_data_writes_three_splits() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("data.toml");
    fs::write(
        &spec,
        "output_dir = \"csv\"\nseed = 3\n[dataset]\nkind = \"rings\"\nclasses = 3\nper_class = 60\nnoise = 0.1\n\
         [split]\ntest_per_class = 20\nval_fraction = 0.5\n[imbalance]\nratio = 4.0\n",
    )
    .unwrap();
    let out = m2m().arg("gen-data").arg(&spec).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let train = m2m::io::read_csv(&dir.path().join("csv/train.csv")).unwrap();
    assert_eq!(train.class_counts(), [30, 15, 8]);
    let test = m2m::io::read_csv(&dir.path().join("csv/test.csv")).unwrap();
    assert_eq!(test.class_counts(), [20, 20, 20]);
    let val = m2m::io::read_csv(&dir.path().join("csv/val.csv")).unwrap();
    assert_eq!(val.len(), 30);
}

#[test]
fn errors_exit_nonzero_with_a_json_record() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "output_dir = \"o\"\n[dataset]\nkind = \"gaussian\"\nclases = 3\n").unwrap();
    let out = m2m().arg("run").arg(&cfg).output().unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    let record: serde_json::Value = serde_json::from_str(stderr.trim()).unwrap();
    assert_eq!(record["error"], "config");
    assert!(record["message"].as_str().unwrap().contains("clases"));

    let out = m2m().arg("report").arg(dir.path().join("nothing")).output().unwrap();
    assert!(!out.status.success());
    let record: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(record["error"], "io");
}

#[test]
fn run_then_report_prints_the_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    fs::write(
        &cfg,
        "output_dir = \"out\"\nseeds = [1, 2]\n[dataset]\nkind = \"crescents\"\nper_class = 120\nnoise = 0.2\n\
         [split]\ntest_per_class = 40\n[imbalance]\nratio = 8.0\n[network]\nhidden = [8]\n[train]\nepochs = 4\nwarmup_epochs = 1\n\
         [[strategies]]\nname = \"ERM\"\nkind = \"erm\"\n[[strategies]]\nname = \"DRW\"\nkind = \"rw\"\ndeferred = true\n",
    )
    .unwrap();
    let run = m2m().args(["--jobs", "1", "run"]).arg(&cfg).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let table = String::from_utf8(run.stdout).unwrap();
    assert!(table.starts_with("| Method | bACC |"));
    assert!(table.contains("| DRW |"));
    let report = m2m().arg("report").arg(dir.path().join("out")).output().unwrap();
    assert!(report.status.success());
    assert_eq!(String::from_utf8(report.stdout).unwrap(), table);
}

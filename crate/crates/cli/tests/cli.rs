use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn structdmd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_structdmd")).args(args).output().unwrap()
}

fn write_config(dir: &Path) -> String {
    let path = dir.join("small.cfg");
    let text = format!(
        "name = small\nsystem = burgers\nstructure = BilinearIO\nn0 = 3\nnu = 0.05\ndt = 1e-3\nhorizon = 0.5\n\
         train_input = cosdecay:0.5,10,0.3\ntau_p = tol:1e-10\nreduce = tol:1e-6\noutput_dir = {}\n",
        dir.display()
    );
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn train_test_and_svd_report_succeed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let out = structdmd(&["train", "-c", &cfg]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("relative_error"));
    let model = dir.path().join("small.model");
    assert!(model.exists());

    let out = structdmd(&["test", "-c", &cfg, "--model", model.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("small_test_outputs.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "t,y_ref,y_fit,abs_error");

    let out = structdmd(&["svd-report", "-c", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("small_svd.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "index,sigma_omega_normalized,sigma_gamma_normalized");
}

#[test]
fn convert_round_trip_restores_model() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    assert_eq!(structdmd(&["train", "-c", &cfg]).status.code(), Some(0));
    let model = dir.path().join("small.model");
    let disc = dir.path().join("small_discrete.model");
    let back = dir.path().join("small_back.model");
    let p = |q: &Path| q.to_str().unwrap().to_string();
    let out = structdmd(&["convert", "--input", &p(&model), "--output", &p(&disc), "--to", "discrete", "--dt", "1e-3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(fs::read_to_string(&disc).unwrap().contains("domain discrete"));
    let out = structdmd(&["convert", "--input", &p(&disc), "--output", &p(&back), "--to", "continuous"]);
    assert_eq!(out.status.code(), Some(0));
    let original = structdmd::models::SavedModel::<f64>::load(&model).unwrap();
    let restored = structdmd::models::SavedModel::<f64>::load(&back).unwrap();
    let (structdmd::models::SavedModel::Continuous(a), structdmd::models::SavedModel::Continuous(b)) = (original, restored)
    else {
        panic!("expected continuous models");
    };
    assert!((&a.blocks.a - &b.blocks.a).amax() <= 1e-12 * a.blocks.a.amax());
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    assert_eq!(structdmd(&["train", "-c", "/nonexistent.cfg"]).status.code(), Some(2));
    assert_eq!(structdmd(&["train", "-c", &cfg, "--set", "structure=Cubic"]).status.code(), Some(2));
    assert_eq!(structdmd(&["train", "-c", &cfg, "--set", "dt=-1"]).status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_with_3() {
    use structdmd::nalgebra::{DMatrix, RowDVector};
    let dir = tempfile::tempdir().unwrap();
    let snap = structdmd::snapshots::SnapshotSet::<f64>::new(
        DMatrix::zeros(2, 10),
        DMatrix::zeros(2, 10),
        RowDVector::zeros(10),
        None,
        0.1,
    )
    .unwrap();
    let data = dir.path().join("zeros.csv");
    snap.write_csv(fs::File::create(&data).unwrap()).unwrap();
    let cfg = dir.path().join("zeros.cfg");
    let text = format!(
        "system = file:{}\nstructure = Linear\ndt = 0.1\nhorizon = 1\ntrain_input = zero\noutput_dir = {}\n",
        data.display(),
        dir.path().display()
    );
    fs::write(&cfg, text).unwrap();
    let out = structdmd(&["train", "-c", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

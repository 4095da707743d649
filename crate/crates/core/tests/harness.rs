//! End-to-end checks of the experiment harness.

use std::fs;
use std::path::Path;
use std::sync::Mutex;

use nalgebra::{DMatrix, DVector, RowDVector};
use structdmd::dmd::ModelKind;
use structdmd::harness::{self, ExperimentConfig};
use structdmd::models::SavedModel;
use structdmd::snapshots::SnapshotSet;

fn burgers(dir: &Path, name: &str) -> ExperimentConfig<f64> {
    let text = format!(
        "name = {name}\nsystem = burgers\nstructure = BilinearIO\nn0 = 4\nnu = 0.05\ndt = 1e-3\nhorizon = 1\n\
         train_input = cosdecay:0.5,10,0.3\ntau_p = tol:1e-10\nreduce = tol:1e-6\nsave_fit_data = true\n\
         output_dir = {}\n",
        dir.display()
    );
    ExperimentConfig::parse(&text).unwrap()
}

#[test]
fn training_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (_, a) = harness::run_train(&burgers(dir.path(), "a")).unwrap();
    let (_, b) = harness::run_train(&burgers(dir.path(), "b")).unwrap();
    for (x, y) in [(&a.svd_csv, &b.svd_csv), (&a.outputs_csv, &b.outputs_csv), (&a.model, &b.model)] {
        assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap(), "{}", x.display());
    }
}

#[test]
fn residual_is_reproducible_from_saved_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let (outcome, arts) = harness::run_train(&burgers(dir.path(), "r")).unwrap();
    let snap = SnapshotSet::<f64>::read_csv(fs::File::open(arts.snapshots_csv.unwrap()).unwrap()).unwrap();
    let SavedModel::Discrete(full) = SavedModel::<f64>::load(arts.full_model.unwrap()).unwrap() else {
        panic!("full model should be discrete");
    };
    let bl = &full.blocks;
    let (b, n, c, d, f) = (
        bl.b.as_ref().unwrap(),
        bl.n.as_ref().unwrap(),
        bl.c.as_ref().unwrap(),
        bl.d.unwrap(),
        bl.f.as_ref().unwrap(),
    );
    let y = snap.y.as_ref().unwrap();
    let mut sq = 0.0;
    for k in 0..snap.m() {
        let x: DVector<f64> = snap.x.column(k).into_owned();
        let u = snap.u[k];
        let next = &bl.a * &x + b * u + n * &x * u;
        sq += (next - snap.xs.column(k)).norm_squared();
        let yk = (c * &x)[0] + d * u + (f * &x)[0] * u;
        sq += (yk - y[k]).powi(2);
    }
    assert!((sq.sqrt() - outcome.report.residual).abs() <= 1e-10, "{} vs {}", sq.sqrt(), outcome.report.residual);
}

#[test]
fn testing_on_the_training_input_reproduces_training_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = burgers(dir.path(), "same");
    let outcome = harness::train(&cfg).unwrap();
    let (test, _, y_fit) = harness::test_model(SavedModel::from(outcome.model.clone()), &cfg).unwrap();
    assert_eq!(test.steps, outcome.report.snapshots);
    assert!((test.relative_error - outcome.report.relative_error).abs() <= 1e-12);
    assert!((y_fit - &outcome.y_fit).amax() <= 1e-12);
}

#[test]
fn structure_mismatch_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = burgers(dir.path(), "mismatch");
    let outcome = harness::train(&cfg).unwrap();
    let mut other = cfg.clone();
    other.structure = ModelKind::LinearIO.into();
    assert!(harness::test_model(SavedModel::from(outcome.model), &other).unwrap_err().is_config());
}

#[test]
fn gamma_spectrum_matches_svd_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = burgers(dir.path(), "spectra");
    let outcome = harness::train(&cfg).unwrap();
    let report = harness::svd_report(&cfg).unwrap();
    assert_eq!(report.p, outcome.report.p);
    assert_eq!(report.r, outcome.report.r);
    assert_eq!(report.gamma.len(), outcome.gamma_spectrum.len());
    assert_eq!(report.gamma, outcome.gamma_spectrum);
    assert_eq!(report.omega, outcome.full.omega_spectrum);
    assert!(report.omega.windows(2).all(|w| w[0] >= w[1]));
}

struct Capture(Mutex<Vec<String>>);

impl log::Log for Capture {
    fn enabled(&self, m: &log::Metadata) -> bool {
        m.level() <= log::Level::Warn
    }
    fn log(&self, r: &log::Record) {
        if self.enabled(r.metadata()) {
            self.0.lock().unwrap().push(r.args().to_string());
        }
    }
    fn flush(&self) {}
}

static LOGS: Capture = Capture(Mutex::new(Vec::new()));

#[test]
fn zero_input_degrades_gracefully() {
    log::set_logger(&LOGS).unwrap();
    log::set_max_level(log::LevelFilter::Warn);
    let dir = tempfile::tempdir().unwrap();
    let a_true = DMatrix::from_row_slice(2, 2, &[0.9, 0.2, -0.2, 0.9]);
    let states = DMatrix::from_fn(2, 51, |_, _| 0.0);
    let states = (0..50).fold(states, |mut s, k| {
        if k == 0 {
            s.set_column(0, &DVector::from_vec(vec![1.0, 0.5]));
        }
        let next = &a_true * s.column(k);
        s.set_column(k + 1, &next);
        s
    });
    let y = states.row(0).columns(0, 50).into_owned();
    let snap = SnapshotSet::from_trajectory(&states, &RowDVector::zeros(50), Some(&y), 0.1).unwrap();
    let path = dir.path().join("zero.csv");
    snap.write_csv(fs::File::create(&path).unwrap()).unwrap();
    let text = format!(
        "system = file:{}\nstructure = BilinearIO\ndt = 0.1\nhorizon = 5\ntrain_input = zero\noutput_dir = {}\n",
        path.display(),
        dir.path().display()
    );
    let cfg = ExperimentConfig::<f64>::parse(&text).unwrap();
    let outcome = harness::train(&cfg).unwrap();
    let full = &outcome.full.blocks;
    assert!((&full.a - &a_true).amax() <= 1e-10);
    assert!(full.b.as_ref().unwrap().amax() == 0.0);
    assert!(full.n.as_ref().unwrap().amax() == 0.0);
    assert!((full.c.as_ref().unwrap() - RowDVector::from_vec(vec![1.0, 0.0])).amax() <= 1e-10);
    assert!(outcome.report.relative_error < 1e-8);
    let logs = LOGS.0.lock().unwrap();
    assert!(logs.iter().any(|l| l.contains("identically zero")), "{logs:?}");
}

#[test]
fn initial_state_is_configurable() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = burgers(dir.path(), "x0");
    cfg.set("initial_state", "0.1, 0.2, 0.2, 0.1").unwrap();
    let outcome = harness::train(&cfg).unwrap();
    let x0 = outcome.snapshots.x.column(0);
    assert_eq!(x0.rows(0, 4).as_slice(), &[0.1, 0.2, 0.2, 0.1]);
    assert!((x0[4 + 1] - 0.02).abs() < 1e-15);
    cfg.set("initial_state", "1,2").unwrap();
    assert!(harness::train(&cfg).unwrap_err().is_config());
    cfg.set("initial_state", "zero").unwrap();
    assert_eq!(cfg.initial_state, None);
}

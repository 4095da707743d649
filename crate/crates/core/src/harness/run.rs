use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use nalgebra::{DVector, RowDVector};

use super::config::{ExperimentConfig, SystemKind};
use crate::dmd::{assemble_omega, fit_full, reduce, FullOrderFit, ModelStructure};
use crate::error::{Error, Result};
use crate::linalg::{normalize, singular_values, TruncationPolicy};
use crate::models::{
    absolute_error_series, continuous_to_discrete, discrete_to_continuous, relative_output_error,
    simulate_discrete, ContinuousModel, DiscreteModel, SavedModel,
};
use crate::snapshots::{fmt17, SnapshotSet};
use crate::systems::{build_burgers_quadratic, carleman_bilinearize, simulate_vdp, LiftedBilinear, VdpConfig};
use crate::Scalar;

/// A system that can be re-simulated from the zero state.
#[derive(Debug, Clone)]
pub enum ReferenceSystem<T: Scalar> {
    Burgers(Box<LiftedBilinear<T>>),
    Vdp(VdpConfig<T>),
}

impl<T: Scalar> ReferenceSystem<T> {
    /// `None` for file-backed experiments.
    pub fn from_config(cfg: &ExperimentConfig<T>) -> Result<Option<Self>> {
        Ok(match &cfg.system {
            SystemKind::Burgers => {
                let qb = build_burgers_quadratic(&cfg.burgers())?;
                Some(ReferenceSystem::Burgers(Box::new(carleman_bilinearize(&qb)?)))
            }
            SystemKind::Vdp => Some(ReferenceSystem::Vdp(cfg.vdp)),
            SystemKind::File(_) => None,
        })
    }

    pub fn order(&self) -> usize {
        match self {
            ReferenceSystem::Burgers(l) => l.order(),
            ReferenceSystem::Vdp(_) => 6,
        }
    }

    /// Row vector mapping the state to the observed output.
    pub fn observation(&self) -> RowDVector<T> {
        match self {
            ReferenceSystem::Burgers(l) => l.c.clone().unwrap_or_else(|| RowDVector::zeros(l.order())),
            ReferenceSystem::Vdp(_) => {
                let mut c = RowDVector::zeros(6);
                c[2] = T::one();
                c
            }
        }
    }

    /// Initial state in lifted coordinates. `physical` is given in the system's own
    /// coordinates (grid values for Burgers); `None` is the zero state.
    pub fn initial_state(&self, physical: Option<&[T]>) -> Result<DVector<T>> {
        let Some(v) = physical else {
            return Ok(DVector::zeros(self.order()));
        };
        let v = DVector::from_column_slice(v);
        match self {
            ReferenceSystem::Burgers(l) if v.len() == l.base_order => Ok(LiftedBilinear::lift_state(&v)),
            ReferenceSystem::Vdp(_) if v.len() == 6 => Ok(v),
            ReferenceSystem::Burgers(l) => Err(Error::Config(format!(
                "initial_state has {} entries, Burgers grid has {}",
                v.len(),
                l.base_order
            ))),
            ReferenceSystem::Vdp(_) => {
                Err(Error::Config(format!("initial_state has {} entries, van der Pol needs 6", v.len())))
            }
        }
    }

    /// Euler trajectory from `x0` (lifted coordinates); outputs are always present.
    pub fn simulate(&self, dt: T, u: &RowDVector<T>, x0: &DVector<T>) -> Result<SnapshotSet<T>> {
        let traj = match self {
            ReferenceSystem::Burgers(l) => l.simulate_euler(dt, u, x0)?,
            ReferenceSystem::Vdp(cfg) => simulate_vdp(cfg, dt, u, x0)?,
        };
        SnapshotSet::from_trajectory(&traj.states, u, traj.outputs.as_ref(), dt)
    }
}

/// Headline numbers of a training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport<T> {
    pub structure: ModelStructure,
    pub state_dim: usize,
    pub snapshots: usize,
    pub omega_rows: usize,
    /// Truncation order of the pseudoinverse of `Ω`.
    pub p: usize,
    /// Reduced order.
    pub r: usize,
    /// `‖Γ − G Ω‖_F` of the full-order fit.
    pub residual: T,
    pub f_hat_norm: Option<T>,
    pub d_hat: Option<T>,
    /// Relative L2 error of the reduced model's output on the training input;
    /// infinite when the model diverged.
    pub relative_error: T,
    /// First step with a non-finite reduced state during validation.
    pub diverged_at: Option<usize>,
}

impl<T: Scalar> TrainReport<T> {
    pub fn to_text(&self) -> String {
        let opt = |v: Option<T>| v.map_or("none".to_string(), fmt17);
        format!(
            "structure = {}\nstate_dim = {}\nsnapshots = {}\nomega_rows = {}\np = {}\nr = {}\nresidual = {}\nf_hat_norm = {}\nd_hat = {}\nrelative_error = {}\ndiverged_at = {}\n",
            self.structure,
            self.state_dim,
            self.snapshots,
            self.omega_rows,
            self.p,
            self.r,
            fmt17(self.residual),
            opt(self.f_hat_norm),
            opt(self.d_hat),
            fmt17(self.relative_error),
            self.diverged_at.map_or("none".to_string(), |k| k.to_string()),
        )
    }
}

/// Everything a training run produces, in memory.
#[derive(Debug, Clone)]
pub struct TrainOutcome<T: Scalar> {
    pub report: TrainReport<T>,
    pub model: ContinuousModel<T>,
    pub full: FullOrderFit<T>,
    pub snapshots: SnapshotSet<T>,
    pub gamma_spectrum: Vec<T>,
    pub y_ref: RowDVector<T>,
    pub y_fit: RowDVector<T>,
}

/// Output error of a test run.
#[derive(Debug, Clone, PartialEq)]
pub struct TestReport<T> {
    pub steps: usize,
    pub relative_error: T,
    pub diverged_at: Option<usize>,
}

/// Normalized spectra of `Ω` and `Γ` plus the ranks selected by the configured policies.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdReport<T> {
    pub omega: Vec<T>,
    pub gamma: Vec<T>,
    pub xs: Vec<T>,
    pub p: usize,
    pub r: usize,
}

/// Paths written by [`run_train`].
#[derive(Debug, Clone, PartialEq)]
pub struct TrainArtifacts {
    pub model: PathBuf,
    pub svd_csv: PathBuf,
    pub outputs_csv: PathBuf,
    pub report: PathBuf,
    pub snapshots_csv: Option<PathBuf>,
    pub full_model: Option<PathBuf>,
}

fn load_snapshots<T: Scalar>(cfg: &ExperimentConfig<T>) -> Result<(SnapshotSet<T>, Option<ReferenceSystem<T>>)> {
    match ReferenceSystem::from_config(cfg)? {
        Some(sys) => {
            let m = cfg.steps(cfg.horizon)?;
            let u = cfg.train_input.sample(cfg.dt, m);
            let x0 = sys.initial_state(cfg.initial_state.as_deref())?;
            let snap = sys.simulate(cfg.dt, &u, &x0)?;
            Ok((snap, Some(sys)))
        }
        None => {
            let SystemKind::File(path) = &cfg.system else { unreachable!() };
            let file = File::open(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            Ok((SnapshotSet::read_csv(file)?, None))
        }
    }
}

fn policy_p<T: Scalar>(cfg: &ExperimentConfig<T>, rows: usize, cols: usize) -> TruncationPolicy<T> {
    cfg.tau_p.unwrap_or_else(|| TruncationPolicy::machine_precision(rows, cols))
}

/// Outputs of `model` driven by `u` from the projection of `x0`.
///
/// Models without an output equation are observed through `observation` applied to
/// the lifted state. If the model diverges, the outputs before the failing step are
/// kept, the rest are NaN, and the step is returned alongside.
fn model_outputs<T: Scalar>(
    model: &DiscreteModel<T>,
    u: &RowDVector<T>,
    x0: &DVector<T>,
    observation: Option<&RowDVector<T>>,
) -> Result<(RowDVector<T>, Option<usize>)> {
    let x0 = model.project_state(x0);
    let (traj, diverged_at) = match simulate_discrete(model, u, &x0) {
        Ok(t) => (t, None),
        Err(Error::Divergence { step }) => {
            log::warn!("fitted model diverged at step {step}");
            (simulate_discrete(model, &u.columns(0, step - 1).into_owned(), &x0)?, Some(step))
        }
        Err(e) => return Err(e),
    };
    let valid = traj.states.ncols() - 1;
    let head = match traj.outputs {
        Some(y) => y,
        None => {
            let obs = observation.ok_or_else(|| {
                Error::Config("structure has no output equation and the system has no known observation map".into())
            })?;
            obs * model.lift_states(&traj.states.columns(0, valid).into_owned())
        }
    };
    let y = RowDVector::from_fn(u.len(), |_, k| if k < valid { head[k] } else { T::lit(f64::NAN) });
    Ok((y, diverged_at))
}

/// Relative error, infinite once the model has diverged.
fn validation_error<T: Scalar>(y_ref: &RowDVector<T>, y_fit: &RowDVector<T>, diverged: Option<usize>) -> Result<T> {
    match diverged {
        Some(_) => Ok(T::lit(f64::INFINITY)),
        None => relative_output_error(y_ref, y_fit),
    }
}

fn reference_outputs<T: Scalar>(snap: &SnapshotSet<T>, observation: Option<&RowDVector<T>>) -> Result<RowDVector<T>> {
    match (&snap.y, observation) {
        (Some(y), _) => Ok(y.clone()),
        (None, Some(c)) => Ok(c * &snap.x),
        (None, None) => Err(Error::MissingOutput("snapshot file has no y column".into())),
    }
}

/// Fits, reduces and validates without touching the filesystem.
pub fn train<T: Scalar>(cfg: &ExperimentConfig<T>) -> Result<TrainOutcome<T>> {
    cfg.validate()?;
    let (snap, system) = load_snapshots(cfg)?;
    if system.is_none() && (snap.dt - cfg.dt).abs() > T::lit(1e-9) * cfg.dt {
        log::warn!("snapshot file dt {} differs from configured dt {}; using the file's", snap.dt, cfg.dt);
    }
    let bundle = assemble_omega(&snap, cfg.structure)?;
    let (rows, cols) = bundle.omega.shape();
    let full = fit_full(&bundle, policy_p(cfg, rows, cols))?;
    let policy_r = cfg
        .reduce
        .unwrap_or_else(|| TruncationPolicy::machine_precision(snap.n(), snap.m()));
    let reduced = reduce(&full, &snap.xs, policy_r)?;
    let model = discrete_to_continuous(&reduced)?;
    log::info!("fitted p = {}, reduced to r = {}", full.rank, model.order());

    let observation = system.as_ref().map(|s| s.observation());
    let discrete = continuous_to_discrete(&model, snap.dt)?;
    let x0 = snap.x.column(0).into_owned();
    let (y_fit, diverged_at) = model_outputs(&discrete, &snap.u, &x0, observation.as_ref())?;
    let y_ref = reference_outputs(&snap, observation.as_ref())?;
    let relative_error = validation_error(&y_ref, &y_fit, diverged_at)?;
    let gamma_spectrum = singular_values(&bundle.gamma);

    let report = TrainReport {
        structure: cfg.structure,
        state_dim: snap.n(),
        snapshots: snap.m(),
        omega_rows: rows,
        p: full.rank,
        r: model.order(),
        residual: full.residual,
        f_hat_norm: model.blocks.f.as_ref().map(|f| f.norm()),
        d_hat: model.blocks.d,
        relative_error,
        diverged_at,
    };
    Ok(TrainOutcome { report, model, full, snapshots: snap, gamma_spectrum, y_ref, y_fit })
}

fn artifact(cfg: &ExperimentConfig<impl Scalar>, suffix: &str) -> PathBuf {
    cfg.output_dir.join(format!("{}{suffix}", cfg.name))
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Config(format!("cannot create {}: {e}", dir.display())))
}

/// `t,y_ref,y_fit,abs_error`.
pub fn write_outputs_csv<T: Scalar>(
    path: &Path,
    dt: T,
    y_ref: &RowDVector<T>,
    y_fit: &RowDVector<T>,
) -> Result<()> {
    let err = absolute_error_series(y_ref, y_fit)?;
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    w.write_record(["t", "y_ref", "y_fit", "abs_error"])?;
    for k in 0..y_ref.len() {
        w.write_record([fmt17(T::from_count(k) * dt), fmt17(y_ref[k]), fmt17(y_fit[k]), fmt17(err[k])])?;
    }
    w.flush()?;
    Ok(())
}

/// `index,sigma_omega_normalized,sigma_gamma_normalized`, 1-based; shorter columns are left empty.
pub fn write_svd_csv<T: Scalar>(path: &Path, omega: &[T], gamma: &[T]) -> Result<()> {
    let (omega, gamma) = (normalize(omega), normalize(gamma));
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    w.write_record(["index", "sigma_omega_normalized", "sigma_gamma_normalized"])?;
    let cell = |v: &[T], i: usize| v.get(i).map(|&x| fmt17(x)).unwrap_or_default();
    for i in 0..omega.len().max(gamma.len()) {
        w.write_record([(i + 1).to_string(), cell(&omega, i), cell(&gamma, i)])?;
    }
    w.flush()?;
    Ok(())
}

/// Trains and writes every artifact into `cfg.output_dir`.
pub fn run_train<T: Scalar>(cfg: &ExperimentConfig<T>) -> Result<(TrainOutcome<T>, TrainArtifacts)> {
    let outcome = train(cfg)?;
    create_dir(&cfg.output_dir)?;
    let arts = TrainArtifacts {
        model: artifact(cfg, ".model"),
        svd_csv: artifact(cfg, "_svd.csv"),
        outputs_csv: artifact(cfg, "_train_outputs.csv"),
        report: artifact(cfg, "_report.txt"),
        snapshots_csv: cfg.save_fit_data.then(|| artifact(cfg, "_snapshots.csv")),
        full_model: cfg.save_fit_data.then(|| artifact(cfg, "_full.model")),
    };
    SavedModel::from(outcome.model.clone()).save(&arts.model)?;
    write_svd_csv(&arts.svd_csv, &outcome.full.omega_spectrum, &outcome.gamma_spectrum)?;
    write_outputs_csv(&arts.outputs_csv, outcome.snapshots.dt, &outcome.y_ref, &outcome.y_fit)?;
    fs::write(&arts.report, outcome.report.to_text())?;
    if let Some(path) = &arts.snapshots_csv {
        let mut w = BufWriter::new(File::create(path)?);
        outcome.snapshots.write_csv(&mut w)?;
        w.flush()?;
    }
    if let Some(path) = &arts.full_model {
        SavedModel::from(outcome.full.to_discrete_model()?).save(path)?;
    }
    Ok((outcome, arts))
}

/// Discrete form of a saved model at the configured step.
fn discrete_at<T: Scalar>(saved: SavedModel<T>, dt: T) -> Result<DiscreteModel<T>> {
    match saved {
        SavedModel::Continuous(m) => continuous_to_discrete(&m, dt),
        SavedModel::Discrete(m) => {
            if (m.dt - dt).abs() > T::lit(1e-12) * dt {
                return Err(Error::Config(format!("model dt {} differs from configured dt {dt}", m.dt)));
            }
            Ok(m)
        }
    }
}

/// Simulates the reference system and the saved model under the test input.
pub fn test_model<T: Scalar>(
    saved: SavedModel<T>,
    cfg: &ExperimentConfig<T>,
) -> Result<(TestReport<T>, RowDVector<T>, RowDVector<T>)> {
    cfg.validate()?;
    if saved.structure() != cfg.structure {
        return Err(Error::StructureMismatch {
            model: saved.structure().to_string(),
            config: cfg.structure.to_string(),
        });
    }
    let system = ReferenceSystem::from_config(cfg)?
        .ok_or_else(|| Error::Config("testing needs a system that can be simulated, not a snapshot file".into()))?;
    let model = discrete_at(saved, cfg.dt)?;
    let full_order = match &model.basis {
        Some(v) => v.nrows(),
        None => model.order(),
    };
    if full_order != system.order() {
        return Err(Error::Config(format!(
            "model was trained on a system of order {full_order}, configured system has order {}",
            system.order()
        )));
    }
    let m = cfg.steps(cfg.test_horizon)?;
    let u = cfg.test_input.sample(cfg.dt, m);
    let x0 = system.initial_state(cfg.initial_state.as_deref())?;
    let snap = system.simulate(cfg.dt, &u, &x0)?;
    let observation = system.observation();
    let x0 = snap.x.column(0).into_owned();
    let (y_fit, diverged_at) = model_outputs(&model, &u, &x0, Some(&observation))?;
    let y_ref = reference_outputs(&snap, Some(&observation))?;
    let relative_error = validation_error(&y_ref, &y_fit, diverged_at)?;
    Ok((TestReport { steps: m, relative_error, diverged_at }, y_ref, y_fit))
}

/// Loads `model_path`, tests it and writes `<name>_test_outputs.csv` and `<name>_test_report.txt`.
pub fn run_test<T: Scalar>(model_path: &Path, cfg: &ExperimentConfig<T>) -> Result<(TestReport<T>, PathBuf)> {
    let saved = SavedModel::load(model_path)?;
    let (report, y_ref, y_fit) = test_model(saved, cfg)?;
    create_dir(&cfg.output_dir)?;
    let csv_path = artifact(cfg, "_test_outputs.csv");
    write_outputs_csv(&csv_path, cfg.dt, &y_ref, &y_fit)?;
    fs::write(
        artifact(cfg, "_test_report.txt"),
        format!(
            "steps = {}\nrelative_error = {}\ndiverged_at = {}\n",
            report.steps,
            fmt17(report.relative_error),
            report.diverged_at.map_or("none".to_string(), |k| k.to_string())
        ),
    )?;
    Ok((report, csv_path))
}

/// Spectra of `Ω`, `Γ` and `Xs` with the ranks the configured policies would select.
pub fn svd_report<T: Scalar>(cfg: &ExperimentConfig<T>) -> Result<SvdReport<T>> {
    cfg.validate()?;
    let (snap, _) = load_snapshots(cfg)?;
    let bundle = assemble_omega(&snap, cfg.structure)?;
    let (rows, cols) = bundle.omega.shape();
    let omega = singular_values(&bundle.omega);
    let gamma = singular_values(&bundle.gamma);
    let xs = singular_values(&snap.xs);
    let p = policy_p(cfg, rows, cols).rank_for(&omega, rows, cols);
    let policy_r = cfg
        .reduce
        .unwrap_or_else(|| TruncationPolicy::machine_precision(snap.n(), snap.m()));
    let r = policy_r.rank_for(&xs, snap.n(), snap.m());
    Ok(SvdReport { omega, gamma, xs, p, r })
}

/// Writes `<name>_svd.csv` for [`svd_report`].
pub fn run_svd_report<T: Scalar>(cfg: &ExperimentConfig<T>) -> Result<(SvdReport<T>, PathBuf)> {
    let report = svd_report(cfg)?;
    create_dir(&cfg.output_dir)?;
    let path = artifact(cfg, "_svd.csv");
    write_svd_csv(&path, &report.omega, &report.gamma)?;
    Ok((report, path))
}

/// Direction of [`convert_model`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Conversion<T> {
    ToContinuous,
    ToDiscrete { dt: T },
}

/// Euler conversion between saved model files.
pub fn convert_model<T: Scalar>(input: &Path, output: &Path, conversion: Conversion<T>) -> Result<()> {
    let saved = SavedModel::<T>::load(input)?;
    let converted: SavedModel<T> = match (saved, conversion) {
        (SavedModel::Discrete(m), Conversion::ToContinuous) => discrete_to_continuous(&m)?.into(),
        (SavedModel::Continuous(m), Conversion::ToDiscrete { dt }) => continuous_to_discrete(&m, dt)?.into(),
        (SavedModel::Continuous(_), Conversion::ToContinuous) => {
            return Err(Error::Config("model is already continuous".into()))
        }
        (SavedModel::Discrete(_), Conversion::ToDiscrete { .. }) => {
            return Err(Error::Config("model is already discrete".into()))
        }
    };
    converted.save(output)
}

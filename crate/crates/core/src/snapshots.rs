//! Snapshot matrices `X`, `Xs`, `U`, `Y` and their CSV form.

use std::io::{Read, Write};

use nalgebra::{DMatrix, RowDVector};

use crate::error::{Error, Result};
use crate::Scalar;

/// Paired snapshots: column `k` of `x` is the state at `t_k`, column `k` of `xs` the
/// state at `t_{k+1}`; `u` and `y` hold the input and output sampled at `t_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotSet<T: Scalar> {
    pub x: DMatrix<T>,
    pub xs: DMatrix<T>,
    pub u: RowDVector<T>,
    pub y: Option<RowDVector<T>>,
    pub dt: T,
}

impl<T: Scalar> SnapshotSet<T> {
    pub fn new(
        x: DMatrix<T>,
        xs: DMatrix<T>,
        u: RowDVector<T>,
        y: Option<RowDVector<T>>,
        dt: T,
    ) -> Result<Self> {
        if x.ncols() == 0 || x.nrows() == 0 {
            return Err(Error::Empty("snapshot matrix"));
        }
        if x.shape() != xs.shape() {
            return Err(Error::dim(format!("X is {:?} but Xs is {:?}", x.shape(), xs.shape())));
        }
        if u.len() != x.ncols() {
            return Err(Error::dim(format!("{} inputs for {} snapshots", u.len(), x.ncols())));
        }
        if let Some(y) = &y {
            if y.len() != x.ncols() {
                return Err(Error::dim(format!("{} outputs for {} snapshots", y.len(), x.ncols())));
            }
        }
        if !(dt > T::zero()) {
            return Err(Error::TimeStep(dt.as_f64()));
        }
        Ok(Self { x, xs, u, y, dt })
    }

    /// Splits a single trajectory `[x_0 … x_m]` into `X = [x_0 … x_{m-1}]` and `Xs = [x_1 … x_m]`.
    pub fn from_trajectory(
        states: &DMatrix<T>,
        inputs: &RowDVector<T>,
        outputs: Option<&RowDVector<T>>,
        dt: T,
    ) -> Result<Self> {
        let m = inputs.len();
        if states.ncols() != m + 1 {
            return Err(Error::dim(format!(
                "trajectory has {} columns, expected {} for {} inputs",
                states.ncols(),
                m + 1,
                m
            )));
        }
        if m == 0 {
            return Err(Error::Empty("trajectory with no transitions"));
        }
        Self::new(
            states.columns(0, m).into_owned(),
            states.columns(1, m).into_owned(),
            inputs.clone(),
            outputs.cloned(),
            dt,
        )
    }

    /// State dimension.
    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    /// Number of snapshot pairs.
    pub fn m(&self) -> usize {
        self.x.ncols()
    }

    /// True when `Xs[:, k] == X[:, k+1]` for every `k`.
    pub fn is_shift_consistent(&self) -> bool {
        (0..self.m().saturating_sub(1)).all(|k| self.xs.column(k) == self.x.column(k + 1))
    }

    /// Writes `t,u,y,x1..xn`, one line per state sample (`m + 1` lines).
    ///
    /// The final line carries `x_m` with empty `u` and `y` fields. Values use 17
    /// significant digits so `f64` data round-trips exactly.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        if !self.is_shift_consistent() {
            return Err(Error::dim("only single-trajectory snapshot sets can be exported"));
        }
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["t".to_string(), "u".into(), "y".into()];
        header.extend((1..=self.n()).map(|i| format!("x{i}")));
        w.write_record(&header)?;
        let m = self.m();
        for k in 0..=m {
            let mut rec = Vec::with_capacity(3 + self.n());
            rec.push(fmt17(T::from_count(k) * self.dt));
            if k < m {
                rec.push(fmt17(self.u[k]));
                rec.push(self.y.as_ref().map(|y| fmt17(y[k])).unwrap_or_default());
            } else {
                rec.push(String::new());
                rec.push(String::new());
            }
            let col = if k < m { self.x.column(k) } else { self.xs.column(m - 1) };
            rec.extend(col.iter().map(|&v| fmt17(v)));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let headers = r.headers()?.clone();
        if headers.len() < 4 || &headers[0] != "t" || &headers[1] != "u" || &headers[2] != "y" {
            return Err(Error::Parse { line: 1, msg: "expected header t,u,y,x1..xn".into() });
        }
        let n = headers.len() - 3;
        let mut times = Vec::new();
        let mut inputs = Vec::new();
        let mut outputs = Vec::new();
        let mut states = Vec::new();
        for (idx, rec) in r.records().enumerate() {
            let rec = rec?;
            let line = idx + 2;
            let field = |i: usize| -> Result<Option<T>> {
                let s = rec.get(i).unwrap_or("").trim();
                if s.is_empty() {
                    return Ok(None);
                }
                s.parse::<f64>()
                    .map(|v| Some(T::lit(v)))
                    .map_err(|e| Error::Parse { line, msg: format!("column {}: {e}", i + 1) })
            };
            times.push(field(0)?.ok_or(Error::Parse { line, msg: "missing time".into() })?);
            inputs.push(field(1)?);
            outputs.push(field(2)?);
            for i in 0..n {
                states.push(field(3 + i)?.ok_or(Error::Parse { line, msg: "missing state".into() })?);
            }
        }
        if times.len() < 2 {
            return Err(Error::Empty("snapshot CSV needs at least two samples"));
        }
        let m = times.len() - 1;
        let u: Vec<T> = inputs[..m]
            .iter()
            .enumerate()
            .map(|(k, v)| v.ok_or(Error::Parse { line: k + 2, msg: "missing input".into() }))
            .collect::<Result<_>>()?;
        let y = if outputs[..m].iter().all(Option::is_some) {
            Some(RowDVector::from_iterator(m, outputs[..m].iter().map(|v| v.unwrap())))
        } else if outputs[..m].iter().all(Option::is_none) {
            None
        } else {
            return Err(Error::Parse { line: 0, msg: "output column is partially filled".into() });
        };
        let trajectory = DMatrix::from_column_slice(n, m + 1, &states);
        let dt = times[1] - times[0];
        Self::from_trajectory(&trajectory, &RowDVector::from_vec(u), y.as_ref(), dt)
    }
}

/// Decimal with 17 significant digits.
pub(crate) fn fmt17<T: Scalar>(v: T) -> String {
    format!("{:.16e}", v.as_f64())
}

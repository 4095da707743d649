//! Plain-text model files.
//!
//! ```text
//! structdmd-model 1
//! domain discrete
//! kind BilinearIO
//! quadratic_output true
//! order 2
//! dt 1.0000000000000000e-03
//! block A 2 2
//! <row-major values, one matrix row per line>
//! block B 2 1
//! ...
//! end
//! ```
//!
//! `dt` appears only for discrete models. Blocks are optional and may appear in any
//! order; values are written with 17 significant digits so `f64` models reload
//! bit-exactly. The projection basis, when present, is stored as block `basis`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector, RowDVector};

use super::{ContinuousModel, DiscreteModel, ModelBlocks};
use crate::dmd::{ModelKind, ModelStructure};
use crate::error::{Error, Result};
use crate::snapshots::fmt17;
use crate::Scalar;

const MAGIC: &str = "structdmd-model 1";

/// A model file's content: either time domain.
#[derive(Debug, Clone, PartialEq)]
pub enum SavedModel<T: Scalar> {
    Discrete(DiscreteModel<T>),
    Continuous(ContinuousModel<T>),
}

impl<T: Scalar> From<DiscreteModel<T>> for SavedModel<T> {
    fn from(m: DiscreteModel<T>) -> Self {
        SavedModel::Discrete(m)
    }
}

impl<T: Scalar> From<ContinuousModel<T>> for SavedModel<T> {
    fn from(m: ContinuousModel<T>) -> Self {
        SavedModel::Continuous(m)
    }
}

impl<T: Scalar> SavedModel<T> {
    pub fn structure(&self) -> ModelStructure {
        match self {
            SavedModel::Discrete(m) => m.structure,
            SavedModel::Continuous(m) => m.structure,
        }
    }

    fn parts(&self) -> (&ModelBlocks<T>, Option<T>, &Option<DMatrix<T>>) {
        match self {
            SavedModel::Discrete(m) => (&m.blocks, Some(m.dt), &m.basis),
            SavedModel::Continuous(m) => (&m.blocks, None, &m.basis),
        }
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        let (blocks, dt, basis) = self.parts();
        let structure = self.structure();
        writeln!(w, "{MAGIC}")?;
        writeln!(w, "domain {}", if dt.is_some() { "discrete" } else { "continuous" })?;
        writeln!(w, "kind {}", structure.kind.name())?;
        writeln!(w, "quadratic_output {}", structure.include_quadratic_output)?;
        writeln!(w, "order {}", blocks.order())?;
        if let Some(dt) = dt {
            writeln!(w, "dt {}", fmt17(dt))?;
        }
        write_block(&mut w, "A", &blocks.a)?;
        if let Some(b) = &blocks.b {
            write_block(&mut w, "B", &DMatrix::from_column_slice(b.len(), 1, b.as_slice()))?;
        }
        if let Some(n) = &blocks.n {
            write_block(&mut w, "N", n)?;
        }
        if let Some(q) = &blocks.q {
            write_block(&mut w, "Q", q)?;
        }
        for (name, row) in [("C", &blocks.c), ("F", &blocks.f), ("K", &blocks.k)] {
            if let Some(row) = row {
                write_block(&mut w, name, &DMatrix::from_row_slice(1, row.len(), row.as_slice()))?;
            }
        }
        if let Some(d) = blocks.d {
            write_block(&mut w, "D", &DMatrix::from_element(1, 1, d))?;
        }
        if let Some(v) = basis {
            write_block(&mut w, "basis", v)?;
        }
        writeln!(w, "end")?;
        Ok(())
    }

    pub fn read<R: Read>(r: R) -> Result<Self> {
        let mut lines = BufReader::new(r).lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut next = || -> Result<(usize, String)> {
            loop {
                match lines.next() {
                    Some((i, l)) => {
                        let l = l?;
                        let t = l.trim();
                        if !t.is_empty() && !t.starts_with('#') {
                            return Ok((i, t.to_string()));
                        }
                    }
                    None => return Err(Error::Parse { line: 0, msg: "unexpected end of file".into() }),
                }
            }
        };

        let (line, magic) = next()?;
        if magic != MAGIC {
            return Err(Error::Parse { line, msg: format!("expected '{MAGIC}'") });
        }
        let mut domain = None;
        let mut kind = None;
        let mut quad_out = true;
        let mut order = None;
        let mut dt = None;
        let mut mats: Vec<(String, DMatrix<T>)> = Vec::new();
        loop {
            let (line, text) = next()?;
            let mut parts = text.split_whitespace();
            let key = parts.next().unwrap_or_default();
            let perr = |msg: String| Error::Parse { line, msg };
            match key {
                "end" => break,
                "domain" => domain = parts.next().map(str::to_string),
                "kind" => {
                    let k: ModelKind = parts.next().unwrap_or_default().parse()?;
                    kind = Some(k);
                }
                "quadratic_output" => {
                    quad_out = parts.next().unwrap_or_default().parse().map_err(|e| perr(format!("{e}")))?
                }
                "order" => {
                    order = Some(parts.next().unwrap_or_default().parse::<usize>().map_err(|e| perr(format!("{e}")))?)
                }
                "dt" => dt = Some(parse_value::<T>(parts.next().unwrap_or_default(), line)?),
                "block" => {
                    let name = parts.next().ok_or_else(|| perr("block without name".into()))?.to_string();
                    let rows: usize = parts
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| perr("block without row count".into()))?;
                    let cols: usize = parts
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| perr("block without column count".into()))?;
                    let mut data = Vec::with_capacity(rows * cols);
                    for _ in 0..rows {
                        let (line, row) = next()?;
                        let before = data.len();
                        for tok in row.split_whitespace() {
                            data.push(parse_value::<T>(tok, line)?);
                        }
                        if data.len() - before != cols {
                            return Err(Error::Parse { line, msg: format!("block {name}: expected {cols} values") });
                        }
                    }
                    mats.push((name, DMatrix::from_row_slice(rows, cols, &data)));
                }
                other => return Err(perr(format!("unknown key '{other}'"))),
            }
        }

        let kind = kind.ok_or(Error::Parse { line: 0, msg: "missing kind".into() })?;
        let structure = ModelStructure { kind, include_quadratic_output: quad_out };
        let take = |name: &str| mats.iter().find(|(n, _)| n == name).map(|(_, m)| m.clone());
        let a = take("A").ok_or(Error::Parse { line: 0, msg: "missing block A".into() })?;
        if let Some(order) = order {
            if a.nrows() != order {
                return Err(Error::Parse { line: 0, msg: format!("order {order} disagrees with A") });
            }
        }
        let as_row = |m: DMatrix<T>| RowDVector::from_row_slice(m.as_slice());
        let blocks = ModelBlocks {
            a,
            b: take("B").map(|m| DVector::from_column_slice(m.as_slice())),
            n: take("N"),
            q: take("Q"),
            c: take("C").map(as_row),
            d: take("D").map(|m| m[(0, 0)]),
            f: take("F").map(as_row),
            k: take("K").map(as_row),
        };
        let basis = take("basis");
        match domain.as_deref() {
            Some("discrete") => {
                let dt = dt.ok_or(Error::Parse { line: 0, msg: "discrete model without dt".into() })?;
                let mut m = DiscreteModel::new(blocks, dt, structure)?;
                m.basis = basis;
                Ok(SavedModel::Discrete(m))
            }
            Some("continuous") => {
                let mut m = ContinuousModel::new(blocks, structure)?;
                m.basis = basis;
                Ok(SavedModel::Continuous(m))
            }
            other => Err(Error::Parse { line: 0, msg: format!("bad domain {other:?}") }),
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read(File::open(path)?)
    }
}

fn write_block<T: Scalar, W: Write>(w: &mut W, name: &str, m: &DMatrix<T>) -> Result<()> {
    writeln!(w, "block {name} {} {}", m.nrows(), m.ncols())?;
    for row in m.row_iter() {
        let line: Vec<String> = row.iter().map(|&v| fmt17(v)).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    Ok(())
}

fn parse_value<T: Scalar>(tok: &str, line: usize) -> Result<T> {
    tok.parse::<f64>()
        .map(T::lit)
        .map_err(|e| Error::Parse { line, msg: format!("'{tok}': {e}") })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qb_io_model() -> DiscreteModel<f64> {
        let n = 2;
        let blocks = ModelBlocks {
            a: DMatrix::from_fn(n, n, |i, j| (i as f64 - j as f64) / 3.0),
            b: Some(DVector::from_vec(vec![0.1, std::f64::consts::E])),
            n: Some(DMatrix::from_fn(n, n, |i, j| 1e-300 * (i + j) as f64)),
            q: Some(DMatrix::from_fn(n, n * n, |i, j| -((i * 4 + j) as f64).sqrt())),
            c: Some(RowDVector::from_vec(vec![1.0 / 7.0, 2.0])),
            d: Some(-0.0),
            f: Some(RowDVector::from_vec(vec![3.0, 1e20])),
            k: Some(RowDVector::from_vec(vec![0.0, 1.0, 1.0, 0.5])),
        };
        let mut m = DiscreteModel::new(blocks, 1e-3, ModelKind::QuadraticBilinearIO.into()).unwrap();
        m.basis = Some(DMatrix::from_fn(3, 2, |i, j| (i * 2 + j) as f64 * 0.1));
        m
    }

    #[test]
    fn discrete_round_trip_is_exact() {
        let saved = SavedModel::from(qb_io_model());
        let mut buf = Vec::new();
        saved.write(&mut buf).unwrap();
        let back = SavedModel::<f64>::read(buf.as_slice()).unwrap();
        assert_eq!(back, saved);
    }

    #[test]
    fn continuous_round_trip_omits_dt() {
        let blocks = ModelBlocks::linear(DMatrix::from_row_slice(1, 1, &[-0.5]));
        let saved = SavedModel::from(ContinuousModel::new(blocks, ModelKind::Linear.into()).unwrap());
        let mut buf = Vec::new();
        saved.write(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(!text.contains("\ndt "));
        assert_eq!(SavedModel::<f64>::read(buf.as_slice()).unwrap(), saved);
    }

    #[test]
    fn malformed_files_are_rejected() {
        assert!(SavedModel::<f64>::read("nonsense\n".as_bytes()).is_err());
        let truncated = format!("{MAGIC}\ndomain discrete\nkind Linear\nblock A 1 1\n");
        assert!(SavedModel::<f64>::read(truncated.as_bytes()).is_err());
        let no_dt = format!("{MAGIC}\ndomain discrete\nkind Linear\nblock A 1 1\n1.0\nend\n");
        assert!(SavedModel::<f64>::read(no_dt.as_bytes()).is_err());
        let short_row = format!("{MAGIC}\ndomain continuous\nkind Linear\nblock A 1 2\n1.0\nend\n");
        assert!(matches!(SavedModel::<f64>::read(short_row.as_bytes()), Err(Error::Parse { line: 5, .. })));
    }
}

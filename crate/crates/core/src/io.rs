//! CSV files: matrices (line j holds row j, no header), vectors (one value
//! per line), probability traces and rankings.
//!
//! Values are written with the shortest representation that reads back to
//! the same `f64`.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;

use crate::dense::SquareMatrix;
use crate::error::{Error, Result};
use crate::graph::{ProbabilityVector, TransitionMatrix, ValidationPolicy};
use crate::pagerank::ranked_nodes;
use crate::state::{vector_to_matrix, MatrixState};

fn csv_error(err: csv::Error) -> Error {
    let line = err.position().map_or(0, |p| p.line() as usize);
    match err.kind() {
        csv::ErrorKind::Io(e) => Error::Io(e.to_string()),
        _ => Error::Parse {
            line,
            message: err.to_string(),
        },
    }
}

/// Rows of cells parsed with `T::from_str`.
fn read_rows<T: FromStr, R: Read>(reader: R) -> Result<Vec<Vec<T>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let row = record
            .iter()
            .map(|cell| {
                cell.parse().map_err(|_| Error::Parse {
                    line,
                    message: format!("cannot parse `{cell}` as a number"),
                })
            })
            .collect::<Result<Vec<T>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn parse_matrix<R: Read>(reader: R) -> Result<SquareMatrix<f64>> {
    SquareMatrix::from_rows(&read_rows::<f64, _>(reader)?)
}

pub fn read_matrix(path: &Path) -> Result<SquareMatrix<f64>> {
    parse_matrix(open(path)?)
}

pub fn read_transition_matrix(path: &Path, policy: ValidationPolicy) -> Result<TransitionMatrix> {
    TransitionMatrix::new(read_matrix(path)?, policy)
}

/// A single column of values; also accepts them on one line.
pub fn parse_vector<R: Read>(reader: R) -> Result<Vec<f64>> {
    Ok(read_rows::<f64, _>(reader)?.concat())
}

pub fn read_probability_vector(path: &Path) -> Result<ProbabilityVector> {
    ProbabilityVector::new(parse_vector(open(path)?)?)
}

/// An N x N grid of amplitudes laid out like the matrix state (column i is
/// the first register), each cell real or complex (`0.5-0.5i`). Normalized
/// with a warning if needed.
pub fn parse_state<R: Read>(reader: R) -> Result<MatrixState> {
    let m = SquareMatrix::from_rows(&read_rows::<Complex64, _>(reader)?)?;
    vector_to_matrix(m.as_slice())
}

pub fn read_state(path: &Path) -> Result<MatrixState> {
    parse_state(open(path)?)
}

fn write_rows<W: Write, I>(out: W, rows: I) -> Result<()>
where
    I: IntoIterator,
    I::Item: IntoIterator<Item = f64>,
{
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(|x| x.to_string()).collect();
        wtr.write_record(&cells).map_err(csv_error)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_matrix_to<W: Write>(out: W, m: &SquareMatrix<f64>) -> Result<()> {
    write_rows(out, (0..m.n()).map(|r| m.row(r)))
}

pub fn write_matrix(path: &Path, m: &SquareMatrix<f64>) -> Result<()> {
    write_matrix_to(create(path)?, m)
}

/// One row per instant, one column per node.
pub fn write_trace_to<W: Write>(out: W, trace: &[ProbabilityVector]) -> Result<()> {
    write_rows(out, trace.iter().map(|p| p.values().to_vec()))
}

pub fn write_trace(path: &Path, trace: &[ProbabilityVector]) -> Result<()> {
    write_trace_to(create(path)?, trace)
}

pub fn parse_trace<R: Read>(reader: R) -> Result<Vec<Vec<f64>>> {
    read_rows(reader)
}

/// `node_index,score` lines, by node or by descending score.
pub fn write_ranking_to<W: Write>(mut out: W, ranking: &ProbabilityVector, by_score: bool) -> Result<()> {
    let rows: Vec<(usize, f64)> = if by_score {
        ranked_nodes(ranking)
    } else {
        ranking.values().iter().copied().enumerate().collect()
    };
    for (node, score) in rows {
        writeln!(out, "{node},{score}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_ranking(path: &Path, ranking: &ProbabilityVector, by_score: bool) -> Result<()> {
    write_ranking_to(create(path)?, ranking, by_score)
}

pub fn parse_ranking<R: Read>(reader: R) -> Result<Vec<(usize, f64)>> {
    read_rows::<f64, _>(reader)?
        .into_iter()
        .enumerate()
        .map(|(k, row)| match row[..] {
            [node, score] if node >= 0.0 && node.fract() == 0.0 => Ok((node as usize, score)),
            _ => Err(Error::Parse {
                line: k + 1,
                message: "expected `node_index,score`".into(),
            }),
        })
        .collect()
}

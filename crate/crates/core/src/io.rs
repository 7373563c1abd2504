//! CSV interchange.
//!
//! Protocol files carry a mandatory header `t,gamma` or `t,gamma,lambda`,
//! one row per grid node. The first time must be 0 and the spacing uniform to
//! `1e-9` relative to the duration. Numbers are written with 17 significant
//! digits so a file read back reproduces the protocol bit for bit.

use std::io::{Read, Write};
use std::path::Path;

use crate::descent::IterationRecord;
use crate::error::{QocError, Result};
use crate::model::{heating_rate, von_neumann_entropy, PhysicsParams, Trajectory};
use crate::protocol::{ControlProtocol, TimeGrid};
use crate::qsl::bures_angle;

/// Relative tolerance on the spacing of the time column.
pub const UNIFORMITY_TOL: f64 = 1e-9;

/// Full-precision float formatting used in every data file.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn read_protocol<R: Read>(reader: R) -> Result<ControlProtocol> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| QocError::Csv { row: 1, message: e.to_string() })?.clone();
    let names: Vec<&str> = headers.iter().collect();
    let with_lambda = match names.as_slice() {
        ["t", "gamma"] => false,
        ["t", "gamma", "lambda"] => true,
        [] | [""] => return Err(QocError::Csv { row: 1, message: "file is empty".into() }),
        other => {
            return Err(QocError::Csv {
                row: 1,
                message: format!("expected header t,gamma[,lambda], found {}", other.join(",")),
            })
        }
    };

    let mut times = Vec::new();
    let mut gamma = Vec::new();
    let mut lambda = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        // header is line 1
        let row = i + 2;
        let record = record.map_err(|e| QocError::Csv { row, message: e.to_string() })?;
        if record.len() != names.len() {
            return Err(QocError::Csv {
                row,
                message: format!("expected {} fields, found {}", names.len(), record.len()),
            });
        }
        let field = |j: usize| -> Result<f64> {
            let raw = &record[j];
            let v: f64 = raw.parse().map_err(|_| QocError::Csv {
                row,
                message: format!("cannot parse {:?} in column {}", raw, names[j]),
            })?;
            if !v.is_finite() {
                return Err(QocError::Csv { row, message: format!("non-finite {}", names[j]) });
            }
            Ok(v)
        };
        times.push(field(0)?);
        gamma.push(field(1)?);
        if with_lambda {
            lambda.push(field(2)?);
        }
    }

    if times.len() < 3 {
        return Err(QocError::Csv {
            row: times.len() + 1,
            message: format!("need at least 3 data rows, found {}", times.len()),
        });
    }
    let n = times.len() - 1;
    let tau = times[n];
    let grid = TimeGrid::new(tau, n).map_err(|e| QocError::Csv { row: n + 2, message: e.to_string() })?;
    for (k, t) in times.iter().enumerate() {
        if (t - grid.time(k)).abs() > UNIFORMITY_TOL * tau {
            return Err(QocError::Csv {
                row: k + 2,
                message: format!("time {t} breaks uniform spacing (expected {})", grid.time(k)),
            });
        }
    }
    if with_lambda {
        ControlProtocol::with_lamb_shift(grid, gamma, lambda)
    } else {
        ControlProtocol::new(grid, gamma)
    }
}

pub fn read_protocol_file(path: &Path) -> Result<ControlProtocol> {
    let file = std::fs::File::open(path)?;
    read_protocol(std::io::BufReader::new(file))
}

/// Writes `t,gamma`, plus `lambda` when any shift is non-zero.
pub fn write_protocol<W: Write>(protocol: &ControlProtocol, writer: W) -> Result<()> {
    let with_lambda = protocol.lambda().iter().any(|l| *l != 0.0);
    let grid = protocol.grid();
    let mut columns = vec![grid.times(), protocol.gamma().to_vec()];
    let mut header = vec!["t", "gamma"];
    if with_lambda {
        header.push("lambda");
        columns.push(protocol.lambda().to_vec());
    }
    write_table(writer, &header, &columns)
}

pub fn write_protocol_file(protocol: &ControlProtocol, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_protocol(protocol, std::io::BufWriter::new(file))
}

/// Column-major numeric table with a header row, LF line endings.
pub fn write_table<W: Write>(writer: W, header: &[&str], columns: &[Vec<f64>]) -> Result<()> {
    if header.len() != columns.len() {
        return Err(QocError::Config("header and column count differ".into()));
    }
    let rows = columns.first().map_or(0, Vec::len);
    if columns.iter().any(|c| c.len() != rows) {
        return Err(QocError::Config("columns have different lengths".into()));
    }
    let mut wtr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(writer);
    let csv_err = |e: csv::Error| QocError::Io(e.to_string());
    wtr.write_record(header).map_err(csv_err)?;
    for r in 0..rows {
        wtr.write_record(columns.iter().map(|c| fmt_f64(c[r]))).map_err(csv_err)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_table_file(path: &Path, header: &[&str], columns: &[Vec<f64>]) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_table(std::io::BufWriter::new(file), header, columns)
}

/// `iter,J,residual,epsilon_used`, one row per recorded iterate.
pub fn write_history<W: Write>(history: &[IterationRecord], writer: W) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(writer);
    let csv_err = |e: csv::Error| QocError::Io(e.to_string());
    wtr.write_record(["iter", "J", "residual", "epsilon_used"]).map_err(csv_err)?;
    for r in history {
        wtr.write_record([r.iter.to_string(), fmt_f64(r.cost), fmt_f64(r.residual), fmt_f64(r.epsilon_used)])
            .map_err(csv_err)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_history_file(history: &[IterationRecord], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_history(history, std::io::BufWriter::new(file))
}

/// Observables along a trajectory, one per column:
/// `t,z,heat_rate,entropy,bures_angle`, with `x,y` after `t` when
/// `transverse` is set.
pub fn trajectory_table(
    traj: &Trajectory,
    params: &PhysicsParams,
    transverse: bool,
) -> Result<(Vec<&'static str>, Vec<Vec<f64>>)> {
    let states = traj.states();
    let mut header = vec!["t"];
    let mut columns = vec![traj.times()];
    if transverse {
        header.extend(["x", "y"]);
        columns.push(states.iter().map(|s| s.x).collect());
        columns.push(states.iter().map(|s| s.y).collect());
    }
    header.extend(["z", "heat_rate", "entropy", "bures_angle"]);
    columns.push(traj.z());
    columns.push(heating_rate(traj, params));
    columns.push(states.iter().map(von_neumann_entropy).collect::<Result<_>>()?);
    columns.push(states.iter().map(|s| bures_angle(s.z)).collect::<Result<_>>()?);
    Ok((header, columns))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{constant_guess, AdmissibilityTarget};

    fn read(s: &str) -> Result<ControlProtocol> {
        read_protocol(s.as_bytes())
    }

    #[test]
    fn reads_minimal_file() {
        let p = read("t,gamma\n0,1\n0.5,2\n1,3\n").unwrap();
        assert_eq!(p.gamma(), &[1.0, 2.0, 3.0]);
        assert_eq!(p.tau(), 1.0);
        assert_eq!(p.lambda(), &[0.0; 3]);
    }

    #[test]
    fn reads_lamb_shift_column() {
        let p = read("t,gamma,lambda\n0,1,0.1\n1,2,0.2\n2,3,0.3\n").unwrap();
        assert_eq!(p.lambda(), &[0.1, 0.2, 0.3]);
        assert_eq!(p.grid().step(), 1.0);
    }

    #[test]
    fn empty_file_is_rejected() {
        assert!(matches!(read(""), Err(QocError::Csv { row: 1, .. })));
        assert!(matches!(read("t,gamma\n"), Err(QocError::Csv { .. })));
    }

    #[test]
    fn bad_header_is_rejected() {
        assert!(matches!(read("time,rate\n0,1\n1,1\n2,1\n"), Err(QocError::Csv { row: 1, .. })));
    }

    #[test]
    fn malformed_row_reports_line() {
        let err = read("t,gamma\n0,1\n0.5,abc\n1,1\n").unwrap_err();
        assert!(matches!(err, QocError::Csv { row: 3, .. }), "{err:?}");
        let err = read("t,gamma\n0,1\n0.5,1,7\n1,1\n").unwrap_err();
        assert!(matches!(err, QocError::Csv { row: 3, .. }), "{err:?}");
    }

    #[test]
    fn non_uniform_grid_is_rejected() {
        let err = read("t,gamma\n0,1\n0.4,1\n1,1\n").unwrap_err();
        assert!(matches!(err, QocError::Csv { row: 3, .. }), "{err:?}");
        let err = read("t,gamma\n0.1,1\n0.5,1\n1,1\n").unwrap_err();
        assert!(matches!(err, QocError::Csv { row: 2, .. }), "{err:?}");
    }

    #[test]
    fn trajectory_table_layout() {
        let g = TimeGrid::new(1.0, 10).unwrap();
        let c = constant_guess(&AdmissibilityTarget::default(), g);
        let traj = crate::model::propagate_z(&c, 1.0).unwrap();
        let (h, cols) = trajectory_table(&traj, &PhysicsParams::default(), false).unwrap();
        assert_eq!(h, ["t", "z", "heat_rate", "entropy", "bures_angle"]);
        assert!(cols.iter().all(|c| c.len() == 11));
        assert_eq!(cols[3][0], 0.0);
        let (h, cols) = trajectory_table(&traj, &PhysicsParams::default(), true).unwrap();
        assert_eq!(h.len(), 7);
        assert_eq!(cols.len(), 7);
    }

    #[test]
    fn history_rows() {
        let rows = [
            IterationRecord { iter: 0, cost: 1.5, residual: 0.0, epsilon_used: 0.0 },
            IterationRecord { iter: 1, cost: 1.25, residual: 1e-16, epsilon_used: 0.1 },
        ];
        let mut buf = Vec::new();
        write_history(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "iter,J,residual,epsilon_used");
        assert!(lines[2].starts_with("1,1.25"));
        assert_eq!(lines.len(), 3);
    }

    #[test]
    fn roundtrip_is_bit_exact() {
        let g = TimeGrid::new(1.3, 777).unwrap();
        let p = ControlProtocol::from_fn(g, |t| (3.0 * t).sin() / 7.0 + 1.0 / 3.0).unwrap();
        let mut buf = Vec::new();
        write_protocol(&p, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("t,gamma\n"));
        assert!(!text.contains('\r'));
        assert_eq!(read_protocol(buf.as_slice()).unwrap(), p);

        let c = constant_guess(&AdmissibilityTarget::default(), TimeGrid::new(1.0, 10).unwrap());
        let mut buf = Vec::new();
        write_protocol(&c, &mut buf).unwrap();
        assert_eq!(read_protocol(buf.as_slice()).unwrap(), c);
    }
}

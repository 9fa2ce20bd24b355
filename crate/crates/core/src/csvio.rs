//! Plot-ready CSV output for trajectories and error signals, plus a strict
//! reader for the trajectory file.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::formation::FormationSpec;
use crate::geometry::Point;
use crate::sim::Trajectory;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn join_labels(parts: &[usize], n: usize) -> String {
    let sep = if n > 9 { "_" } else { "" };
    parts.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(sep)
}

pub fn trajectory_header(n: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    for k in 1..=n {
        h.push(format!("p{k}x"));
        h.push(format!("p{k}y"));
    }
    h
}

/// `z_ji` per edge in edge order, then `s_ijk` per triangle. With more
/// than nine agents the label digits are separated by underscores.
pub fn errors_header(spec: &FormationSpec) -> Vec<String> {
    let n = spec.n();
    let mut h = vec!["t".to_string()];
    for e in spec.graph().edges() {
        let (j, i) = e.label();
        h.push(format!("z_{}", join_labels(&[j, i], n)));
    }
    for t in spec.triangles().iter() {
        let l = t.label();
        h.push(format!("s_{}", join_labels(&[l.0, l.1, l.2], n)));
    }
    h
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

fn write_rows<W: Write>(out: W, header: &[String], rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row.iter().map(|&v| fmt_f64(v))).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trajectory<W: Write>(out: W, traj: &Trajectory, n: usize) -> Result<()> {
    let rows = traj.times.iter().zip(&traj.positions).map(|(&t, p)| {
        let mut row = Vec::with_capacity(1 + 2 * n);
        row.push(t);
        for q in p {
            row.push(q.x);
            row.push(q.y);
        }
        row
    });
    write_rows(out, &trajectory_header(n), rows)
}

pub fn write_errors<W: Write>(out: W, traj: &Trajectory, spec: &FormationSpec) -> Result<()> {
    let rows = traj.times.iter().zip(&traj.errors).map(|(&t, e)| {
        let mut row = Vec::with_capacity(1 + e.z.len() + e.s.len());
        row.push(t);
        row.extend_from_slice(&e.z);
        row.extend_from_slice(&e.s);
        row
    });
    write_rows(out, &errors_header(spec), rows)
}

pub fn write_trajectory_file(path: &Path, traj: &Trajectory, n: usize) -> Result<()> {
    let f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_trajectory(f, traj, n)
}

pub fn write_errors_file(path: &Path, traj: &Trajectory, spec: &FormationSpec) -> Result<()> {
    let f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_errors(f, traj, spec)
}

/// A trajectory CSV read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryTable {
    pub n: usize,
    pub times: Vec<f64>,
    pub positions: Vec<Vec<Point>>,
}

impl TrajectoryTable {
    pub fn last(&self) -> Option<(f64, &[Point])> {
        Some((*self.times.last()?, self.positions.last()?.as_slice()))
    }
}

/// Parses a trajectory CSV. Empty files, header mismatches, ragged or
/// non-numeric rows, and a missing final newline all count as parse errors.
pub fn read_trajectory(text: &str) -> Result<TrajectoryTable> {
    if text.trim().is_empty() {
        return Err(Error::Parse("trajectory CSV is empty".into()));
    }
    if !text.ends_with('\n') {
        return Err(Error::Parse("trajectory CSV is truncated (no final newline)".into()));
    }
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header: Vec<String> = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    if header.len() < 3 || header.len() % 2 == 0 {
        return Err(Error::Parse(format!("unexpected trajectory header with {} columns", header.len())));
    }
    let n = (header.len() - 1) / 2;
    if header != trajectory_header(n) {
        return Err(Error::Parse(format!("unexpected trajectory header: {}", header.join(","))));
    }
    let mut table = TrajectoryTable {
        n,
        times: Vec::new(),
        positions: Vec::new(),
    };
    for (row_no, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let vals = rec
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse(format!("row {}: {e}", row_no + 2)))?;
        table.times.push(vals[0]);
        table
            .positions
            .push(vals[1..].chunks_exact(2).map(|c| Point::new(c[0], c[1])).collect());
    }
    if table.times.is_empty() {
        return Err(Error::Parse("trajectory CSV has no data rows".into()));
    }
    Ok(table)
}

pub fn read_trajectory_file(path: &Path) -> Result<TrajectoryTable> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    read_trajectory(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::errors;
    use crate::geometry::Orientation;
    use crate::graph::build_lff;

    fn sample() -> (FormationSpec, Trajectory) {
        let g = build_lff(3, &[(1, 2)]).unwrap();
        let spec = FormationSpec::from_distances(g, vec![2.0; 3], vec![Orientation::CounterClockwise]).unwrap();
        let mut traj = Trajectory::default();
        for (k, t) in [0.0, 0.01, 0.1 / 3.0].into_iter().enumerate() {
            let p = vec![
                Point::new(0.1 * k as f64, 1.0 / 3.0),
                Point::new(std::f64::consts::PI, -2.5e-17),
                Point::new(1e300, -7.0),
            ];
            traj.errors.push(errors(&spec, &p));
            traj.positions.push(p);
            traj.times.push(t);
            traj.lyapunov.push(0.0);
        }
        (spec, traj)
    }

    #[test]
    fn headers() {
        assert_eq!(trajectory_header(2).join(","), "t,p1x,p1y,p2x,p2y");
        let (spec, _) = sample();
        assert_eq!(errors_header(&spec).join(","), "t,z_21,z_31,z_32,s_123");
        let g = build_lff(11, &(1..=9).map(|k| (k, k + 1)).collect::<Vec<_>>()).unwrap();
        let pos: Vec<Point> = (0..11).map(|k| Point::new(k as f64, (k % 2) as f64)).collect();
        let big = FormationSpec::from_coordinates(g, pos).unwrap();
        let h = errors_header(&big);
        assert_eq!(h[1], "z_2_1");
        assert_eq!(h.last().unwrap(), "s_9_10_11");
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let (spec, traj) = sample();
        let mut buf = Vec::new();
        write_trajectory(&mut buf, &traj, 3).unwrap();
        let back = read_trajectory(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back.times, traj.times);
        assert_eq!(back.positions, traj.positions);

        let mut ebuf = Vec::new();
        write_errors(&mut ebuf, &traj, &spec).unwrap();
        let text = String::from_utf8(ebuf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert_eq!(text.lines().nth(1).unwrap().split(',').count(), 5);
    }

    #[test]
    fn rejects_bad_files() {
        let (_, traj) = sample();
        let mut buf = Vec::new();
        write_trajectory(&mut buf, &traj, 3).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let header_only = format!("{}\n", trajectory_header(3).join(","));
        let cut = &text[..text.len() - 9];
        let ragged = text.replacen(",", ",,", 1);
        for bad in ["", "\n", header_only.as_str(), cut, ragged.as_str(), "t,p1x\n0,1\n"] {
            assert!(matches!(read_trajectory(bad), Err(Error::Parse(_))), "{bad:?}");
        }
        let garbage = text.replace("e-1", "e-x");
        assert!(read_trajectory(&garbage).is_err());
    }
}

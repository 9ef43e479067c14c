//! CSV probes, PGM snapshots and their JSON sidecar.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{Field, SolverError, Trajectory};
use crate::geometry::DomainMask;

pub fn write_probes_csv(traj: &Trajectory, path: &Path) -> Result<(), SolverError> {
    let mut s = String::from("time");
    for n in &traj.names {
        s.push(',');
        s.push_str(n);
    }
    s.push('\n');
    for (t, row) in traj.times.iter().zip(&traj.rows) {
        write!(s, "{t}").unwrap();
        for v in row {
            write!(s, ",{v}").unwrap();
        }
        s.push('\n');
    }
    std::fs::write(path, s)?;
    Ok(())
}

/// Binary PGM of `u` clamped to `[0,1]` and scaled to `[0,255]`; obstacle
/// cells are 0. Top row is the largest `y`.
pub fn write_snapshot_pgm(mask: &DomainMask, values: &[f64], path: &Path) -> Result<(), SolverError> {
    let g = &mask.grid;
    let mut bytes = format!("P5\n{} {}\n255\n", g.nx, g.ny).into_bytes();
    for j in (0..g.ny).rev() {
        for i in 0..g.nx {
            let v = mask.fluid_index(g.index(i, j)).map_or(0.0, |k| values[k]);
            bytes.push((v.clamp(0.0, 1.0) * 255.0).round() as u8);
        }
    }
    std::fs::write(path, bytes)?;
    Ok(())
}

#[derive(Serialize)]
struct SnapshotEntry {
    file: String,
    time: f64,
}

/// Writes `snap_XXXX.pgm` files plus `snapshots.json` into `dir`.
pub fn write_snapshots(mask: &DomainMask, traj: &Trajectory, dir: &Path) -> Result<Vec<PathBuf>, SolverError> {
    std::fs::create_dir_all(dir)?;
    let mut entries = Vec::new();
    let mut paths = Vec::new();
    for (i, (t, values)) in traj.snapshots.iter().enumerate() {
        let file = format!("snap_{i:04}.pgm");
        let path = dir.join(&file);
        write_snapshot_pgm(mask, values, &path)?;
        entries.push(SnapshotEntry { file, time: *t });
        paths.push(path);
    }
    let json = serde_json::to_string_pretty(&entries).map_err(|e| SolverError::Invalid(e.to_string()))?;
    std::fs::write(dir.join("snapshots.json"), json)?;
    Ok(paths)
}

/// Current field as a one-off snapshot.
pub fn write_field_pgm(u: &Field, path: &Path) -> Result<(), SolverError> {
    write_snapshot_pgm(&u.mask, &u.values, path)
}

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use qoc_core::io::{trajectory_table, write_history_file, write_protocol_file, write_table_file};
use qoc_core::{ControlProtocol, IterationRecord, PhysicsParams, Trajectory};
use serde::Serialize;

pub fn prepare_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))
}

pub fn protocol(dir: &Path, protocol: &ControlProtocol) -> Result<PathBuf> {
    let path = dir.join("protocol.csv");
    write_protocol_file(protocol, &path).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

pub fn trajectory(
    dir: &Path,
    traj: &Trajectory,
    params: &PhysicsParams,
    transverse: bool,
) -> Result<PathBuf> {
    let (header, columns) = trajectory_table(traj, params, transverse)?;
    table(dir, "trajectory.csv", &header, &columns)
}

pub fn history(dir: &Path, history: &[IterationRecord]) -> Result<PathBuf> {
    let path = dir.join("history.csv");
    write_history_file(history, &path).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

pub fn table(dir: &Path, name: &str, header: &[&str], columns: &[Vec<f64>]) -> Result<PathBuf> {
    let path = dir.join(name);
    write_table_file(&path, header, columns).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

pub fn json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

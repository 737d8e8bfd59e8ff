//! Trace persistence: CSV for the time series, JSON sidecar for the
//! metadata.
//!
//! CSV columns are `t, x_1, y_1, z_1, vx_1, vy_1, vz_1, x_2, ...` with
//! numerals at 17 significant digits, enough to round-trip every f64
//! exactly. The sidecar holds frame units, masses, Gamma, tolerances,
//! termination reason and the dilation history, and round-trips bit-exact.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dimension::{Dimension, DimensionSystem};
use crate::quantity::{Quantity, UnitFrame};

use super::{DilationLTM, GravError, GravSystem, Termination, Trajectory};

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct TraceMeta {
    pub fundamentals: Vec<String>,
    pub unit_names: Vec<String>,
    pub masses: Vec<f64>,
    pub gamma: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub min_distance: f64,
    pub termination: Termination,
    pub dilation_history: Vec<DilationLTM>,
    pub constraint_satisfied: bool,
}

impl TraceMeta {
    pub fn of(trajectory: &Trajectory) -> TraceMeta {
        let system = &trajectory.system;
        TraceMeta {
            fundamentals: system.frame().system().fundamentals().to_vec(),
            unit_names: system.frame().unit_names().to_vec(),
            masses: system.mass_values().to_vec(),
            gamma: system.gamma_value(),
            rel_tol: trajectory.rel_tol,
            abs_tol: trajectory.abs_tol,
            min_distance: trajectory.min_distance,
            termination: trajectory.termination,
            dilation_history: trajectory.dilation_history.clone(),
            constraint_satisfied: trajectory.constraint_satisfied,
        }
    }
}

fn io_err(e: impl std::fmt::Display) -> GravError {
    GravError::Trace(e.to_string())
}

/// Write `trajectory` as CSV plus JSON metadata sidecar.
pub fn write_trace(
    trajectory: &Trajectory,
    csv_path: &Path,
    meta_path: &Path,
) -> Result<(), GravError> {
    let n = trajectory.body_count();
    let mut out = String::from("t");
    for i in 1..=n {
        out.push_str(&format!(",x_{i},y_{i},z_{i},vx_{i},vy_{i},vz_{i}"));
    }
    out.push('\n');
    for k in 0..trajectory.len() {
        out.push_str(&format!("{:.16e}", trajectory.times[k]));
        for i in 0..n {
            let p = trajectory.positions[k][i];
            let v = trajectory.velocities[k][i];
            for c in [p[0], p[1], p[2], v[0], v[1], v[2]] {
                out.push_str(&format!(",{c:.16e}"));
            }
        }
        out.push('\n');
    }
    fs::write(csv_path, out).map_err(io_err)?;

    let meta = TraceMeta::of(trajectory);
    fs::write(meta_path, serde_json::to_string_pretty(&meta).map_err(io_err)?).map_err(io_err)?;
    Ok(())
}

/// Read a trace back into a trajectory.
pub fn read_trace(csv_path: &Path, meta_path: &Path) -> Result<Trajectory, GravError> {
    let meta: TraceMeta =
        serde_json::from_str(&fs::read_to_string(meta_path).map_err(io_err)?).map_err(io_err)?;
    let system = system_from_meta(&meta)?;
    let n = system.body_count();

    let csv = fs::read_to_string(csv_path).map_err(io_err)?;
    let mut lines = csv.lines();
    let header = lines.next().ok_or_else(|| io_err("empty csv"))?;
    let expected_cols = 1 + 6 * n;
    if header.split(',').count() != expected_cols {
        return Err(io_err(format!(
            "csv has {} columns, metadata implies {}",
            header.split(',').count(),
            expected_cols
        )));
    }
    let mut times = Vec::new();
    let mut positions = Vec::new();
    let mut velocities = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<f64> = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| io_err(format!("line {}: {e}", lineno + 2)))?;
        if fields.len() != expected_cols {
            return Err(io_err(format!("line {}: wrong column count", lineno + 2)));
        }
        times.push(fields[0]);
        let mut pos = Vec::with_capacity(n);
        let mut vel = Vec::with_capacity(n);
        for i in 0..n {
            let base = 1 + 6 * i;
            pos.push([fields[base], fields[base + 1], fields[base + 2]]);
            vel.push([fields[base + 3], fields[base + 4], fields[base + 5]]);
        }
        positions.push(pos);
        velocities.push(vel);
    }

    let traj = Trajectory {
        system,
        times,
        positions,
        velocities,
        termination: meta.termination,
        rel_tol: meta.rel_tol,
        abs_tol: meta.abs_tol,
        min_distance: meta.min_distance,
        dilation_history: meta.dilation_history,
        constraint_satisfied: meta.constraint_satisfied,
    };
    traj.check_invariants()?;
    Ok(traj)
}

fn system_from_meta(meta: &TraceMeta) -> Result<GravSystem, GravError> {
    let sys = DimensionSystem::new(meta.fundamentals.clone())?;
    let frame = UnitFrame::new(&sys, meta.unit_names.clone())?;
    let mass_dim = Dimension::from_int_exponents(&sys, &[0, 0, 1])?;
    let gamma_dim = Dimension::from_int_exponents(&sys, &[3, -2, -1])?;
    GravSystem::new(
        &frame,
        meta.masses
            .iter()
            .map(|&m| Quantity::new(m, mass_dim.clone(), &frame))
            .collect::<Result<_, _>>()?,
        Quantity::new(meta.gamma, gamma_dim, &frame)?,
    )
}

//! Adaptive embedded Runge-Kutta integration of the N-body equations.
//!
//! Dormand-Prince 5(4) with standard PI-free step control. Steps are capped
//! so the solution is recorded on a uniform output grid; the grid spacing
//! bounds the differencing error of the downstream residual and
//! Gamma-measurement analyses.

use super::{accel_raw, BodyState, GravError, GravSystem, Termination, Trajectory};
use crate::quantity::Quantity;

#[derive(Debug, Clone)]
pub struct IntegrateOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Collision proxy in frame length units; `None` means
    /// 1e-9 of the initial minimum pairwise separation.
    pub min_distance: Option<f64>,
    /// Number of uniform output intervals between t0 and t1.
    pub output_points: usize,
    pub max_steps: usize,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            min_distance: None,
            output_points: 1000,
            max_steps: 50_000_000,
        }
    }
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Flattened state: [x1 y1 z1 ... xN yN zN vx1 ... vzN].
fn deriv(system: &GravSystem, y: &[f64], out: &mut [f64]) -> Result<(), GravError> {
    let n = system.body_count();
    let positions: Vec<[f64; 3]> = (0..n)
        .map(|i| [y[3 * i], y[3 * i + 1], y[3 * i + 2]])
        .collect();
    let acc = accel_raw(system.gamma_value(), system.mass_values(), &positions)?;
    out[..3 * n].copy_from_slice(&y[3 * n..]);
    for i in 0..n {
        out[3 * n + 3 * i..3 * n + 3 * i + 3].copy_from_slice(&acc[i]);
    }
    Ok(())
}

fn min_pairwise_distance(y: &[f64], n: usize) -> f64 {
    let mut min = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            let dx = y[3 * i] - y[3 * j];
            let dy = y[3 * i + 1] - y[3 * j + 1];
            let dz = y[3 * i + 2] - y[3 * j + 2];
            min = min.min((dx * dx + dy * dy + dz * dz).sqrt());
        }
    }
    min
}

/// Integrate the equations of motion from `init` over `[t0, t1]`.
///
/// Stops early with `CollisionAtEnd` when the collision proxy (minimum
/// pairwise distance below the threshold) fires, or `StepUnderflow` when
/// the adaptive step collapses.
pub fn integrate(
    system: &GravSystem,
    init: &[BodyState],
    t0: &Quantity,
    t1: &Quantity,
    opts: &IntegrateOptions,
) -> Result<Trajectory, GravError> {
    let n = system.body_count();
    if init.len() != n {
        return Err(GravError::BodyCount {
            got: init.len(),
            expected: n,
        });
    }
    let time_dim = system.time_dim();
    if t0.dim() != &time_dim || t1.dim() != &time_dim {
        return Err(GravError::StateDimension {
            got: format!("{} / {}", t0.dim(), t1.dim()),
            expected: time_dim.to_string(),
        });
    }
    let (ta, tb) = (t0.magnitude(), t1.magnitude());
    if !(ta < tb) {
        return Err(GravError::BadTimeSpan);
    }

    let dim = 6 * n;
    let mut y = vec![0.0; dim];
    for (i, s) in init.iter().enumerate() {
        if s.position().dim() != &system.length_dim() {
            return Err(GravError::StateDimension {
                got: s.position().dim().to_string(),
                expected: system.length_dim().to_string(),
            });
        }
        y[3 * i..3 * i + 3].copy_from_slice(&s.position().components());
        y[3 * n + 3 * i..3 * n + 3 * i + 3].copy_from_slice(&s.velocity().components());
    }

    let initial_min_dist = min_pairwise_distance(&y, n);
    if n > 1 && initial_min_dist == 0.0 {
        let positions: Vec<[f64; 3]> = (0..n)
            .map(|i| [y[3 * i], y[3 * i + 1], y[3 * i + 2]])
            .collect();
        accel_raw(system.gamma_value(), system.mass_values(), &positions)?;
        unreachable!("zero separation must be reported as a coincident pair");
    }
    let min_distance = opts
        .min_distance
        .unwrap_or(1e-9 * if n > 1 { initial_min_dist } else { 1.0 });
    if n > 1 && initial_min_dist < min_distance {
        return Ok(record_only_start(
            system,
            ta,
            &y,
            Termination::CollisionAtStart,
            opts,
            min_distance,
        ));
    }

    let span = tb - ta;
    let points = opts.output_points.max(1);
    let grid_dt = span / points as f64;

    let mut times = Vec::with_capacity(points + 1);
    let mut positions = Vec::with_capacity(points + 1);
    let mut velocities = Vec::with_capacity(points + 1);
    let record = |t: f64,
                  y: &[f64],
                  times: &mut Vec<f64>,
                  positions: &mut Vec<Vec<[f64; 3]>>,
                  velocities: &mut Vec<Vec<[f64; 3]>>| {
        times.push(t);
        positions.push((0..n).map(|i| [y[3 * i], y[3 * i + 1], y[3 * i + 2]]).collect());
        velocities.push(
            (0..n)
                .map(|i| [y[3 * n + 3 * i], y[3 * n + 3 * i + 1], y[3 * n + 3 * i + 2]])
                .collect(),
        );
    };

    let mut t = ta;
    record(t, &y, &mut times, &mut positions, &mut velocities);

    let mut k = vec![vec![0.0; dim]; 7];
    let mut y_stage = vec![0.0; dim];
    let mut y5 = vec![0.0; dim];
    let mut h = grid_dt; // grid spacing is a safe first guess at tight tol
    let mut termination = Termination::ReachedEnd;
    let mut next_grid = 1usize;
    let mut steps = 0usize;

    'outer: while next_grid <= points {
        let grid_t = ta + next_grid as f64 * grid_dt;
        while t < grid_t {
            if steps >= opts.max_steps {
                termination = Termination::StepUnderflow;
                break 'outer;
            }
            steps += 1;
            let mut h_try = h.min(grid_t - t);
            if h_try < span * 1e-14 {
                h_try = grid_t - t; // snap over roundoff remainder
            }

            deriv(system, &y, &mut k[0])?;
            let mut step_err;
            loop {
                for s in 1..7 {
                    for d in 0..dim {
                        let mut acc = 0.0;
                        for (j, kj) in k.iter().enumerate().take(s) {
                            acc += A[s - 1][j] * kj[d];
                        }
                        y_stage[d] = y[d] + h_try * acc;
                    }
                    let _ = C; // stage times unused: the system is autonomous
                    deriv(system, &y_stage, &mut k[s])?;
                }
                let mut err: f64 = 0.0;
                for d in 0..dim {
                    let mut acc5 = 0.0;
                    let mut acc4 = 0.0;
                    for (j, kj) in k.iter().enumerate() {
                        acc5 += B5[j] * kj[d];
                        acc4 += B4[j] * kj[d];
                    }
                    y5[d] = y[d] + h_try * acc5;
                    let scale = opts.abs_tol + opts.rel_tol * y[d].abs().max(y5[d].abs());
                    let e = h_try * (acc5 - acc4) / scale;
                    err += e * e;
                }
                step_err = (err / dim as f64).sqrt();
                if step_err <= 1.0 {
                    break;
                }
                h_try *= (0.9 * step_err.powf(-0.2)).clamp(0.2, 1.0);
                if h_try < span * 1e-15 {
                    termination = Termination::StepUnderflow;
                    break 'outer;
                }
            }
            t += h_try;
            y.copy_from_slice(&y5);
            let factor = if step_err > 0.0 {
                (0.9 * step_err.powf(-0.2)).clamp(0.2, 5.0)
            } else {
                5.0
            };
            h = h_try * factor;

            if n > 1 && min_pairwise_distance(&y, n) < min_distance {
                record(t, &y, &mut times, &mut positions, &mut velocities);
                termination = Termination::CollisionAtEnd;
                break 'outer;
            }
        }
        record(t, &y, &mut times, &mut positions, &mut velocities);
        next_grid += 1;
    }

    let traj = Trajectory {
        system: system.clone(),
        times,
        positions,
        velocities,
        termination,
        rel_tol: opts.rel_tol,
        abs_tol: opts.abs_tol,
        min_distance,
        dilation_history: Vec::new(),
        constraint_satisfied: true,
    };
    traj.check_invariants()?;
    Ok(traj)
}

fn record_only_start(
    system: &GravSystem,
    t: f64,
    y: &[f64],
    termination: Termination,
    opts: &IntegrateOptions,
    min_distance: f64,
) -> Trajectory {
    let n = system.body_count();
    Trajectory {
        system: system.clone(),
        times: vec![t],
        positions: vec![(0..n).map(|i| [y[3 * i], y[3 * i + 1], y[3 * i + 2]]).collect()],
        velocities: vec![(0..n)
            .map(|i| [y[3 * n + 3 * i], y[3 * n + 3 * i + 1], y[3 * n + 3 * i + 2]])
            .collect()],
        termination,
        rel_tol: opts.rel_tol,
        abs_tol: opts.abs_tol,
        min_distance,
        dilation_history: Vec::new(),
        constraint_satisfied: true,
    }
}

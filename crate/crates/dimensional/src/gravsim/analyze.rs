//! Trajectory analyses: equation-of-motion residual, Gamma measurement,
//! and conserved-quantity checks.
//!
//! Second derivatives come from central differences on the recorded
//! (possibly non-uniform) grid, endpoints excluded, so the analyses stay
//! independent of the integrator's internal derivative evaluations.

use super::{accel_raw, GravError, Trajectory};
use crate::quantity::Quantity;

/// Non-uniform central difference for the second derivative at the middle
/// of three samples.
fn second_derivative(
    x0: &[f64; 3],
    x1: &[f64; 3],
    x2: &[f64; 3],
    h0: f64,
    h1: f64,
) -> [f64; 3] {
    let mut out = [0.0; 3];
    for a in 0..3 {
        out[a] = 2.0 * (h1 * x0[a] - (h0 + h1) * x1[a] + h0 * x2[a]) / (h0 * h1 * (h0 + h1));
    }
    out
}

fn norm3(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Maximum over interior samples and bodies of the norm of
/// (numerical second derivative - modelled acceleration), as a quantity of
/// dimension L T^-2.
pub fn residual(trajectory: &Trajectory) -> Result<Quantity, GravError> {
    if trajectory.len() < 3 {
        return Err(GravError::TooFewSamples {
            needed: 3,
            got: trajectory.len(),
        });
    }
    let system = &trajectory.system;
    let mut max = 0.0f64;
    for k in 1..trajectory.len() - 1 {
        let h0 = trajectory.times[k] - trajectory.times[k - 1];
        let h1 = trajectory.times[k + 1] - trajectory.times[k];
        let model = accel_raw(
            system.gamma_value(),
            system.mass_values(),
            &trajectory.positions[k],
        )?;
        for i in 0..trajectory.body_count() {
            let num = second_derivative(
                &trajectory.positions[k - 1][i],
                &trajectory.positions[k][i],
                &trajectory.positions[k + 1][i],
                h0,
                h1,
            );
            let diff = [
                num[0] - model[i][0],
                num[1] - model[i][1],
                num[2] - model[i][2],
            ];
            max = max.max(norm3(&diff));
        }
    }
    Ok(Quantity::new(max, system.accel_dim(), system.frame())?)
}

/// Result of fitting the universal line through the (r_i, l_i) cloud.
#[derive(Debug, Clone)]
pub struct GammaFit {
    /// Fitted slope as a quantity of dimension L^3 T^-2 M^-1.
    pub gamma: Quantity,
    /// RMS of the fit residuals relative to the fitted slope scale.
    pub relative_rms: f64,
    pub points: usize,
}

/// Recover Gamma from a trajectory: least-squares line through the origin
/// fitted to points (r_i(t), l_i(t)), where l_i is the numerically
/// differentiated acceleration norm and r_i the Gamma-stripped force norm.
pub fn measure_gamma(trajectory: &Trajectory) -> Result<GammaFit, GravError> {
    if trajectory.len() < 3 {
        return Err(GravError::TooFewSamples {
            needed: 3,
            got: trajectory.len(),
        });
    }
    let system = &trajectory.system;
    let mut sum_lr = 0.0;
    let mut sum_rr = 0.0;
    let mut points = Vec::new();
    for k in 1..trajectory.len() - 1 {
        let h0 = trajectory.times[k] - trajectory.times[k - 1];
        let h1 = trajectory.times[k + 1] - trajectory.times[k];
        // force norm with Gamma stripped: evaluate with Gamma = 1
        let stripped = accel_raw(1.0, system.mass_values(), &trajectory.positions[k])?;
        for i in 0..trajectory.body_count() {
            let l = norm3(&second_derivative(
                &trajectory.positions[k - 1][i],
                &trajectory.positions[k][i],
                &trajectory.positions[k + 1][i],
                h0,
                h1,
            ));
            let r = norm3(&stripped[i]);
            sum_lr += l * r;
            sum_rr += r * r;
            points.push((r, l));
        }
    }
    if sum_rr == 0.0 {
        return Err(GravError::Indeterminate);
    }
    let slope = sum_lr / sum_rr;
    let mut sq = 0.0;
    let mut scale = 0.0;
    for &(r, l) in &points {
        sq += (l - slope * r) * (l - slope * r);
        scale += (slope * r) * (slope * r);
    }
    let relative_rms = if scale > 0.0 { (sq / scale).sqrt() } else { 0.0 };
    Ok(GammaFit {
        gamma: Quantity::new(slope, system.gamma_dim(), system.frame())?,
        relative_rms,
        points: points.len(),
    })
}

/// Total momentum coordinates (frame units M L T^-1) at one sample.
pub fn total_momentum(trajectory: &Trajectory, sample: usize) -> [f64; 3] {
    let mut p = [0.0; 3];
    for (m, v) in trajectory
        .system
        .mass_values()
        .iter()
        .zip(&trajectory.velocities[sample])
    {
        for a in 0..3 {
            p[a] += m * v[a];
        }
    }
    p
}

/// Total energy (kinetic + Gamma-potential) in frame units at one sample.
pub fn total_energy(trajectory: &Trajectory, sample: usize) -> f64 {
    let system = &trajectory.system;
    let masses = system.mass_values();
    let mut e = 0.0;
    for (m, v) in masses.iter().zip(&trajectory.velocities[sample]) {
        e += 0.5 * m * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    }
    let pos = &trajectory.positions[sample];
    for i in 0..masses.len() {
        for j in i + 1..masses.len() {
            let d = [
                pos[i][0] - pos[j][0],
                pos[i][1] - pos[j][1],
                pos[i][2] - pos[j][2],
            ];
            e -= system.gamma_value() * masses[i] * masses[j] / norm3(&d);
        }
    }
    e
}

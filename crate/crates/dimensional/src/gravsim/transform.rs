//! Similarity transformations, time reflection, and the three readings of
//! a dilation applied to a recorded trace.

use serde::Serialize;

use super::{DilationLTM, GravError, Trajectory};

impl Trajectory {
    /// Apply a dilation: lengths scale about a fixed point (default the
    /// initial center of mass), time differences about the initial time,
    /// masses by mu; Gamma of the returned system is unchanged. The result
    /// is a solution of the equations of motion exactly when
    /// `lambda^3 tau^-2 mu^-1 = 1`, which is recorded in
    /// `constraint_satisfied`.
    pub fn similarity_transform(&self, d: &DilationLTM) -> Trajectory {
        self.similarity_transform_about(d, None, None)
    }

    pub fn similarity_transform_about(
        &self,
        d: &DilationLTM,
        fixed_point: Option<[f64; 3]>,
        fixed_time: Option<f64>,
    ) -> Trajectory {
        let fp = fixed_point.unwrap_or_else(|| self.initial_center_of_mass());
        let ft = fixed_time.unwrap_or(self.times[0]);
        let vel_factor = d.lambda / d.tau;

        let times = self.times.iter().map(|t| ft + d.tau * (t - ft)).collect();
        let positions = self
            .positions
            .iter()
            .map(|sample| {
                sample
                    .iter()
                    .map(|x| {
                        [
                            fp[0] + d.lambda * (x[0] - fp[0]),
                            fp[1] + d.lambda * (x[1] - fp[1]),
                            fp[2] + d.lambda * (x[2] - fp[2]),
                        ]
                    })
                    .collect()
            })
            .collect();
        let velocities = self
            .velocities
            .iter()
            .map(|sample| {
                sample
                    .iter()
                    .map(|v| [v[0] * vel_factor, v[1] * vel_factor, v[2] * vel_factor])
                    .collect()
            })
            .collect();

        let mut history = self.dilation_history.clone();
        history.push(*d);
        Trajectory {
            system: self.system.with_masses_scaled(d.mu),
            times,
            positions,
            velocities,
            termination: self.termination,
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            min_distance: self.min_distance * d.lambda,
            dilation_history: history,
            constraint_satisfied: self.constraint_satisfied && d.is_similarity(),
        }
    }
}

/// Reverse a trajectory about the midpoint of its time interval: sample
/// order flips and velocities change sign. The accelerations are even in
/// the time orientation, so the result still satisfies the equations of
/// motion.
pub fn time_reflect(trajectory: &Trajectory) -> Trajectory {
    let a = trajectory.times[0];
    let b = *trajectory.times.last().unwrap();
    let mut times: Vec<f64> = trajectory.times.iter().map(|t| a + b - t).collect();
    times.reverse();
    let mut positions = trajectory.positions.clone();
    positions.reverse();
    let mut velocities: Vec<Vec<[f64; 3]>> = trajectory
        .velocities
        .iter()
        .map(|sample| sample.iter().map(|v| [-v[0], -v[1], -v[2]]).collect())
        .collect();
    velocities.reverse();
    Trajectory {
        system: trajectory.system.clone(),
        times,
        positions,
        velocities,
        termination: trajectory.termination,
        rel_tol: trajectory.rel_tol,
        abs_tol: trajectory.abs_tol,
        min_distance: trajectory.min_distance,
        dilation_history: trajectory.dilation_history.clone(),
        constraint_satisfied: trajectory.constraint_satisfied,
    }
}

/// The three readings of a dilation applied to a report of a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformMode {
    /// Rescale quantities and units together: every numeral is unchanged.
    Leibniz,
    /// Units fixed, physics rescaled: numerals pick up the dilation factor
    /// of their dimension.
    Active,
    /// Physics fixed, units rescaled by the dilation: numerals change
    /// contravariantly.
    Passive,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportBody {
    pub mass: f64,
    pub positions: Vec<[f64; 3]>,
    pub velocities: Vec<[f64; 3]>,
}

/// Numeric report of a trace under one interpretation of a dilation.
#[derive(Debug, Clone, Serialize)]
pub struct TraceReport {
    pub mode: TransformMode,
    pub unit_names: Vec<String>,
    /// Factor applied to each fundamental unit vector (identity except in
    /// leibniz/passive modes, where units move).
    pub unit_scales: [f64; 3],
    pub gamma: f64,
    pub times: Vec<f64>,
    pub bodies: Vec<ReportBody>,
}

/// Emit the numerals of a trajectory under a dilation read in the given
/// mode.
///
/// Leibniz: the isomorphism rescales quantities and units alike, so the
/// emitted numerals are bit-identical to the input's (Gamma included).
/// Active: units stay, numerals are multiplied by the factor belonging to
/// their dimension (mass by mu, lengths by lambda, Gamma by the constraint
/// value). Passive: the dilation is read as the unit change, numerals move
/// inversely while the physical values stay fixed.
pub fn transform_report(
    trajectory: &Trajectory,
    d: &DilationLTM,
    mode: TransformMode,
) -> Result<TraceReport, GravError> {
    let system = &trajectory.system;
    // numeral factor for a quantity of integer dimension (l, t, m)
    let factor = |l: i32, t: i32, m: i32| -> f64 {
        match mode {
            TransformMode::Leibniz => 1.0,
            TransformMode::Active => d.factor_for(l, t, m),
            TransformMode::Passive => DilationLTM {
                lambda: 1.0 / d.lambda,
                tau: 1.0 / d.tau,
                mu: 1.0 / d.mu,
            }
            .factor_for(l, t, m),
        }
    };
    let unit_scales = match mode {
        TransformMode::Leibniz | TransformMode::Passive => [d.lambda, d.tau, d.mu],
        TransformMode::Active => [1.0, 1.0, 1.0],
    };

    let times = trajectory
        .times
        .iter()
        .map(|t| t * factor(0, 1, 0))
        .collect();
    let bodies = (0..trajectory.body_count())
        .map(|i| ReportBody {
            mass: system.mass_values()[i] * factor(0, 0, 1),
            positions: trajectory
                .positions
                .iter()
                .map(|s| {
                    let f = factor(1, 0, 0);
                    [s[i][0] * f, s[i][1] * f, s[i][2] * f]
                })
                .collect(),
            velocities: trajectory
                .velocities
                .iter()
                .map(|s| {
                    let f = factor(1, -1, 0);
                    [s[i][0] * f, s[i][1] * f, s[i][2] * f]
                })
                .collect(),
        })
        .collect();

    Ok(TraceReport {
        mode,
        unit_names: system.frame().unit_names().to_vec(),
        unit_scales,
        gamma: system.gamma_value() * factor(3, -2, -1),
        times,
        bodies,
    })
}

#[cfg(test)]
mod tests {
    use super::super::integrate::tests::{circular_two_body, tq};
    use super::super::{integrate, residual, IntegrateOptions};
    use super::*;

    fn orbit() -> Trajectory {
        let (system, init, period) = circular_two_body(6.67430e-11, 1e10, 1.0);
        let opts = IntegrateOptions {
            output_points: 2000,
            ..Default::default()
        };
        integrate(&system, &init, &tq(&system, 0.0), &tq(&system, period), &opts).unwrap()
    }

    #[test]
    fn identity_dilation_is_identity() {
        let traj = orbit();
        let id = DilationLTM::new(1.0, 1.0, 1.0).unwrap();
        let t2 = traj.similarity_transform(&id);
        assert_eq!(traj.times, t2.times);
        assert_eq!(traj.positions, t2.positions);
        assert_eq!(traj.velocities, t2.velocities);
        assert!(t2.constraint_satisfied);
    }

    #[test]
    fn kepler_instance_preserves_solutions() {
        let traj = orbit();
        let base = residual(&traj).unwrap().magnitude();
        let d = DilationLTM::new(4.0, 8.0, 1.0).unwrap();
        assert!(d.is_similarity());
        let scaled = traj.similarity_transform(&d);
        assert!(scaled.constraint_satisfied);
        let r = residual(&scaled).unwrap().magnitude();
        // the transformed orbit is again a solution; its residual even
        // shrinks because accelerations scale by lambda/tau^2 = 1/16
        assert!(r <= 10.0 * base, "base {base}, transformed {r}");
        // period stretches by tau
        let span = scaled.times.last().unwrap() - scaled.times[0];
        let orig = traj.times.last().unwrap() - traj.times[0];
        assert!((span / orig - 8.0).abs() < 1e-12);
    }

    #[test]
    fn pure_mass_dilation_breaks_solutions() {
        let traj = orbit();
        let base = residual(&traj).unwrap().magnitude();
        let d = DilationLTM::new(1.0, 1.0, 2.0).unwrap();
        let scaled = traj.similarity_transform(&d);
        assert!(!scaled.constraint_satisfied);
        let r = residual(&scaled).unwrap().magnitude();
        // accelerations from the doubled masses are off by a factor 2
        assert!(r >= 1.5 * base.max(1e-12), "base {base}, broken {r}");
    }

    #[test]
    fn double_reflection_is_identity() {
        let traj = orbit();
        let twice = time_reflect(&time_reflect(&traj));
        // t -> a+b-t twice reproduces t up to one rounding in a+b
        for (a, b) in traj.times.iter().zip(&twice.times) {
            assert!((a - b).abs() <= 1e-15 * traj.times.last().unwrap());
        }
        assert_eq!(traj.positions, twice.positions);
        assert_eq!(traj.velocities, twice.velocities);
    }

    #[test]
    fn reflected_orbit_still_solves_the_equations() {
        let traj = orbit();
        let base = residual(&traj).unwrap().magnitude();
        let refl = time_reflect(&traj);
        refl.check_invariants().unwrap();
        let r = residual(&refl).unwrap().magnitude();
        assert!(r <= 2.0 * base, "base {base}, reflected {r}");
        // same radius, opposite sense
        let k = traj.len() / 2;
        let v_orig = traj.velocities[k][0];
        let v_refl = refl.velocities[refl.len() - 1 - k][0];
        for a in 0..3 {
            assert!((v_orig[a] + v_refl[a]).abs() < 1e-12);
        }
    }

    #[test]
    fn leibniz_report_is_bit_identical() {
        let traj = orbit();
        let d = DilationLTM::new(3.0, 5.0, 2.0).unwrap();
        let report = transform_report(&traj, &d, TransformMode::Leibniz).unwrap();
        assert_eq!(report.times, traj.times);
        assert_eq!(report.gamma, traj.system.gamma_value());
        for (i, body) in report.bodies.iter().enumerate() {
            assert_eq!(body.mass, traj.system.mass_values()[i]);
            for (k, p) in body.positions.iter().enumerate() {
                assert_eq!(*p, traj.positions[k][i]);
            }
        }
        assert_eq!(report.unit_scales, [3.0, 5.0, 2.0]);
    }

    #[test]
    fn active_mode_scales_mass_numerals() {
        let traj = orbit();
        let d = DilationLTM::new(1.0, 1.0, 2.0).unwrap();
        let report = transform_report(&traj, &d, TransformMode::Active).unwrap();
        for (i, body) in report.bodies.iter().enumerate() {
            assert_eq!(body.mass, 2.0 * traj.system.mass_values()[i]);
        }
        assert_eq!(report.unit_scales, [1.0, 1.0, 1.0]);
        // Gamma numeral picks up the (violated) constraint factor
        assert_eq!(report.gamma, traj.system.gamma_value() * 0.5);
    }

    #[test]
    fn passive_mode_is_contravariant() {
        let traj = orbit();
        // mass unit halved
        let d = DilationLTM::new(1.0, 1.0, 0.5).unwrap();
        let report = transform_report(&traj, &d, TransformMode::Passive).unwrap();
        for (i, body) in report.bodies.iter().enumerate() {
            assert_eq!(body.mass, 2.0 * traj.system.mass_values()[i]);
        }
        assert_eq!(report.unit_scales, [1.0, 1.0, 0.5]);
    }
}

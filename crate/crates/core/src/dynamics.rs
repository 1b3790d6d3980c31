//! Deterministic mass-action dynamics and the entropy-like Lyapunov
//! function `U(x) = 1 + sum u(x_i)`, `u(x) = x (ln x - 1) + 1`.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::network::{stoich_basis, RateAssignment, ReactionNetwork};
use crate::scalar::{lit, Real};

/// Norm beyond which a trajectory is declared to blow up.
pub const BLOW_UP_NORM: f64 = 1e12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Horizon,
    BlowUp,
    ToleranceFailure,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<F> {
    pub times: Vec<F>,
    pub states: Vec<Vec<F>>,
    pub stop_reason: StopReason,
}

impl<F: Real> Trajectory<F> {
    pub fn last_state(&self) -> &[F] {
        self.states.last().expect("trajectories start with the initial state")
    }

    pub fn final_time(&self) -> F {
        *self.times.last().expect("nonempty")
    }

    /// CSV with header `t,<species...>`.
    pub fn to_csv(&self, species: &[&str]) -> String {
        let mut out = String::from("t");
        for s in species {
            out.push(',');
            out.push_str(s);
        }
        out.push('\n');
        for (t, z) in self.times.iter().zip(&self.states) {
            let _ = write!(out, "{t}");
            for v in z {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }

    /// State at time `t` by linear interpolation between stored steps.
    pub fn sample(&self, t: F) -> Vec<F> {
        let k = self.times.partition_point(|&s| s <= t);
        if k == 0 {
            return self.states[0].clone();
        }
        if k >= self.times.len() {
            return self.last_state().to_vec();
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let a = (t - t0) / (t1 - t0);
        self.states[k - 1]
            .iter()
            .zip(&self.states[k])
            .map(|(&x, &y)| x + a * (y - x))
            .collect()
    }
}

fn check_state<F: Real>(net: &ReactionNetwork, z: &[F]) -> Result<()> {
    if z.len() != net.dim() {
        return Err(Error::DimensionMismatch {
            expected: net.dim(),
            got: z.len(),
        });
    }
    if z.iter().any(|&v| v < F::zero() || v.is_nan()) {
        return Err(Error::NegativeState);
    }
    Ok(())
}

/// `z^y` with `0^0 = 1`.
pub fn monomial<F: Real>(z: &[F], y: &[u32]) -> F {
    z.iter()
        .zip(y)
        .fold(F::one(), |acc, (&x, &e)| if e == 0 { acc } else { acc * x.powi(e as i32) })
}

fn rhs_into<F: Real>(net: &ReactionNetwork, kappa: &[F], z: &[F], out: &mut [F]) {
    out.iter_mut().for_each(|v| *v = F::zero());
    for r in 0..net.reactions().len() {
        let rate = kappa[r] * monomial(z, &net.source(r).0);
        if rate == F::zero() {
            continue;
        }
        for (o, d) in out.iter_mut().zip(net.reaction_vector(r)) {
            if d != 0 {
                *o = *o + rate * lit::<F>(d as f64);
            }
        }
    }
}

/// `sum kappa z^y (y' - y)`.
pub fn mass_action_rhs<F: Real>(net: &ReactionNetwork, rates: &RateAssignment, z: &[F]) -> Result<Vec<F>> {
    check_state(net, z)?;
    let mut out = vec![F::zero(); net.dim()];
    rhs_into(net, &rates.values(), z, &mut out);
    Ok(out)
}

/// Row-major Jacobian of [`mass_action_rhs`].
pub fn mass_action_jacobian<F: Real>(
    net: &ReactionNetwork,
    rates: &RateAssignment,
    z: &[F],
) -> Result<Vec<Vec<F>>> {
    check_state(net, z)?;
    let d = net.dim();
    let kappa: Vec<F> = rates.values();
    let mut jac = vec![vec![F::zero(); d]; d];
    for r in 0..net.reactions().len() {
        let y = &net.source(r).0;
        let delta = net.reaction_vector(r);
        for i in 0..d {
            if y[i] == 0 {
                continue;
            }
            let mut e = y.clone();
            e[i] -= 1;
            let partial = kappa[r] * lit::<F>(f64::from(y[i])) * monomial(z, &e);
            for (row, &dk) in jac.iter_mut().zip(&delta) {
                row[i] = row[i] + partial * lit::<F>(dk as f64);
            }
        }
    }
    Ok(jac)
}

#[derive(Clone, Copy, Debug)]
pub struct IntegrateOptions<F> {
    pub t_max: F,
    pub rel_tol: F,
    pub abs_tol: F,
    /// Cap on accepted plus rejected steps.
    pub max_steps: usize,
}

impl<F: Real> IntegrateOptions<F> {
    pub fn new(t_max: F, rel_tol: F, abs_tol: F) -> Self {
        IntegrateOptions {
            t_max,
            rel_tol,
            abs_tol,
            max_steps: 5_000_000,
        }
    }
}

// Dormand–Prince 5(4)
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn inf_norm<F: Real>(z: &[F]) -> F {
    z.iter().fold(F::zero(), |m, &v| m.max(v.abs()))
}

/// Adaptive Dormand–Prince integration with PI step control.
///
/// Undershoots below `-abs_tol` reject the step; smaller negatives are
/// clamped to zero. Blow-up is declared when the sup norm exceeds
/// [`BLOW_UP_NORM`] or the step underflows while the norm grows.
pub fn integrate<F: Real>(
    net: &ReactionNetwork,
    rates: &RateAssignment,
    z0: &[F],
    t_max: F,
    rel_tol: F,
    abs_tol: F,
) -> Result<Trajectory<F>> {
    integrate_with(net, rates, z0, &IntegrateOptions::new(t_max, rel_tol, abs_tol))
}

pub fn integrate_with<F: Real>(
    net: &ReactionNetwork,
    rates: &RateAssignment,
    z0: &[F],
    opts: &IntegrateOptions<F>,
) -> Result<Trajectory<F>> {
    check_state(net, z0)?;
    let zero = F::zero();
    if !(opts.rel_tol > zero && opts.abs_tol > zero && opts.t_max > zero) {
        return Err(Error::InvalidArgument("tolerances and horizon must be positive".into()));
    }
    let d = net.dim();
    let kappa: Vec<F> = rates.values();
    let blow_up = lit::<F>(BLOW_UP_NORM);
    let tiny = F::min_positive_value().sqrt();
    let (safety, fac_min, fac_max) = (lit::<F>(0.9), lit::<F>(0.2), lit::<F>(5.0));
    let (alpha, beta) = (lit::<F>(0.7 / 5.0), lit::<F>(0.4 / 5.0));

    let mut t = zero;
    let mut z = z0.to_vec();
    let mut times = vec![t];
    let mut states = vec![z.clone()];
    let mut k = vec![vec![zero; d]; 7];
    rhs_into(net, &kappa, &z, &mut k[0]);

    let scale = |a: &[F], b: &[F], i: usize| opts.abs_tol + opts.rel_tol * a[i].abs().max(b[i].abs());
    let rms = |v: &[F], s: &dyn Fn(usize) -> F| {
        let sum = v.iter().enumerate().fold(zero, |acc, (i, &x)| {
            let r = x / s(i);
            acc + r * r
        });
        (sum / lit::<F>(d.max(1) as f64)).sqrt()
    };

    // initial step from the ratio of state and slope magnitudes
    let d0 = rms(&z, &|i| opts.abs_tol + opts.rel_tol * z[i].abs());
    let d1 = rms(&k[0], &|i| opts.abs_tol + opts.rel_tol * z[i].abs());
    let mut h = if d0 < lit(1e-5) || d1 < lit(1e-5) {
        lit::<F>(1e-6) * opts.t_max
    } else {
        lit::<F>(0.01) * d0 / d1
    };
    h = h.min(opts.t_max);
    let mut err_prev = F::one();
    let mut stage = vec![zero; d];
    let mut next = vec![zero; d];
    let mut errv = vec![zero; d];
    let mut steps = 0usize;

    let stop_reason = loop {
        if t >= opts.t_max {
            break StopReason::Horizon;
        }
        steps += 1;
        if steps > opts.max_steps {
            break StopReason::ToleranceFailure;
        }
        let h_min = lit::<F>(1e-14) * t.max(tiny);
        if h < h_min {
            let grow = k[0].iter().zip(&z).any(|(&dz, &x)| dz > zero && x > F::one());
            break if grow { StopReason::BlowUp } else { StopReason::ToleranceFailure };
        }
        let h_step = h.min(opts.t_max - t);

        for s in 1..7 {
            for i in 0..d {
                let mut acc = z[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = A[s][j];
                    if a != 0.0 {
                        acc = acc + h_step * lit::<F>(a) * kj[i];
                    }
                }
                stage[i] = acc;
            }
            rhs_into(net, &kappa, &stage, &mut k[s]);
            if s == 6 {
                next.copy_from_slice(&stage);
            }
        }
        for (i, e) in errv.iter_mut().enumerate() {
            *e = (0..7).fold(zero, |acc, j| acc + lit::<F>(E[j]) * k[j][i]) * h_step;
        }
        let err = rms(&errv, &|i| scale(&z, &next, i));
        let finite = err.is_finite() && next.iter().all(|v| v.is_finite());
        let undershoot = next.iter().any(|&v| v < -opts.abs_tol);

        if !finite || undershoot {
            h = h_step * lit(0.5);
            continue;
        }
        if err <= F::one() {
            t = t + h_step;
            for v in next.iter_mut() {
                if *v < zero {
                    *v = zero;
                }
            }
            z.copy_from_slice(&next);
            // first-same-as-last
            let last = k[6].clone();
            k[0] = last;
            if next.contains(&zero) {
                rhs_into(net, &kappa, &z, &mut k[0]);
            }
            times.push(t);
            states.push(z.clone());
            if inf_norm(&z) > blow_up {
                break StopReason::BlowUp;
            }
            let err_c = err.max(lit(1e-10));
            let fac = safety * err_c.powf(-alpha) * err_prev.powf(beta);
            h = h_step * fac.max(fac_min).min(fac_max);
            err_prev = err_c;
        } else {
            let fac = (safety * err.powf(-lit::<F>(0.2))).max(fac_min);
            h = h_step * fac;
        }
    };
    Ok(Trajectory {
        times,
        states,
        stop_reason,
    })
}

/// `u(x) = x (ln x - 1) + 1` for `x > 0`, `1` otherwise.
pub fn u_scalar<F: Real>(x: F) -> F {
    if x > F::zero() {
        x * (x.ln() - F::one()) + F::one()
    } else {
        F::one()
    }
}

pub fn lyapunov_value<F: Real>(z: &[F]) -> F {
    z.iter().fold(F::one(), |acc, &x| acc + u_scalar(x))
}

/// `sum kappa z^y ln(z^(y'-y))`. Terms with `z^y = 0` vanish; a positive
/// term whose logarithm hits a zero coordinate gives `-inf`.
pub fn lyapunov_drift_det<F: Real>(net: &ReactionNetwork, rates: &RateAssignment, z: &[F]) -> Result<F> {
    check_state(net, z)?;
    let kappa: Vec<F> = rates.values();
    Ok(drift_terms(net, z)
        .into_iter()
        .zip(kappa)
        .fold(F::zero(), |acc, (t, k)| acc + k * t))
}

/// `z^y ln(z^(y'-y))` per reaction.
fn drift_terms<F: Real>(net: &ReactionNetwork, z: &[F]) -> Vec<F> {
    (0..net.reactions().len())
        .map(|r| {
            let m = monomial(z, &net.source(r).0);
            if m == F::zero() {
                return F::zero();
            }
            let mut log = F::zero();
            for (&x, dk) in z.iter().zip(net.reaction_vector(r)) {
                if dk == 0 {
                    continue;
                }
                if x == F::zero() {
                    return F::neg_infinity();
                }
                log = log + lit::<F>(dk as f64) * x.ln();
            }
            m * log
        })
        .collect()
}

/// Upper bound of the drift over all rate constants in `[delta, 1/delta]`:
/// positive terms at `1/delta`, negative ones at `delta`.
pub fn drift_interval_bound<F: Real>(net: &ReactionNetwork, delta: F, z: &[F]) -> Result<F> {
    if !(delta > F::zero() && delta <= F::one()) {
        return Err(Error::InvalidArgument("delta must lie in (0, 1]".into()));
    }
    check_state(net, z)?;
    Ok(drift_terms(net, z).into_iter().fold(F::zero(), |acc, t| {
        if t > F::zero() {
            acc + t / delta
        } else {
            acc + t * delta
        }
    }))
}

#[derive(Clone, Debug, PartialEq)]
pub struct LyapunovReport<F> {
    pub u_values: Vec<F>,
    pub drift_values: Vec<F>,
    /// First time after which `U` stays at or below the level.
    pub sublevel_entry_time: Option<F>,
    pub min_coordinate_after_entry: F,
}

pub fn lyapunov_report<F: Real>(
    net: &ReactionNetwork,
    rates: &RateAssignment,
    traj: &Trajectory<F>,
    level: F,
) -> Result<LyapunovReport<F>> {
    let u_values: Vec<F> = traj.states.iter().map(|z| lyapunov_value(z)).collect();
    let drift_values = traj
        .states
        .iter()
        .map(|z| lyapunov_drift_det(net, rates, z))
        .collect::<Result<Vec<F>>>()?;
    let entry = match u_values.iter().rposition(|&u| u > level) {
        None => Some(0),
        Some(k) if k + 1 < u_values.len() => Some(k + 1),
        Some(_) => None,
    };
    let min_after = entry.map_or(F::nan(), |k| {
        traj.states[k..]
            .iter()
            .flat_map(|z| z.iter().copied())
            .fold(F::infinity(), F::min)
    });
    Ok(LyapunovReport {
        u_values,
        drift_values,
        sublevel_entry_time: entry.map(|k| traj.times[k]),
        min_coordinate_after_entry: min_after,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeRun<F> {
    pub initial: Vec<F>,
    pub stop_reason: StopReason,
    pub max_norm: F,
    pub min_coordinate: F,
    pub final_u: F,
    /// Time of the last increase of `U`.
    pub u_settle_time: F,
    /// Compatibility class index into [`PermanenceReport::levels`].
    pub class: usize,
    pub sublevel_entry_time: Option<F>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PermanenceReport<F> {
    pub runs: Vec<ProbeRun<F>>,
    /// Sublevel `M` per compatibility class.
    pub levels: Vec<F>,
    pub all_bounded: bool,
    pub min_coordinate: F,
    /// Every completed run entered its class sublevel before
    /// [`SUBLEVEL_ENTRY_FRACTION`] of the horizon and stayed.
    pub common_sublevel: bool,
}

/// Slack applied to the largest limiting `U` of a class.
pub const SUBLEVEL_SLACK: f64 = 1.1;

/// Share of the horizon by which runs must have entered the sublevel.
pub const SUBLEVEL_ENTRY_FRACTION: f64 = 0.9;

/// Integrates from every initial condition and summarizes boundedness,
/// persistence and entry into a common `U`-sublevel per compatibility
/// class. Runs that blow up are flagged and excluded from the levels.
pub fn permanence_probe<F: Real>(
    net: &ReactionNetwork,
    rates: &RateAssignment,
    initials: &[Vec<F>],
    horizon: F,
    rel_tol: F,
) -> Result<PermanenceReport<F>> {
    for z in initials {
        check_state(net, z)?;
        if z.iter().any(|&v| v <= F::zero()) {
            return Err(Error::InvalidArgument("initial states must be strictly positive".into()));
        }
    }
    let abs_tol = rel_tol * lit(1e-2);
    let trajectories = initials
        .par_iter()
        .map(|z0| integrate(net, rates, z0, horizon, rel_tol, abs_tol))
        .collect::<Result<Vec<_>>>()?;

    let laws: Vec<Vec<F>> = linalg::orthogonal_complement(&stoich_basis(net))
        .vectors()
        .iter()
        .map(|v| v.to_f64().into_iter().map(lit::<F>).collect())
        .collect();
    let invariant = |z: &[F]| -> Vec<F> {
        laws.iter()
            .map(|c| c.iter().zip(z).fold(F::zero(), |a, (&ci, &zi)| a + ci * zi))
            .collect()
    };
    let mut class_keys: Vec<Vec<F>> = Vec::new();
    let mut classes = Vec::with_capacity(initials.len());
    for z in initials {
        let key = invariant(z);
        let same = |k: &Vec<F>| {
            k.iter().zip(&key).all(|(&a, &b)| {
                (a - b).abs() <= lit::<F>(1e-9) * (F::one() + a.abs().max(b.abs()))
            })
        };
        let idx = match class_keys.iter().position(same) {
            Some(i) => i,
            None => {
                class_keys.push(key);
                class_keys.len() - 1
            }
        };
        classes.push(idx);
    }

    let mut levels = vec![F::zero(); class_keys.len()];
    for (traj, &c) in trajectories.iter().zip(&classes) {
        if traj.stop_reason == StopReason::Horizon {
            levels[c] = levels[c].max(lyapunov_value(traj.last_state()) * lit(SUBLEVEL_SLACK));
        }
    }

    let deadline = horizon * lit(SUBLEVEL_ENTRY_FRACTION);
    let mut runs = Vec::with_capacity(initials.len());
    for ((traj, z0), &c) in trajectories.iter().zip(initials).zip(&classes) {
        let us: Vec<F> = traj.states.iter().map(|z| lyapunov_value(z)).collect();
        let settle = us
            .windows(2)
            .rposition(|w| w[1] > w[0] * (F::one() + lit(1e-12)))
            .map_or(F::zero(), |k| traj.times[k + 1]);
        let entry = match us.iter().rposition(|&u| u > levels[c]) {
            None => Some(F::zero()),
            Some(k) if k + 1 < us.len() => Some(traj.times[k + 1]),
            Some(_) => None,
        };
        runs.push(ProbeRun {
            initial: z0.clone(),
            stop_reason: traj.stop_reason,
            max_norm: traj.states.iter().map(|z| inf_norm(z)).fold(F::zero(), F::max),
            min_coordinate: traj
                .states
                .iter()
                .flat_map(|z| z.iter().copied())
                .fold(F::infinity(), F::min),
            final_u: *us.last().expect("nonempty"),
            u_settle_time: settle,
            class: c,
            sublevel_entry_time: entry,
        });
    }
    let all_bounded = runs.iter().all(|r| r.stop_reason == StopReason::Horizon);
    let common_sublevel = all_bounded
        && runs
            .iter()
            .all(|r| r.sublevel_entry_time.is_some_and(|t| t <= deadline));
    let min_coordinate = runs.iter().map(|r| r.min_coordinate).fold(F::infinity(), F::min);
    Ok(PermanenceReport {
        runs,
        levels,
        all_bounded,
        min_coordinate,
        common_sublevel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_network;
    use approx::assert_relative_eq;

    fn doc(text: &str) -> (ReactionNetwork, RateAssignment) {
        let d = parse_network(text).unwrap();
        (d.network, d.rates)
    }

    #[test]
    fn rhs_examples() {
        let (t, k) = doc("0 -> 2A + B\n2A + B -> 4A + 4B\n4A + 4B -> A");
        assert_eq!(mass_action_rhs(&t, &k, &[2.0, 3.0]).unwrap(), vec![-3862.0, -5147.0]);
        let (ab, k) = doc("A -> B @ 2");
        assert_eq!(mass_action_rhs(&ab, &k, &[3.0, 0.0]).unwrap(), vec![-6.0, 6.0]);
        assert_eq!(mass_action_rhs(&ab, &k, &[-1.0, 0.0]).unwrap_err(), Error::NegativeState);
        let (t2, k2) = doc("0 -> A\nA + B -> 0");
        assert_eq!(mass_action_rhs(&t2, &k2, &[0.0, 5.0]).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn linear_decay() {
        let (ab, k) = doc("A -> B");
        let tr = integrate(&ab, &k, &[1.0, 0.0], 1.0, 1e-10, 1e-12).unwrap();
        assert_eq!(tr.stop_reason, StopReason::Horizon);
        let z = tr.last_state();
        assert_relative_eq!(z[0], (-1f64).exp(), max_relative = 1e-8);
        assert_relative_eq!(z[1], 1.0 - (-1f64).exp(), max_relative = 1e-8);
        assert!(tr.times.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn single_precision_integration() {
        let (ab, k) = doc("A -> B");
        let tr = integrate(&ab, &k, &[1.0f32, 0.0], 1.0, 1e-5, 1e-7).unwrap();
        assert!((tr.last_state()[0] - (-1f32).exp()).abs() < 1e-4);
    }

    #[test]
    fn explosive_ode_blows_up() {
        let (n, k) = doc("2A -> 3A");
        let tr = integrate(&n, &k, &[2.0], 1.0, 1e-8, 1e-10).unwrap();
        assert_eq!(tr.stop_reason, StopReason::BlowUp);
        assert!(tr.final_time() < 0.5 + 1e-6);
        assert!(tr.final_time() > 0.49);
    }

    #[test]
    fn lyapunov_values() {
        assert_eq!(lyapunov_value(&[1.0, 1.0]), 1.0);
        assert_eq!(lyapunov_value(&[0.0, 0.0]), 3.0);
        let (t, k) = doc("0 -> 2A + B\n2A + B -> 4A + 4B\n4A + 4B -> A");
        let e = std::f64::consts::E;
        let d = lyapunov_drift_det(&t, &k, &[e, e]).unwrap();
        assert_relative_eq!(d, 3.0 + 5.0 * e.powi(3) - 7.0 * e.powi(8), max_relative = 1e-12);
        assert_eq!(lyapunov_drift_det(&t, &k, &[0.0, 0.0]).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn interval_bound() {
        let (t, k) = doc("0 -> 2A + B\n2A + B -> 4A + 4B\n4A + 4B -> A");
        let e = std::f64::consts::E;
        let z = [e, e];
        assert_relative_eq!(
            drift_interval_bound(&t, 1.0, &z).unwrap(),
            lyapunov_drift_det(&t, &k, &z).unwrap(),
            max_relative = 1e-14
        );
        let b = drift_interval_bound(&t, 0.5, &z).unwrap();
        assert_relative_eq!(b, 2.0 * (3.0 + 5.0 * e.powi(3)) - 0.5 * 7.0 * e.powi(8), max_relative = 1e-12);
        let (ab, _) = doc("A -> B");
        let all_neg = [3.0, 2.0];
        assert_relative_eq!(
            drift_interval_bound(&ab, 0.25, &all_neg).unwrap(),
            0.25 * drift_interval_bound(&ab, 1.0, &all_neg).unwrap()
        );
    }

    #[test]
    fn csv_header() {
        let (ab, k) = doc("A -> B");
        let tr = integrate(&ab, &k, &[1.0, 0.0], 0.1, 1e-6, 1e-9).unwrap();
        let csv = tr.to_csv(&ab.species_names());
        assert!(csv.starts_with("t,A,B\n0,1,0\n"));
    }

    #[test]
    fn probe_flags_blow_up() {
        let (n, k) = doc("2A -> 3A");
        let r = permanence_probe(&n, &k, &[vec![2.0]], 1.0, 1e-8).unwrap();
        assert!(!r.all_bounded);
        assert_eq!(r.runs[0].stop_reason, StopReason::BlowUp);
    }

    #[test]
    fn probe_reversible_triangle() {
        let (n, k) = doc("B <-> A\nA <-> 2B");
        let initials = vec![vec![0.5, 3.0], vec![4.0, 0.1], vec![2.0, 2.0]];
        let r = permanence_probe(&n, &k, &initials, 20.0, 1e-8).unwrap();
        assert!(r.all_bounded);
        assert!(r.min_coordinate > 0.0);
        assert!(r.common_sublevel);
    }
}

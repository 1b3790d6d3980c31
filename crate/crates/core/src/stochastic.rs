//! Stochastic mass-action models: exact simulation, generator drifts of the
//! Lyapunov function, shell scans and cycle-based escape bounds.
//!
//! States are integer count vectors. The RNG is ChaCha8 seeded with
//! `seed_from_u64(seed)`; run `k` of a batch uses stream `k`, so batches are
//! identical whether executed sequentially or in parallel.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::lyapunov_value;
use crate::error::{Error, Result};
use crate::network::{conservation_laws, same_class_counts, RateAssignment, ReactionNetwork};
use crate::tiers::{signed_log_sum, SignedLog};

/// Largest volume handled by direct evaluation in [`scaled_drift_sign`].
pub const MAX_VOLUME: f64 = 1e9;

/// Default state budget for [`foster_lyapunov_scan`].
pub const DEFAULT_SCAN_BUDGET: u64 = 10_000_000;

fn check_counts(net: &ReactionNetwork, x: &[u64]) -> Result<()> {
    if x.len() != net.dim() {
        return Err(Error::DimensionMismatch {
            expected: net.dim(),
            got: x.len(),
        });
    }
    Ok(())
}

/// `n (n-1) ... (n-k+1)`, zero once a factor is non-positive.
fn falling(n: f64, k: u32) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        let f = n - f64::from(i);
        if f <= 0.0 {
            return 0.0;
        }
        acc *= f;
    }
    acc
}

fn propensities_f64(net: &ReactionNetwork, kappa: &[f64], x: &[f64], out: &mut [f64]) {
    for (r, o) in out.iter_mut().enumerate() {
        let y = &net.source(r).0;
        *o = x
            .iter()
            .zip(y)
            .fold(kappa[r], |acc, (&xi, &yi)| if acc == 0.0 { 0.0 } else { acc * falling(xi, yi) });
    }
}

/// Stochastic mass-action intensities `kappa x!/(x-y)!`.
pub fn propensity(net: &ReactionNetwork, rates: &RateAssignment, x: &[u64]) -> Result<Vec<f64>> {
    check_counts(net, x)?;
    let xf: Vec<f64> = x.iter().map(|&v| v as f64).collect();
    let mut out = vec![0.0; net.reactions().len()];
    propensities_f64(net, &rates.values(), &xf, &mut out);
    Ok(out)
}

// ---------------------------------------------------------------------------
// Simulation

/// Stopping bounds; at least one must be finite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StopRule {
    pub t_max: f64,
    pub max_events: u64,
    /// Stop once `||x||_1 >= max_norm`.
    pub max_norm: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule {
            t_max: f64::INFINITY,
            max_events: u64::MAX,
            max_norm: u64::MAX,
        }
    }
}

impl StopRule {
    pub fn t_max(t: f64) -> Self {
        StopRule {
            t_max: t,
            ..Default::default()
        }
    }

    pub fn max_events(n: u64) -> Self {
        StopRule {
            max_events: n,
            ..Default::default()
        }
    }

    pub fn max_norm(n: u64) -> Self {
        StopRule {
            max_norm: n,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.t_max.is_nan() || self.t_max < 0.0 {
            return Err(Error::InvalidArgument("t_max must be non-negative".into()));
        }
        if self.t_max.is_infinite() && self.max_events == u64::MAX && self.max_norm == u64::MAX {
            return Err(Error::InvalidArgument("at least one stop bound must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SimStop {
    TMax,
    MaxEvents,
    MaxNorm,
    Absorbed,
}

impl SimStop {
    pub fn as_str(self) -> &'static str {
        match self {
            SimStop::TMax => "t_max",
            SimStop::MaxEvents => "max_events",
            SimStop::MaxNorm => "max_norm",
            SimStop::Absorbed => "absorbed",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct SsaOptions {
    pub stop: StopRule,
    /// Keep every jump. Without it only the final state and checkpoints are
    /// stored, which keeps explosive runs cheap.
    pub record_path: bool,
    /// Times at which to record the current state, ascending.
    pub checkpoints: Vec<f64>,
}

impl SsaOptions {
    pub fn full(stop: StopRule) -> Self {
        SsaOptions {
            stop,
            record_path: true,
            checkpoints: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimResult {
    pub seed: u64,
    pub stream: u64,
    /// Jump times, starting with `0` for the initial state; empty unless the
    /// path was recorded.
    pub jump_times: Vec<f64>,
    pub states: Vec<Vec<u64>>,
    /// Reaction fired at each jump; `fired[k]` leads to `states[k + 1]`.
    pub fired: Vec<usize>,
    pub reaction_counts: Vec<u64>,
    pub events: u64,
    /// `t_max` for horizon stops, otherwise the time of the last jump.
    pub final_time: f64,
    pub final_state: Vec<u64>,
    pub checkpoint_states: Vec<Vec<u64>>,
    pub stop_reason: SimStop,
}

#[derive(Serialize)]
struct SimSummary<'a> {
    seed: u64,
    stream: u64,
    events: u64,
    final_time: f64,
    final_state: &'a [u64],
    reaction_counts: &'a [u64],
    stop_reason: SimStop,
}

impl SimResult {
    /// Jump table `t,reaction_index,<species...>`; the first row is the
    /// initial state with an empty reaction index.
    pub fn to_csv(&self, species: &[&str]) -> String {
        let mut out = String::from("t,reaction_index");
        for s in species {
            out.push(',');
            out.push_str(s);
        }
        out.push('\n');
        for (k, (t, x)) in self.jump_times.iter().zip(&self.states).enumerate() {
            let _ = write!(out, "{t},");
            if k > 0 {
                let _ = write!(out, "{}", self.fired[k - 1]);
            }
            for v in x {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string(&SimSummary {
            seed: self.seed,
            stream: self.stream,
            events: self.events,
            final_time: self.final_time,
            final_state: &self.final_state,
            reaction_counts: &self.reaction_counts,
            stop_reason: self.stop_reason,
        })
        .expect("summary serializes")
    }

    pub fn final_norm(&self) -> u64 {
        self.final_state.iter().sum()
    }
}

/// Gillespie direct-method path on stream 0.
pub fn ssa_simulate(
    net: &ReactionNetwork,
    rates: &RateAssignment,
    x0: &[u64],
    opts: &SsaOptions,
    seed: u64,
) -> Result<SimResult> {
    ssa_run(net, rates, x0, opts, seed, 0)
}

/// Independent paths on streams `0..runs`, in run order.
pub fn ssa_batch(
    net: &ReactionNetwork,
    rates: &RateAssignment,
    x0: &[u64],
    opts: &SsaOptions,
    seed: u64,
    runs: u64,
) -> Result<Vec<SimResult>> {
    (0..runs)
        .into_par_iter()
        .map(|k| ssa_run(net, rates, x0, opts, seed, k))
        .collect()
}

/// Gillespie direct-method path on an explicit stream.
pub fn ssa_run(
    net: &ReactionNetwork,
    rates: &RateAssignment,
    x0: &[u64],
    opts: &SsaOptions,
    seed: u64,
    stream: u64,
) -> Result<SimResult> {
    check_counts(net, x0)?;
    opts.stop.validate()?;
    if opts.checkpoints.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument("checkpoints must be ascending".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);

    let kappa: Vec<f64> = rates.values();
    let nr = net.reactions().len();
    let deltas: Vec<Vec<i64>> = (0..nr).map(|r| net.reaction_vector(r)).collect();
    let mut x = x0.to_vec();
    let mut xf: Vec<f64> = x.iter().map(|&v| v as f64).collect();
    let mut a = vec![0.0; nr];
    let mut t = 0.0;
    let mut events = 0u64;
    let mut counts = vec![0u64; nr];
    let mut norm: u64 = x.iter().sum();

    let mut res = SimResult {
        seed,
        stream,
        jump_times: Vec::new(),
        states: Vec::new(),
        fired: Vec::new(),
        reaction_counts: Vec::new(),
        events: 0,
        final_time: 0.0,
        final_state: Vec::new(),
        checkpoint_states: Vec::new(),
        stop_reason: SimStop::Absorbed,
    };
    if opts.record_path {
        res.jump_times.push(0.0);
        res.states.push(x.clone());
    }
    let mut next_cp = 0;

    let stop = loop {
        if norm >= opts.stop.max_norm {
            break SimStop::MaxNorm;
        }
        if events >= opts.stop.max_events {
            break SimStop::MaxEvents;
        }
        propensities_f64(net, &kappa, &xf, &mut a);
        let total: f64 = a.iter().sum();
        let dt = if total > 0.0 {
            -(1.0 - rng.random::<f64>()).ln() / total
        } else {
            f64::INFINITY
        };
        let t_next = t + dt;
        while next_cp < opts.checkpoints.len() && opts.checkpoints[next_cp] < t_next.min(opts.stop.t_max) {
            res.checkpoint_states.push(x.clone());
            next_cp += 1;
        }
        if t_next > opts.stop.t_max {
            t = opts.stop.t_max;
            break SimStop::TMax;
        }
        if total <= 0.0 {
            break SimStop::Absorbed;
        }
        let target = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut r = nr;
        for (k, &ak) in a.iter().enumerate() {
            if ak > 0.0 {
                acc += ak;
                r = k;
                if target < acc {
                    break;
                }
            }
        }
        for ((xi, xfi), &d) in x.iter_mut().zip(xf.iter_mut()).zip(&deltas[r]) {
            *xi = xi.checked_add_signed(d).expect("positive propensity keeps counts non-negative");
            *xfi = *xi as f64;
        }
        norm = x.iter().sum();
        t = t_next;
        events += 1;
        counts[r] += 1;
        if opts.record_path {
            res.jump_times.push(t);
            res.states.push(x.clone());
            res.fired.push(r);
        }
    };
    // checkpoints at or beyond a horizon stop see the final state
    if stop == SimStop::TMax || stop == SimStop::Absorbed {
        while next_cp < opts.checkpoints.len() && opts.checkpoints[next_cp] <= opts.stop.t_max {
            res.checkpoint_states.push(x.clone());
            next_cp += 1;
        }
    }
    res.reaction_counts = counts;
    res.events = events;
    res.final_time = t;
    res.final_state = x;
    res.stop_reason = stop;
    Ok(res)
}

// ---------------------------------------------------------------------------
// Generator drifts

/// `u(z + h) - u(z)` without cancellation for large `z`.
fn u_diff(z: f64, h: f64) -> f64 {
    let w = z + h;
    if z > 0.0 && w > 0.0 {
        h * z.ln() + w * (h / z).ln_1p() - h
    } else {
        let u = |v: f64| if v > 0.0 { v * (v.ln() - 1.0) + 1.0 } else { 1.0 };
        u(w) - u(z)
    }
}

fn u_step(x: &[f64], delta: &[f64]) -> f64 {
    x.iter().zip(delta).map(|(&z, &h)| if h == 0.0 { 0.0 } else { u_diff(z, h) }).sum()
}

/// `(LU)(x) = sum lambda(x) (U(x + y' - y) - U(x))`.
pub fn generator_drift(net: &ReactionNetwork, rates: &RateAssignment, x: &[u64]) -> Result<f64> {
    let lambda = propensity(net, rates, x)?;
    let xf: Vec<f64> = x.iter().map(|&v| v as f64).collect();
    Ok(lambda
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > 0.0)
        .map(|(r, &l)| {
            let d: Vec<f64> = net.reaction_vector(r).iter().map(|&v| v as f64).collect();
            l * u_step(&xf, &d)
        })
        .sum())
}

/// `sum lambda(x) (ln((x v 1)^(y' - y)) + c)`.
pub fn drift_upper_bound(net: &ReactionNetwork, rates: &RateAssignment, x: &[u64], c: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::InvalidArgument("the constant must be positive".into()));
    }
    let lambda = propensity(net, rates, x)?;
    Ok(lambda
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > 0.0)
        .map(|(r, &l)| {
            let log: f64 = net
                .reaction_vector(r)
                .iter()
                .zip(x)
                .map(|(&d, &xi)| d as f64 * (xi.max(1) as f64).ln())
                .sum();
            l * (log + c)
        })
        .sum())
}

/// Lattice counts `V x`, or `DomainError` when `x` is off the `1/V` grid.
fn grid_counts(net: &ReactionNetwork, v: f64, x: &[f64]) -> Result<Vec<f64>> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::InvalidArgument("volume must be positive and finite".into()));
    }
    if x.len() != net.dim() {
        return Err(Error::DimensionMismatch {
            expected: net.dim(),
            got: x.len(),
        });
    }
    x.iter()
        .map(|&xi| {
            let n = v * xi;
            let k = n.round();
            if !(k >= 0.0) || (n - k).abs() > 1e-9 * k.max(1.0) {
                Err(Error::DomainError(v))
            } else {
                Ok(k)
            }
        })
        .collect()
}

fn scaled_from_counts(net: &ReactionNetwork, kappa: &[f64], v: f64, n: &[f64]) -> Vec<f64> {
    (0..net.reactions().len())
        .map(|r| {
            let mut acc = kappa[r] * v;
            for (&ni, &yi) in n.iter().zip(&net.source(r).0) {
                for k in 0..yi {
                    let f = ni - f64::from(k);
                    if f <= 0.0 {
                        return 0.0;
                    }
                    acc *= f / v;
                }
            }
            acc
        })
        .collect()
}

/// Intensities of the volume-`V` model at the scaled state `x`:
/// `kappa / V^(|y| - 1) (Vx)! / (Vx - y)!`.
pub fn scaled_propensity(net: &ReactionNetwork, rates: &RateAssignment, v: f64, x: &[f64]) -> Result<Vec<f64>> {
    let n = grid_counts(net, v, x)?;
    Ok(scaled_from_counts(net, &rates.values(), v, &n))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScaledDrift {
    /// Sign of `(L_V U^V)(x)`.
    pub sign: i8,
    /// `ln |(L_V U^V)(x)| - V ln U(x)`.
    pub ln_magnitude: f64,
    /// Set beyond [`MAX_VOLUME`], where the sign comes from the large-volume
    /// limit `sign H(x)` with `c1 = 0`, `c2 = 1`.
    pub asymptotic: bool,
}

/// Sign of the scaled generator applied to `U^V`. The common factor
/// `U(x)^V` is divided out, leaving
/// `sum lambda (exp(V ln(U(x + D/V) / U(x))) - 1)`, which is combined in
/// sign/log form.
pub fn scaled_drift_sign(net: &ReactionNetwork, rates: &RateAssignment, v: f64, x: &[f64]) -> Result<ScaledDrift> {
    let n = grid_counts(net, v, x)?;
    let kappa: Vec<f64> = rates.values();
    if v > MAX_VOLUME {
        if x.iter().any(|&xi| xi <= 0.0) {
            return Err(Error::DomainError(v));
        }
        let h = h_sum(net, rates, x, 0.0, 1.0)?;
        let s = SignedLog::from_value(h);
        return Ok(ScaledDrift {
            sign: s.sign,
            ln_magnitude: s.ln_abs + v.ln() - lyapunov_value(x).ln(),
            asymptotic: true,
        });
    }
    let lambda = scaled_from_counts(net, &kappa, v, &n);
    let xs: Vec<f64> = n.iter().map(|&k| k / v).collect();
    let u0 = lyapunov_value(&xs);
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for (r, &l) in lambda.iter().enumerate() {
        if l <= 0.0 {
            continue;
        }
        let step: Vec<f64> = net.reaction_vector(r).iter().map(|&d| d as f64 / v).collect();
        let t = v * (u_step(&xs, &step) / u0).ln_1p();
        if t == 0.0 {
            continue;
        }
        let ln_term = if t > 0.0 {
            if t > 40.0 {
                t + (-(-t).exp()).ln_1p()
            } else {
                t.exp_m1().ln()
            }
        } else {
            (-t.exp_m1()).ln()
        };
        if t > 0.0 {
            pos.push(l.ln() + ln_term);
        } else {
            neg.push(l.ln() + ln_term);
        }
    }
    let s = signed_log_sum(&pos, &neg);
    Ok(ScaledDrift {
        sign: s.sign,
        ln_magnitude: s.ln_abs,
        asymptotic: false,
    })
}

/// `H(x) = sum kappa x^y U(x) (exp((ln x^(y'-y) + c1) / (c2 U(x))) - 1)`.
pub fn h_sum(net: &ReactionNetwork, rates: &RateAssignment, x: &[f64], c1: f64, c2: f64) -> Result<f64> {
    if x.len() != net.dim() {
        return Err(Error::DimensionMismatch {
            expected: net.dim(),
            got: x.len(),
        });
    }
    if x.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::InvalidArgument("x must be strictly positive".into()));
    }
    if !(c2 > 0.0) {
        return Err(Error::InvalidArgument("c2 must be positive".into()));
    }
    let u = lyapunov_value(x);
    let kappa: Vec<f64> = rates.values();
    let logs: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    Ok((0..net.reactions().len())
        .map(|r| {
            let mono: f64 = net
                .source(r)
                .0
                .iter()
                .zip(&logs)
                .map(|(&y, &l)| f64::from(y) * l)
                .sum::<f64>()
                .exp();
            let g: f64 = net.reaction_vector(r).iter().zip(&logs).map(|(&d, &l)| d as f64 * l).sum();
            kappa[r] * mono * u * ((g + c1) / (c2 * u)).exp_m1()
        })
        .sum())
}

// ---------------------------------------------------------------------------
// Shell scans

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DriftScanReport {
    pub n1: u64,
    pub n2: u64,
    pub states_scanned: u64,
    /// Largest drift; `None` when the shell holds no state of the class.
    pub max_drift: Option<f64>,
    pub argmax: Option<Vec<u64>>,
    /// States with drift `> -1`.
    pub violators: u64,
}

fn binomial_sat(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
        if acc > u128::from(u64::MAX) {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Number of states with `N1 <= ||x||_1 <= N2` in `d` dimensions.
pub fn shell_size(d: usize, n1: u64, n2: u64) -> u64 {
    if d == 0 {
        return u64::from(n1 == 0);
    }
    let d = d as u64;
    (n1..=n2).fold(0u64, |acc, n| acc.saturating_add(binomial_sat(n + d - 1, d - 1)))
}

/// Calls `f` on every `x` with `||x||_1 = n`, in lexicographically
/// decreasing order.
fn for_each_composition(d: usize, n: u64, f: &mut impl FnMut(&[u64])) {
    fn rec(x: &mut Vec<u64>, i: usize, left: u64, f: &mut impl FnMut(&[u64])) {
        if i + 1 == x.len() {
            x[i] = left;
            f(x);
            return;
        }
        for v in (0..=left).rev() {
            x[i] = v;
            rec(x, i + 1, left - v, f);
        }
    }
    if d == 0 {
        if n == 0 {
            f(&[]);
        }
        return;
    }
    let mut x = vec![0; d];
    rec(&mut x, 0, n, f);
}

#[derive(Default)]
struct ShellAcc {
    count: u64,
    max: Option<(f64, Vec<u64>)>,
    violators: u64,
}

impl ShellAcc {
    fn merge(mut self, other: ShellAcc) -> ShellAcc {
        self.count += other.count;
        self.violators += other.violators;
        if let Some((v, x)) = other.max {
            if self.max.as_ref().is_none_or(|(m, _)| v > *m) {
                self.max = Some((v, x));
            }
        }
        self
    }
}

/// Exhaustive `(LU)(x)` over the shell `N1 <= ||x||_1 <= N2`, restricted to
/// the compatibility class of `anchor` when given.
pub fn foster_lyapunov_scan(
    net: &ReactionNetwork,
    rates: &RateAssignment,
    n1: u64,
    n2: u64,
    anchor: Option<&[u64]>,
    budget: u64,
) -> Result<DriftScanReport> {
    if n1 > n2 {
        return Err(Error::InvalidArgument("shell bounds must satisfy N1 <= N2".into()));
    }
    if let Some(a) = anchor {
        check_counts(net, a)?;
    }
    if shell_size(net.dim(), n1, n2) > budget {
        return Err(Error::BudgetExceeded(budget as usize));
    }
    let laws = conservation_laws(net);
    let kappa: Vec<f64> = rates.values();
    let deltas: Vec<Vec<f64>> = (0..net.reactions().len())
        .map(|r| net.reaction_vector(r).iter().map(|&v| v as f64).collect())
        .collect();
    let d = net.dim();
    let acc = (n1..=n2)
        .into_par_iter()
        .map(|n| {
            let mut acc = ShellAcc::default();
            let mut lambda = vec![0.0; deltas.len()];
            let mut xf = vec![0.0; d];
            for_each_composition(d, n, &mut |x| {
                if let Some(a) = anchor {
                    if !same_class_counts(&laws, a, x) {
                        return;
                    }
                }
                for (f, &v) in xf.iter_mut().zip(x) {
                    *f = v as f64;
                }
                propensities_f64(net, &kappa, &xf, &mut lambda);
                let drift: f64 = lambda
                    .iter()
                    .zip(&deltas)
                    .filter(|(&l, _)| l > 0.0)
                    .map(|(&l, dl)| l * u_step(&xf, dl))
                    .sum();
                acc.count += 1;
                if drift > -1.0 {
                    acc.violators += 1;
                }
                if acc.max.as_ref().is_none_or(|(m, _)| drift > *m) {
                    acc.max = Some((drift, x.to_vec()));
                }
            });
            acc
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(ShellAcc::default(), ShellAcc::merge);
    let (max_drift, argmax) = match acc.max {
        Some((v, x)) => (Some(v), Some(x)),
        None => (None, None),
    };
    Ok(DriftScanReport {
        n1,
        n2,
        states_scanned: acc.count,
        max_drift,
        argmax,
        violators: acc.violators,
    })
}

/// Doubles `N` from 1 up to `max_n` and returns the first shell
/// `[N, N + width]` without violators.
pub fn recurrence_shell(
    net: &ReactionNetwork,
    rates: &RateAssignment,
    width: u64,
    max_n: u64,
    budget: u64,
) -> Result<Option<DriftScanReport>> {
    let mut n = 1;
    while n <= max_n {
        let report = foster_lyapunov_scan(net, rates, n, n + width, None, budget)?;
        if report.violators == 0 {
            return Ok(Some(report));
        }
        n *= 2;
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// Cycle bounds

/// Result of summing a per-repetition series over an infinite cycle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CycleBound {
    /// Escape probability lower bound, or expected-time bound.
    pub value: f64,
    /// `false` when the series was judged divergent.
    pub finite: bool,
    /// Estimated remainder beyond the last repetition summed.
    pub tail: f64,
    /// Spread of the block-summation enclosure.
    pub width: f64,
    /// Repetitions covered before the tail estimate.
    pub horizon: f64,
    /// Tail estimate fell below the requested tolerance.
    pub certified: bool,
}

/// Repetitions summed term by term before switching to geometric blocks.
const EXACT_REPETITIONS: u64 = 1 << 20;
const BLOCK_RATIO: f64 = 1.0 + 1e-4;
const MAX_DECADES: usize = 16;

struct Cycle {
    kappa: Vec<f64>,
    steps: Vec<usize>,
    x0: Vec<f64>,
    /// Net change of one repetition.
    shift: Vec<f64>,
    /// State before each step relative to the repetition start.
    prefix: Vec<Vec<f64>>,
}

impl Cycle {
    fn new(net: &ReactionNetwork, rates: &RateAssignment, steps: &[usize], x0: &[u64]) -> Result<Self> {
        check_counts(net, x0)?;
        if steps.is_empty() {
            return Err(Error::InvalidArgument("cycle is empty".into()));
        }
        let nr = net.reactions().len();
        if let Some(&r) = steps.iter().find(|&&r| r >= nr) {
            return Err(Error::UnknownReaction(format!("index {r}")));
        }
        let d = net.dim();
        let mut x: Vec<i64> = x0.iter().map(|&v| v as i64).collect();
        let mut prefix = Vec::with_capacity(steps.len());
        let mut offset = vec![0i64; d];
        for &r in steps {
            if x.iter().zip(&net.source(r).0).any(|(&xi, &yi)| xi < i64::from(yi)) {
                return Err(Error::CycleInfeasible(format!(
                    "{} cannot fire from the state reached",
                    net.reaction_label(r)
                )));
            }
            prefix.push(offset.iter().map(|&v| v as f64).collect());
            for ((xi, oi), dv) in x.iter_mut().zip(offset.iter_mut()).zip(net.reaction_vector(r)) {
                *xi += dv;
                *oi += dv;
            }
        }
        if let Some(i) = offset.iter().position(|&v| v < 0) {
            return Err(Error::CycleInfeasible(format!(
                "each repetition consumes {}",
                net.species()[i].name
            )));
        }
        Ok(Cycle {
            kappa: rates.values(),
            steps: steps.to_vec(),
            x0: x0.iter().map(|&v| v as f64).collect(),
            shift: offset.iter().map(|&v| v as f64).collect(),
            prefix,
        })
    }

    /// Calls `f(step_rate, total_rate)` for every step of repetition `j >= 1`.
    fn visit(&self, net: &ReactionNetwork, j: f64, lambda: &mut [f64], mut f: impl FnMut(f64, f64)) {
        let start: Vec<f64> = self.x0.iter().zip(&self.shift).map(|(&a, &s)| a + (j - 1.0) * s).collect();
        let mut x = start.clone();
        for (&r, off) in self.steps.iter().zip(&self.prefix) {
            for ((xi, &si), &oi) in x.iter_mut().zip(&start).zip(off) {
                *xi = si + oi;
            }
            propensities_f64(net, &self.kappa, &x, lambda);
            let others: f64 = lambda.iter().enumerate().filter(|&(k, _)| k != r).map(|(_, &l)| l).sum();
            f(lambda[r], others);
        }
    }
}

struct SeriesSum {
    value: f64,
    width: f64,
    tail: f64,
    horizon: f64,
    finite: bool,
    certified: bool,
}

/// Sums `f(1) + f(2) + ...` for non-negative eventually monotone terms:
/// directly up to [`EXACT_REPETITIONS`], then by geometric blocks one decade
/// at a time. Once the terms behave like `C / j^2` the tail beyond `J` is
/// estimated by `C / J`; a decade whose sum fails to shrink by half against
/// the previous one marks the series divergent.
fn sum_series(f: impl Fn(f64) -> f64, tail_tol: f64) -> SeriesSum {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for j in 1..=EXACT_REPETITIONS {
        // Neumaier summation
        let t = f(j as f64);
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    sum += comp;
    let mut width = 0.0;
    let mut lo = EXACT_REPETITIONS as f64;
    let mut prev_decade: Option<f64> = None;
    let mut tail = f64::INFINITY;
    let mut growth_ok = false;
    for _ in 0..MAX_DECADES {
        let hi = lo * 10.0;
        let mut a = lo + 1.0;
        let mut fa = f(a);
        let mut decade = 0.0;
        while a <= hi {
            let b = (a * BLOCK_RATIO).floor().max(a).min(hi);
            let fb = if b == a { fa } else { f(b) };
            let n = b - a + 1.0;
            decade += n * 0.5 * (fa + fb);
            width += n * 0.5 * (fa - fb).abs();
            a = b + 1.0;
            fa = f(a);
        }
        sum += decade;
        let c_lo = f(lo) * lo * lo;
        let c_hi = f(hi) * hi * hi;
        growth_ok = c_hi <= c_lo * (1.0 + 1e-2) || c_hi == 0.0;
        tail = c_lo.max(c_hi) / hi;
        if let Some(p) = prev_decade {
            if decade > 0.5 * p && !(growth_ok && tail < tail_tol) {
                return SeriesSum {
                    value: f64::INFINITY,
                    width,
                    tail: f64::INFINITY,
                    horizon: hi,
                    finite: false,
                    certified: true,
                };
            }
        }
        lo = hi;
        if growth_ok && tail < tail_tol {
            return SeriesSum {
                value: sum + tail,
                width,
                tail,
                horizon: hi,
                finite: true,
                certified: true,
            };
        }
        prev_decade = Some(decade);
    }
    SeriesSum {
        value: sum + tail,
        width,
        tail,
        horizon: lo,
        finite: growth_ok,
        certified: false,
    }
}

/// Lower bound on the probability that `cycle` repeats forever from `x0`:
/// `prod_k prod_steps lambda_step / lambda_total`, summed in log form.
pub fn cycle_escape_probability(
    net: &ReactionNetwork,
    rates: &RateAssignment,
    cycle: &[usize],
    x0: &[u64],
    tail_tol: f64,
) -> Result<CycleBound> {
    let c = Cycle::new(net, rates, cycle, x0)?;
    let nr = net.reactions().len();
    let g = |j: f64| {
        let mut lambda = vec![0.0; nr];
        let mut acc = 0.0;
        c.visit(net, j, &mut lambda, |own, others| {
            acc -= (-others / (own + others)).ln_1p();
        });
        acc
    };
    let s = sum_series(g, tail_tol);
    let value = if s.finite { (-(s.value + s.width)).exp() } else { 0.0 };
    Ok(CycleBound {
        value,
        finite: s.finite,
        tail: s.tail,
        width: s.width,
        horizon: s.horizon,
        certified: s.certified,
    })
}

/// Expected time for infinitely many repetitions of `cycle` from `x0`,
/// `sum_k sum_steps 1 / lambda_step`; infinite when the series diverges.
pub fn cycle_time_bound(
    net: &ReactionNetwork,
    rates: &RateAssignment,
    cycle: &[usize],
    x0: &[u64],
    tail_tol: f64,
) -> Result<CycleBound> {
    let c = Cycle::new(net, rates, cycle, x0)?;
    let nr = net.reactions().len();
    let t = |j: f64| {
        let mut lambda = vec![0.0; nr];
        let mut acc = 0.0;
        c.visit(net, j, &mut lambda, |own, _| acc += 1.0 / own);
        acc
    };
    let s = sum_series(t, tail_tol);
    Ok(CycleBound {
        value: s.value,
        finite: s.finite,
        tail: s.tail,
        width: s.width,
        horizon: s.horizon,
        certified: s.certified,
    })
}

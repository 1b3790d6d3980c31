//! Tier partitions induced by flags of directions, the tier-descending
//! criterion, and drift along realized tier sequences.

use std::cmp::Ordering;
use std::ops::ControlFlow;

use num_traits::Float;

use crate::endotactic::{sweep_order_cones, SweepOptions};
use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::network::{RateAssignment, ReactionNetwork};
use crate::scalar::{lit, to_float, ExactField};
use crate::Rational;

/// Ordered nonzero directions `(a_1, ..., a_l)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Flag<T = Rational> {
    directions: Vec<Vector<T>>,
}

impl<T: ExactField> Flag<T> {
    pub fn new(directions: Vec<Vector<T>>) -> Result<Self> {
        if directions.is_empty() || directions.iter().any(|a| a.is_zero()) {
            return Err(Error::ZeroDirection);
        }
        let d = directions[0].len();
        if let Some(bad) = directions.iter().find(|a| a.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: bad.len(),
            });
        }
        Ok(Flag { directions })
    }

    pub fn single(w: Vector<T>) -> Result<Self> {
        Self::new(vec![w])
    }

    pub fn directions(&self) -> &[Vector<T>] {
        &self.directions
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.directions[0].len()
    }
}

impl Flag<Rational> {
    pub fn from_ints(directions: &[&[i64]]) -> Result<Self> {
        Self::new(directions.iter().map(|a| Vector::from_ints(a)).collect())
    }
}

/// Complexes grouped into tiers, tier 0 being the largest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TierPartition {
    tiers: Vec<Vec<usize>>,
    rank: Vec<usize>,
}

impl TierPartition {
    pub fn tiers(&self) -> &[Vec<usize>] {
        &self.tiers
    }

    /// Tier index of a complex (0 is the top tier).
    pub fn tier_of(&self, complex: usize) -> usize {
        self.rank[complex]
    }

    /// `a ≺ b`: `a` sits in a strictly lower tier than `b`.
    pub fn below(&self, a: usize, b: usize) -> bool {
        self.rank[a] > self.rank[b]
    }

    pub fn equivalent(&self, a: usize, b: usize) -> bool {
        self.rank[a] == self.rank[b]
    }

    /// Some reaction joins two different tiers.
    pub fn is_transversal(&self, net: &ReactionNetwork) -> bool {
        net.reactions()
            .iter()
            .any(|r| !self.equivalent(r.source, r.product))
    }
}

fn check_flag_dim<T: ExactField>(net: &ReactionNetwork, flag: &Flag<T>) -> Result<()> {
    if flag.dim() != net.dim() {
        return Err(Error::DimensionMismatch {
            expected: net.dim(),
            got: flag.dim(),
        });
    }
    Ok(())
}

pub fn tier_partition<T: ExactField>(net: &ReactionNetwork, flag: &Flag<T>) -> Result<TierPartition> {
    check_flag_dim(net, flag)?;
    let keys: Vec<Vec<T>> = net
        .complexes()
        .iter()
        .map(|c| {
            let y = c.as_i64();
            flag.directions.iter().map(|a| a.dot_ints(&y)).collect()
        })
        .collect();
    let cmp = |a: &Vec<T>, b: &Vec<T>| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.partial_cmp(y).expect("exact values are ordered"))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
    };
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| cmp(&keys[b], &keys[a]).then(a.cmp(&b)));
    let mut tiers: Vec<Vec<usize>> = Vec::new();
    let mut rank = vec![0; keys.len()];
    for (k, &c) in order.iter().enumerate() {
        if k == 0 || cmp(&keys[order[k - 1]], &keys[c]) != Ordering::Equal {
            tiers.push(Vec::new());
        }
        rank[c] = tiers.len() - 1;
        tiers.last_mut().expect("pushed").push(c);
    }
    for t in &mut tiers {
        t.sort_unstable();
    }
    Ok(TierPartition { tiers, rank })
}

/// The source complexes in the highest tier reached by any source.
pub fn source_tier_one(net: &ReactionNetwork, partition: &TierPartition) -> Vec<usize> {
    let sources = net.source_indices();
    let top = sources
        .iter()
        .map(|&s| partition.tier_of(s))
        .min()
        .expect("networks have sources");
    sources
        .into_iter()
        .filter(|&s| partition.tier_of(s) == top)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescendingVerdict {
    pub is_descending: bool,
    pub source_tier_one: Vec<usize>,
    /// The strictly descending reaction when descending, otherwise the
    /// ascending one (absent when nothing descends).
    pub witness_reaction: Option<usize>,
}

pub fn is_tier_descending_partition(net: &ReactionNetwork, partition: &TierPartition) -> DescendingVerdict {
    let top = source_tier_one(net, partition);
    let mut descending = None;
    for (r, reaction) in net.reactions().iter().enumerate() {
        if !top.contains(&reaction.source) {
            continue;
        }
        if partition.below(reaction.source, reaction.product) {
            return DescendingVerdict {
                is_descending: false,
                source_tier_one: top,
                witness_reaction: Some(r),
            };
        }
        if descending.is_none() && partition.below(reaction.product, reaction.source) {
            descending = Some(r);
        }
    }
    DescendingVerdict {
        is_descending: descending.is_some(),
        source_tier_one: top,
        witness_reaction: descending,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NetworkDescending<T = Rational> {
    pub is_descending: bool,
    pub cones_checked: usize,
    /// Offending single-vector flag and the verdict on its partition.
    pub counterexample: Option<(Vector<T>, DescendingVerdict)>,
}

pub fn is_tier_descending_network(net: &ReactionNetwork) -> Result<NetworkDescending> {
    is_tier_descending_network_with(net, SweepOptions::default())
}

/// Every transversal partition realized by a face witness must be
/// descending.
pub fn is_tier_descending_network_with<T: ExactField>(
    net: &ReactionNetwork,
    opts: SweepOptions,
) -> Result<NetworkDescending<T>> {
    let mut counterexample = None;
    let mut failure = None;
    let cones_checked = sweep_order_cones(net, opts, |cone| {
        let partition = match Flag::single(cone.witness.clone()).and_then(|f| tier_partition(net, &f)) {
            Ok(p) => p,
            Err(e) => {
                failure = Some(e);
                return ControlFlow::Break(());
            }
        };
        if !partition.is_transversal(net) {
            return ControlFlow::Continue(());
        }
        let verdict = is_tier_descending_partition(net, &partition);
        if verdict.is_descending {
            ControlFlow::Continue(())
        } else {
            counterexample = Some((cone.witness, verdict));
            ControlFlow::Break(())
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(NetworkDescending {
        is_descending: counterexample.is_none(),
        cones_checked,
        counterexample,
    })
}

/// Scales `m^i_n = n^((l - i + 1) / l)`, `i = 1..=l`.
pub fn scales<F: Float>(len: usize, n: F) -> Vec<F> {
    let l = lit::<F>(len as f64);
    (1..=len)
        .map(|i| n.powf(lit::<F>((len - i + 1) as f64) / l))
        .collect()
}

/// `ln x_n = sum_i m^i_n a_i`.
pub fn log_sequence<T: ExactField, F: Float>(flag: &Flag<T>, n: F) -> Result<Vec<F>> {
    if n < F::one() {
        return Err(Error::InvalidArgument(format!(
            "sequence index must be >= 1, got {}",
            n.to_f64().unwrap_or(f64::NAN)
        )));
    }
    let m = scales(flag.len(), n);
    let mut out = vec![F::zero(); flag.dim()];
    for (a, mi) in flag.directions.iter().zip(&m) {
        for (o, ak) in out.iter_mut().zip(a.iter()) {
            *o = *o + *mi * to_float::<T, F>(ak);
        }
    }
    Ok(out)
}

/// `x_n = exp(sum_i m^i_n a_i)`.
pub fn realize_sequence<T: ExactField, F: Float>(flag: &Flag<T>, n: F) -> Result<Vec<F>> {
    let logs = log_sequence(flag, n)?;
    let hi = F::max_value().ln();
    let lo = F::min_positive_value().ln();
    logs.into_iter()
        .enumerate()
        .map(|(i, l)| {
            if l > hi || l < lo || !l.is_finite() {
                Err(Error::Overflow(format!("component {i} has exponent {}", l.to_f64().unwrap_or(f64::NAN))))
            } else {
                Ok(l.exp())
            }
        })
        .collect()
}

/// A real number stored as a sign and the logarithm of its magnitude.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignedLog {
    pub sign: i8,
    pub ln_abs: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog {
        sign: 0,
        ln_abs: f64::NEG_INFINITY,
    };

    pub fn from_value(v: f64) -> Self {
        if v == 0.0 {
            Self::ZERO
        } else {
            SignedLog {
                sign: if v > 0.0 { 1 } else { -1 },
                ln_abs: v.abs().ln(),
            }
        }
    }

    pub fn value(&self) -> f64 {
        f64::from(self.sign) * self.ln_abs.exp()
    }

    /// Total order on the represented reals.
    pub fn cmp_value(&self, other: &Self) -> Ordering {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => match self.sign {
                0 => Ordering::Equal,
                1 => self.ln_abs.total_cmp(&other.ln_abs),
                _ => other.ln_abs.total_cmp(&self.ln_abs),
            },
            o => o,
        }
    }
}

fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// `sum kappa x_n^y ln(x_n^(y'-y))` in sign/log form, never overflowing.
pub fn drift_along_log<T: ExactField>(
    net: &ReactionNetwork,
    rates: &RateAssignment,
    flag: &Flag<T>,
    n: f64,
) -> Result<SignedLog> {
    check_flag_dim(net, flag)?;
    let l = log_sequence::<T, f64>(flag, n)?;
    let kappa: Vec<f64> = rates.values();
    let dot = |v: &[i64]| v.iter().zip(&l).map(|(&a, &b)| a as f64 * b).sum::<f64>();
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for r in 0..net.reactions().len() {
        let g = dot(&net.reaction_vector(r));
        if g == 0.0 {
            continue;
        }
        let t = dot(&net.source(r).as_i64()) + g.abs().ln() + kappa[r].ln();
        if g > 0.0 {
            pos.push(t);
        } else {
            neg.push(t);
        }
    }
    Ok(signed_log_sum(&pos, &neg))
}

/// `sum exp(pos) - sum exp(neg)` as a [`SignedLog`].
pub(crate) fn signed_log_sum(pos: &[f64], neg: &[f64]) -> SignedLog {
    let p = log_sum_exp(pos);
    let q = log_sum_exp(neg);
    match p.partial_cmp(&q) {
        Some(Ordering::Greater) => SignedLog {
            sign: 1,
            ln_abs: p + (-(q - p).exp()).ln_1p(),
        },
        Some(Ordering::Less) => SignedLog {
            sign: -1,
            ln_abs: q + (-(p - q).exp()).ln_1p(),
        },
        _ => SignedLog::ZERO,
    }
}

/// Plain value of [`drift_along_log`]; `Overflow` beyond `f64` range.
pub fn drift_along<T: ExactField>(
    net: &ReactionNetwork,
    rates: &RateAssignment,
    flag: &Flag<T>,
    n: f64,
) -> Result<f64> {
    let s = drift_along_log(net, rates, flag, n)?;
    if s.ln_abs > f64::MAX.ln() {
        return Err(Error::Overflow(format!("drift magnitude e^{:.1}", s.ln_abs)));
    }
    Ok(s.value())
}

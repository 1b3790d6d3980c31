//! Fourier–Motzkin elimination for systems `a . t >= b`, with witness
//! recovery by back substitution.

use std::collections::BTreeMap;

use crate::scalar::ExactField;

type Row<T> = (Vec<T>, T);

pub(super) fn solve<T: ExactField>(rows: Vec<Row<T>>, nvars: usize) -> Option<Vec<T>> {
    // stages[k] holds the system over variables 0..nvars-k
    let mut stages: Vec<Vec<Row<T>>> = vec![normalize(rows)?];
    for var in (0..nvars).rev() {
        let current = stages.last().expect("nonempty");
        let next = eliminate(current, var)?;
        stages.push(next);
    }

    let mut t: Vec<T> = Vec::with_capacity(nvars);
    for var in 0..nvars {
        // system with variables 0..=var
        let sys = &stages[nvars - 1 - var];
        let mut lo: Option<T> = None;
        let mut hi: Option<T> = None;
        for (a, b) in sys {
            let c = &a[var];
            if c.is_zero() {
                continue;
            }
            let rest = t
                .iter()
                .zip(a.iter())
                .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone());
            let bound = (b.clone() - rest) / c.clone();
            if c.is_positive() {
                if lo.as_ref().is_none_or(|l| bound > *l) {
                    lo = Some(bound);
                }
            } else if hi.as_ref().is_none_or(|h| bound < *h) {
                hi = Some(bound);
            }
        }
        t.push(pick(lo, hi)?);
    }
    Some(t)
}

/// A value in `[lo, hi]`, preferring zero, then the integer nearest zero.
fn pick<T: ExactField>(lo: Option<T>, hi: Option<T>) -> Option<T> {
    let zero = T::zero();
    match (lo, hi) {
        (None, None) => Some(zero),
        (Some(l), None) => Some(if l <= zero { zero } else { l.ceil_value() }),
        (None, Some(h)) => Some(if h >= zero { zero } else { h.floor_value() }),
        (Some(l), Some(h)) => {
            if l > h {
                return None;
            }
            if l <= zero && zero <= h {
                return Some(zero);
            }
            let candidate = if l > zero { l.ceil_value() } else { h.floor_value() };
            if candidate >= l && candidate <= h {
                Some(candidate)
            } else {
                Some((l + h) / T::from_int(2))
            }
        }
    }
}

fn eliminate<T: ExactField>(rows: &[Row<T>], var: usize) -> Option<Vec<Row<T>>> {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let mut out = Vec::new();
    for (a, b) in rows {
        let c = &a[var];
        if c.is_positive() {
            pos.push((a, b));
        } else if c.is_negative() {
            neg.push((a, b));
        } else {
            out.push((a.clone(), b.clone()));
        }
    }
    for (ap, bp) in &pos {
        let cp = ap[var].clone();
        for (an, bn) in &neg {
            let cn = -an[var].clone();
            let a: Vec<T> = ap
                .iter()
                .zip(an.iter())
                .map(|(x, y)| x.clone() * cn.clone() + y.clone() * cp.clone())
                .collect();
            let b = (*bp).clone() * cn.clone() + (*bn).clone() * cp.clone();
            out.push((a, b));
        }
    }
    normalize(out)
}

/// Scales rows so the leading nonzero coefficient has magnitude one, merges
/// parallel rows keeping the tightest bound and drops tautologies. `None`
/// signals a contradiction `0 >= b` with `b > 0`.
fn normalize<T: ExactField>(rows: Vec<Row<T>>) -> Option<Vec<Row<T>>> {
    let mut merged: BTreeMap<String, Row<T>> = BTreeMap::new();
    for (a, b) in rows {
        let Some(lead) = a.iter().find(|v| !v.is_zero()).cloned() else {
            if b.is_positive() {
                return None;
            }
            continue;
        };
        let scale = T::one() / lead.abs();
        let a: Vec<T> = a.into_iter().map(|v| v * scale.clone()).collect();
        let b = b * scale;
        let key = a.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(",");
        match merged.get_mut(&key) {
            Some(existing) => {
                if b > existing.1 {
                    existing.1 = b;
                }
            }
            None => {
                merged.insert(key, (a, b));
            }
        }
    }
    Some(merged.into_values().collect())
}

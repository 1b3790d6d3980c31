//! Exact phase-one simplex: feasibility of `a . t >= b` with free `t`.
//!
//! Free variables are split as `t = p - q`, each row gets a surplus variable
//! and an artificial one; the artificial sum is minimized with Bland's rule,
//! which cannot cycle.

use crate::scalar::ExactField;

pub(super) fn solve<T: ExactField>(rows: Vec<(Vec<T>, T)>, nvars: usize) -> Option<Vec<T>> {
    let m = rows.len();
    if m == 0 {
        return Some(vec![T::zero(); nvars]);
    }
    // columns: p (nvars) | q (nvars) | surplus (m) | artificial (m) | rhs
    let ncols = 2 * nvars + 2 * m;
    let mut tab: Vec<Vec<T>> = Vec::with_capacity(m + 1);
    for (i, (a, b)) in rows.into_iter().enumerate() {
        let mut row = vec![T::zero(); ncols + 1];
        // a.p - a.q - s_i = b
        let flip = b.is_negative();
        let sgn = if flip { -T::one() } else { T::one() };
        for j in 0..nvars {
            row[j] = a[j].clone() * sgn.clone();
            row[nvars + j] = -a[j].clone() * sgn.clone();
        }
        row[2 * nvars + i] = -sgn.clone();
        row[2 * nvars + m + i] = T::one();
        row[ncols] = b * sgn;
        tab.push(row);
    }
    let mut basis: Vec<usize> = (0..m).map(|i| 2 * nvars + m + i).collect();

    // objective row: minimize sum of artificials, stored as reduced costs
    let mut obj = vec![T::zero(); ncols + 1];
    for row in &tab {
        for j in 0..=ncols {
            if !(2 * nvars + m..2 * nvars + 2 * m).contains(&j) {
                obj[j] = obj[j].clone() - row[j].clone();
            }
        }
    }
    tab.push(obj);

    loop {
        let obj = &tab[m];
        // Bland: smallest index with negative reduced cost
        let Some(enter) = (0..ncols).find(|&j| obj[j].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, T)> = None;
        for (i, row) in tab.iter().take(m).enumerate() {
            if row[enter].is_positive() {
                let ratio = row[ncols].clone() / row[enter].clone();
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let (r, _) = leave?; // unbounded cannot happen in phase one
        pivot(&mut tab, r, enter);
        basis[r] = enter;
    }

    // tab[m][ncols] holds minus the optimal artificial sum
    if !tab[m][ncols].is_zero() {
        return None;
    }
    let mut values = vec![T::zero(); ncols];
    for (i, &bv) in basis.iter().enumerate() {
        values[bv] = tab[i][ncols].clone();
    }
    Some(
        (0..nvars)
            .map(|j| values[j].clone() - values[nvars + j].clone())
            .collect(),
    )
}

fn pivot<T: ExactField>(tab: &mut [Vec<T>], r: usize, c: usize) {
    let inv = T::one() / tab[r][c].clone();
    for v in tab[r].iter_mut() {
        *v = v.clone() * inv.clone();
    }
    let pivot_row = tab[r].clone();
    for (i, row) in tab.iter_mut().enumerate() {
        if i == r || row[c].is_zero() {
            continue;
        }
        let f = row[c].clone();
        for (v, p) in row.iter_mut().zip(&pivot_row) {
            if !p.is_zero() {
                *v = v.clone() - f.clone() * p.clone();
            }
        }
    }
}

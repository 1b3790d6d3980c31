//! Strong endotacticity by sweeping every face of the arrangement cut out
//! by the pairwise complex differences.
//!
//! For each realizable sign pattern of `<w, y_i - y_j>` over all complex
//! pairs the conditions of the definition are fixed, so checking one
//! exact witness per face decides the property for every `w` at once.

use std::ops::ControlFlow;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, feasible_with, ConeMethod, ConeSpec, Relation, Vector};
use crate::network::{Complex, ReactionNetwork};
use crate::scalar::ExactField;
use crate::Rational;

/// Default cap on the number of faces visited.
pub const DEFAULT_BUDGET: usize = 1_000_000;

/// Unordered complex pairs `(i, j)`, `i < j`, in lexicographic order.
pub fn complex_pairs(net: &ReactionNetwork) -> Vec<(usize, usize)> {
    let n = net.complexes().len();
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// Index into [`complex_pairs`] of the pair `{a, b}`.
pub fn pair_index(n: usize, a: usize, b: usize) -> usize {
    let (i, j) = if a < b { (a, b) } else { (b, a) };
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// One face of the arrangement: the sign of `<w, y_i - y_j>` for every
/// pair of [`complex_pairs`], with an exact interior point.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderCone<T = Rational> {
    pub signs: Vec<i8>,
    pub witness: Vector<T>,
}

impl<T: ExactField> OrderCone<T> {
    /// Sign of `<w, y_a - y_b>` on this face.
    pub fn compare(&self, n: usize, a: usize, b: usize) -> i8 {
        if a == b {
            return 0;
        }
        let s = self.signs[pair_index(n, a, b)];
        if a < b {
            s
        } else {
            -s
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WCheck {
    Pass,
    /// A reaction out of a w-maximal source increases `<w, .>`.
    FailCond1(usize),
    /// No reaction out of a w-maximal source decreases `<w, .>`.
    FailCond2,
}

impl WCheck {
    pub fn is_pass(&self) -> bool {
        matches!(self, WCheck::Pass)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Counterexample<T = Rational> {
    pub witness: Vector<T>,
    pub failure: WCheck,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SEVerdict<T = Rational> {
    pub is_se: bool,
    pub cones_checked: usize,
    pub counterexample: Option<Counterexample<T>>,
}

#[derive(Clone, Copy, Debug)]
pub struct SweepOptions {
    pub budget: usize,
    pub method: ConeMethod,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            budget: DEFAULT_BUDGET,
            method: ConeMethod::Auto,
        }
    }
}

fn check_dim<T>(net: &ReactionNetwork, w: &[T]) -> Result<()> {
    if w.len() != net.dim() {
        return Err(Error::DimensionMismatch {
            expected: net.dim(),
            got: w.len(),
        });
    }
    Ok(())
}

fn scores<T: ExactField>(net: &ReactionNetwork, w: &[T]) -> Vec<T> {
    let w = Vector(w.to_vec());
    net.complexes().iter().map(|c| w.dot_ints(&c.as_i64())).collect()
}

/// Indices of the source complexes maximizing `<w, y>`.
pub fn w_maximal_indices<T: ExactField>(net: &ReactionNetwork, w: &[T]) -> Result<Vec<usize>> {
    check_dim(net, w)?;
    let s = scores(net, w);
    let sources = net.source_indices();
    let best = sources
        .iter()
        .map(|&i| &s[i])
        .fold(None::<&T>, |acc, v| match acc {
            Some(a) if a >= v => Some(a),
            _ => Some(v),
        })
        .expect("networks have sources")
        .clone();
    Ok(sources.into_iter().filter(|&i| s[i] == best).collect())
}

pub fn w_maximal<T: ExactField>(net: &ReactionNetwork, w: &[T]) -> Result<Vec<Complex>> {
    Ok(w_maximal_indices(net, w)?
        .into_iter()
        .map(|i| net.complexes()[i].clone())
        .collect())
}

/// Whether `w` is orthogonal to every reaction vector.
pub fn orthogonal_to_s<T: ExactField>(net: &ReactionNetwork, w: &[T]) -> bool {
    let w = Vector(w.to_vec());
    (0..net.reactions().len()).all(|r| w.dot_ints(&net.reaction_vector(r)).is_zero())
}

/// Both conditions of the definition at a single `w`.
pub fn check_w_condition<T: ExactField>(net: &ReactionNetwork, w: &[T]) -> Result<WCheck> {
    check_dim(net, w)?;
    if orthogonal_to_s(net, w) {
        return Err(Error::OrthogonalToS);
    }
    let maximal = w_maximal_indices(net, w)?;
    let wv = Vector(w.to_vec());
    let mut decreasing = false;
    for (r, reaction) in net.reactions().iter().enumerate() {
        if !maximal.contains(&reaction.source) {
            continue;
        }
        let v = wv.dot_ints(&net.reaction_vector(r));
        if v.is_positive() {
            return Ok(WCheck::FailCond1(r));
        }
        decreasing |= v.is_negative();
    }
    Ok(if decreasing { WCheck::Pass } else { WCheck::FailCond2 })
}

/// Same check read off a face's sign pattern.
fn check_cone<T: ExactField>(net: &ReactionNetwork, cone: &OrderCone<T>) -> WCheck {
    let n = net.complexes().len();
    let sources = net.source_indices();
    let maximal: Vec<usize> = sources
        .iter()
        .copied()
        .filter(|&y| sources.iter().all(|&z| cone.compare(n, y, z) >= 0))
        .collect();
    let mut decreasing = false;
    for (r, reaction) in net.reactions().iter().enumerate() {
        if !maximal.contains(&reaction.source) {
            continue;
        }
        match cone.compare(n, reaction.product, reaction.source) {
            1 => return WCheck::FailCond1(r),
            -1 => decreasing = true,
            _ => {}
        }
    }
    if decreasing {
        WCheck::Pass
    } else {
        WCheck::FailCond2
    }
}

/// Visiting order of signs at each pair.
const SIGN_ORDER: [Relation; 3] = [Relation::Positive, Relation::Zero, Relation::Negative];

struct Sweep<T, F> {
    normals: Vec<Vector<T>>,
    reaction_pairs: Vec<usize>,
    opts: SweepOptions,
    cone: ConeSpec<T>,
    signs: Vec<i8>,
    count: usize,
    visit: F,
}

impl<T, F> Sweep<T, F>
where
    T: ExactField,
    F: FnMut(OrderCone<T>) -> ControlFlow<()>,
{
    fn descend(&mut self, depth: usize, witness: &Vector<T>) -> Result<ControlFlow<()>> {
        if depth == self.normals.len() {
            if self.reaction_pairs.iter().all(|&p| self.signs[p] == 0) {
                // the whole face lies in the orthogonal complement of S
                return Ok(ControlFlow::Continue(()));
            }
            self.count += 1;
            if self.count > self.opts.budget {
                return Err(Error::BudgetExceeded(self.opts.budget));
            }
            let cone = OrderCone {
                signs: self.signs.clone(),
                witness: witness.clone(),
            };
            return Ok((self.visit)(cone));
        }
        let normal = self.normals[depth].clone();
        let current = linalg::sign(&normal.dot(witness));
        for rel in SIGN_ORDER {
            self.cone.push(normal.clone(), rel)?;
            let next = if current == rel.sign() {
                Some(witness.clone())
            } else {
                feasible_with(&self.cone, self.opts.method)
            };
            let flow = match next {
                Some(w) => {
                    self.signs.push(rel.sign());
                    let flow = self.descend(depth + 1, &w);
                    self.signs.pop();
                    flow
                }
                None => Ok(ControlFlow::Continue(())),
            };
            self.cone.pop();
            if flow?.is_break() {
                return Ok(ControlFlow::Break(()));
            }
        }
        Ok(ControlFlow::Continue(()))
    }
}

/// Visits every face not contained in the orthogonal complement of `S`,
/// in lexicographic sign order (`+` before `0` before `-`). Returns the
/// number of faces visited.
pub fn sweep_order_cones<T, F>(net: &ReactionNetwork, opts: SweepOptions, visit: F) -> Result<usize>
where
    T: ExactField,
    F: FnMut(OrderCone<T>) -> ControlFlow<()>,
{
    let n = net.complexes().len();
    let normals: Vec<Vector<T>> = complex_pairs(net)
        .into_iter()
        .map(|(i, j)| {
            let a = net.complexes()[i].as_i64();
            let b = net.complexes()[j].as_i64();
            Vector::from_ints(&a.iter().zip(&b).map(|(x, y)| x - y).collect::<Vec<_>>())
        })
        .collect();
    let reaction_pairs = net
        .reactions()
        .iter()
        .map(|r| pair_index(n, r.source, r.product))
        .collect();
    let mut sweep = Sweep {
        normals,
        reaction_pairs,
        opts,
        cone: ConeSpec::new(net.dim()),
        signs: Vec::new(),
        count: 0,
        visit,
    };
    let _ = sweep.descend(0, &Vector::zeros(net.dim()))?;
    Ok(sweep.count)
}

pub fn enumerate_order_cones(net: &ReactionNetwork) -> Result<Vec<OrderCone>> {
    enumerate_order_cones_with(net, SweepOptions::default())
}

pub fn enumerate_order_cones_with<T: ExactField>(
    net: &ReactionNetwork,
    opts: SweepOptions,
) -> Result<Vec<OrderCone<T>>> {
    let mut out = Vec::new();
    sweep_order_cones(net, opts, |c| {
        out.push(c);
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

pub fn is_strongly_endotactic(net: &ReactionNetwork) -> Result<SEVerdict> {
    is_strongly_endotactic_with(net, SweepOptions::default())
}

/// Stops at the first failing face.
pub fn is_strongly_endotactic_with<T: ExactField>(
    net: &ReactionNetwork,
    opts: SweepOptions,
) -> Result<SEVerdict<T>> {
    let mut counterexample = None;
    let cones_checked = sweep_order_cones(net, opts, |cone: OrderCone<T>| {
        let result = check_cone(net, &cone);
        if result.is_pass() {
            ControlFlow::Continue(())
        } else {
            counterexample = Some(Counterexample {
                witness: cone.witness,
                failure: result,
            });
            ControlFlow::Break(())
        }
    })?;
    if let Some(cx) = &counterexample {
        debug_assert_eq!(check_w_condition(net, &cx.witness).ok(), Some(cx.failure.clone()));
    }
    Ok(SEVerdict {
        is_se: counterexample.is_none(),
        cones_checked,
        counterexample,
    })
}

/// Randomized search for a violating `w`. Half the samples are integer
/// vectors in a box, the other half lie on intersections of random pair
/// hyperplanes so that lower-dimensional faces are hit too. Finding
/// nothing certifies nothing.
pub fn mc_se_oracle(net: &ReactionNetwork, samples: usize, seed: u64) -> Option<Vector<Rational>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = net.dim();
    let pairs = complex_pairs(net);
    let normals: Vec<Vec<Rational>> = pairs
        .iter()
        .map(|&(i, j)| {
            let a = net.complexes()[i].as_i64();
            let b = net.complexes()[j].as_i64();
            crate::network::rational_vec(&a.iter().zip(&b).map(|(x, y)| x - y).collect::<Vec<_>>())
        })
        .collect();
    for _ in 0..samples {
        let w: Vector<Rational> = if rng.random_bool(0.5) || normals.is_empty() || d < 2 {
            Vector::from_ints(&(0..d).map(|_| rng.random_range(-12..=12)).collect::<Vec<i64>>())
        } else {
            let k = rng.random_range(1..d);
            let rows: Vec<Vec<Rational>> = (0..k)
                .map(|_| normals[rng.random_range(0..normals.len())].clone())
                .collect();
            let basis = linalg::nullspace(d, &rows);
            let mut w = Vector::zeros(d);
            for b in &basis {
                let c = Rational::from_integer(rng.random_range(-12i64..=12).into());
                w = w.add(&b.scale(&c));
            }
            w
        };
        if orthogonal_to_s(net, &w) {
            continue;
        }
        if let Ok(check) = check_w_condition(net, &w) {
            if !check.is_pass() {
                return Some(w);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_network;
    use num_rational::Ratio;

    fn net(text: &str) -> ReactionNetwork {
        parse_network(text).unwrap().network
    }

    fn q(v: &[i64]) -> Vec<Rational> {
        crate::network::rational_vec(v)
    }

    fn transient() -> ReactionNetwork {
        net("0 -> 2A + B\n2A + B -> 4A + 4B\n4A + 4B -> A")
    }

    #[test]
    fn pair_indexing() {
        let n = 5;
        for (k, (i, j)) in (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).enumerate() {
            assert_eq!(pair_index(n, i, j), k);
            assert_eq!(pair_index(n, j, i), k);
        }
    }

    #[test]
    fn maximal_sets() {
        let t = transient();
        assert_eq!(w_maximal(&t, &q(&[1, 1])).unwrap(), vec![Complex(vec![4, 4])]);
        assert_eq!(
            w_maximal(&t, &q(&[-1, 1])).unwrap(),
            vec![Complex(vec![0, 0]), Complex(vec![4, 4])]
        );
        assert_eq!(w_maximal(&t, &q(&[0, 0])).unwrap().len(), 3);
    }

    #[test]
    fn single_w_checks() {
        assert_eq!(check_w_condition(&transient(), &q(&[1, -2])).unwrap(), WCheck::Pass);
        let not_se = net("A <-> 2B\nA + C <-> B + C");
        assert_eq!(check_w_condition(&not_se, &q(&[1, 1, 10])).unwrap(), WCheck::FailCond2);
        let open = net("2S1 <-> S1 + S2\nS1 <-> 0\n0 <-> S2");
        assert_eq!(check_w_condition(&open, &q(&[1, 1])).unwrap(), WCheck::FailCond2);
        assert_eq!(check_w_condition(&not_se, &q(&[0, 0, 1])).unwrap_err(), Error::OrthogonalToS);
    }

    #[test]
    fn single_reaction_has_two_faces() {
        let cones = enumerate_order_cones(&net("A -> B")).unwrap();
        assert_eq!(cones.len(), 2);
        assert!(cones.iter().all(|c| c.signs[0] != 0));
    }

    #[test]
    fn transient_faces() {
        let t = transient();
        let cones = enumerate_order_cones(&t).unwrap();
        // three regions with one maximal source, three rays with a tie
        let mut maximal: Vec<Vec<usize>> = cones
            .iter()
            .map(|c| w_maximal_indices(&t, &c.witness).unwrap())
            .collect();
        maximal.sort();
        maximal.dedup();
        assert_eq!(maximal.len(), 6);
        assert_eq!(maximal.iter().filter(|m| m.len() == 1).count(), 3);
        assert_eq!(maximal.iter().filter(|m| m.len() == 2).count(), 3);
        for c in &cones {
            assert!(check_cone(&t, c).is_pass());
        }
    }

    #[test]
    fn verdicts() {
        assert!(is_strongly_endotactic(&transient()).unwrap().is_se);
        assert!(is_strongly_endotactic(&net("0 -> 2A\n2A -> 4A + B\n4A + B -> 6A + 4B\n6A + 4B -> 3A"))
            .unwrap()
            .is_se);
        assert!(is_strongly_endotactic(&net("B <-> A\nA <-> 2B")).unwrap().is_se);
        let open = is_strongly_endotactic(&net("2S1 <-> S1 + S2\nS1 <-> 0\n0 <-> S2")).unwrap();
        assert!(!open.is_se);
    }

    #[test]
    fn not_se_witness_is_in_reference_cone() {
        let not_se = net("A <-> 2B\nA + C <-> B + C");
        let v = is_strongly_endotactic(&not_se).unwrap();
        assert!(!v.is_se);
        let cx = v.counterexample.unwrap();
        assert_eq!(cx.failure, WCheck::FailCond2);
        let maximal = w_maximal(&not_se, &cx.witness).unwrap();
        assert_eq!(maximal, vec![Complex(vec![0, 1, 1]), Complex(vec![1, 0, 1])]);
        let reference = q(&[1, 1, 10]);
        let sign_at = |w: &[Rational]| {
            complex_pairs(&not_se)
                .iter()
                .map(|&(i, j)| {
                    let d: Vec<i64> = not_se.complexes()[i]
                        .as_i64()
                        .iter()
                        .zip(not_se.complexes()[j].as_i64())
                        .map(|(a, b)| a - b)
                        .collect();
                    linalg::sign(&Vector(w.to_vec()).dot_ints(&d))
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(sign_at(&cx.witness), sign_at(&reference));
    }

    #[test]
    fn small_integer_field_agrees() {
        let not_se = net("A <-> 2B\nA + C <-> B + C");
        let v: SEVerdict<Ratio<i64>> = is_strongly_endotactic_with(&not_se, SweepOptions::default()).unwrap();
        assert!(!v.is_se);
        let v: SEVerdict<Ratio<i128>> =
            is_strongly_endotactic_with(&transient(), SweepOptions::default()).unwrap();
        assert!(v.is_se);
    }

    #[test]
    fn budget_is_enforced() {
        let opts = SweepOptions {
            budget: 2,
            method: ConeMethod::Auto,
        };
        assert_eq!(
            enumerate_order_cones_with::<Rational>(&transient(), opts).unwrap_err(),
            Error::BudgetExceeded(2)
        );
    }

    #[test]
    fn oracle() {
        let not_se = net("A <-> 2B\nA + C <-> B + C");
        assert!(mc_se_oracle(&not_se, 10_000, 1).is_some());
        assert!(mc_se_oracle(&transient(), 2_000, 1).is_none());
    }
}

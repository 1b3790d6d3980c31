//! Graph and combinatorial structure of a network.

use std::collections::BTreeSet;
use std::fmt;

use petgraph::algo::{kosaraju_scc, tarjan_scc};
use petgraph::graph::{DiGraph, UnGraph};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::{stoich_basis, Complex, ReactionNetwork};

/// Hard cap on species count for exhaustive siphon search.
pub const MAX_SIPHON_SPECIES: usize = 20;

pub fn source_complexes(net: &ReactionNetwork) -> Vec<Complex> {
    net.source_indices()
        .into_iter()
        .map(|i| net.complexes()[i].clone())
        .collect()
}

fn undirected(net: &ReactionNetwork) -> UnGraph<(), ()> {
    let mut g = UnGraph::with_capacity(net.complexes().len(), net.reactions().len());
    for _ in net.complexes() {
        g.add_node(());
    }
    for r in net.reactions() {
        g.add_edge((r.source as u32).into(), (r.product as u32).into(), ());
    }
    g
}

/// Connected components of the undirected reaction graph, as sorted lists
/// of complex indices ordered by their smallest member.
pub fn linkage_classes(net: &ReactionNetwork) -> Vec<Vec<usize>> {
    let mut classes: Vec<Vec<usize>> = tarjan_scc(&undirected(net))
        .into_iter()
        .map(|c| {
            let mut v: Vec<usize> = c.into_iter().map(|n| n.index()).collect();
            v.sort_unstable();
            v
        })
        .collect();
    classes.sort();
    classes
}

/// Every linkage class is strongly connected.
pub fn weakly_reversible(net: &ReactionNetwork) -> bool {
    let mut g = DiGraph::<(), ()>::with_capacity(net.complexes().len(), net.reactions().len());
    for _ in net.complexes() {
        g.add_node(());
    }
    for r in net.reactions() {
        g.add_edge((r.source as u32).into(), (r.product as u32).into(), ());
    }
    kosaraju_scc(&g).len() == linkage_classes(net).len()
}

pub fn deficiency(net: &ReactionNetwork) -> usize {
    let value = net.complexes().len() - linkage_classes(net).len() - stoich_basis(net).dim();
    debug_assert!(net.complexes().len() >= linkage_classes(net).len() + stoich_basis(net).dim());
    value
}

/// A species subset closed under "produced implies consumed".
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Siphon {
    pub species: Vec<usize>,
}

impl Siphon {
    pub fn names(&self, net: &ReactionNetwork) -> Vec<String> {
        self.species
            .iter()
            .map(|&i| net.species()[i].name.clone())
            .collect()
    }
}

/// Direct check: every reaction whose product meets `set` has a source
/// meeting `set`.
pub fn is_siphon(net: &ReactionNetwork, set: &[usize]) -> bool {
    if set.is_empty() {
        return false;
    }
    (0..net.reactions().len()).all(|r| {
        let hits = |c: &Complex| set.iter().any(|&i| c.0[i] > 0);
        !hits(net.product(r)) || hits(net.source(r))
    })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Assign {
    Open,
    In,
    Out,
}

struct SiphonSearch<'a> {
    net: &'a ReactionNetwork,
    found: Vec<u32>,
}

impl SiphonSearch<'_> {
    fn mask(state: &[Assign]) -> u32 {
        state
            .iter()
            .enumerate()
            .filter(|(_, a)| **a == Assign::In)
            .fold(0, |m, (i, _)| m | (1 << i))
    }

    /// Forces species implied by the current `In` set. Returns false on
    /// a contradiction.
    fn propagate(&self, state: &mut [Assign]) -> bool {
        loop {
            let mut changed = false;
            for r in 0..self.net.reactions().len() {
                let src = self.net.source(r);
                let prod = self.net.product(r);
                let produces = prod.0.iter().enumerate().any(|(i, &c)| c > 0 && state[i] == Assign::In);
                if !produces {
                    continue;
                }
                if src.0.iter().enumerate().any(|(i, &c)| c > 0 && state[i] == Assign::In) {
                    continue;
                }
                let candidates: Vec<usize> = src
                    .0
                    .iter()
                    .enumerate()
                    .filter(|&(i, &c)| c > 0 && state[i] == Assign::Open)
                    .map(|(i, _)| i)
                    .collect();
                match candidates.as_slice() {
                    [] => return false,
                    [only] => {
                        state[*only] = Assign::In;
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn run(&mut self, mut state: Vec<Assign>) {
        if !self.propagate(&mut state) {
            return;
        }
        let m = Self::mask(&state);
        if m != 0 {
            let set: Vec<usize> = (0..state.len()).filter(|&i| m & (1 << i) != 0).collect();
            if is_siphon(self.net, &set) {
                self.found.push(m);
                return;
            }
        }
        let Some(next) = state.iter().position(|&a| a == Assign::Open) else {
            return;
        };
        let mut with = state.clone();
        with[next] = Assign::In;
        self.run(with);
        state[next] = Assign::Out;
        self.run(state);
    }
}

/// All inclusion-minimal siphons, sorted.
pub fn minimal_siphons(net: &ReactionNetwork) -> Result<Vec<Siphon>> {
    let d = net.dim();
    if d > MAX_SIPHON_SPECIES {
        return Err(Error::TooManySpecies(d));
    }
    let mut search = SiphonSearch {
        net,
        found: Vec::new(),
    };
    search.run(vec![Assign::Open; d]);
    let masks: BTreeSet<u32> = search.found.into_iter().collect();
    let mut out: Vec<Siphon> = masks
        .iter()
        .filter(|&&m| !masks.iter().any(|&o| o != m && o & m == o))
        .map(|&m| Siphon {
            species: (0..d).filter(|&i| m & (1 << i) != 0).collect(),
        })
        .collect();
    out.sort();
    Ok(out)
}

pub fn is_asiphonic(net: &ReactionNetwork) -> Result<bool> {
    Ok(minimal_siphons(net)?.is_empty())
}

pub fn is_binary(net: &ReactionNetwork) -> bool {
    net.complexes().iter().all(|c| c.order() <= 2)
}

fn unit(d: usize, i: usize) -> Complex {
    let mut v = vec![0; d];
    v[i] = 1;
    Complex(v)
}

pub fn is_fully_open(net: &ReactionNetwork) -> bool {
    let d = net.dim();
    let zero = Complex::zero(d);
    (0..d).all(|i| {
        let s = unit(d, i);
        net.reaction_index(&zero, &s).is_some() && net.reaction_index(&s, &zero).is_some()
    })
}

/// Projection onto a species subset: complexes are restricted, reactions
/// that collapse to self-loops are dropped and duplicates merged. Species
/// that no longer occur in any surviving reaction are dropped too.
pub fn project_network(net: &ReactionNetwork, species: &[usize]) -> Result<ReactionNetwork> {
    let keep: BTreeSet<usize> = species.iter().copied().collect();
    if keep.is_empty() {
        return Err(Error::EmptyProjection);
    }
    if let Some(&bad) = keep.iter().find(|&&i| i >= net.dim()) {
        return Err(Error::DimensionMismatch {
            expected: net.dim(),
            got: bad + 1,
        });
    }
    let keep: Vec<usize> = keep.into_iter().collect();
    let restrict = |c: &Complex| Complex(keep.iter().map(|&i| c.0[i]).collect());
    let mut pairs: BTreeSet<(Complex, Complex)> = BTreeSet::new();
    for r in 0..net.reactions().len() {
        let s = restrict(net.source(r));
        let p = restrict(net.product(r));
        if s != p {
            pairs.insert((s, p));
        }
    }
    if pairs.is_empty() {
        return Err(Error::EmptyProjection);
    }
    let used: Vec<usize> = (0..keep.len())
        .filter(|&j| pairs.iter().any(|(s, p)| s.0[j] > 0 || p.0[j] > 0))
        .collect();
    let names: Vec<&str> = used.iter().map(|&j| net.species()[keep[j]].name.as_str()).collect();
    let shrink = |c: &Complex| Complex(used.iter().map(|&j| c.0[j]).collect());
    let pairs: Vec<(Complex, Complex)> = pairs.iter().map(|(s, p)| (shrink(s), shrink(p))).collect();
    ReactionNetwork::new(&names, &pairs)
}

/// A reaction given by value, in the coordinates of the enclosing network.
pub type ReactionRef = (Complex, Complex);

/// Core network plus the outflow-like `R'` (one group per species) and the
/// low-order `R''`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PRDecomposition {
    pub core: Vec<ReactionRef>,
    pub r_prime: Vec<Vec<ReactionRef>>,
    pub r_double_prime: Vec<ReactionRef>,
    pub m: u64,
}

impl PRDecomposition {
    /// The core as a stand-alone network over the species it uses.
    pub fn core_network(&self, net: &ReactionNetwork) -> Result<ReactionNetwork> {
        if self.core.is_empty() {
            return Err(Error::EmptyNetwork);
        }
        let used: Vec<usize> = (0..net.dim())
            .filter(|&i| self.core.iter().any(|(s, p)| s.0[i] > 0 || p.0[i] > 0))
            .collect();
        let names: Vec<&str> = used.iter().map(|&i| net.species()[i].name.as_str()).collect();
        let shrink = |c: &Complex| Complex(used.iter().map(|&i| c.0[i]).collect());
        let pairs: Vec<ReactionRef> = self.core.iter().map(|(s, p)| (shrink(s), shrink(p))).collect();
        ReactionNetwork::new(&names, &pairs)
    }
}

/// Largest source order among the given reactions.
pub fn max_source_order(reactions: &[ReactionRef]) -> u64 {
    reactions.iter().map(|(s, _)| s.order()).max().unwrap_or(0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "clause", rename_all = "snake_case")]
pub enum PRFailure {
    /// (i) the core is not strongly endotactic.
    CoreNotSe,
    /// (ii) species without an admissible `a S_i -> y'` reaction.
    Outflow { species: String, detail: String },
    /// (iii) an `R''` source of order above `m - 2`.
    Inflow { reaction: String },
    /// (iv) some `R'` product is not smaller than every `R'` source.
    Ordering { max_product: u64, min_source: u64 },
}

impl PRFailure {
    pub fn clause(&self) -> u8 {
        match self {
            PRFailure::CoreNotSe => 1,
            PRFailure::Outflow { .. } => 2,
            PRFailure::Inflow { .. } => 3,
            PRFailure::Ordering { .. } => 4,
        }
    }
}

impl fmt::Display for PRFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PRFailure::CoreNotSe => write!(f, "(i) core is not strongly endotactic"),
            PRFailure::Outflow { species, detail } => write!(f, "(ii) species {species}: {detail}"),
            PRFailure::Inflow { reaction } => write!(f, "(iii) source of {reaction} too large"),
            PRFailure::Ordering {
                max_product,
                min_source,
            } => write!(f, "(iv) max product order {max_product} >= min source order {min_source}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PRVerdict {
    Pass,
    Fail(PRFailure),
}

impl PRVerdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, PRVerdict::Pass)
    }
}

fn label(net: &ReactionNetwork, (s, p): &ReactionRef) -> String {
    format!("{} -> {}", s.display(net.species()), p.display(net.species()))
}

/// Checks the positive-recurrence decomposition hypotheses, clause by
/// clause. The strong endotacticity of the core is supplied by the caller.
pub fn validate_pr_decomposition(
    net: &ReactionNetwork,
    decomp: &PRDecomposition,
    core_is_se: bool,
) -> Result<PRVerdict> {
    let d = net.dim();
    let all = decomp
        .core
        .iter()
        .chain(decomp.r_prime.iter().flatten())
        .chain(&decomp.r_double_prime);
    let mut covered = BTreeSet::new();
    for rr in all {
        if rr.0.dim() != d || rr.1.dim() != d {
            return Err(Error::UnknownReaction(format!("{:?} -> {:?}", rr.0 .0, rr.1 .0)));
        }
        let idx = net
            .reaction_index(&rr.0, &rr.1)
            .ok_or_else(|| Error::UnknownReaction(label(net, rr)))?;
        covered.insert(idx);
    }
    if let Some(r) = (0..net.reactions().len()).find(|r| !covered.contains(r)) {
        return Err(Error::InvalidArgument(format!(
            "reaction {} is not covered by the decomposition",
            net.reaction_label(r)
        )));
    }
    let core_m = max_source_order(&decomp.core);
    if decomp.m < core_m {
        return Err(Error::InvalidArgument(format!(
            "m = {} is below the largest core source order {core_m}",
            decomp.m
        )));
    }
    if decomp.r_prime.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: decomp.r_prime.len(),
        });
    }

    if !core_is_se {
        return Ok(PRVerdict::Fail(PRFailure::CoreNotSe));
    }
    let m = decomp.m;
    for (i, group) in decomp.r_prime.iter().enumerate() {
        let species = net.species()[i].name.clone();
        if group.is_empty() {
            return Ok(PRVerdict::Fail(PRFailure::Outflow {
                species,
                detail: "no reaction".into(),
            }));
        }
        for rr in group {
            let (s, p) = rr;
            let a = u64::from(s.0[i]);
            if s.order() != a || a == 0 {
                return Ok(PRVerdict::Fail(PRFailure::Outflow {
                    species,
                    detail: format!("{} is not of the form a{}", label(net, rr), net.species()[i].name),
                }));
            }
            if a + 1 < m {
                return Ok(PRVerdict::Fail(PRFailure::Outflow {
                    species,
                    detail: format!("{}: a = {a} < m - 1 = {}", label(net, rr), m - 1),
                }));
            }
            if p.order() + 1 > a {
                return Ok(PRVerdict::Fail(PRFailure::Outflow {
                    species,
                    detail: format!("{}: product order {} > a - 1", label(net, rr), p.order()),
                }));
            }
        }
    }
    for rr in &decomp.r_double_prime {
        if rr.0.order() + 2 > m {
            return Ok(PRVerdict::Fail(PRFailure::Inflow {
                reaction: label(net, rr),
            }));
        }
    }
    let primes: Vec<&ReactionRef> = decomp.r_prime.iter().flatten().collect();
    let max_product = primes.iter().map(|(_, p)| p.order()).max().unwrap_or(0);
    let min_source = primes.iter().map(|(s, _)| s.order()).min().unwrap_or(0);
    if max_product >= min_source {
        return Ok(PRVerdict::Fail(PRFailure::Ordering {
            max_product,
            min_source,
        }));
    }
    Ok(PRVerdict::Pass)
}

/// Splits a network into a binary strongly endotactic core, all outflows
/// and some inflows, with `m = 2`. The core candidates are the non-flow
/// reactions and, failing that, the whole network.
pub fn corollary_decomposition(
    net: &ReactionNetwork,
    is_se: impl Fn(&ReactionNetwork) -> bool,
) -> Option<PRDecomposition> {
    let d = net.dim();
    let zero = Complex::zero(d);
    let refs: Vec<ReactionRef> = (0..net.reactions().len())
        .map(|r| (net.source(r).clone(), net.product(r).clone()))
        .collect();
    let is_out = |(s, p): &ReactionRef| p.is_zero() && s.order() == 1;
    let is_in = |(s, p): &ReactionRef| s.is_zero() && p.order() == 1;
    let mut r_prime = Vec::with_capacity(d);
    for i in 0..d {
        let out = (unit(d, i), zero.clone());
        net.reaction_index(&out.0, &out.1)?;
        r_prime.push(vec![out]);
    }
    let inflows: Vec<ReactionRef> = refs.iter().filter(|r| is_in(r)).cloned().collect();
    let rest: Vec<ReactionRef> = refs.iter().filter(|r| !is_in(r) && !is_out(r)).cloned().collect();
    for core in [rest, refs.clone()] {
        if core.is_empty() {
            continue;
        }
        let decomp = PRDecomposition {
            core,
            r_prime: r_prime.clone(),
            r_double_prime: inflows.clone(),
            m: 2,
        };
        let Ok(core_net) = decomp.core_network(net) else {
            continue;
        };
        if !is_binary(&core_net) || !is_se(&core_net) {
            continue;
        }
        if validate_pr_decomposition(net, &decomp, true).ok()?.is_pass() {
            return Some(decomp);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_network;

    fn net(text: &str) -> ReactionNetwork {
        parse_network(text).unwrap().network
    }

    fn transient() -> ReactionNetwork {
        net("0 -> 2A + B\n2A + B -> 4A + 4B\n4A + 4B -> A")
    }

    #[test]
    fn sources() {
        let t = transient();
        let s = source_complexes(&t);
        assert_eq!(
            s,
            vec![Complex(vec![0, 0]), Complex(vec![2, 1]), Complex(vec![4, 4])]
        );
        assert_eq!(source_complexes(&net("A -> B")), vec![Complex(vec![1, 0])]);
        assert_eq!(source_complexes(&net("0 <-> A")).len(), 2);
    }

    #[test]
    fn linkage_and_reversibility() {
        let bab = net("B <-> A\nA <-> 2B");
        assert_eq!(linkage_classes(&bab).len(), 1);
        assert!(weakly_reversible(&bab));
        let t = transient();
        assert_eq!(linkage_classes(&t).len(), 1);
        assert!(!weakly_reversible(&t));
        let two = net("A <-> 2B\nA + C <-> B + C");
        assert_eq!(linkage_classes(&two).len(), 2);
        assert!(weakly_reversible(&two));
    }

    #[test]
    fn deficiencies() {
        assert_eq!(deficiency(&transient()), 1);
        assert_eq!(deficiency(&net("A -> B")), 0);
        // span{(-1,1),(-1,2)} is all of the plane
        assert_eq!(deficiency(&net("B <-> A\nA <-> 2B")), 0);
    }

    #[test]
    fn siphons() {
        let ab = net("A -> B");
        assert_eq!(minimal_siphons(&ab).unwrap(), vec![Siphon { species: vec![0] }]);
        assert!(!is_asiphonic(&ab).unwrap());
        assert!(is_asiphonic(&transient()).unwrap());
        assert!(is_asiphonic(&net("0 -> 2A\n2A -> 4A + B\n4A + B -> 6A + 4B\n6A + 4B -> 3A")).unwrap());
        let two = net("A <-> 2B\nA + C <-> B + C");
        let s = minimal_siphons(&two).unwrap();
        assert_eq!(s, vec![Siphon { species: vec![0, 1] }, Siphon { species: vec![2] }]);
    }

    #[test]
    fn binary_and_open() {
        let core = net("2S1 <-> S1 + S2");
        assert!(is_binary(&core));
        assert!(!is_fully_open(&core));
        let open = net("2S1 <-> S1 + S2\nS1 <-> 0\n0 <-> S2");
        assert!(is_binary(&open));
        assert!(is_fully_open(&open));
        assert!(!is_binary(&transient()));
    }

    #[test]
    fn projections() {
        let two = net("A <-> 2B\nA + C <-> B + C");
        let p = project_network(&two, &[0, 1]).unwrap();
        assert_eq!(p, net("A <-> B\nA <-> 2B"));

        let p = project_network(&transient(), &[0]).unwrap();
        assert_eq!(p, net("0 -> 2A\n2A -> 4A\n4A -> A"));

        let p = project_network(&net("A -> B"), &[0]).unwrap();
        assert_eq!(p, net("A -> 0"));

        assert_eq!(project_network(&net("A + B -> A"), &[0]).unwrap_err(), Error::EmptyProjection);
        assert_eq!(project_network(&net("A -> B"), &[]).unwrap_err(), Error::EmptyProjection);
    }

    fn r(text: &str, names: &[&str]) -> ReactionRef {
        let (s, p) = text.split_once("->").unwrap();
        let side = |t: &str| {
            let mut v = vec![0u32; names.len()];
            for term in t.split('+').map(str::trim).filter(|t| *t != "0") {
                let split = term.find(|c: char| c.is_alphabetic()).unwrap();
                let coef = if split == 0 { 1 } else { term[..split].parse().unwrap() };
                let i = names.iter().position(|n| *n == &term[split..]).unwrap();
                v[i] += coef;
            }
            Complex(v)
        };
        (side(s), side(p))
    }

    fn pr_example(r_prime: [&str; 2], r_dp: &[&str]) -> (ReactionNetwork, PRDecomposition) {
        let names = ["A", "B"];
        let core: Vec<ReactionRef> = ["0 -> 2A + B", "2A + B -> 4A + 4B", "4A + 4B -> A"]
            .iter()
            .map(|t| r(t, &names))
            .collect();
        let rp: Vec<Vec<ReactionRef>> = r_prime.iter().map(|t| vec![r(t, &names)]).collect();
        let rdp: Vec<ReactionRef> = r_dp.iter().map(|t| r(t, &names)).collect();
        let all: Vec<ReactionRef> = core.iter().chain(rp.iter().flatten()).chain(&rdp).cloned().collect();
        let total = ReactionNetwork::new(&names, &all).unwrap();
        let decomp = PRDecomposition {
            m: max_source_order(&core),
            core,
            r_prime: rp,
            r_double_prime: rdp,
        };
        (total, decomp)
    }

    #[test]
    fn open_binary_decomposition_passes() {
        let (total, d) = pr_example(["7A -> 5A + B", "7B -> 6B"], &[]);
        assert_eq!(d.m, 8);
        assert!(validate_pr_decomposition(&total, &d, true).unwrap().is_pass());
        let (total, d) = pr_example(
            ["7A -> 5A + B", "7B -> 6B"],
            &["6A -> 10A + 10B", "5A + B -> 110A + 20B", "3A + 2B -> 30B"],
        );
        assert!(validate_pr_decomposition(&total, &d, true).unwrap().is_pass());
    }

    #[test]
    fn small_outflows_fail_clause_two() {
        let (total, d) = pr_example(["2A -> A", "2B -> B"], &[]);
        match validate_pr_decomposition(&total, &d, true).unwrap() {
            PRVerdict::Fail(f) => assert_eq!(f.clause(), 2),
            PRVerdict::Pass => panic!("expected failure"),
        }
        let (total, d) = pr_example(["7A -> 5A + B", "7B -> 6B"], &[]);
        assert_eq!(
            validate_pr_decomposition(&total, &d, false).unwrap(),
            PRVerdict::Fail(PRFailure::CoreNotSe)
        );
    }

    #[test]
    fn unknown_reaction_rejected() {
        let (total, mut d) = pr_example(["7A -> 5A + B", "7B -> 6B"], &[]);
        d.r_double_prime.push(r("B -> 2A", &["A", "B"]));
        assert!(matches!(
            validate_pr_decomposition(&total, &d, true).unwrap_err(),
            Error::UnknownReaction(_)
        ));
    }

    #[test]
    fn corollary_patterns() {
        let open = net("2S1 <-> S1 + S2\nS1 <-> 0\n0 <-> S2");
        let d = corollary_decomposition(&open, |_| true).unwrap();
        assert_eq!(d.core.len(), 2);
        assert_eq!(d.r_double_prime.len(), 2);
        assert_eq!(d.m, 2);
        assert!(corollary_decomposition(&net("2S1 <-> S1 + S2"), |_| true).is_none());
        assert!(corollary_decomposition(&transient(), |_| true).is_none());
    }
}

//! The `analyze` report: one object rendered both as JSON and as text.

use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;

use endonet::endotactic::{is_strongly_endotactic_with, w_maximal, SweepOptions, WCheck};
use endonet::structure::{
    corollary_decomposition, deficiency, is_binary, is_fully_open, linkage_classes, minimal_siphons,
    weakly_reversible, PRDecomposition, ReactionRef,
};
use endonet::tiers::is_tier_descending_network_with;
use endonet::{stoich_basis, Error, Rational, ReactionNetwork};

pub const COROLLARY_CONCLUSION: &str = "positive recurrent for any rate constants (Corollary)";

#[derive(Clone, Debug, Serialize)]
pub struct NetworkSummary {
    pub species: Vec<String>,
    pub d: usize,
    pub complexes: usize,
    pub reactions: usize,
    pub dim_s: usize,
    pub deficiency: usize,
    pub linkage_classes: usize,
    pub weakly_reversible: bool,
    pub binary: bool,
    pub fully_open: bool,
    pub asiphonic: bool,
    pub minimal_siphons: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SeSection {
    pub is_se: bool,
    pub cones_checked: usize,
    /// Primitive integer direction of a violating `w`.
    pub witness: Option<Vec<String>>,
    pub maximal_complexes: Option<Vec<String>>,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TierSection {
    pub is_descending: bool,
    pub cones_checked: usize,
    pub flag: Option<Vec<String>>,
    pub source_tier_one: Option<Vec<String>>,
    pub offending_reaction: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionSection {
    pub m: u64,
    pub core: Vec<String>,
    pub r_prime: Vec<Vec<String>>,
    pub r_double_prime: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Timings {
    pub structure_ms: f64,
    pub se_ms: f64,
    pub tiers_ms: f64,
    pub decomposition_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub command: &'static str,
    pub file: String,
    pub network: NetworkSummary,
    pub se: SeSection,
    pub tier_descending: TierSection,
    pub corollary_pr: Option<DecompositionSection>,
    pub conclusions: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

/// Errors of `analyze`, split by exit code.
#[derive(Debug)]
pub enum AnalyzeError {
    Library(Error),
    /// The two equivalent verdicts disagree.
    Inconsistent(String),
}

impl From<Error> for AnalyzeError {
    fn from(e: Error) -> Self {
        AnalyzeError::Library(e)
    }
}

fn int_vector(v: &endonet::RationalVector) -> Vec<String> {
    v.primitive().0.iter().map(Rational::to_string).collect()
}

fn ref_label(net: &ReactionNetwork, (s, p): &ReactionRef) -> String {
    format!("{} -> {}", s.display(net.species()), p.display(net.species()))
}

fn decomposition_section(net: &ReactionNetwork, d: &PRDecomposition) -> DecompositionSection {
    DecompositionSection {
        m: d.m,
        core: d.core.iter().map(|r| ref_label(net, r)).collect(),
        r_prime: d
            .r_prime
            .iter()
            .map(|g| g.iter().map(|r| ref_label(net, r)).collect())
            .collect(),
        r_double_prime: d.r_double_prime.iter().map(|r| ref_label(net, r)).collect(),
    }
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

pub fn analyze(file: &str, net: &ReactionNetwork, budget: usize, timings: bool) -> Result<AnalysisReport, AnalyzeError> {
    let opts = SweepOptions {
        budget,
        ..Default::default()
    };
    let t0 = Instant::now();
    let siphons = minimal_siphons(net)?;
    let network = NetworkSummary {
        species: net.species_names().iter().map(|s| s.to_string()).collect(),
        d: net.dim(),
        complexes: net.complexes().len(),
        reactions: net.reactions().len(),
        dim_s: stoich_basis(net).dim(),
        deficiency: deficiency(net),
        linkage_classes: linkage_classes(net).len(),
        weakly_reversible: weakly_reversible(net),
        binary: is_binary(net),
        fully_open: is_fully_open(net),
        asiphonic: siphons.is_empty(),
        minimal_siphons: siphons.iter().map(|s| s.names(net)).collect(),
    };
    let structure_ms = ms(t0);

    let t1 = Instant::now();
    let verdict = is_strongly_endotactic_with::<Rational>(net, opts)?;
    let se = match &verdict.counterexample {
        None => SeSection {
            is_se: verdict.is_se,
            cones_checked: verdict.cones_checked,
            witness: None,
            maximal_complexes: None,
            failure: None,
        },
        Some(cx) => SeSection {
            is_se: verdict.is_se,
            cones_checked: verdict.cones_checked,
            witness: Some(int_vector(&cx.witness)),
            maximal_complexes: Some(
                w_maximal(net, &cx.witness)?
                    .iter()
                    .map(|c| c.display(net.species()).to_string())
                    .collect(),
            ),
            failure: Some(match &cx.failure {
                WCheck::FailCond1(r) => format!("{} increases <w, .>", net.reaction_label(*r)),
                WCheck::FailCond2 => "no reaction out of a w-maximal source decreases <w, .>".into(),
                WCheck::Pass => unreachable!("counterexamples fail"),
            }),
        },
    };
    let se_ms = ms(t1);

    let t2 = Instant::now();
    let tiers = is_tier_descending_network_with::<Rational>(net, opts)?;
    let tier_descending = match &tiers.counterexample {
        None => TierSection {
            is_descending: tiers.is_descending,
            cones_checked: tiers.cones_checked,
            flag: None,
            source_tier_one: None,
            offending_reaction: None,
        },
        Some((w, v)) => TierSection {
            is_descending: tiers.is_descending,
            cones_checked: tiers.cones_checked,
            flag: Some(int_vector(w)),
            source_tier_one: Some(v.source_tier_one.iter().map(|&c| net.complex_label(c)).collect()),
            offending_reaction: v.witness_reaction.map(|r| net.reaction_label(r)),
        },
    };
    let tiers_ms = ms(t2);
    if se.is_se != tier_descending.is_descending {
        return Err(AnalyzeError::Inconsistent(format!(
            "strongly endotactic = {} but tier descending = {}",
            se.is_se, tier_descending.is_descending
        )));
    }

    let t3 = Instant::now();
    let corollary = corollary_decomposition(net, |core| {
        is_strongly_endotactic_with::<Rational>(core, opts).is_ok_and(|v| v.is_se)
    });
    let decomposition_ms = ms(t3);

    let mut conclusions = Vec::new();
    if se.is_se {
        conclusions.push("deterministic mass-action trajectories are bounded and persistent for any rate constants".into());
        if network.asiphonic {
            conclusions.push("deterministic mass-action system is permanent for any rate constants".into());
        }
    }
    if corollary.is_some() {
        conclusions.push(COROLLARY_CONCLUSION.into());
    }
    Ok(AnalysisReport {
        command: "analyze",
        file: file.to_string(),
        network,
        se,
        tier_descending,
        corollary_pr: corollary.map(|d| decomposition_section(net, &d)),
        conclusions,
        timings: timings.then_some(Timings {
            structure_ms,
            se_ms,
            tiers_ms,
            decomposition_ms,
        }),
    })
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

impl AnalysisReport {
    pub fn to_text(&self) -> String {
        let n = &self.network;
        let mut out = String::new();
        let _ = writeln!(out, "network {}", self.file);
        let _ = writeln!(
            out,
            "  species {} ({}), complexes {}, reactions {}",
            n.d,
            n.species.join(", "),
            n.complexes,
            n.reactions
        );
        let _ = writeln!(
            out,
            "  dim S {}, deficiency {}, linkage classes {}",
            n.dim_s, n.deficiency, n.linkage_classes
        );
        let _ = writeln!(
            out,
            "  weakly reversible {}, binary {}, fully open {}",
            yes(n.weakly_reversible),
            yes(n.binary),
            yes(n.fully_open)
        );
        let siphons: Vec<String> = n.minimal_siphons.iter().map(|s| format!("{{{}}}", s.join(", "))).collect();
        let _ = writeln!(
            out,
            "  asiphonic {}{}",
            yes(n.asiphonic),
            if siphons.is_empty() {
                String::new()
            } else {
                format!(" (minimal siphons {})", siphons.join(" "))
            }
        );
        let _ = writeln!(
            out,
            "strongly endotactic: {} ({} cones)",
            yes(self.se.is_se),
            self.se.cones_checked
        );
        if let Some(w) = &self.se.witness {
            let _ = writeln!(out, "  witness w = ({})", w.join(", "));
        }
        if let Some(m) = &self.se.maximal_complexes {
            let _ = writeln!(out, "  w-maximal sources {}", m.join(", "));
        }
        if let Some(f) = &self.se.failure {
            let _ = writeln!(out, "  {f}");
        }
        let t = &self.tier_descending;
        let _ = writeln!(out, "tier descending: {} ({} cones)", yes(t.is_descending), t.cones_checked);
        if let Some(f) = &t.flag {
            let _ = writeln!(out, "  flag ({})", f.join(", "));
        }
        if let Some(r) = &t.offending_reaction {
            let _ = writeln!(out, "  reaction {r}");
        }
        match &self.corollary_pr {
            Some(d) => {
                let _ = writeln!(out, "decomposition (m = {}):", d.m);
                let _ = writeln!(out, "  core {}", d.core.join("; "));
                let groups: Vec<String> = d.r_prime.iter().map(|g| g.join("; ")).collect();
                let _ = writeln!(out, "  R' {}", groups.join(" | "));
                let _ = writeln!(out, "  R'' {}", d.r_double_prime.join("; "));
            }
            None => {
                let _ = writeln!(out, "decomposition: none found");
            }
        }
        for c in &self.conclusions {
            let _ = writeln!(out, "=> {c}");
        }
        if let Some(tm) = &self.timings {
            let _ = writeln!(
                out,
                "timings: structure {:.2} ms, se {:.2} ms, tiers {:.2} ms, decomposition {:.2} ms",
                tm.structure_ms, tm.se_ms, tm.tiers_ms, tm.decomposition_ms
            );
        }
        out
    }
}

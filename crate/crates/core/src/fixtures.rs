//! Named example networks and seeded random network generators.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::network::{Complex, ReactionNetwork};
use crate::parser::{parse_network, NetworkDocument};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fixture {
    pub name: &'static str,
    pub text: &'static str,
}

impl Fixture {
    pub fn document(&self) -> NetworkDocument {
        parse_network(self.text).expect("fixtures parse")
    }

    pub fn network(&self) -> ReactionNetwork {
        self.document().network
    }
}

macro_rules! fixture {
    ($name:literal) => {
        Fixture {
            name: $name,
            text: include_str!(concat!("../../../fixtures/", $name, ".crn")),
        }
    };
}

pub const TRANSIENT: Fixture = fixture!("transient");
pub const EXPLOSIVE: Fixture = fixture!("explosive");
pub const NOT_SE: Fixture = fixture!("not_se");
pub const BAB: Fixture = fixture!("bab");
pub const OPEN_BINARY: Fixture = fixture!("open_binary");
pub const BIRTH_DEATH: Fixture = fixture!("birth_death");
pub const TWO_CLASSES: Fixture = fixture!("two_classes");
pub const AUGMENTED: Fixture = fixture!("augmented");
pub const RATED: Fixture = fixture!("rated");

pub const ALL: [Fixture; 9] = [
    TRANSIENT,
    EXPLOSIVE,
    NOT_SE,
    BAB,
    OPEN_BINARY,
    BIRTH_DEATH,
    TWO_CLASSES,
    AUGMENTED,
    RATED,
];

pub fn by_name(name: &str) -> Option<Fixture> {
    ALL.iter().copied().find(|f| f.name == name)
}

/// Shape of a random network.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomShape {
    pub species: usize,
    pub complexes: usize,
    pub reactions: usize,
    pub max_coeff: u32,
}

impl Default for RandomShape {
    fn default() -> Self {
        RandomShape {
            species: 3,
            complexes: 5,
            reactions: 6,
            max_coeff: 3,
        }
    }
}

fn species_names(d: usize) -> Vec<String> {
    (0..d)
        .map(|i| {
            let c = char::from(b'A' + (i % 26) as u8);
            if i < 26 {
                c.to_string()
            } else {
                format!("{c}{}", i / 26)
            }
        })
        .collect()
}

fn random_complexes<R: Rng>(rng: &mut R, shape: &RandomShape) -> Vec<Complex> {
    let available = (u64::from(shape.max_coeff) + 1).saturating_pow(shape.species as u32);
    let want = shape.complexes.min(usize::try_from(available).unwrap_or(usize::MAX));
    let mut out: Vec<Complex> = Vec::with_capacity(want);
    while out.len() < want {
        let c = Complex((0..shape.species).map(|_| rng.random_range(0..=shape.max_coeff)).collect());
        if !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

fn build(d: usize, complexes: &[Complex], pairs: &[(usize, usize)]) -> Option<ReactionNetwork> {
    let reactions: Vec<(Complex, Complex)> =
        pairs.iter().map(|&(a, b)| (complexes[a].clone(), complexes[b].clone())).collect();
    ReactionNetwork::new(&species_names(d), &reactions).ok()
}

/// Random network with at most `shape.reactions` distinct reactions between
/// `shape.complexes` random complexes (fewer if the coefficient box is
/// smaller). Every species occurs somewhere.
pub fn random_network<R: Rng>(rng: &mut R, shape: &RandomShape) -> ReactionNetwork {
    assert!(shape.species > 0 && shape.complexes >= 2 && shape.reactions > 0);
    loop {
        let complexes = random_complexes(rng, shape);
        let mut all: Vec<(usize, usize)> = (0..complexes.len())
            .flat_map(|a| (0..complexes.len()).filter(move |&b| b != a).map(move |b| (a, b)))
            .collect();
        all.shuffle(rng);
        all.truncate(shape.reactions);
        if let Some(net) = build(shape.species, &complexes, &all) {
            return net;
        }
    }
}

/// Random weakly reversible network with a single linkage class: a directed
/// cycle through all complexes plus random chords.
pub fn random_strongly_connected<R: Rng>(rng: &mut R, shape: &RandomShape) -> ReactionNetwork {
    assert!(shape.species > 0 && shape.complexes >= 2);
    loop {
        let complexes = random_complexes(rng, shape);
        let n = complexes.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let mut pairs: Vec<(usize, usize)> = (0..n).map(|i| (order[i], order[(i + 1) % n])).collect();
        if n == 2 {
            pairs.truncate(2);
        }
        let extra = shape.reactions.saturating_sub(pairs.len());
        for _ in 0..extra {
            let a = rng.random_range(0..n);
            let b = rng.random_range(0..n);
            if a != b && !pairs.contains(&(a, b)) {
                pairs.push((a, b));
            }
        }
        if let Some(net) = build(shape.species, &complexes, &pairs) {
            return net;
        }
    }
}

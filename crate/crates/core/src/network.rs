//! Reaction networks: species, complexes and reactions, plus the exact
//! stoichiometric subspace.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Basis, Vector};
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpeciesId {
    pub index: usize,
    pub name: String,
}

/// A complex: nonnegative integer count per species.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Complex(pub Vec<u32>);

impl Complex {
    pub fn zero(d: usize) -> Self {
        Complex(vec![0; d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Molecularity `||y||_1`.
    pub fn order(&self) -> u64 {
        self.0.iter().map(|&c| u64::from(c)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn as_i64(&self) -> Vec<i64> {
        self.0.iter().map(|&c| i64::from(c)).collect()
    }

    pub fn to_rational(&self) -> Vector<Rational> {
        Vector::from_ints(&self.as_i64())
    }

    /// Renders with species names, `0` for the empty complex.
    pub fn display<'a>(&'a self, species: &'a [SpeciesId]) -> ComplexDisplay<'a> {
        ComplexDisplay {
            complex: self,
            species,
        }
    }
}

pub struct ComplexDisplay<'a> {
    complex: &'a Complex,
    species: &'a [SpeciesId],
}

impl fmt::Display for ComplexDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (c, s) in self.complex.0.iter().zip(self.species) {
            if *c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if *c == 1 {
                write!(f, "{}", s.name)?;
            } else {
                write!(f, "{}{}", c, s.name)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// A reaction between two complexes, referenced by index into
/// [`ReactionNetwork::complexes`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Reaction {
    pub source: usize,
    pub product: usize,
}

/// An immutable, validated reaction network in canonical order.
///
/// Species keep the order they were given in; complexes are sorted
/// lexicographically by coefficient vector and reactions by
/// `(source, product)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReactionNetwork {
    species: Vec<SpeciesId>,
    complexes: Vec<Complex>,
    reactions: Vec<Reaction>,
}

impl ReactionNetwork {
    /// Validates and canonicalizes a network given as species names and
    /// `(source, product)` coefficient pairs.
    pub fn new<S: AsRef<str>>(species: &[S], reactions: &[(Complex, Complex)]) -> Result<Self> {
        let d = species.len();
        let mut names = BTreeSet::new();
        for s in species {
            if !names.insert(s.as_ref()) {
                return Err(Error::DuplicateSpecies(s.as_ref().to_string()));
            }
        }
        let species: Vec<SpeciesId> = species
            .iter()
            .enumerate()
            .map(|(index, s)| SpeciesId {
                index,
                name: s.as_ref().to_string(),
            })
            .collect();
        if reactions.is_empty() {
            return Err(Error::EmptyNetwork);
        }
        let mut complex_set = BTreeSet::new();
        let mut pairs = BTreeSet::new();
        for (src, prod) in reactions {
            for c in [src, prod] {
                if c.dim() != d {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        got: c.dim(),
                    });
                }
            }
            if src == prod {
                return Err(Error::SelfLoop(format!(
                    "{} -> {}",
                    src.display(&species),
                    prod.display(&species)
                )));
            }
            if !pairs.insert((src.clone(), prod.clone())) {
                return Err(Error::DuplicateReaction(format!(
                    "{} -> {}",
                    src.display(&species),
                    prod.display(&species)
                )));
            }
            complex_set.insert(src.clone());
            complex_set.insert(prod.clone());
        }
        for s in &species {
            if complex_set.iter().all(|c| c.0[s.index] == 0) {
                return Err(Error::UnusedSpecies(s.name.clone()));
            }
        }
        let complexes: Vec<Complex> = complex_set.into_iter().collect();
        let index: HashMap<&Complex, usize> =
            complexes.iter().enumerate().map(|(i, c)| (c, i)).collect();
        let reactions = pairs
            .iter()
            .map(|(s, p)| Reaction {
                source: index[s],
                product: index[p],
            })
            .collect();
        Ok(ReactionNetwork {
            species,
            complexes,
            reactions,
        })
    }

    /// Like [`ReactionNetwork::new`] with signed coefficients, rejecting
    /// negative ones.
    pub fn from_signed<S: AsRef<str>>(species: &[S], reactions: &[(Vec<i64>, Vec<i64>)]) -> Result<Self> {
        let convert = |v: &[i64]| -> Result<Complex> {
            v.iter()
                .enumerate()
                .map(|(i, &c)| {
                    u32::try_from(c).map_err(|_| {
                        Error::NegativeCoefficient(
                            species
                                .get(i)
                                .map_or_else(|| i.to_string(), |s| s.as_ref().to_string()),
                        )
                    })
                })
                .collect::<Result<Vec<u32>>>()
                .map(Complex)
        };
        let pairs = reactions
            .iter()
            .map(|(s, p)| Ok((convert(s)?, convert(p)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(species, &pairs)
    }

    pub fn species(&self) -> &[SpeciesId] {
        &self.species
    }

    pub fn species_names(&self) -> Vec<&str> {
        self.species.iter().map(|s| s.name.as_str()).collect()
    }

    pub fn dim(&self) -> usize {
        self.species.len()
    }

    pub fn complexes(&self) -> &[Complex] {
        &self.complexes
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    pub fn source(&self, r: usize) -> &Complex {
        &self.complexes[self.reactions[r].source]
    }

    pub fn product(&self, r: usize) -> &Complex {
        &self.complexes[self.reactions[r].product]
    }

    /// Reaction vector `y' - y`.
    pub fn reaction_vector(&self, r: usize) -> Vec<i64> {
        self.product(r)
            .0
            .iter()
            .zip(&self.source(r).0)
            .map(|(&p, &s)| i64::from(p) - i64::from(s))
            .collect()
    }

    pub fn complex_index(&self, c: &Complex) -> Option<usize> {
        self.complexes.binary_search(c).ok()
    }

    pub fn reaction_index(&self, source: &Complex, product: &Complex) -> Option<usize> {
        let s = self.complex_index(source)?;
        let p = self.complex_index(product)?;
        self.reactions
            .binary_search(&Reaction {
                source: s,
                product: p,
            })
            .ok()
    }

    pub fn species_index(&self, name: &str) -> Option<usize> {
        self.species.iter().position(|s| s.name == name)
    }

    pub fn reaction_label(&self, r: usize) -> String {
        format!(
            "{} -> {}",
            self.source(r).display(&self.species),
            self.product(r).display(&self.species)
        )
    }

    pub fn complex_label(&self, c: usize) -> String {
        self.complexes[c].display(&self.species).to_string()
    }

    /// Indices of complexes that are the source of some reaction.
    pub fn source_indices(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.reactions.iter().map(|r| r.source).collect();
        set.into_iter().collect()
    }

    /// Reactions grouped by source complex index.
    pub fn reactions_by_source(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut map: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, r) in self.reactions.iter().enumerate() {
            map.entry(r.source).or_default().push(i);
        }
        map
    }
}

impl fmt::Display for ReactionNetwork {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.reactions.len() {
            writeln!(f, "{}", self.reaction_label(r))?;
        }
        Ok(())
    }
}

/// One positive rate constant per reaction, in reaction order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RateAssignment {
    rates: Vec<Rational>,
}

impl RateAssignment {
    pub fn new(net: &ReactionNetwork, rates: Vec<Rational>) -> Result<Self> {
        if rates.len() != net.reactions().len() {
            return Err(Error::RateMismatch(format!(
                "{} rates for {} reactions",
                rates.len(),
                net.reactions().len()
            )));
        }
        if let Some(bad) = rates.iter().find(|r| !r.is_positive()) {
            return Err(Error::NegativeRate(bad.to_string()));
        }
        Ok(RateAssignment { rates })
    }

    pub fn uniform(net: &ReactionNetwork, k: Rational) -> Result<Self> {
        Self::new(net, vec![k; net.reactions().len()])
    }

    pub fn ones(net: &ReactionNetwork) -> Self {
        RateAssignment {
            rates: vec![Rational::one(); net.reactions().len()],
        }
    }

    /// Rates from positive floats, converted exactly.
    pub fn from_f64(net: &ReactionNetwork, rates: &[f64]) -> Result<Self> {
        let exact = rates
            .iter()
            .map(|&v| {
                if v > 0.0 && v.is_finite() {
                    BigRational::from_float(v).ok_or_else(|| Error::NegativeRate(v.to_string()))
                } else {
                    Err(Error::NegativeRate(v.to_string()))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(net, exact)
    }

    pub fn len(&self) -> usize {
        self.rates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rates.is_empty()
    }

    pub fn get(&self, r: usize) -> &Rational {
        &self.rates[r]
    }

    pub fn exact(&self) -> &[Rational] {
        &self.rates
    }

    pub fn values<F: num_traits::Float>(&self) -> Vec<F> {
        self.rates
            .iter()
            .map(|r| F::from(r.to_f64().unwrap_or(f64::NAN)).expect("rate as float"))
            .collect()
    }
}

/// Builds a validated network (free-function form of [`ReactionNetwork::new`]).
pub fn make_network<S: AsRef<str>>(species: &[S], reactions: &[(Complex, Complex)]) -> Result<ReactionNetwork> {
    ReactionNetwork::new(species, reactions)
}

/// Exact basis of the stoichiometric subspace, chosen among the reaction
/// vectors in reaction order.
pub fn stoich_basis(net: &ReactionNetwork) -> Basis<Rational> {
    let gens: Vec<Vector<Rational>> = (0..net.reactions().len())
        .map(|r| Vector::from_ints(&net.reaction_vector(r)))
        .collect();
    Basis::from_generators(net.dim(), &gens).expect("reaction vectors have network dimension")
}

/// Whether `x - x2` lies in the stoichiometric subspace.
pub fn same_compatibility_class(net: &ReactionNetwork, x: &[Rational], x2: &[Rational]) -> Result<bool> {
    let d = net.dim();
    for v in [x, x2] {
        if v.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: v.len(),
            });
        }
    }
    let diff: Vec<Rational> = x.iter().zip(x2).map(|(a, b)| a - b).collect();
    Ok(linalg::member(&stoich_basis(net), &diff)?.is_some())
}

/// Integer conservation laws: a basis of the orthogonal complement of the
/// stoichiometric subspace with integer entries.
pub fn conservation_laws(net: &ReactionNetwork) -> Vec<Vec<i64>> {
    linalg::orthogonal_complement(&stoich_basis(net))
        .vectors()
        .iter()
        .map(|v| {
            v.primitive()
                .iter()
                .map(|x| x.to_integer().to_i64().expect("small conservation law"))
                .collect()
        })
        .collect()
}

/// Compatibility test on integer states through the conservation laws.
pub fn same_class_counts(laws: &[Vec<i64>], x: &[u64], x2: &[u64]) -> bool {
    laws.iter().all(|c| {
        let a: i128 = c.iter().zip(x).map(|(&ci, &xi)| i128::from(ci) * i128::from(xi)).sum();
        let b: i128 = c.iter().zip(x2).map(|(&ci, &xi)| i128::from(ci) * i128::from(xi)).sum();
        a == b
    })
}

pub(crate) fn rational_vec(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| Rational::from_integer(x.into())).collect()
}

#[allow(dead_code)]
pub(crate) fn is_zero_vec(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

//! σ-algebra atoms on finite measurable spaces.
//!
//! Ground set `{1..m}`, generators a list of subsets. The atoms (elementary
//! events: members containing no nonempty proper measurable subset) come out
//! of partition refinement: split every block by every generator until
//! stable. On a finite space the σ-algebra always has finitely many atoms, so
//! the associated space of measures is a simplex and is always separable and
//! metrizable; the dense family is the rational grid on that simplex.
//!
//! Subsets are stored as bitmasks internally, which caps the ground size at
//! 63 elements — far beyond anything the exhaustive cross-checks visit.

use serde::{Deserialize, Serialize};

use crate::rational::Rat;

pub const MAX_GROUND: usize = 63;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SigmaError {
    #[error("ground set must be nonempty")]
    EmptyGround,
    #[error("ground size {got} exceeds limit {limit}")]
    GroundTooLarge { got: usize, limit: usize },
    #[error("generator element {element} outside ground set 1..={ground}")]
    GeneratorOutOfRange { element: usize, ground: usize },
    #[error("expected {expected} atom weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("atom weight {index} is negative")]
    NegativeWeight { index: usize },
    #[error("atom weights sum to {total}, must be exactly 1")]
    WeightSumNotOne { total: Rat },
    #[error("target element {element} outside ground set 1..={ground}")]
    TargetOutOfRange { element: usize, ground: usize },
    #[error("target set is not a union of atoms (straddles atom {atom:?})")]
    NotAtomUnion { atom: Vec<usize> },
    #[error("epsilon must be positive, got {epsilon}")]
    NonPositiveEpsilon { epsilon: Rat },
}

/// A finite measurable space: ground set, generating sets, computed atoms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteSigmaAlgebra {
    ground_size: usize,
    generators: Vec<Vec<usize>>,
    atoms: Vec<Vec<usize>>,
}

fn to_mask(ground: usize, set: &[usize]) -> Result<u64, SigmaError> {
    let mut mask = 0u64;
    for &e in set {
        if e == 0 || e > ground {
            return Err(SigmaError::GeneratorOutOfRange {
                element: e,
                ground,
            });
        }
        mask |= 1 << (e - 1);
    }
    Ok(mask)
}

fn from_mask(mask: u64) -> Vec<usize> {
    (0..64)
        .filter(|b| mask & (1u64 << b) != 0)
        .map(|b| b + 1)
        .collect()
}

/// Partition refinement: start from the single block `{1..m}` and split every
/// block by every generator until no split changes anything. The result is
/// the atom partition of the generated σ-algebra.
pub fn atoms_of(
    ground_size: usize,
    generators: &[Vec<usize>],
) -> Result<Vec<Vec<usize>>, SigmaError> {
    if ground_size == 0 {
        return Err(SigmaError::EmptyGround);
    }
    if ground_size > MAX_GROUND {
        return Err(SigmaError::GroundTooLarge {
            got: ground_size,
            limit: MAX_GROUND,
        });
    }
    let full: u64 = (1u64 << ground_size) - 1;
    let gens: Vec<u64> = generators
        .iter()
        .map(|g| to_mask(ground_size, g))
        .collect::<Result<_, _>>()?;

    let mut blocks = vec![full];
    loop {
        let mut next = Vec::with_capacity(blocks.len());
        let mut changed = false;
        for &block in &blocks {
            let mut pieces = vec![block];
            for &g in &gens {
                let mut split = Vec::with_capacity(pieces.len() * 2);
                for &p in &pieces {
                    let inside = p & g;
                    let outside = p & !g;
                    if inside != 0 && outside != 0 {
                        split.push(inside);
                        split.push(outside);
                        changed = true;
                    } else {
                        split.push(p);
                    }
                }
                pieces = split;
            }
            next.extend(pieces);
        }
        blocks = next;
        if !changed {
            break;
        }
    }
    blocks.sort_by_key(|b| b.trailing_zeros());
    Ok(blocks.into_iter().map(from_mask).collect())
}

impl FiniteSigmaAlgebra {
    pub fn new(ground_size: usize, generators: Vec<Vec<usize>>) -> Result<Self, SigmaError> {
        let atoms = atoms_of(ground_size, &generators)?;
        Ok(FiniteSigmaAlgebra {
            ground_size,
            generators,
            atoms,
        })
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn generators(&self) -> &[Vec<usize>] {
        &self.generators
    }

    /// Atoms sorted by smallest element: pairwise disjoint, covering the
    /// ground set, with every generator a union of them.
    pub fn atoms(&self) -> &[Vec<usize>] {
        &self.atoms
    }
}

/// A probability measure on the atoms: one weight per atom, exact simplex
/// membership.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomMeasure {
    pub weights: Vec<Rat>,
}

impl AtomMeasure {
    pub fn new(fsa: &FiniteSigmaAlgebra, weights: Vec<Rat>) -> Result<Self, SigmaError> {
        if weights.len() != fsa.atoms.len() {
            return Err(SigmaError::WeightCount {
                expected: fsa.atoms.len(),
                got: weights.len(),
            });
        }
        if let Some(index) = weights.iter().position(Rat::is_negative) {
            return Err(SigmaError::NegativeWeight { index });
        }
        let total: Rat = weights.iter().sum();
        if total != Rat::one() {
            return Err(SigmaError::WeightSumNotOne { total });
        }
        Ok(AtomMeasure { weights })
    }

    /// Mass of a union of atoms given by atom indices.
    pub fn mass_of_atoms(&self, atom_indices: &[usize]) -> Rat {
        atom_indices.iter().map(|&i| &self.weights[i]).sum()
    }
}

/// Separability/metrizability report for the measure space over a finite
/// σ-algebra. At finite scale the atom count is always finite, hence
/// countable, so both properties always hold; the uncountable-atoms branch
/// (disjoint half-mass neighborhoods around an uncountable family of Dirac
/// measures) cannot be instantiated here and is recorded as a note instead.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeparabilityReport {
    pub atom_count: usize,
    pub separable: bool,
    pub metrizable: bool,
    pub dense_family: String,
    pub notes: Vec<String>,
}

pub fn elementary_count_verdict(fsa: &FiniteSigmaAlgebra) -> SeparabilityReport {
    let k = fsa.atoms.len();
    let dense_family = if k == 1 {
        "the measure space is a single point; the dense family is that point itself".to_string()
    } else {
        format!(
            "rational-weight measures on the {}-simplex over the {k} atoms, \
             enumerated by denominator schedule 2^j, j = 0, 1, 2, …",
            k - 1
        )
    };
    SeparabilityReport {
        atom_count: k,
        separable: true,
        metrizable: true,
        dense_family,
        notes: vec![
            "finitely many elementary events is the countable case: separable and metrizable"
                .to_string(),
            "the full rational grid used here contains the finite-scale shadow of the dense \
             family built from mass on a finite union of atoms plus a remainder on one atom"
                .to_string(),
            "the uncountable-atoms branch (non-separability via disjoint neighborhoods of \
             Dirac measures at radius 1/2) is unreachable on a finite ground set"
                .to_string(),
        ],
    }
}

/// A constructive density witness: a rational-grid measure within ε of the
/// requested measure on the requested union of atoms.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DenseWitness {
    pub measure: AtomMeasure,
    pub denominator: u64,
    pub target_value: Rat,
    pub achieved_value: Rat,
    pub margin: Rat,
}

/// Finds a measure with all weights on the grid `{i/2^j}` whose mass on
/// `target` (a union of atoms, given as ground elements) is within ε of
/// `nu`'s, trying denominators `2^j` for `j = 0, 1, …` and returning the
/// first that works. Termination: the nearest grid value is within
/// `1/2^{j+1}`, which eventually beats any positive ε.
pub fn dense_family_member(
    fsa: &FiniteSigmaAlgebra,
    nu: &AtomMeasure,
    target: &[usize],
    epsilon: &Rat,
) -> Result<DenseWitness, SigmaError> {
    if !epsilon.is_positive() {
        return Err(SigmaError::NonPositiveEpsilon {
            epsilon: epsilon.clone(),
        });
    }
    if nu.weights.len() != fsa.atoms.len() {
        return Err(SigmaError::WeightCount {
            expected: fsa.atoms.len(),
            got: nu.weights.len(),
        });
    }
    let target_mask = target
        .iter()
        .try_fold(0u64, |acc, &e| {
            if e == 0 || e > fsa.ground_size {
                Err(SigmaError::TargetOutOfRange {
                    element: e,
                    ground: fsa.ground_size,
                })
            } else {
                Ok(acc | 1 << (e - 1))
            }
        })?;

    // the target must not straddle any atom
    let mut inside: Vec<usize> = Vec::new();
    let mut outside: Vec<usize> = Vec::new();
    for (i, atom) in fsa.atoms.iter().enumerate() {
        let mask = to_mask(fsa.ground_size, atom).expect("stored atoms are valid");
        if mask & target_mask == mask {
            inside.push(i);
        } else if mask & target_mask == 0 {
            outside.push(i);
        } else {
            return Err(SigmaError::NotAtomUnion { atom: atom.clone() });
        }
    }

    let t: Rat = inside.iter().map(|&i| &nu.weights[i]).sum();
    for j in 0..=80u32 {
        let denom: u64 = 1 << j;
        let denom_rat = Rat::from(denom);
        // feasible unit counts on the target side
        let k: u64 = if inside.is_empty() {
            0
        } else if outside.is_empty() {
            denom
        } else {
            let scaled = &t * &denom_rat;
            let lo = num_traits::ToPrimitive::to_u64(&scaled.floor_int()).unwrap_or(0);
            let hi = (lo + 1).min(denom);
            // nearer of the two bracketing grid values
            if (&Rat::from(lo) / &denom_rat - &t).abs() <= (&Rat::from(hi) / &denom_rat - &t).abs()
            {
                lo
            } else {
                hi
            }
        };
        let achieved = &Rat::from(k) / &denom_rat;
        let margin = (&achieved - &t).abs();
        if margin < *epsilon {
            let weights = distribute(fsa.atoms.len(), &nu.weights, &inside, k, &outside, denom - k, denom);
            let measure = AtomMeasure::new(fsa, weights).expect("grid weights form a simplex point");
            return Ok(DenseWitness {
                measure,
                denominator: denom,
                target_value: t,
                achieved_value: achieved,
                margin,
            });
        }
    }
    unreachable!("denominator 2^81 beats any representable positive epsilon");
}

/// Splits `units` grid units across the given atom indices, proportional
/// floors first, leftovers round-robin. Deterministic.
fn distribute(
    atom_count: usize,
    reference: &[Rat],
    inside: &[usize],
    inside_units: u64,
    outside: &[usize],
    outside_units: u64,
    denom: u64,
) -> Vec<Rat> {
    let mut units = vec![0u64; atom_count];
    for (group, group_units) in [(inside, inside_units), (outside, outside_units)] {
        if group.is_empty() {
            debug_assert_eq!(group_units, 0);
            continue;
        }
        let group_total: Rat = group.iter().map(|&i| &reference[i]).sum();
        let mut assigned = 0u64;
        if !group_total.is_zero() {
            for &i in group {
                let share = &(&reference[i] / &group_total) * &Rat::from(group_units);
                let u = num_traits::ToPrimitive::to_u64(&share.floor_int()).unwrap_or(0);
                units[i] = u;
                assigned += u;
            }
        }
        let mut rem = group_units - assigned;
        let mut cursor = 0usize;
        while rem > 0 {
            units[group[cursor % group.len()]] += 1;
            rem -= 1;
            cursor += 1;
        }
    }
    units
        .into_iter()
        .map(|u| Rat::from(u) / Rat::from(denom))
        .collect()
}

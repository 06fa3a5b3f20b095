//! Exact probability measures on `[0,1]`.
//!
//! A [`Measure`] is finitely many atoms plus a piecewise-constant Lebesgue
//! density, with every mass an exact rational and total mass exactly 1. This
//! is the smallest class closed under the constructions in this crate
//! (discrete approximation outputs atoms, the square-wave gallery needs
//! densities) while staying exactly integrable against both test-function
//! kinds.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::func::{FuncKind, PiecewiseFunc};
use crate::rational::Rat;
use crate::region::Region;

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "MeasureRepr", into = "MeasureRepr")]
pub struct Measure {
    atoms: Vec<(Rat, Rat)>,
    density: PiecewiseFunc,
}

#[derive(Clone, Serialize, Deserialize)]
struct MeasureRepr {
    atoms: Vec<(Rat, Rat)>,
    density: PiecewiseFunc,
}

impl TryFrom<MeasureRepr> for Measure {
    type Error = MeasureError;
    fn try_from(r: MeasureRepr) -> Result<Self, MeasureError> {
        Measure::new(r.atoms, r.density)
    }
}

impl From<Measure> for MeasureRepr {
    fn from(m: Measure) -> Self {
        MeasureRepr {
            atoms: m.atoms,
            density: m.density,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MeasureError {
    #[error("density must be a Simple piecewise-constant function")]
    DensityNotSimple,
    #[error("density is negative on cell {cell}")]
    NegativeDensity { cell: usize },
    #[error("atom location {loc} outside [0,1]")]
    AtomOutOfRange { loc: Rat },
    #[error("negative atom mass at {loc}")]
    NegativeAtomMass { loc: Rat },
    #[error("duplicate atom location {loc}")]
    DuplicateAtom { loc: Rat },
    #[error("total mass is {total}, must be exactly 1")]
    TotalMassNotOne { total: Rat },
    #[error("mixture weights sum to {total}, must be exactly 1")]
    WeightSumNotOne { total: Rat },
    #[error("negative mixture weight at index {index}")]
    NegativeWeight { index: usize },
    #[error("weights and measures must have equal nonzero length")]
    LengthMismatch,
    #[error("uniform range needs 0 <= a < b <= 1, got [{a}, {b}]")]
    BadUniformRange { a: Rat, b: Rat },
    #[error("square wave needs at least one period")]
    ZeroPeriods,
}

impl Measure {
    /// Validates the invariants and canonicalizes: atoms sorted by location
    /// with zero masses dropped, density cells with equal adjacent values
    /// merged. Two `Measure`s are equal as values iff they are equal as
    /// measures.
    pub fn new(atoms: Vec<(Rat, Rat)>, density: PiecewiseFunc) -> Result<Self, MeasureError> {
        if density.kind() != FuncKind::Simple {
            return Err(MeasureError::DensityNotSimple);
        }
        if let Some(cell) = density.values().iter().position(Rat::is_negative) {
            return Err(MeasureError::NegativeDensity { cell });
        }
        let mut atoms = atoms;
        atoms.sort_by(|a, b| a.0.cmp(&b.0));
        for (loc, mass) in &atoms {
            if loc.is_negative() || *loc > Rat::one() {
                return Err(MeasureError::AtomOutOfRange { loc: loc.clone() });
            }
            if mass.is_negative() {
                return Err(MeasureError::NegativeAtomMass { loc: loc.clone() });
            }
        }
        for w in atoms.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(MeasureError::DuplicateAtom { loc: w[0].0.clone() });
            }
        }
        let density = canonical_density(&density);
        let total: Rat = atoms.iter().map(|(_, m)| m).sum::<Rat>()
            + density_mass_on_interval(&density, &Rat::zero(), &Rat::one());
        if total != Rat::one() {
            return Err(MeasureError::TotalMassNotOne { total });
        }
        atoms.retain(|(_, m)| !m.is_zero());
        Ok(Measure { atoms, density })
    }

    /// Point mass at `p`.
    pub fn dirac(p: Rat) -> Result<Self, MeasureError> {
        Measure::new(
            vec![(p, Rat::one())],
            PiecewiseFunc::constant(Rat::zero()),
        )
    }

    /// Uniform distribution on `[a, b]` (density `1/(b-a)` there).
    pub fn uniform(a: Rat, b: Rat) -> Result<Self, MeasureError> {
        if a.is_negative() || b > Rat::one() || a >= b {
            return Err(MeasureError::BadUniformRange { a, b });
        }
        let height = (&b - &a).recip();
        let mut bps = vec![Rat::zero()];
        let mut vals = Vec::new();
        if !a.is_zero() {
            bps.push(a.clone());
            vals.push(Rat::zero());
        }
        vals.push(height);
        if b != Rat::one() {
            bps.push(b.clone());
            vals.push(Rat::zero());
        }
        bps.push(Rat::one());
        let density = PiecewiseFunc::simple(bps, vals).expect("uniform density shape");
        Measure::new(Vec::new(), density)
    }

    /// Lebesgue measure on `[0,1]`.
    pub fn lebesgue() -> Self {
        Measure::uniform(Rat::zero(), Rat::one()).expect("unit range")
    }

    /// Density 2 on `[k/n, k/n + 1/(2n))` for `k = 0..n-1`, zero elsewhere:
    /// the n-period square wave with total mass 1.
    pub fn square_wave(n: u64) -> Result<Self, MeasureError> {
        if n == 0 {
            return Err(MeasureError::ZeroPeriods);
        }
        let cells = 2 * n;
        let bps: Vec<Rat> = (0..=cells)
            .map(|i| Rat::from(i) / Rat::from(cells))
            .collect();
        let vals: Vec<Rat> = (0..cells)
            .map(|i| {
                if i % 2 == 0 {
                    Rat::from_int(2)
                } else {
                    Rat::zero()
                }
            })
            .collect();
        let density = PiecewiseFunc::simple(bps, vals).expect("square wave shape");
        Measure::new(Vec::new(), density)
    }

    pub fn atoms(&self) -> &[(Rat, Rat)] {
        &self.atoms
    }

    pub fn density(&self) -> &PiecewiseFunc {
        &self.density
    }

    pub fn is_purely_atomic(&self) -> bool {
        self.density.is_identically_zero()
    }

    /// Exact `ν(a)`: atom masses whose locations lie in the region (endpoint
    /// flags respected) plus the density integral over it.
    pub fn measure_of(&self, region: &Region) -> Rat {
        let atom_part: Rat = self
            .atoms
            .iter()
            .filter(|(loc, _)| region.contains(loc))
            .map(|(_, m)| m)
            .sum();
        let density_part: Rat = region
            .components()
            .iter()
            .map(|iv| density_mass_on_interval(&self.density, &iv.lo, &iv.hi))
            .sum();
        atom_part + density_part
    }

    /// Exact `∫ f dν`. Piecewise-linear against piecewise-constant integrates
    /// in closed form cell by cell.
    pub fn integrate(&self, f: &PiecewiseFunc) -> Rat {
        let atom_part: Rat = self
            .atoms
            .iter()
            .map(|(loc, m)| m * &f.eval(loc))
            .sum();

        let mut grid: Vec<Rat> = self
            .density
            .breakpoints()
            .iter()
            .chain(f.breakpoints().iter())
            .cloned()
            .collect();
        grid.sort();
        grid.dedup();

        let two = Rat::from_int(2);
        let mut density_part = Rat::zero();
        for w in grid.windows(2) {
            let (u, v) = (&w[0], &w[1]);
            let mid = &(u + v) / &two;
            let d = self.density.eval(&mid);
            if d.is_zero() {
                continue;
            }
            let len = v - u;
            let avg = match f.kind() {
                FuncKind::Simple => f.eval(&mid),
                FuncKind::ContinuousPl => &(f.eval(u) + f.eval(v)) / &two,
            };
            density_part = density_part + &(&(&d * &avg) * &len);
        }
        atom_part + density_part
    }
}

/// Exact convex mixture `Σ w_i ν_i`; evaluation and integration are affine in
/// the weights.
pub fn convex_combine(weights: &[Rat], measures: &[Measure]) -> Result<Measure, MeasureError> {
    if weights.len() != measures.len() || weights.is_empty() {
        return Err(MeasureError::LengthMismatch);
    }
    if let Some(index) = weights.iter().position(Rat::is_negative) {
        return Err(MeasureError::NegativeWeight { index });
    }
    let total: Rat = weights.iter().sum();
    if total != Rat::one() {
        return Err(MeasureError::WeightSumNotOne { total });
    }

    let mut atom_map: BTreeMap<Rat, Rat> = BTreeMap::new();
    for (w, m) in weights.iter().zip(measures) {
        if w.is_zero() {
            continue;
        }
        for (loc, mass) in &m.atoms {
            let entry = atom_map.entry(loc.clone()).or_insert_with(Rat::zero);
            *entry = &*entry + &(w * mass);
        }
    }

    let mut grid: Vec<Rat> = measures
        .iter()
        .flat_map(|m| m.density.breakpoints().iter().cloned())
        .collect();
    grid.sort();
    grid.dedup();
    let two = Rat::from_int(2);
    let vals: Vec<Rat> = grid
        .windows(2)
        .map(|w| {
            let mid = &(&w[0] + &w[1]) / &two;
            weights
                .iter()
                .zip(measures)
                .map(|(wt, m)| wt * &m.density.eval(&mid))
                .sum()
        })
        .collect();
    let density = PiecewiseFunc::simple(grid, vals).expect("merged grid shape");
    Measure::new(atom_map.into_iter().collect(), density)
}

fn canonical_density(density: &PiecewiseFunc) -> PiecewiseFunc {
    let bps = density.breakpoints();
    let vals = density.values();
    let mut out_bps = vec![bps[0].clone()];
    let mut out_vals: Vec<Rat> = Vec::new();
    for (i, v) in vals.iter().enumerate() {
        if out_vals.last() == Some(v) {
            // merge with previous cell
        } else {
            if !out_vals.is_empty() {
                out_bps.push(bps[i].clone());
            }
            out_vals.push(v.clone());
        }
    }
    out_bps.push(bps[bps.len() - 1].clone());
    PiecewiseFunc::simple(out_bps, out_vals).expect("canonical density shape")
}

/// `∫_[lo,hi] density dx`, flags irrelevant.
fn density_mass_on_interval(density: &PiecewiseFunc, lo: &Rat, hi: &Rat) -> Rat {
    if lo >= hi {
        return Rat::zero();
    }
    let bps = density.breakpoints();
    let vals = density.values();
    let mut acc = Rat::zero();
    for i in 0..vals.len() {
        if vals[i].is_zero() {
            continue;
        }
        let cell_lo = &bps[i];
        let cell_hi = &bps[i + 1];
        let a = if lo > cell_lo { lo } else { cell_lo };
        let b = if hi < cell_hi { hi } else { cell_hi };
        if a < b {
            acc = acc + &(&vals[i] * &(b - a));
        }
    }
    acc
}

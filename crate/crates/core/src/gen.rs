//! Seeded random generators for the property campaigns.
//!
//! Everything is driven by an explicit `ChaCha8Rng`, so a seed determines the
//! entire campaign. Used by the randomized test suites and by the CLI's
//! randomized cross-checks; not intended as a general-purpose sampler.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::func::PiecewiseFunc;
use crate::measure::{convex_combine, Measure};
use crate::rational::Rat;
use crate::region::{Interval, Region};
use crate::sequences::SequenceFamily;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform-ish rational in `[0,1]` with denominator at most `max_den`.
pub fn rat_in_unit(rng: &mut ChaCha8Rng, max_den: i64) -> Rat {
    let den = rng.random_range(1..=max_den);
    let num = rng.random_range(0..=den);
    Rat::new(num, den)
}

/// Dyadic rational `i/2^level` in `[0,1]`.
pub fn rat_dyadic(rng: &mut ChaCha8Rng, level: u32) -> Rat {
    let den = 1i64 << level;
    Rat::new(rng.random_range(0..=den), den)
}

/// A signed rational with `|value| <= max_abs` and denominator `<= max_den`.
pub fn rat_signed(rng: &mut ChaCha8Rng, max_abs: i64, max_den: i64) -> Rat {
    let den = rng.random_range(1..=max_den);
    let bound = max_abs * den;
    Rat::new(rng.random_range(-bound..=bound), den)
}

/// Random normalized region with up to `max_parts` components.
pub fn region(rng: &mut ChaCha8Rng, max_parts: usize, max_den: i64) -> Region {
    let parts = rng.random_range(0..=max_parts);
    let mut cuts: Vec<Rat> = (0..2 * parts).map(|_| rat_in_unit(rng, max_den)).collect();
    cuts.sort();
    cuts.dedup();
    let mut intervals = Vec::new();
    let mut i = 0;
    while i + 1 < cuts.len() {
        let lo = cuts[i].clone();
        let hi = cuts[i + 1].clone();
        let (lo_closed, hi_closed) = (rng.random_bool(0.5), rng.random_bool(0.5));
        intervals.push(Interval::new(lo, hi, lo_closed, hi_closed).unwrap_or(Interval {
            lo: cuts[i].clone(),
            hi: cuts[i + 1].clone(),
            lo_closed: true,
            hi_closed: true,
        }));
        i += 2;
    }
    if rng.random_bool(0.15) {
        // sprinkle a singleton
        let p = rat_in_unit(rng, max_den);
        intervals.push(Interval {
            lo: p.clone(),
            hi: p,
            lo_closed: true,
            hi_closed: true,
        });
    }
    Region::from_intervals(intervals)
}

/// Purely atomic measure with up to `max_atoms` atoms. `dyadic_level`
/// restricts atom locations to that dyadic grid.
pub fn atomic_measure(
    rng: &mut ChaCha8Rng,
    max_atoms: usize,
    dyadic_level: Option<u32>,
    max_den: i64,
) -> Measure {
    let n = rng.random_range(1..=max_atoms.max(1));
    let mut locs: Vec<Rat> = Vec::new();
    while locs.len() < n {
        let loc = match dyadic_level {
            Some(level) => rat_dyadic(rng, level),
            None => rat_in_unit(rng, max_den),
        };
        if !locs.contains(&loc) {
            locs.push(loc);
        }
    }
    let raw: Vec<Rat> = (0..locs.len())
        .map(|_| Rat::new(rng.random_range(1..=max_den), max_den))
        .collect();
    let total: Rat = raw.iter().sum();
    let atoms: Vec<(Rat, Rat)> = locs
        .into_iter()
        .zip(raw.into_iter().map(|w| &w / &total))
        .collect();
    Measure::new(atoms, PiecewiseFunc::constant(Rat::zero())).expect("normalized atoms")
}

/// Mixed measure: up to `max_atoms` atoms plus a random piecewise-constant
/// density, masses normalized exactly.
pub fn measure(rng: &mut ChaCha8Rng, max_atoms: usize, max_cells: usize, max_den: i64) -> Measure {
    let atom_count = rng.random_range(0..=max_atoms);
    let mut locs: Vec<Rat> = Vec::new();
    while locs.len() < atom_count {
        let loc = rat_in_unit(rng, max_den);
        if !locs.contains(&loc) {
            locs.push(loc);
        }
    }
    let atom_raw: Vec<Rat> = (0..locs.len())
        .map(|_| Rat::new(rng.random_range(1..=max_den), max_den))
        .collect();

    let cells = rng.random_range(1..=max_cells.max(1));
    let mut bps: Vec<Rat> = vec![Rat::zero(), Rat::one()];
    while bps.len() < cells + 1 {
        let b = rat_in_unit(rng, max_den);
        if !bps.contains(&b) {
            bps.push(b);
        }
    }
    bps.sort();
    let want_density = atom_count == 0 || rng.random_bool(0.7);
    let vals: Vec<Rat> = (0..bps.len() - 1)
        .map(|_| {
            if want_density {
                Rat::new(rng.random_range(0..=max_den), max_den)
            } else {
                Rat::zero()
            }
        })
        .collect();

    let density_mass: Rat = bps
        .windows(2)
        .zip(&vals)
        .map(|(w, v)| v * &(&w[1] - &w[0]))
        .sum();
    let total = atom_raw.iter().sum::<Rat>() + &density_mass;
    if total.is_zero() {
        return Measure::dirac(rat_in_unit(rng, max_den)).expect("unit location");
    }
    let atoms: Vec<(Rat, Rat)> = locs
        .into_iter()
        .zip(atom_raw.into_iter().map(|w| &w / &total))
        .collect();
    let vals: Vec<Rat> = vals.into_iter().map(|v| &v / &total).collect();
    let density = PiecewiseFunc::simple(bps, vals).expect("sorted breakpoints");
    Measure::new(atoms, density).expect("normalized mixture")
}

/// Continuous PL test function with values bounded by `max_abs`.
pub fn pl_func(rng: &mut ChaCha8Rng, max_segments: usize, max_abs: i64, max_den: i64) -> PiecewiseFunc {
    let segs = rng.random_range(1..=max_segments.max(1));
    let mut bps: Vec<Rat> = vec![Rat::zero(), Rat::one()];
    while bps.len() < segs + 1 {
        let b = rat_in_unit(rng, max_den);
        if !bps.contains(&b) {
            bps.push(b);
        }
    }
    bps.sort();
    let vals: Vec<Rat> = (0..bps.len())
        .map(|_| rat_signed(rng, max_abs, max_den))
        .collect();
    PiecewiseFunc::continuous_pl(bps, vals).expect("sorted breakpoints")
}

/// Monotone continuous PL function (nondecreasing or nonincreasing).
pub fn monotone_pl_func(
    rng: &mut ChaCha8Rng,
    max_segments: usize,
    max_abs: i64,
    max_den: i64,
) -> PiecewiseFunc {
    let f = pl_func(rng, max_segments, max_abs, max_den);
    let mut vals = f.values().to_vec();
    vals.sort();
    if rng.random_bool(0.5) {
        vals.reverse();
    }
    PiecewiseFunc::continuous_pl(f.breakpoints().to_vec(), vals).expect("same breakpoints")
}

/// Simple (piecewise-constant) test function.
pub fn simple_func(rng: &mut ChaCha8Rng, max_cells: usize, max_abs: i64, max_den: i64) -> PiecewiseFunc {
    let cells = rng.random_range(1..=max_cells.max(1));
    let mut bps: Vec<Rat> = vec![Rat::zero(), Rat::one()];
    while bps.len() < cells + 1 {
        let b = rat_in_unit(rng, max_den);
        if !bps.contains(&b) {
            bps.push(b);
        }
    }
    bps.sort();
    let vals: Vec<Rat> = (0..bps.len() - 1)
        .map(|_| rat_signed(rng, max_abs, max_den))
        .collect();
    PiecewiseFunc::simple(bps, vals).expect("sorted breakpoints")
}

/// A tabulated prefix together with the candidate limit it should be
/// classified against. Half the draws converge toward the candidate along a
/// vanishing mixture; the rest are prefixes of the catalog counterexamples.
pub fn tabulated_prefix(rng: &mut ChaCha8Rng, len: usize) -> (SequenceFamily, Measure) {
    let len = len.max(2);
    match rng.random_range(0..4u32) {
        0 => {
            // mixture path shrinking geometrically toward the target
            let target = measure(rng, 2, 3, 16);
            let noise = measure(rng, 2, 3, 16);
            let terms: Vec<Measure> = (1..=len as u64)
                .map(|k| {
                    let w = Rat::new(1, 1 << k.min(30));
                    convex_combine(
                        &[&Rat::one() - &w, w.clone()],
                        &[target.clone(), noise.clone()],
                    )
                    .expect("weights sum to 1")
                })
                .collect();
            (SequenceFamily::Tabulated(terms), target)
        }
        1 => {
            let terms: Vec<Measure> = (1..=len as u64)
                .map(|n| SequenceFamily::DiracAt.term(n).expect("n >= 1"))
                .collect();
            (
                SequenceFamily::Tabulated(terms),
                Measure::dirac(Rat::zero()).expect("valid"),
            )
        }
        2 => {
            let terms: Vec<Measure> = (1..=len as u64)
                .map(|n| SequenceFamily::SquareWave.term(n).expect("n >= 1"))
                .collect();
            (SequenceFamily::Tabulated(terms), Measure::lebesgue())
        }
        _ => {
            // constant but displaced from the candidate
            let displaced = measure(rng, 2, 3, 16);
            let candidate = measure(rng, 2, 3, 16);
            let terms = vec![displaced; len];
            (SequenceFamily::Tabulated(terms), candidate)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic_per_seed() {
        let mut a = rng(7);
        let mut b = rng(7);
        for _ in 0..20 {
            assert_eq!(rat_in_unit(&mut a, 64), rat_in_unit(&mut b, 64));
        }
        let m1 = measure(&mut rng(42), 3, 4, 32);
        let m2 = measure(&mut rng(42), 3, 4, 32);
        assert_eq!(m1, m2);
    }

    #[test]
    fn random_measures_are_valid() {
        let mut r = rng(11);
        for _ in 0..200 {
            let m = measure(&mut r, 3, 4, 32);
            assert_eq!(m.measure_of(&Region::full()), Rat::one());
            let a = atomic_measure(&mut r, 5, None, 32);
            assert_eq!(a.measure_of(&Region::full()), Rat::one());
            assert!(a.is_purely_atomic());
        }
    }

    #[test]
    fn random_regions_are_normalized() {
        let mut r = rng(3);
        for _ in 0..500 {
            region(&mut r, 4, 32).check_invariants().unwrap();
        }
    }

    #[test]
    fn monotone_functions_are_monotone() {
        let mut r = rng(5);
        for _ in 0..100 {
            let f = monotone_pl_func(&mut r, 4, 2, 16);
            let vals = f.values();
            let increasing = vals.windows(2).all(|w| w[0] <= w[1]);
            let decreasing = vals.windows(2).all(|w| w[0] >= w[1]);
            assert!(increasing || decreasing);
        }
    }
}

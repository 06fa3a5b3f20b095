//! Metrics and neighborhood gauges on the space of measures.
//!
//! The total-variation distance comes out in closed form as the positive part
//! of the signed difference over the merged atom set and density grid. The
//! Prohorov distance is computed exactly for purely atomic measures by
//! enumerating support subsets and solving, per subset, the piecewise-linear
//! feasibility threshold in ε whose breakpoints are the pairwise distances.
//! Gauges are the finite-family neighborhoods `|∫f dρ − ∫f dν| < ε` and
//! `|ρ(A) − ν(A)| < ε`.

use serde::{Deserialize, Serialize};

use crate::func::PiecewiseFunc;
use crate::measure::Measure;
use crate::rational::Rat;
use crate::region::{Interval, Region};

/// Total atoms across both operands beyond which the exact Prohorov subset
/// enumeration is refused.
pub const PROHOROV_ATOM_LIMIT: usize = 15;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricError {
    #[error("prohorov_distance is an atomic-only operation (found a density part)")]
    AtomicOnly,
    #[error("prohorov_distance limited to {limit} atoms total, got {got}")]
    TooManyAtoms { limit: usize, got: usize },
    #[error("gauge family must be nonempty")]
    EmptyFamily,
    #[error("gauge epsilon must be positive, got {epsilon}")]
    NonPositiveEpsilon { epsilon: Rat },
}

/// Exact `sup_A |a(A) − b(A)|`: the positive-part mass of `a − b`.
pub fn tv_distance(a: &Measure, b: &Measure) -> Rat {
    let mut pos = Rat::zero();

    // merged atom walk (both atom lists are sorted by location)
    let (mut i, mut j) = (0, 0);
    let (aa, ba) = (a.atoms(), b.atoms());
    while i < aa.len() || j < ba.len() {
        let diff = if j >= ba.len() || (i < aa.len() && aa[i].0 < ba[j].0) {
            let d = aa[i].1.clone();
            i += 1;
            d
        } else if i >= aa.len() || ba[j].0 < aa[i].0 {
            let d = -&ba[j].1;
            j += 1;
            d
        } else {
            let d = &aa[i].1 - &ba[j].1;
            i += 1;
            j += 1;
            d
        };
        if diff.is_positive() {
            pos = pos + &diff;
        }
    }

    // merged density grid
    let mut grid: Vec<Rat> = a
        .density()
        .breakpoints()
        .iter()
        .chain(b.density().breakpoints().iter())
        .cloned()
        .collect();
    grid.sort();
    grid.dedup();
    let two = Rat::from_int(2);
    for w in grid.windows(2) {
        let mid = &(&w[0] + &w[1]) / &two;
        let diff = a.density().eval(&mid) - b.density().eval(&mid);
        if diff.is_positive() {
            pos = pos + &(&diff * &(&w[1] - &w[0]));
        }
    }
    pos
}

/// A region achieving the total-variation supremum: atoms where `a` carries
/// more mass, plus the open cells where `a`'s density exceeds `b`'s, minus the
/// atoms where `b` carries more. `|a(A*) − b(A*)| = tv_distance(a, b)` exactly.
pub fn tv_witness_region(a: &Measure, b: &Measure) -> Region {
    let mut grid: Vec<Rat> = a
        .density()
        .breakpoints()
        .iter()
        .chain(b.density().breakpoints().iter())
        .cloned()
        .collect();
    grid.sort();
    grid.dedup();
    let two = Rat::from_int(2);
    let mut parts: Vec<Interval> = Vec::new();
    for w in grid.windows(2) {
        let mid = &(&w[0] + &w[1]) / &two;
        if a.density().eval(&mid) > b.density().eval(&mid) {
            parts.push(Interval {
                lo: w[0].clone(),
                hi: w[1].clone(),
                lo_closed: false,
                hi_closed: false,
            });
        }
    }
    let mut region = Region::from_intervals(parts);

    let mass_at = |m: &Measure, loc: &Rat| -> Rat {
        m.atoms()
            .iter()
            .find(|(l, _)| l == loc)
            .map(|(_, mass)| mass.clone())
            .unwrap_or_else(Rat::zero)
    };
    for (loc, mass) in a.atoms() {
        if *mass > mass_at(b, loc) {
            region = region.union(&Region::point(loc.clone()).expect("atom in unit interval"));
        }
    }
    for (loc, mass) in b.atoms() {
        if *mass > mass_at(a, loc) {
            region = region.difference(&Region::point(loc.clone()).expect("atom in unit interval"));
        }
    }
    region
}

/// Independent lower bound for [`tv_distance`]: the best `|a(A) − b(A)|` over
/// every region with dyadic endpoints at `level` and every endpoint-flag
/// choice. Any such region is a disjoint union of the grid singletons and
/// open grid cells, so by additivity the maximum selects exactly the pieces
/// where `a − b` is positive. Equals the TV distance whenever both measures'
/// atoms and density breakpoints are dyadic at `level`.
///
/// Callers must keep `level <= 10`.
pub fn tv_brute_oracle(a: &Measure, b: &Measure, level: u32) -> Rat {
    assert!(level <= 10, "oracle level capped at 10");
    let cells: i64 = 1 << level;
    let mut best = Rat::zero();
    for i in 0..=cells {
        let p = Rat::new(i, cells);
        let singleton = Region::point(p).expect("grid point");
        let diff = a.measure_of(&singleton) - b.measure_of(&singleton);
        if diff.is_positive() {
            best = best + &diff;
        }
        if i < cells {
            let cell = Region::open(Rat::new(i, cells), Rat::new(i + 1, cells)).expect("grid cell");
            let diff = a.measure_of(&cell) - b.measure_of(&cell);
            if diff.is_positive() {
                best = best + &diff;
            }
        }
    }
    best
}

/// Exact Prohorov distance between purely atomic measures:
/// `inf { ε > 0 : a(A) ≤ b(A^ε) + ε and b(A) ≤ a(A^ε) + ε for all A }`
/// with `A^ε` the open ε-neighborhood. Both one-sided constraints are
/// enforced, so symmetry holds by construction.
pub fn prohorov_distance(a: &Measure, b: &Measure) -> Result<Rat, MetricError> {
    if !a.is_purely_atomic() || !b.is_purely_atomic() {
        return Err(MetricError::AtomicOnly);
    }
    let got = a.atoms().len() + b.atoms().len();
    if got > PROHOROV_ATOM_LIMIT {
        return Err(MetricError::TooManyAtoms {
            limit: PROHOROV_ATOM_LIMIT,
            got,
        });
    }
    let d1 = directional_threshold(a.atoms(), b.atoms());
    let d2 = directional_threshold(b.atoms(), a.atoms());
    Ok(d1.max(d2))
}

/// `max over ∅ ≠ A ⊆ supp(from)` of `inf { ε : from(A) ≤ to(A^ε) + ε }`.
///
/// Restricting A to the support of `from` loses nothing: shrinking A to
/// `A ∩ supp(from)` keeps `from(A)` and can only shrink `to(A^ε)`, so the
/// per-subset threshold only grows.
fn directional_threshold(from: &[(Rat, Rat)], to: &[(Rat, Rat)]) -> Rat {
    let n = from.len();
    let mut overall = Rat::zero();
    for mask in 1u32..(1u32 << n) {
        let subset: Vec<&(Rat, Rat)> = from
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, at)| at)
            .collect();
        let mass_a: Rat = subset.iter().map(|(_, m)| m).sum();

        // distance profile of `to` relative to the subset
        let mut dist_mass: Vec<(Rat, Rat)> = to
            .iter()
            .map(|(loc, mass)| {
                let d = subset
                    .iter()
                    .map(|(x, _)| (loc - x).abs())
                    .fold(Rat::one(), Rat::min);
                (d, mass.clone())
            })
            .collect();
        dist_mass.sort_by(|x, y| x.0.cmp(&y.0));

        // levels d_0 = 0 < d_1 < ...; B_k = to-mass within distance <= d_k
        let mut levels: Vec<(Rat, Rat)> = vec![(Rat::zero(), Rat::zero())];
        for (d, m) in dist_mass {
            if levels.last().map(|(ld, _)| *ld == d).unwrap_or(false) {
                let last = levels.last_mut().expect("nonempty");
                last.1 = &last.1 + &m;
            } else {
                let prev = levels.last().expect("nonempty").1.clone();
                levels.push((d, prev + &m));
            }
        }

        // on (d_k, d_{k+1}] the neighborhood mass is the constant B_k; the
        // feasible ε form an up-set, so the infimum is the first candidate
        // max(d_k, from(A) − B_k) that lands inside its interval
        let mut threshold: Option<Rat> = None;
        for k in 0..levels.len() {
            let (dk, bk) = &levels[k];
            let cand = dk.clone().max(&mass_a - bk);
            let fits = match levels.get(k + 1) {
                Some((next, _)) => cand <= *next,
                None => true,
            };
            if fits {
                threshold = Some(cand);
                break;
            }
        }
        let t = threshold.expect("final level always feasible");
        overall = overall.max(t);
    }
    overall
}

/// Direct feasibility check of the Prohorov constraints at a given ε, used as
/// an independent bracket oracle in tests: builds `A^ε` as a union of open
/// balls and evaluates both inequalities for every support subset.
pub fn prohorov_feasible(a: &Measure, b: &Measure, eps: &Rat) -> bool {
    assert!(eps.is_positive());
    let check = |from: &Measure, to: &Measure| -> bool {
        let atoms = from.atoms();
        let n = atoms.len();
        (1u32..(1u32 << n)).all(|mask| {
            let selected: Vec<&(Rat, Rat)> = atoms
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, at)| at)
                .collect();
            let mass: Rat = selected.iter().map(|(_, m)| m).sum();
            let mut blown = Region::empty();
            for (loc, _) in &selected {
                blown = blown.union(&Region::open_ball(loc, eps));
            }
            mass <= to.measure_of(&blown) + eps
        })
    };
    check(a, b) && check(b, a)
}

/// A finite-family neighborhood specification around a center measure.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GaugeSpec {
    #[serde(flatten)]
    pub kind: GaugeKind,
    pub epsilon: Rat,
    pub center: Measure,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", content = "family")]
pub enum GaugeKind {
    /// Integration tests against a finite family of functions.
    FGauge(Vec<PiecewiseFunc>),
    /// Evaluation tests against a finite family of regions.
    SGauge(Vec<Region>),
}

/// Containment verdict with the exact worst-case margin `ε − max |Δ|`.
/// Containment means every deviation is strictly below ε, i.e. margin > 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaugeVerdict {
    pub contained: bool,
    pub margin: Rat,
    /// Index into the family achieving the worst margin.
    pub worst_index: usize,
}

pub fn gauge_contains(gauge: &GaugeSpec, candidate: &Measure) -> Result<GaugeVerdict, MetricError> {
    if !gauge.epsilon.is_positive() {
        return Err(MetricError::NonPositiveEpsilon {
            epsilon: gauge.epsilon.clone(),
        });
    }
    let deviations: Vec<Rat> = match &gauge.kind {
        GaugeKind::FGauge(funcs) => funcs
            .iter()
            .map(|f| (candidate.integrate(f) - gauge.center.integrate(f)).abs())
            .collect(),
        GaugeKind::SGauge(regions) => regions
            .iter()
            .map(|r| (candidate.measure_of(r) - gauge.center.measure_of(r)).abs())
            .collect(),
    };
    if deviations.is_empty() {
        return Err(MetricError::EmptyFamily);
    }
    let worst_index = deviations
        .iter()
        .enumerate()
        .max_by(|(i, x), (j, y)| x.cmp(y).then(j.cmp(i)))
        .map(|(i, _)| i)
        .expect("nonempty");
    let margin = &gauge.epsilon - &deviations[worst_index];
    Ok(GaugeVerdict {
        contained: margin.is_positive(),
        margin,
        worst_index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::convex_combine;
    use crate::rat;

    fn dirac(p: Rat) -> Measure {
        Measure::dirac(p).unwrap()
    }

    #[test]
    fn tv_identical_is_zero() {
        let d = dirac(rat!(1 / 2));
        assert_eq!(tv_distance(&d, &d), rat!(0));
    }

    #[test]
    fn tv_disjoint_diracs_is_one() {
        assert_eq!(tv_distance(&dirac(rat!(0)), &dirac(rat!(1))), rat!(1));
    }

    #[test]
    fn tv_uniform_halves() {
        let whole = Measure::lebesgue();
        let half = Measure::uniform(rat!(0), rat!(1 / 2)).unwrap();
        let tv = tv_distance(&whole, &half);
        assert_eq!(tv, rat!(1 / 2));
        // closed form must agree with the dyadic brute-force route
        assert_eq!(tv_brute_oracle(&whole, &half, 6), tv);
    }

    #[test]
    fn tv_witness_region_achieves_supremum() {
        let cases = [
            (dirac(rat!(0)), dirac(rat!(1))),
            (
                Measure::lebesgue(),
                Measure::uniform(rat!(0), rat!(1 / 2)).unwrap(),
            ),
            (Measure::square_wave(3).unwrap(), Measure::lebesgue()),
            (
                convex_combine(
                    &[rat!(1 / 3), rat!(2 / 3)],
                    &[dirac(rat!(1 / 4)), Measure::lebesgue()],
                )
                .unwrap(),
                dirac(rat!(1 / 4)),
            ),
        ];
        for (a, b) in cases {
            let w = tv_witness_region(&a, &b);
            let value = (a.measure_of(&w) - b.measure_of(&w)).abs();
            assert_eq!(value, tv_distance(&a, &b));
        }
    }

    #[test]
    fn brute_oracle_examples() {
        let d = dirac(rat!(1 / 3));
        assert_eq!(tv_brute_oracle(&d, &d, 4), rat!(0));
        assert_eq!(tv_brute_oracle(&dirac(rat!(0)), &dirac(rat!(1)), 1), rat!(1));
    }

    #[test]
    fn brute_oracle_is_lower_bound_off_grid() {
        // both atoms fall inside the same level-3 cell, so the grid cannot
        // separate them at all while the true distance is 1
        let a = dirac(rat!(1 / 3));
        let c = dirac(rat!(5 / 12));
        let oracle = tv_brute_oracle(&a, &c, 3);
        assert_eq!(oracle, rat!(0));
        assert_eq!(tv_distance(&a, &c), rat!(1));
    }

    #[test]
    fn literal_subset_enumeration_matches_selection_shortcut() {
        // at level 2 there are 9 elementary pieces; enumerate all 2^9 unions
        // literally and compare with the positive-part selection
        let a = convex_combine(
            &[rat!(1 / 2), rat!(1 / 2)],
            &[dirac(rat!(1 / 4)), Measure::lebesgue()],
        )
        .unwrap();
        let b = Measure::uniform(rat!(1 / 4), rat!(3 / 4)).unwrap();
        let level = 2u32;
        let cells = 1i64 << level;
        let mut pieces = Vec::new();
        for i in 0..=cells {
            pieces.push(Region::point(Rat::new(i, cells)).unwrap());
            if i < cells {
                pieces.push(Region::open(Rat::new(i, cells), Rat::new(i + 1, cells)).unwrap());
            }
        }
        let mut best = rat!(0);
        for mask in 0u32..(1 << pieces.len()) {
            let mut union = Region::empty();
            for (i, piece) in pieces.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    union = union.union(piece);
                }
            }
            let v = (a.measure_of(&union) - b.measure_of(&union)).abs();
            best = best.max(v);
        }
        assert_eq!(best, tv_brute_oracle(&a, &b, level));
    }

    #[test]
    fn prohorov_identity_and_diracs() {
        let nu = convex_combine(
            &[rat!(1 / 2), rat!(1 / 2)],
            &[dirac(rat!(0)), dirac(rat!(3 / 4))],
        )
        .unwrap();
        assert_eq!(prohorov_distance(&nu, &nu).unwrap(), rat!(0));
        assert_eq!(
            prohorov_distance(&dirac(rat!(0)), &dirac(rat!(1 / 4))).unwrap(),
            rat!(1 / 4)
        );
        // for Diracs the answer is the point distance
        for (p, q) in [(rat!(0), rat!(1)), (rat!(1 / 3), rat!(1 / 2))] {
            let expect = (&p - &q).abs();
            assert_eq!(prohorov_distance(&dirac(p), &dirac(q)).unwrap(), expect);
        }
    }

    #[test]
    fn prohorov_mixed_example_with_bracket() {
        let a = dirac(rat!(0));
        let b = convex_combine(
            &[rat!(2 / 3), rat!(1 / 3)],
            &[dirac(rat!(0)), dirac(rat!(1))],
        )
        .unwrap();
        let d = prohorov_distance(&a, &b).unwrap();
        assert_eq!(d, rat!(1 / 3));
        // independent bracket: infeasible just below, feasible just above
        let tiny = rat!(1 / 1000);
        assert!(!prohorov_feasible(&a, &b, &(&d - &tiny)));
        assert!(prohorov_feasible(&a, &b, &(&d + &tiny)));
    }

    #[test]
    fn prohorov_rejects_density_and_big_supports() {
        assert_eq!(
            prohorov_distance(&Measure::lebesgue(), &dirac(rat!(0))),
            Err(MetricError::AtomicOnly)
        );
        let many: Vec<Measure> = (0..16).map(|i| dirac(Rat::new(i, 16))).collect();
        let weights: Vec<Rat> = (0..16).map(|_| Rat::new(1, 16)).collect();
        let big = convex_combine(&weights, &many).unwrap();
        assert!(matches!(
            prohorov_distance(&big, &dirac(rat!(0))),
            Err(MetricError::TooManyAtoms { .. })
        ));
    }

    #[test]
    fn gauge_examples() {
        let nu = Measure::lebesgue();
        let g = GaugeSpec {
            kind: GaugeKind::FGauge(vec![PiecewiseFunc::identity()]),
            epsilon: rat!(1 / 10),
            center: nu.clone(),
        };
        // candidate equals center: contained with margin = ε
        let v = gauge_contains(&g, &nu).unwrap();
        assert!(v.contained);
        assert_eq!(v.margin, rat!(1 / 10));
        // δ_{1/2} has the same first moment as Lebesgue
        let v2 = gauge_contains(&g, &dirac(rat!(1 / 2))).unwrap();
        assert!(v2.contained);
        assert_eq!(v2.margin, rat!(1 / 10));

        // the gallery's setwise gauge: δ_{1/n} is far from δ_0 on (0,1)
        let s = GaugeSpec {
            kind: GaugeKind::SGauge(vec![Region::open(rat!(0), rat!(1)).unwrap()]),
            epsilon: rat!(1 / 2),
            center: dirac(rat!(0)),
        };
        let v3 = gauge_contains(&s, &dirac(rat!(1 / 8))).unwrap();
        assert!(!v3.contained);
        assert_eq!(v3.margin, rat!(-1 / 2));
    }

    #[test]
    fn gauge_rejects_bad_specs() {
        let g = GaugeSpec {
            kind: GaugeKind::SGauge(vec![]),
            epsilon: rat!(1 / 2),
            center: Measure::lebesgue(),
        };
        assert_eq!(
            gauge_contains(&g, &Measure::lebesgue()),
            Err(MetricError::EmptyFamily)
        );
        let g2 = GaugeSpec {
            kind: GaugeKind::SGauge(vec![Region::full()]),
            epsilon: rat!(0),
            center: Measure::lebesgue(),
        };
        assert!(matches!(
            gauge_contains(&g2, &Measure::lebesgue()),
            Err(MetricError::NonPositiveEpsilon { .. })
        ));
    }

    #[test]
    fn tv_bound_forces_sgauge_containment() {
        // tv < ε forces containment in every SGauge at that ε
        let a = Measure::square_wave(2).unwrap();
        let b = Measure::lebesgue();
        let tv = tv_distance(&a, &b);
        let eps = &tv + &rat!(1 / 100);
        let g = GaugeSpec {
            kind: GaugeKind::SGauge(crate::base::base_enumerate(2)),
            epsilon: eps,
            center: b,
        };
        assert!(gauge_contains(&g, &a).unwrap().contained);
    }

    #[test]
    fn gauge_spec_json_round_trip() {
        let g = GaugeSpec {
            kind: GaugeKind::SGauge(vec![Region::open(rat!(0), rat!(1)).unwrap()]),
            epsilon: rat!(1 / 2),
            center: dirac(rat!(0)),
        };
        let json = serde_json::to_string(&g).unwrap();
        let back: GaugeSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back.epsilon, g.epsilon);
        assert_eq!(back.center, g.center);
        assert!(matches!(back.kind, GaugeKind::SGauge(ref v) if v.len() == 1));
    }
}

//! Constructive approximation with exact certificates.
//!
//! Two schemes. The quantization certificate splits `[0,1]` into the level-set
//! cells of a test function `f` with enough cells that agreement of cell
//! masses within `ε/(2n‖f‖∞)` forces agreement of integrals within ε — the
//! hypothesis-implies-conclusion contract checked by [`certificate_check`].
//! The discrete approximation covers the space by open balls around a finite
//! grid and assigns each successive cover difference's mass to its center,
//! giving a purely atomic measure whose integrals against slowly-oscillating
//! functions are provably close.

use serde::{Deserialize, Serialize};

use crate::func::{level_partition, LevelPartition, PiecewiseFunc};
use crate::measure::Measure;
use crate::rational::Rat;
use crate::region::Region;

/// Cells beyond this are refused; a tiny ε would otherwise allocate without
/// bound.
pub const MAX_CERTIFICATE_CELLS: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ApproxError {
    #[error("target epsilon must be positive, got {epsilon}")]
    NonPositiveEpsilon { epsilon: Rat },
    #[error("epsilon {epsilon} would need {cells} cells (limit {limit})")]
    EpsilonTooSmall { epsilon: Rat, cells: u64, limit: u64 },
    #[error("grid denominator must be at least 2, got {n1}")]
    GridTooCoarse { n1: u64 },
}

/// A level-set quantization certificate for one test function.
///
/// For a nontrivial certificate, `cells` are the `n` level-set preimages of
/// `f` and the implication holds: if `|ν(A_i) − ρ(A_i)| < cell_tolerance` for
/// every cell, then `|∫f dν − ∫f dρ| < target_epsilon`.
/// The zero function gets the trivial certificate (single cell `[0,1]`,
/// tolerance 1): its conclusion holds vacuously for any pair of measures.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuantizationCertificate {
    pub f: PiecewiseFunc,
    pub n: u64,
    pub cells: Vec<Region>,
    pub cell_tolerance: Rat,
    pub target_epsilon: Rat,
    pub trivial: bool,
}

/// Builds the certificate with the smallest `n` satisfying `4‖f‖∞/n < ε`.
pub fn make_certificate(
    f: &PiecewiseFunc,
    target_epsilon: &Rat,
) -> Result<QuantizationCertificate, ApproxError> {
    if !target_epsilon.is_positive() {
        return Err(ApproxError::NonPositiveEpsilon {
            epsilon: target_epsilon.clone(),
        });
    }
    let m = f.sup_norm();
    if m.is_zero() {
        return Ok(QuantizationCertificate {
            f: f.clone(),
            n: 1,
            cells: vec![Region::full()],
            cell_tolerance: Rat::one(),
            target_epsilon: target_epsilon.clone(),
            trivial: true,
        });
    }
    // smallest n with 4M/n < eps, i.e. n > 4M/eps
    let four_m = Rat::from_int(4) * &m;
    let bound = &four_m / target_epsilon;
    let n_big = bound.floor_int() + 1;
    let n: u64 = match num_traits::ToPrimitive::to_u64(&n_big) {
        Some(n) if n <= MAX_CERTIFICATE_CELLS => n,
        _ => {
            return Err(ApproxError::EpsilonTooSmall {
                epsilon: target_epsilon.clone(),
                cells: num_traits::ToPrimitive::to_u64(&n_big).unwrap_or(u64::MAX),
                limit: MAX_CERTIFICATE_CELLS,
            })
        }
    };
    let cells = match level_partition(f, n as u32).expect("n >= 1") {
        LevelPartition::Bands(cells) => cells,
        LevelPartition::ZeroFunction => unreachable!("sup norm positive"),
    };
    let cell_tolerance = target_epsilon / &(&Rat::from(2 * n) * &m);
    Ok(QuantizationCertificate {
        f: f.clone(),
        n,
        cells,
        cell_tolerance,
        target_epsilon: target_epsilon.clone(),
        trivial: false,
    })
}

/// Outcome of checking one certificate against a pair of measures. The module
/// invariant is `hypothesis → conclusion`; `gap` is the exact slack
/// `ε − |∫f dν − ∫f dρ|`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateCheck {
    pub hypothesis: bool,
    pub conclusion: bool,
    pub gap: Rat,
    /// First cell violating the hypothesis, when one exists.
    pub violating_cell: Option<usize>,
}

pub fn certificate_check(
    cert: &QuantizationCertificate,
    nu: &Measure,
    rho: &Measure,
) -> CertificateCheck {
    let mut violating_cell = None;
    for (i, cell) in cert.cells.iter().enumerate() {
        let dev = (nu.measure_of(cell) - rho.measure_of(cell)).abs();
        if dev >= cert.cell_tolerance {
            violating_cell = Some(i);
            break;
        }
    }
    let integral_gap = (nu.integrate(&cert.f) - rho.integrate(&cert.f)).abs();
    let gap = &cert.target_epsilon - &integral_gap;
    CertificateCheck {
        hypothesis: violating_cell.is_none(),
        conclusion: gap.is_positive(),
        gap,
        violating_cell,
    }
}

/// A discrete approximation of a measure: all mass moved onto grid points.
///
/// `error_bound` is the oscillation window `2/n1`: any test function whose
/// oscillation on every window of that width stays below ε integrates within
/// ε of the original (and within `(1 + 2‖f‖∞)ε` a fortiori). For a PL
/// function with Lipschitz constant L that gives `|∫f dν − ∫f dν'| ≤ 2L/n1`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VagueApproxResult {
    pub atoms: Measure,
    pub n1: u64,
    pub centers_used: Vec<Rat>,
    pub error_bound: Rat,
}

/// Greedy ball-cover discretization on the grid `{0, 1/n1, …, 1}`.
///
/// Each center in left-to-right order receives the mass of its open
/// `1/n1`-ball minus everything already covered; the cover differences
/// partition `[0,1]`, so the atom masses sum to exactly 1. The space is
/// compact, so there is no escape point and no truncation term.
pub fn vague_approximate(nu: &Measure, n1: u64) -> Result<VagueApproxResult, ApproxError> {
    if n1 < 2 {
        return Err(ApproxError::GridTooCoarse { n1 });
    }
    let radius = Rat::from(n1).recip();
    let mut covered = Region::empty();
    let mut atoms: Vec<(Rat, Rat)> = Vec::new();
    for i in 0..=n1 {
        let center = Rat::from(i) / Rat::from(n1);
        let ball = Region::open_ball(&center, &radius);
        let fresh = ball.difference(&covered);
        let mass = nu.measure_of(&fresh);
        covered = covered.union(&ball);
        if !mass.is_zero() {
            atoms.push((center, mass));
        }
    }
    debug_assert_eq!(covered, Region::full());
    let centers_used = atoms.iter().map(|(c, _)| c.clone()).collect();
    let atoms = Measure::new(atoms, PiecewiseFunc::constant(Rat::zero()))
        .expect("cover differences partition the space");
    Ok(VagueApproxResult {
        atoms,
        n1,
        centers_used,
        error_bound: Rat::from_int(2) / Rat::from(n1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::convex_combine;
    use crate::rat;

    #[test]
    fn certificate_smallest_n() {
        // ‖f‖∞ = 1, ε = 1: smallest n with 4/n < 1 is 5
        let c = make_certificate(&PiecewiseFunc::identity(), &rat!(1)).unwrap();
        assert_eq!(c.n, 5);
        assert_eq!(c.cell_tolerance, rat!(1 / 10));
        assert!(!c.trivial);
        assert_eq!(c.cells.len(), 5);

        // constant 1, ε = 1/2: 4/9 < 1/2
        let c2 = make_certificate(&PiecewiseFunc::constant(rat!(1)), &rat!(1 / 2)).unwrap();
        assert_eq!(c2.n, 9);
        let nonempty: Vec<_> = c2.cells.iter().filter(|c| !c.is_empty()).collect();
        assert_eq!(nonempty.len(), 1);
        assert_eq!(*nonempty[0], Region::full());
    }

    #[test]
    fn certificate_boundary_when_ratio_is_integral() {
        // 4M/ε = 8 exactly: need n = 9 since 4/8 = ε/2·… is not < ε? no:
        // M = 1, ε = 1/2 gives 4M/ε = 8 and 4/8 = 1/2 which is not < 1/2
        let c = make_certificate(&PiecewiseFunc::identity(), &rat!(1 / 2)).unwrap();
        assert_eq!(c.n, 9);
    }

    #[test]
    fn zero_function_certificate_is_trivial() {
        let c = make_certificate(&PiecewiseFunc::constant(rat!(0)), &rat!(1 / 4)).unwrap();
        assert!(c.trivial);
        assert_eq!(c.cells, vec![Region::full()]);
        let check = certificate_check(
            &c,
            &Measure::lebesgue(),
            &Measure::dirac(rat!(1)).unwrap(),
        );
        assert!(check.hypothesis && check.conclusion);
        assert_eq!(check.gap, rat!(1 / 4));
    }

    #[test]
    fn rejects_nonpositive_epsilon_and_runaway_cells() {
        assert!(matches!(
            make_certificate(&PiecewiseFunc::identity(), &rat!(0)),
            Err(ApproxError::NonPositiveEpsilon { .. })
        ));
        assert!(matches!(
            make_certificate(&PiecewiseFunc::identity(), &Rat::new(1, 1_000_000)),
            Err(ApproxError::EpsilonTooSmall { .. })
        ));
    }

    #[test]
    fn check_same_measure_has_full_gap() {
        let c = make_certificate(&PiecewiseFunc::identity(), &rat!(1 / 2)).unwrap();
        let nu = Measure::lebesgue();
        let r = certificate_check(&c, &nu, &nu.clone());
        assert!(r.hypothesis && r.conclusion);
        assert_eq!(r.gap, rat!(1 / 2));
    }

    #[test]
    fn conclusion_can_hold_without_hypothesis() {
        // |∫x dUnif − ∫x dδ0| = 1/2 < 1, but cell masses differ wildly
        let c = make_certificate(&PiecewiseFunc::identity(), &rat!(1)).unwrap();
        let r = certificate_check(&c, &Measure::lebesgue(), &Measure::dirac(rat!(0)).unwrap());
        assert!(!r.hypothesis);
        assert!(r.conclusion);
        assert_eq!(r.gap, rat!(1 / 2));
    }

    #[test]
    fn hypothesis_violation_is_reported() {
        let c = make_certificate(&PiecewiseFunc::identity(), &rat!(1 / 10)).unwrap();
        let r = certificate_check(
            &c,
            &Measure::dirac(rat!(0)).unwrap(),
            &Measure::dirac(rat!(1)).unwrap(),
        );
        assert!(!r.hypothesis);
        assert!(r.violating_cell.is_some());
        assert!(!r.conclusion);
    }

    #[test]
    fn vague_approx_dirac_snaps_to_capturing_center() {
        // ball(0, 1/2) = [0, 1/2) misses 1/2; the center 1/2 captures it
        let r = vague_approximate(&Measure::dirac(rat!(1 / 2)).unwrap(), 2).unwrap();
        assert_eq!(r.atoms.atoms(), &[(rat!(1 / 2), rat!(1))]);
        assert_eq!(r.centers_used, vec![rat!(1 / 2)]);
    }

    #[test]
    fn vague_approx_uniform_splits_by_cover_differences() {
        let r = vague_approximate(&Measure::lebesgue(), 2).unwrap();
        assert_eq!(
            r.atoms.atoms(),
            &[(rat!(0), rat!(1 / 2)), (rat!(1 / 2), rat!(1 / 2))]
        );
    }

    #[test]
    fn vague_approx_masses_always_sum_to_one() {
        let nu = convex_combine(
            &[rat!(1 / 3), rat!(1 / 3), rat!(1 / 3)],
            &[
                Measure::dirac(rat!(1 / 7)).unwrap(),
                Measure::uniform(rat!(1 / 5), rat!(4 / 5)).unwrap(),
                Measure::square_wave(2).unwrap(),
            ],
        )
        .unwrap();
        for n1 in [2u64, 3, 5, 8] {
            let r = vague_approximate(&nu, n1).unwrap();
            let total: Rat = r.atoms.atoms().iter().map(|(_, m)| m).sum();
            assert_eq!(total, rat!(1));
        }
    }

    #[test]
    fn vague_approx_error_within_lipschitz_bound() {
        let f = crate::func::hat(rat!(1 / 2), rat!(1 / 4));
        let lip = f.lipschitz().unwrap();
        let nu = Measure::lebesgue();
        let exact = nu.integrate(&f);
        for n1 in [2u64, 4, 8, 16] {
            let r = vague_approximate(&nu, n1).unwrap();
            let err = (r.atoms.integrate(&f) - &exact).abs();
            let bound = &lip * &r.error_bound; // 2L/n1
            assert!(err <= bound, "n1={n1}: {err} > {bound}");
        }
    }

    #[test]
    fn rejects_coarse_grid() {
        assert!(matches!(
            vague_approximate(&Measure::lebesgue(), 1),
            Err(ApproxError::GridTooCoarse { .. })
        ));
    }
}

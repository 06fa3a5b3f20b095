//! Finite truncations of a countable open base of `[0,1]`.
//!
//! At complexity `k` the family consists of every normalized union of at most
//! `k` open intervals with endpoints on the dyadic grid `{i/2^k}`. Adjacent
//! components may share an endpoint (the union of two open intervals meeting
//! at a missing point), which is exactly what a union of `k` open intervals
//! can reach. The family is finite, enumerated in a fixed order (component
//! count, then endpoint order), and monotone in `k`.

use crate::rational::Rat;
use crate::region::{Interval, Region};

/// Calls `visit` once for every member of the complexity-`k` family, without
/// materializing the whole list. `k = 0` visits nothing.
pub fn base_for_each(k: u32, mut visit: impl FnMut(Region)) {
    if k == 0 {
        return;
    }
    let denom: i64 = 1 << k;
    let grid: Vec<Rat> = (0..=denom).map(|i| Rat::new(i, denom)).collect();
    let mut acc: Vec<Interval> = Vec::with_capacity(k as usize);
    for c in 1..=k as usize {
        emit_components(&grid, c, 0, &mut acc, &mut visit);
    }
}

fn emit_components(
    grid: &[Rat],
    remaining: usize,
    min_lo: usize,
    acc: &mut Vec<Interval>,
    visit: &mut impl FnMut(Region),
) {
    if remaining == 0 {
        // components were built sorted and non-mergeable (all-open flags,
        // gaps of at least a point), so this is already a normalized Region
        let region = Region::from_intervals(acc.clone());
        debug_assert_eq!(region.num_components(), acc.len());
        visit(region);
        return;
    }
    for lo in min_lo..grid.len().saturating_sub(1) {
        for hi in lo + 1..grid.len() {
            acc.push(Interval {
                lo: grid[lo].clone(),
                hi: grid[hi].clone(),
                lo_closed: false,
                hi_closed: false,
            });
            emit_components(grid, remaining - 1, hi, acc, visit);
            acc.pop();
        }
    }
}

/// Deterministic enumeration of the complexity-`k` base family.
pub fn base_enumerate(k: u32) -> Vec<Region> {
    let mut out = Vec::new();
    base_for_each(k, |r| out.push(r));
    out
}

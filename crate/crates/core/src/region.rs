//! Finite unions of subintervals of `[0,1]` with endpoint-inclusion flags.
//!
//! A [`Region`] is the computable fragment of the Borel sets used throughout
//! this crate: a normalized, sorted list of pairwise disjoint intervals, each
//! carrying closed/open flags on both endpoints. Normalized means no two
//! stored intervals could be merged into one connected interval, so structural
//! equality coincides with set equality.
//!
//! All operations are pure; every value is immutable after construction.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::rational::Rat;

/// One interval component. `lo == hi` is allowed only with both flags closed
/// (a singleton).
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Interval {
    pub lo: Rat,
    pub hi: Rat,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RegionError {
    #[error("interval endpoints out of [0,1]: [{lo}, {hi}]")]
    OutOfUnit { lo: Rat, hi: Rat },
    #[error("interval with lo > hi: [{lo}, {hi}]")]
    Inverted { lo: Rat, hi: Rat },
    #[error("degenerate interval at {at} must be closed on both sides")]
    OpenSingleton { at: Rat },
    #[error("shrink requires delta > 0, got {delta}")]
    NonPositiveDelta { delta: Rat },
}

impl Interval {
    pub fn new(lo: Rat, hi: Rat, lo_closed: bool, hi_closed: bool) -> Result<Self, RegionError> {
        if lo.is_negative() || hi > Rat::one() {
            return Err(RegionError::OutOfUnit { lo, hi });
        }
        if lo > hi {
            return Err(RegionError::Inverted { lo, hi });
        }
        if lo == hi && !(lo_closed && hi_closed) {
            return Err(RegionError::OpenSingleton { at: lo });
        }
        Ok(Interval {
            lo,
            hi,
            lo_closed,
            hi_closed,
        })
    }

    pub fn is_singleton(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Rat) -> bool {
        let above = *x > self.lo || (*x == self.lo && self.lo_closed);
        let below = *x < self.hi || (*x == self.hi && self.hi_closed);
        above && below
    }

    fn len(&self) -> Rat {
        &self.hi - &self.lo
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_singleton() {
            return write!(f, "{{{}}}", self.lo);
        }
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' },
        )
    }
}

/// A normalized finite union of intervals in `[0,1]`.
#[derive(Clone, PartialEq, Eq, Debug, Hash, Default)]
pub struct Region {
    parts: Vec<Interval>,
}

impl Region {
    pub fn empty() -> Self {
        Region { parts: Vec::new() }
    }

    /// The whole space `[0,1]`.
    pub fn full() -> Self {
        Region {
            parts: vec![Interval {
                lo: Rat::zero(),
                hi: Rat::one(),
                lo_closed: true,
                hi_closed: true,
            }],
        }
    }

    pub fn point(p: Rat) -> Result<Self, RegionError> {
        Ok(Region {
            parts: vec![Interval::new(p.clone(), p, true, true)?],
        })
    }

    /// Single-interval region.
    pub fn interval(lo: Rat, hi: Rat, lo_closed: bool, hi_closed: bool) -> Result<Self, RegionError> {
        Ok(Region {
            parts: vec![Interval::new(lo, hi, lo_closed, hi_closed)?],
        })
    }

    /// Open interval `(lo, hi)` (flags open; callers wanting the relative
    /// topology at 0 or 1 set the flags themselves).
    pub fn open(lo: Rat, hi: Rat) -> Result<Self, RegionError> {
        Self::interval(lo, hi, false, false)
    }

    pub fn closed(lo: Rat, hi: Rat) -> Result<Self, RegionError> {
        Self::interval(lo, hi, true, true)
    }

    /// Builds a region from arbitrary valid intervals, normalizing them.
    pub fn from_intervals(parts: Vec<Interval>) -> Self {
        Region {
            parts: normalize(parts),
        }
    }

    /// The open ball `B(center, radius) ∩ [0,1]` of the relative topology:
    /// clipping at 0 or 1 includes that endpoint whenever it is strictly
    /// within `radius` of the center.
    pub fn open_ball(center: &Rat, radius: &Rat) -> Self {
        assert!(radius.is_positive(), "ball radius must be positive");
        let raw_lo = center - radius;
        let raw_hi = center + radius;
        let lo_closed = raw_lo.is_negative();
        let hi_closed = raw_hi > Rat::one();
        let lo = if lo_closed { Rat::zero() } else { raw_lo };
        let hi = if hi_closed { Rat::one() } else { raw_hi };
        Region {
            parts: vec![Interval {
                lo,
                hi,
                lo_closed,
                hi_closed,
            }],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn components(&self) -> &[Interval] {
        &self.parts
    }

    pub fn num_components(&self) -> usize {
        self.parts.len()
    }

    pub fn contains(&self, x: &Rat) -> bool {
        self.parts.iter().any(|iv| iv.contains(x))
    }

    /// Lebesgue measure: endpoint flags are null sets and do not contribute.
    pub fn leb(&self) -> Rat {
        self.parts.iter().map(|iv| iv.len()).sum()
    }

    /// Set union; idempotent and commutative.
    pub fn union(&self, other: &Region) -> Region {
        let mut parts = self.parts.clone();
        parts.extend(other.parts.iter().cloned());
        Region {
            parts: normalize(parts),
        }
    }

    pub fn intersect(&self, other: &Region) -> Region {
        let mut out = Vec::new();
        for a in &self.parts {
            for b in &other.parts {
                // max of lower bounds, min of upper bounds; ties intersect flags
                let (lo, lo_closed) = match a.lo.cmp(&b.lo) {
                    std::cmp::Ordering::Greater => (a.lo.clone(), a.lo_closed),
                    std::cmp::Ordering::Less => (b.lo.clone(), b.lo_closed),
                    std::cmp::Ordering::Equal => (a.lo.clone(), a.lo_closed && b.lo_closed),
                };
                let (hi, hi_closed) = match a.hi.cmp(&b.hi) {
                    std::cmp::Ordering::Less => (a.hi.clone(), a.hi_closed),
                    std::cmp::Ordering::Greater => (b.hi.clone(), b.hi_closed),
                    std::cmp::Ordering::Equal => (a.hi.clone(), a.hi_closed && b.hi_closed),
                };
                let keep = lo < hi || (lo == hi && lo_closed && hi_closed);
                if keep {
                    out.push(Interval {
                        lo,
                        hi,
                        lo_closed,
                        hi_closed,
                    });
                }
            }
        }
        Region {
            parts: normalize(out),
        }
    }

    /// `[0,1] ∖ self`; involutive.
    pub fn complement(&self) -> Region {
        let mut out = Vec::new();
        let mut cursor = Rat::zero();
        let mut cursor_closed = true;
        for part in &self.parts {
            let hi_closed = !part.lo_closed;
            if cursor < part.lo || (cursor == part.lo && cursor_closed && hi_closed) {
                out.push(Interval {
                    lo: cursor.clone(),
                    hi: part.lo.clone(),
                    lo_closed: cursor_closed,
                    hi_closed,
                });
            }
            cursor = part.hi.clone();
            cursor_closed = !part.hi_closed;
        }
        let one = Rat::one();
        if cursor < one || (cursor == one && cursor_closed) {
            out.push(Interval {
                lo: cursor,
                hi: one,
                lo_closed: cursor_closed,
                hi_closed: true,
            });
        }
        Region { parts: out }
    }

    pub fn difference(&self, other: &Region) -> Region {
        self.intersect(&other.complement())
    }

    pub fn is_subset_of(&self, other: &Region) -> bool {
        self.difference(other).is_empty()
    }

    /// Topological closure in `[0,1]`: close every flag, then merge touching
    /// components.
    pub fn closure(&self) -> Region {
        let parts = self
            .parts
            .iter()
            .map(|iv| Interval {
                lo: iv.lo.clone(),
                hi: iv.hi.clone(),
                lo_closed: true,
                hi_closed: true,
            })
            .collect();
        Region {
            parts: normalize(parts),
        }
    }

    /// The closed δ-core `{x : B(x,δ) ∩ [0,1] ⊆ self}`.
    ///
    /// Balls are connected and the components of a normalized region are
    /// separated, so a ball fits inside the region iff it fits inside a single
    /// component; the core is computed componentwise. An interior endpoint
    /// moves inward by δ; an endpoint lying at 0 or 1 is kept exactly when the
    /// component includes it (relative balls at the boundary stay inside).
    /// Components narrower than 2δ collapse to a singleton or vanish.
    pub fn shrink(&self, delta: &Rat) -> Result<Region, RegionError> {
        if !delta.is_positive() {
            return Err(RegionError::NonPositiveDelta {
                delta: delta.clone(),
            });
        }
        let mut out = Vec::new();
        for part in &self.parts {
            let lo = if part.lo.is_zero() && part.lo_closed {
                Rat::zero()
            } else {
                &part.lo + delta
            };
            let hi = if part.hi == Rat::one() && part.hi_closed {
                Rat::one()
            } else {
                &part.hi - delta
            };
            if lo <= hi {
                out.push(Interval {
                    lo,
                    hi,
                    lo_closed: true,
                    hi_closed: true,
                });
            }
        }
        Ok(Region {
            parts: normalize(out),
        })
    }

    /// Debug validation of the normalization invariant.
    pub fn check_invariants(&self) -> Result<(), String> {
        for iv in &self.parts {
            if iv.lo.is_negative() || iv.hi > Rat::one() {
                return Err(format!("component out of unit interval: {iv}"));
            }
            if iv.lo > iv.hi {
                return Err(format!("inverted component: {iv}"));
            }
            if iv.lo == iv.hi && !(iv.lo_closed && iv.hi_closed) {
                return Err(format!("open singleton: {iv}"));
            }
        }
        for w in self.parts.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            if b.lo < a.hi {
                return Err(format!("overlapping components: {a} then {b}"));
            }
            if b.lo == a.hi && (a.hi_closed || b.lo_closed) {
                return Err(format!("mergeable components: {a} then {b}"));
            }
        }
        Ok(())
    }
}

fn normalize(mut parts: Vec<Interval>) -> Vec<Interval> {
    // closed lower flags sort first so the survivor at a tied lo keeps the
    // more inclusive flag
    parts.sort_by(|a, b| a.lo.cmp(&b.lo).then(b.lo_closed.cmp(&a.lo_closed)));
    let mut merged: Vec<Interval> = Vec::with_capacity(parts.len());
    for iv in parts {
        if let Some(last) = merged.last_mut() {
            let touches = iv.lo < last.hi || (iv.lo == last.hi && (last.hi_closed || iv.lo_closed));
            if touches {
                if iv.hi > last.hi {
                    last.hi = iv.hi;
                    last.hi_closed = iv.hi_closed;
                } else if iv.hi == last.hi {
                    last.hi_closed |= iv.hi_closed;
                }
                continue;
            }
        }
        merged.push(iv);
    }
    merged
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "∅");
        }
        for (i, part) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, " ∪ ")?;
            }
            write!(f, "{part}")?;
        }
        Ok(())
    }
}

impl Serialize for Region {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<(&Rat, &Rat, bool, bool)> = self
            .parts
            .iter()
            .map(|iv| (&iv.lo, &iv.hi, iv.lo_closed, iv.hi_closed))
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Region {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows: Vec<(Rat, Rat, bool, bool)> = Vec::deserialize(deserializer)?;
        let mut parts = Vec::with_capacity(rows.len());
        for (lo, hi, lc, hc) in rows {
            parts.push(Interval::new(lo, hi, lc, hc).map_err(D::Error::custom)?);
        }
        Ok(Region::from_intervals(parts))
    }
}

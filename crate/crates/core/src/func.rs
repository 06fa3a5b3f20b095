//! Computable test functions on `[0,1]`.
//!
//! Two kinds cover both testing-function families this crate needs:
//! continuous piecewise-linear functions (the bounded continuous class) and
//! piecewise-constant simple functions (the bounded measurable class).
//! Breakpoints always start at 0 and end at 1. A `Simple` function takes its
//! cell value on `[b_i, b_{i+1})`, with the final cell closed at 1.

use serde::{Deserialize, Serialize};

use crate::rational::Rat;
use crate::region::{Interval, Region, RegionError};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum FuncKind {
    #[serde(rename = "ContinuousPL")]
    ContinuousPl,
    Simple,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "PiecewiseFuncRepr", into = "PiecewiseFuncRepr")]
pub struct PiecewiseFunc {
    kind: FuncKind,
    breakpoints: Vec<Rat>,
    values: Vec<Rat>,
}

/// Raw JSON shape `{kind, breakpoints, values}`; conversion validates.
#[derive(Clone, Serialize, Deserialize)]
struct PiecewiseFuncRepr {
    kind: FuncKind,
    breakpoints: Vec<Rat>,
    values: Vec<Rat>,
}

impl TryFrom<PiecewiseFuncRepr> for PiecewiseFunc {
    type Error = FuncError;
    fn try_from(r: PiecewiseFuncRepr) -> Result<Self, FuncError> {
        PiecewiseFunc::new(r.kind, r.breakpoints, r.values)
    }
}

impl From<PiecewiseFunc> for PiecewiseFuncRepr {
    fn from(f: PiecewiseFunc) -> Self {
        PiecewiseFuncRepr {
            kind: f.kind,
            breakpoints: f.breakpoints,
            values: f.values,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FuncError {
    #[error("breakpoints must start at 0 and end at 1")]
    BadEnds,
    #[error("breakpoints must be strictly increasing")]
    NotIncreasing,
    #[error("need {expected} values for {n} breakpoints, got {got}")]
    ValueCount {
        expected: usize,
        n: usize,
        got: usize,
    },
    #[error("level partition needs n >= 1")]
    ZeroBands,
}

impl PiecewiseFunc {
    pub fn new(kind: FuncKind, breakpoints: Vec<Rat>, values: Vec<Rat>) -> Result<Self, FuncError> {
        if breakpoints.len() < 2
            || breakpoints[0] != Rat::zero()
            || breakpoints[breakpoints.len() - 1] != Rat::one()
        {
            return Err(FuncError::BadEnds);
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(FuncError::NotIncreasing);
        }
        let expected = match kind {
            FuncKind::ContinuousPl => breakpoints.len(),
            FuncKind::Simple => breakpoints.len() - 1,
        };
        if values.len() != expected {
            return Err(FuncError::ValueCount {
                expected,
                n: breakpoints.len(),
                got: values.len(),
            });
        }
        Ok(PiecewiseFunc {
            kind,
            breakpoints,
            values,
        })
    }

    pub fn continuous_pl(breakpoints: Vec<Rat>, values: Vec<Rat>) -> Result<Self, FuncError> {
        Self::new(FuncKind::ContinuousPl, breakpoints, values)
    }

    pub fn simple(breakpoints: Vec<Rat>, values: Vec<Rat>) -> Result<Self, FuncError> {
        Self::new(FuncKind::Simple, breakpoints, values)
    }

    /// The constant simple function.
    pub fn constant(value: Rat) -> Self {
        PiecewiseFunc {
            kind: FuncKind::Simple,
            breakpoints: vec![Rat::zero(), Rat::one()],
            values: vec![value],
        }
    }

    /// The identity `f(x) = x` as a continuous PL function.
    pub fn identity() -> Self {
        PiecewiseFunc {
            kind: FuncKind::ContinuousPl,
            breakpoints: vec![Rat::zero(), Rat::one()],
            values: vec![Rat::zero(), Rat::one()],
        }
    }

    pub fn kind(&self) -> FuncKind {
        self.kind
    }

    pub fn breakpoints(&self) -> &[Rat] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        debug_assert!(!x.is_negative() && *x <= Rat::one());
        match self.kind {
            FuncKind::Simple => {
                let i = self.cell_index(x);
                self.values[i].clone()
            }
            FuncKind::ContinuousPl => {
                let n = self.breakpoints.len();
                let mut seg = n - 2;
                for i in 0..n - 1 {
                    if *x <= self.breakpoints[i + 1] {
                        seg = i;
                        break;
                    }
                }
                let (a, b) = (&self.breakpoints[seg], &self.breakpoints[seg + 1]);
                let (ya, yb) = (&self.values[seg], &self.values[seg + 1]);
                ya + &((x - a) * &(yb - ya) / (b - a))
            }
        }
    }

    fn cell_index(&self, x: &Rat) -> usize {
        let cells = self.breakpoints.len() - 1;
        for i in 0..cells {
            if *x < self.breakpoints[i + 1] {
                return i;
            }
        }
        cells - 1 // x == 1 lands in the final, right-closed cell
    }

    /// `‖f‖∞`, exact. Piecewise-linear extremes occur at nodes.
    pub fn sup_norm(&self) -> Rat {
        self.values
            .iter()
            .map(|v| v.abs())
            .fold(Rat::zero(), Rat::max)
    }

    pub fn is_identically_zero(&self) -> bool {
        self.values.iter().all(Rat::is_zero)
    }

    /// Exact Lipschitz constant `max |slope|` for a continuous PL function;
    /// `None` for simple functions.
    pub fn lipschitz(&self) -> Option<Rat> {
        match self.kind {
            FuncKind::Simple => None,
            FuncKind::ContinuousPl => {
                let mut best = Rat::zero();
                for i in 0..self.breakpoints.len() - 1 {
                    let slope = (&self.values[i + 1] - &self.values[i])
                        / (&self.breakpoints[i + 1] - &self.breakpoints[i]);
                    best = best.max(slope.abs());
                }
                Some(best)
            }
        }
    }

    /// The i-th cell of a simple function as a region (`[b_i, b_{i+1})`,
    /// final cell closed).
    pub fn simple_cell_region(&self, i: usize) -> Region {
        debug_assert_eq!(self.kind, FuncKind::Simple);
        let last = i + 2 == self.breakpoints.len();
        Region::interval(
            self.breakpoints[i].clone(),
            self.breakpoints[i + 1].clone(),
            true,
            last,
        )
        .expect("breakpoints are ordered")
    }
}

/// Result of the level-set partition; the all-zero function is a distinct
/// success case whose caller substitutes the single cell `[0,1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LevelPartition {
    Bands(Vec<Region>),
    ZeroFunction,
}

impl LevelPartition {
    /// The partition cells, substituting `{[0,1]}` in the zero-function case.
    pub fn cells(self) -> Vec<Region> {
        match self {
            LevelPartition::Bands(cells) => cells,
            LevelPartition::ZeroFunction => vec![Region::full()],
        }
    }
}

/// One value band `[lo, hi)`, final band `[lo, hi]`.
struct Band {
    lo: Rat,
    hi: Rat,
    hi_closed: bool,
}

impl Band {
    fn contains(&self, v: &Rat) -> bool {
        *v >= self.lo && (*v < self.hi || (self.hi_closed && *v == self.hi))
    }
}

/// Splits `[0,1]` into the exact preimages of `n` equal-height value bands of
/// `f` over `[-‖f‖∞, ‖f‖∞]`; the final band is closed at the top. The cells
/// are pairwise disjoint and cover the whole space.
pub fn level_partition(f: &PiecewiseFunc, n: u32) -> Result<LevelPartition, FuncError> {
    if n == 0 {
        return Err(FuncError::ZeroBands);
    }
    if f.is_identically_zero() {
        return Ok(LevelPartition::ZeroFunction);
    }
    let m = f.sup_norm();
    let two_m = &m + &m;
    let n_rat = Rat::from(u64::from(n));
    let width = &two_m / &n_rat;
    let bands: Vec<Band> = (1..=n)
        .map(|i| {
            let i_rat = Rat::from(u64::from(i));
            let lo = -&m + &(&width * &(&i_rat - &Rat::one()));
            let hi = -&m + &(&width * &i_rat);
            Band {
                lo,
                hi,
                hi_closed: i == n,
            }
        })
        .collect();

    let cells = bands
        .iter()
        .map(|band| band_preimage(f, band))
        .collect::<Result<Vec<_>, _>>()
        .expect("preimage intervals are valid by construction");
    Ok(LevelPartition::Bands(cells))
}

fn band_preimage(f: &PiecewiseFunc, band: &Band) -> Result<Region, RegionError> {
    let mut pieces: Vec<Interval> = Vec::new();
    match f.kind {
        FuncKind::Simple => {
            for (i, v) in f.values.iter().enumerate() {
                if band.contains(v) {
                    pieces.extend(f.simple_cell_region(i).components().iter().cloned());
                }
            }
        }
        FuncKind::ContinuousPl => {
            for i in 0..f.breakpoints.len() - 1 {
                let (a, b) = (&f.breakpoints[i], &f.breakpoints[i + 1]);
                let (ya, yb) = (&f.values[i], &f.values[i + 1]);
                if ya == yb {
                    if band.contains(ya) {
                        pieces.push(Interval::new(a.clone(), b.clone(), true, true)?);
                    }
                    continue;
                }
                // invert the segment: x(t) = a + (t - ya) (b - a)/(yb - ya)
                let scale = &(b - a) / &(yb - ya);
                let x_at = |t: &Rat| a + &(&(t - ya) * &scale);
                let (lo_x, lo_c, hi_x, hi_c);
                if yb > ya {
                    // increasing: t >= band.lo gives x >= ·, t < band.hi gives x < ·
                    lo_x = x_at(&band.lo);
                    lo_c = true;
                    hi_x = x_at(&band.hi);
                    hi_c = band.hi_closed;
                } else {
                    // decreasing: inequalities flip orientation
                    hi_x = x_at(&band.lo);
                    hi_c = true;
                    lo_x = x_at(&band.hi);
                    lo_c = band.hi_closed;
                }
                // clamp to the closed segment [a, b]
                let (lo_x, lo_c) = if lo_x < *a { (a.clone(), true) } else { (lo_x, lo_c) };
                let (hi_x, hi_c) = if hi_x > *b { (b.clone(), true) } else { (hi_x, hi_c) };
                let nonempty = lo_x < hi_x || (lo_x == hi_x && lo_c && hi_c);
                if nonempty {
                    pieces.push(Interval::new(lo_x, hi_x, lo_c, hi_c)?);
                }
            }
        }
    }
    Ok(Region::from_intervals(pieces))
}

/// The triangular bump family at dyadic complexity `k`: for every level
/// `j = 1..=k` and every grid node `i/2^j`, the continuous PL function that is
/// 1 at the node and 0 from the neighbouring nodes outward. Monotone in `k`.
pub fn hat_family(k: u32) -> Vec<PiecewiseFunc> {
    let mut out = Vec::new();
    for j in 1..=k {
        let denom = 1i64 << j;
        for i in 0..=denom {
            let peak = Rat::new(i, denom);
            let left = Rat::new((i - 1).max(0), denom);
            let right = Rat::new((i + 1).min(denom), denom);
            let mut bps = vec![Rat::zero(), left, peak.clone(), right, Rat::one()];
            bps.dedup();
            let vals = bps
                .iter()
                .map(|b| if *b == peak { Rat::one() } else { Rat::zero() })
                .collect();
            out.push(PiecewiseFunc::continuous_pl(bps, vals).expect("hat construction"));
        }
    }
    out
}

/// A single hat with given peak and half-width, for tests and gauges.
pub fn hat(peak: Rat, half_width: Rat) -> PiecewiseFunc {
    let left = (&peak - &half_width).max(Rat::zero());
    let right = (&peak + &half_width).min(Rat::one());
    let mut bps = vec![Rat::zero(), left, peak.clone(), right, Rat::one()];
    bps.dedup();
    let vals = bps
        .iter()
        .map(|b| if *b == peak { Rat::one() } else { Rat::zero() })
        .collect();
    PiecewiseFunc::continuous_pl(bps, vals).expect("hat construction")
}

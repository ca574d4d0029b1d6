//! Compact subsets of the real line made of finitely many closed intervals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Points closer than this are merged by [`discretize`].
pub const DEDUP_TOL: f64 = 1e-14;

const MAX_REJECTIONS: usize = 10_000;

/// Closed interval `[lo, hi]`, serialized as a two-element array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::domain(format!("interval endpoints must be finite, got [{lo}, {hi}]")));
        }
        if lo > hi {
            return Err(Error::domain(format!("interval [{lo}, {hi}] has lo > hi")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_degenerate(&self) -> bool {
        self.hi == self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

impl TryFrom<[f64; 2]> for Interval {
    type Error = Error;

    fn try_from(v: [f64; 2]) -> Result<Self> {
        Interval::new(v[0], v[1])
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.lo, i.hi]
    }
}

/// Ordered union of non-overlapping closed intervals (touching endpoints are
/// allowed). Serialized as a JSON array of `[lo, hi]` pairs.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<Interval>", into = "Vec<Interval>")]
pub struct CompactSet {
    intervals: Vec<Interval>,
}

impl CompactSet {
    pub fn new(intervals: Vec<Interval>) -> Result<Self> {
        for w in intervals.windows(2) {
            if w[1].lo < w[0].hi {
                return Err(Error::domain(format!(
                    "intervals [{}, {}] and [{}, {}] overlap or are out of order",
                    w[0].lo, w[0].hi, w[1].lo, w[1].hi
                )));
            }
        }
        Ok(CompactSet { intervals })
    }

    /// Builds a set from `(lo, hi)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        let intervals = pairs
            .iter()
            .map(|&(lo, hi)| Interval::new(lo, hi))
            .collect::<Result<Vec<_>>>()?;
        CompactSet::new(intervals)
    }

    pub fn empty() -> Self {
        CompactSet::default()
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn measure(&self) -> f64 {
        measure(self)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|i| i.contains(x))
    }

    /// Smallest closed interval containing the set.
    pub fn hull(&self) -> Option<Interval> {
        let first = self.intervals.first()?;
        let last = self.intervals.last()?;
        Some(Interval { lo: first.lo, hi: last.hi })
    }

    /// Bounded open gaps between consecutive components.
    pub fn gaps(&self) -> Vec<(f64, f64)> {
        self.intervals
            .windows(2)
            .filter(|w| w[1].lo > w[0].hi)
            .map(|w| (w[0].hi, w[1].lo))
            .collect()
    }

    /// Maximal open interval of the complement that contains `x`, with
    /// infinite ends for the unbounded components. `None` when `x ∈ E`.
    pub fn complement_component(&self, x: f64) -> Option<(f64, f64)> {
        if self.contains(x) {
            return None;
        }
        let mut lo = f64::NEG_INFINITY;
        for i in &self.intervals {
            if i.lo > x {
                return Some((lo, i.lo));
            }
            lo = i.hi;
        }
        Some((lo, f64::INFINITY))
    }
}

impl TryFrom<Vec<Interval>> for CompactSet {
    type Error = Error;

    fn try_from(v: Vec<Interval>) -> Result<Self> {
        CompactSet::new(v)
    }
}

impl From<CompactSet> for Vec<Interval> {
    fn from(s: CompactSet) -> Self {
        s.intervals
    }
}

/// Parameters of the two-interval set `E(α, δ) = [-1, 1] \ (α-δ, α+δ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapParams {
    pub alpha: f64,
    pub delta: f64,
}

impl GapParams {
    /// Requires `0 < δ < 1` and both gap ends strictly inside `(-1, 1)`.
    pub fn new(alpha: f64, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::domain(format!("delta must lie in (0, 1), got {delta}")));
        }
        if !alpha.is_finite() {
            return Err(Error::domain(format!("alpha must be finite, got {alpha}")));
        }
        if alpha - delta <= -1.0 {
            return Err(Error::domain(format!(
                "alpha - delta = {} <= -1: the left interval is degenerate, use the single-interval branch",
                alpha - delta
            )));
        }
        if alpha + delta >= 1.0 {
            return Err(Error::domain(format!(
                "alpha + delta = {} >= 1: the right interval is degenerate",
                alpha + delta
            )));
        }
        Ok(GapParams { alpha, delta })
    }

    /// Left gap end `a = α - δ`.
    pub fn a(&self) -> f64 {
        self.alpha - self.delta
    }

    /// Right gap end `b = α + δ`.
    pub fn b(&self) -> f64 {
        self.alpha + self.delta
    }
}

/// `E(α, δ) = [-1, α-δ] ∪ [α+δ, 1]`.
pub fn make_gap_set(p: GapParams) -> Result<CompactSet> {
    let p = GapParams::new(p.alpha, p.delta)?;
    CompactSet::from_pairs(&[(-1.0, p.a()), (p.b(), 1.0)])
}

pub fn measure(e: &CompactSet) -> f64 {
    e.intervals.iter().map(Interval::len).sum()
}

/// Chebyshev-extrema grid on every component: `density` points per interval
/// of positive length (endpoints included), one point per degenerate
/// interval. Output is sorted with near-duplicates merged.
pub fn discretize(e: &CompactSet, density: usize) -> Vec<f64> {
    let density = density.max(2);
    let mut pts = Vec::with_capacity(e.intervals.len() * density);
    for i in &e.intervals {
        if i.is_degenerate() {
            pts.push(i.lo);
            continue;
        }
        let mid = 0.5 * (i.lo + i.hi);
        let half = 0.5 * (i.hi - i.lo);
        let m = (density - 1) as f64;
        for k in (0..density).rev() {
            let t = (std::f64::consts::PI * k as f64 / m).cos();
            pts.push(match k {
                0 => i.hi,
                k if k == density - 1 => i.lo,
                _ => mid + half * t,
            });
        }
    }
    sort_dedup(&mut pts, DEDUP_TOL);
    pts
}

pub(crate) fn sort_dedup(pts: &mut Vec<f64>, tol: f64) {
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|b, a| (*b - *a).abs() <= tol);
}

/// Random subset of `[-1, 1]` with measure `2 - 2δ` and exactly `gap_count`
/// open gaps strictly inside `(-1, 1)`.
///
/// Gap lengths are a symmetric Dirichlet split of `2δ`; gap positions are
/// uniform, redrawn until the gaps are pairwise disjoint.
pub fn random_multigap_set(delta: f64, gap_count: usize, seed: u64) -> Result<CompactSet> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain(format!("delta must lie in (0, 1), got {delta}")));
    }
    if gap_count == 0 {
        return Err(Error::domain("gap_count must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let draws: Vec<f64> = (0..gap_count).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = draws.iter().sum();
    let lengths: Vec<f64> = draws.iter().map(|d| 2.0 * delta * d / total).collect();

    for _ in 0..MAX_REJECTIONS {
        let mut gaps: Vec<(f64, f64)> = lengths
            .iter()
            .map(|&g| {
                let start = -1.0 + rng.random::<f64>() * (2.0 - g);
                (start, start + g)
            })
            .collect();
        gaps.sort_by(|x, y| x.0.total_cmp(&y.0));

        let inside = gaps.first().is_some_and(|g| g.0 > -1.0) && gaps.last().is_some_and(|g| g.1 < 1.0);
        let disjoint = gaps.windows(2).all(|w| w[1].0 > w[0].1);
        if !(inside && disjoint) {
            continue;
        }

        let mut pairs = Vec::with_capacity(gap_count + 1);
        let mut lo = -1.0;
        for &(ga, gb) in &gaps {
            pairs.push((lo, ga));
            lo = gb;
        }
        pairs.push((lo, 1.0));
        return CompactSet::from_pairs(&pairs);
    }
    Err(Error::Infeasible(format!(
        "could not place {gap_count} disjoint gaps of total length {} after {MAX_REJECTIONS} draws",
        2.0 * delta
    )))
}

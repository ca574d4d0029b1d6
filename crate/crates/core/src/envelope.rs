//! Upper envelope `Φ_δ(x) = sup_{α ∈ (δ-1, 0]} G_{α,δ}(x)` and the
//! asymptotic diagram built from it.
//!
//! The supremum over α is either attained at an interior α where
//! `∂_α G = 0` (an Akhiezer configuration) or approached as α ↓ δ-1, where
//! `G_{α,δ}` tends to the single-interval Green function `G_δ` (the Remez
//! configuration). The boundary value is always taken from the closed form,
//! never from two-interval quadrature at a degenerate α.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::green::{green_single_interval, TwoIntervalGreen, ENDPOINT_GUARD};
use crate::quadrature::QuadratureConfig;
use crate::search::{bisect, golden_max};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeConfig {
    pub quad: QuadratureConfig,
    /// Coarse α samples before golden-section refinement.
    pub alpha_grid: usize,
    pub alpha_tol: f64,
    pub tie_tol: f64,
    /// Bracket width for `x₀(α)` and breakpoint bisections.
    pub root_tol: f64,
    /// Coarse x samples when hunting for `x_s`, and α samples for `x_*`.
    pub scan_points: usize,
}

impl Default for EnvelopeConfig {
    fn default() -> Self {
        EnvelopeConfig {
            quad: QuadratureConfig::default(),
            alpha_grid: 64,
            alpha_tol: 1e-10,
            tie_tol: 1e-9,
            root_tol: 1e-12,
            scan_points: 64,
        }
    }
}

impl EnvelopeConfig {
    pub fn validate(&self) -> Result<()> {
        self.quad.validate()?;
        if self.alpha_grid < 4 || self.scan_points < 4 {
            return Err(Error::domain("alpha_grid and scan_points must be at least 4"));
        }
        if !(self.alpha_tol > 0.0 && self.tie_tol > 0.0 && self.root_tol > 0.0) {
            return Err(Error::domain("envelope tolerances must be positive"));
        }
        Ok(())
    }
}

/// Which configuration realizes `Φ_δ(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Source {
    Remez,
    Akhiezer { alpha: f64 },
    /// Both branches agree within the tie tolerance.
    Tie { alpha: f64 },
}

impl Source {
    pub fn alpha(&self) -> Option<f64> {
        match *self {
            Source::Remez => None,
            Source::Akhiezer { alpha } | Source::Tie { alpha } => Some(alpha),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Source::Remez => "remez",
            Source::Akhiezer { .. } => "akhiezer",
            Source::Tie { .. } => "tie",
        }
    }
}

/// Regions of the asymptotic diagram for `δ < 1/2`:
/// `d = (-1, x_*]`, `c = (x_*, x_s)`, `b = [x_s, -1+2δ]`, `a = (-1+2δ, 0]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    A,
    B,
    C,
    D,
    Unset,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::A => "a",
            Region::B => "b",
            Region::C => "c",
            Region::D => "d",
            Region::Unset => "unset",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopePoint {
    pub x: f64,
    pub phi: f64,
    pub source: Source,
    pub region: Region,
}

/// One row of the asymptotic diagram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagramRow {
    pub x: f64,
    /// `G_δ(x)`, present for `x < -1 + 2δ`.
    pub g_remez: Option<f64>,
    /// Point on the parametric curve `(x₀(α), G_{α,δ}(x₀(α)))` above `x`,
    /// present when the interior supremum is a stationary point.
    pub curve_x0: Option<f64>,
    pub curve_y: Option<f64>,
    pub phi: f64,
    pub source: Source,
    pub region: Region,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagram {
    pub delta: f64,
    pub x_star: Option<f64>,
    pub x_s: Option<f64>,
    /// Set when the four-region taxonomy does not apply.
    pub warning: Option<String>,
    pub rows: Vec<DiagramRow>,
}

pub const DIAGRAM_CSV_HEADER: &str = "x,g_remez,phi,source,alpha,region";

impl Diagram {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(DIAGRAM_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let g = r.g_remez.map(|v| v.to_string()).unwrap_or_default();
            let a = r.source.alpha().map(|v| v.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{},{},{},{},{}\n", r.x, g, r.phi, r.source.label(), a, r.region));
        }
        out
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain(format!("delta must lie in (0, 1), got {delta}")));
    }
    Ok(())
}

/// Stationary point `x₀(α)`: the unique zero of `x ↦ ∂_α G_{α,δ}(x)` in the
/// gap, by bisection to bracket width `tol`.
pub fn x0_of_alpha(alpha: f64, delta: f64, tol: f64, q: &QuadratureConfig) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::domain("tol must be positive"));
    }
    let gr = TwoIntervalGreen::new(alpha, delta, q)?;
    stationary_point(&gr, tol)
}

fn stationary_point(gr: &TwoIntervalGreen, tol: f64) -> Result<f64> {
    let (a, b) = gr.gap();
    let margin = 2.0 * ENDPOINT_GUARD;
    bisect(|x| gr.dalpha(x), a + margin, b - margin, tol).map_err(|e| match e {
        Error::NoSignChange(m) => Error::NoSignChange(format!(
            "d/dalpha G has no sign change in the gap for alpha = {}, delta = {}: {m}",
            gr.alpha(),
            gr.delta()
        )),
        other => other,
    })
}

/// Points `(x₀(α), G_{α,δ}(x₀(α)))` of the parametric Akhiezer curve; a
/// failed grid point yields `None` instead of aborting the sweep.
pub fn akhiezer_curve(delta: f64, alpha_grid: &[f64], q: &QuadratureConfig) -> Vec<Option<(f64, f64)>> {
    alpha_grid
        .par_iter()
        .map(|&alpha| {
            let gr = TwoIntervalGreen::new(alpha, delta, q).ok()?;
            let x0 = stationary_point(&gr, 1e-12).ok()?;
            Some((x0, gr.green(x0).ok()?))
        })
        .collect()
}

/// Admissible α for which `x` lies in the open gap and `δ-1 < α ≤ 0`:
/// returns `(lo, hi, hi_included)`, or `None` if empty.
fn alpha_range(delta: f64, x: f64) -> Option<(f64, f64, bool)> {
    let lo = (delta - 1.0).max(x - delta);
    let (hi, closed) = if x + delta > 0.0 { (0.0, true) } else { (x + delta, false) };
    (hi > lo).then_some((lo, hi, closed))
}

/// Best interior candidate `sup_α G_{α,δ}(x)` with its maximizer and
/// whether the maximizer sits strictly inside the coarse grid (a
/// stationary point rather than a range end).
fn interior_best(delta: f64, x: f64, cfg: &EnvelopeConfig) -> Result<Option<(f64, f64, bool)>> {
    let Some((lo, hi, closed)) = alpha_range(delta, x) else {
        return Ok(None);
    };
    let n = cfg.alpha_grid;
    let mut grid: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * (i as f64 + 1.0) / (n as f64 + 1.0)).collect();
    if closed {
        grid.push(hi);
    }
    let eval = |alpha: f64| -> Result<f64> { TwoIntervalGreen::new(alpha, delta, &cfg.quad)?.green(x) };
    let values: Vec<f64> = grid.iter().map(|&a| eval(a)).collect::<Result<_>>()?;
    let (ib, &gb) = values
        .iter()
        .enumerate()
        .max_by(|p, q| p.1.total_cmp(q.1))
        .expect("grid is nonempty");
    let left = if ib == 0 { lo } else { grid[ib - 1] };
    let right = if ib + 1 < grid.len() { grid[ib + 1] } else { hi };
    let (ar, gr) = golden_max(eval, left, right, cfg.alpha_tol)?;
    let (alpha, g) = if gr > gb { (ar, gr) } else { (grid[ib], gb) };
    let stationary = ib > 0 && (ib + 1 < grid.len() || closed);
    Ok(Some((alpha, g, stationary)))
}

/// Envelope point, Remez value `G_δ(x)`, and best interior `(G, stationary)`.
type PointParts = (EnvelopePoint, Option<f64>, Option<(f64, bool)>);

fn envelope_point(delta: f64, x: f64, cfg: &EnvelopeConfig) -> Result<PointParts> {
    let remez = if x < -1.0 + 2.0 * delta { Some(green_single_interval(delta, x)?) } else { None };
    let inner = interior_best(delta, x, cfg)?;
    let (phi, source) = match (remez, inner) {
        (None, None) => return Err(Error::Internal(format!("no admissible configuration for x = {x}"))),
        (Some(r), None) => (r, Source::Remez),
        (None, Some((alpha, g, _))) => (g, Source::Akhiezer { alpha }),
        (Some(r), Some((alpha, g, _))) => {
            if (r - g).abs() < cfg.tie_tol {
                (r.max(g), Source::Tie { alpha })
            } else if r > g {
                (r, Source::Remez)
            } else {
                (g, Source::Akhiezer { alpha })
            }
        }
    };
    let point = EnvelopePoint { x, phi, source, region: Region::Unset };
    Ok((point, remez, inner.map(|(_, g, s)| (g, s))))
}

/// `Φ_δ(x)` with the realizing configuration. Accepts `x ∈ [-1, 0]`; at
/// `x = -1` only the Remez branch exists.
pub fn upper_envelope(delta: f64, x: f64, cfg: &EnvelopeConfig) -> Result<EnvelopePoint> {
    check_delta(delta)?;
    cfg.validate()?;
    if !(-1.0..=0.0).contains(&x) {
        return Err(Error::domain(format!("x must lie in [-1, 0], got {x}")));
    }
    Ok(envelope_point(delta, x, cfg)?.0)
}

/// `G_δ(x) - sup_{interior α} G_{α,δ}(x)`; positive where Remez wins.
fn branch_difference(delta: f64, x: f64, cfg: &EnvelopeConfig) -> Result<f64> {
    let r = green_single_interval(delta, x)?;
    Ok(match interior_best(delta, x, cfg)? {
        Some((_, g, _)) => r - g,
        None => r,
    })
}

/// Switching point `x_s(δ)`: the rightmost `x < min(0, -1+2δ)` where the
/// Remez branch stops dominating the interior Akhiezer branch.
pub fn switching_point(delta: f64, cfg: &EnvelopeConfig) -> Result<f64> {
    check_delta(delta)?;
    cfg.validate()?;
    let top = (-1.0 + 2.0 * delta).min(0.0);
    let m = cfg.scan_points;
    let xs: Vec<f64> = (1..=m).map(|i| -1.0 + (top + 1.0) * i as f64 / (m as f64 + 1.0)).collect();
    let diffs: Vec<f64> = xs.par_iter().map(|&x| branch_difference(delta, x, cfg)).collect::<Result<_>>()?;
    let k = (0..m - 1)
        .rev()
        .find(|&i| diffs[i] > 0.0 && diffs[i + 1] <= 0.0)
        .ok_or_else(|| Error::NoSignChange(format!("no switching point on (-1, {top}) for delta = {delta}")))?;
    bisect(|x| branch_difference(delta, x, cfg), xs[k], xs[k + 1], cfg.root_tol.max(1e-11))
}

/// `x_*(δ) = inf_α x₀(α)` over `α ∈ [δ-1+1e-8, 0]`.
pub fn x_star(delta: f64, cfg: &EnvelopeConfig) -> Result<f64> {
    check_delta(delta)?;
    cfg.validate()?;
    let lo = delta - 1.0 + 1e-8;
    let m = cfg.scan_points;
    let grid: Vec<f64> = (0..m).map(|i| lo + (0.0 - lo) * i as f64 / (m as f64 - 1.0)).collect();
    let x0 = |alpha: f64| x0_of_alpha(alpha, delta, cfg.root_tol, &cfg.quad);
    let vals: Vec<f64> = grid.par_iter().map(|&a| x0(a)).collect::<Result<_>>()?;
    let (i, &best) = vals.iter().enumerate().min_by(|p, q| p.1.total_cmp(q.1)).expect("grid is nonempty");
    let left = grid[i.saturating_sub(1)];
    let right = grid[(i + 1).min(m - 1)];
    let (_, neg) = golden_max(|a| x0(a).map(|v| -v), left, right, 1e-9)?;
    Ok(best.min(-neg))
}

/// `δ_*`, the root in `(0, 1)` of `δ²(1+δ) = 1-δ`; equivalently where
/// `G_δ(0) = G_{0,δ}(0)`. Bisects to full precision and checks that the
/// residual `|δ² - (1-δ)/(1+δ)|` is within `tol`.
pub fn delta_star(tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::domain("tol must be positive"));
    }
    let f = |d: f64| d * d * (1.0 + d) - (1.0 - d);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    let residual = (root * root - (1.0 - root) / (1.0 + root)).abs();
    if residual > tol {
        return Err(Error::Internal(format!("delta_star residual {residual:e} exceeds {tol:e}")));
    }
    Ok(root)
}

pub fn classify(x: f64, delta: f64, x_star: f64, x_s: f64) -> Region {
    if x > -1.0 + 2.0 * delta {
        Region::A
    } else if x >= x_s {
        Region::B
    } else if x > x_star {
        Region::C
    } else {
        Region::D
    }
}

/// Diagram rows on `x_grid_size` uniform points of `[-1, 0]` plus the
/// breakpoints `x_*`, `x_s`, `-1+2δ` (those inside `[-1, 0]`), sorted by x.
pub fn diagram(delta: f64, x_grid_size: usize, cfg: &EnvelopeConfig) -> Result<Diagram> {
    check_delta(delta)?;
    cfg.validate()?;
    if x_grid_size < 2 {
        return Err(Error::domain("x_grid_size must be at least 2"));
    }
    let four_regions = delta < 0.5;
    let (xs_star, xs_switch, warning) = if four_regions {
        let xst = x_star(delta, cfg)?;
        let xsw = switching_point(delta, cfg)?;
        let warning = (!(xst < xsw)).then(|| format!("x_* = {xst} is not below x_s = {xsw}"));
        (Some(xst), Some(xsw), warning)
    } else {
        (
            x_star(delta, cfg).ok(),
            switching_point(delta, cfg).ok(),
            Some(format!("delta = {delta} >= 0.5: the four-region taxonomy does not apply, regions unset")),
        )
    };

    let mut xs: Vec<f64> = (0..x_grid_size).map(|i| -1.0 + i as f64 / (x_grid_size as f64 - 1.0)).collect();
    for b in [xs_star, xs_switch, Some(-1.0 + 2.0 * delta)].into_iter().flatten() {
        if (-1.0..=0.0).contains(&b) {
            xs.push(b);
        }
    }
    xs.sort_by(f64::total_cmp);

    let rows = xs
        .par_iter()
        .map(|&x| {
            let (p, remez, inner) = envelope_point(delta, x, cfg)?;
            let (curve_x0, curve_y) = match inner {
                Some((g, true)) => (Some(x), Some(g)),
                _ => (None, None),
            };
            let region = match (four_regions, xs_star, xs_switch) {
                (true, Some(a), Some(b)) if a < b => classify(x, delta, a, b),
                _ => Region::Unset,
            };
            Ok(DiagramRow { x, g_remez: remez, curve_x0, curve_y, phi: p.phi, source: p.source, region })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Diagram { delta, x_star: xs_star, x_s: xs_switch, warning, rows })
}

//! Finite-degree ground truth
//! `M_n(x₀, E) = sup { |P(x₀)| : deg P ≤ n, |P| ≤ 1 on E }`.
//!
//! On a finite grid `X ⊂ E` this is the linear program
//! `max P(x₀)` s.t. `|P(x)| ≤ 1, x ∈ X`, whose dual is
//! `min Σ|y_i|` s.t. `Σ y_i q(x_i) = q(x₀)` for all `q ∈ 𝒫_n`. A dual basis
//! is a set of `n+1` grid points with `y_i = ℓ_i(x₀)` (Lagrange basis), and
//! the matching primal polynomial interpolates `sign(y_i)` there. The
//! simplex iterates on bases, never forming a coefficient matrix: every
//! quantity comes from barycentric formulas with log-scaled weights, which
//! keeps values like `10^100` at `x₀` harmless. Exchange rounds then add the
//! continuous local maxima of `|P|` on `E` to the grid.

use std::cmp::Ordering;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::chebyshev::ChebPoly;
use crate::interval_sets::{discretize, sort_dedup, CompactSet};
use crate::search::golden_max;
use crate::{Error, Result};

/// A grid point enters the basis when `|P| > 1 + PRICE_TOL` there.
const PRICE_TOL: f64 = 1e-11;

/// Leading coefficient below this fraction of the coefficient norm flags a
/// degree drop.
pub const DEGREE_DEFICIENCY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Grid points per interval; `None` picks `max(64, 20(n+1)/intervals)`.
    pub grid_density: Option<usize>,
    pub refine_rounds: usize,
    pub feas_tol: f64,
    pub value_tol: f64,
    /// Simplex iteration cap per solve; `None` picks `200(n+1) + 1000`.
    pub max_iterations: Option<usize>,
    /// Also compute the n-extension (skipped by value-only sweeps).
    pub compute_extension: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            grid_density: None,
            refine_rounds: 3,
            feas_tol: 1e-9,
            value_tol: 1e-9,
            max_iterations: None,
            compute_extension: true,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.feas_tol > 0.0 && self.value_tol > 0.0) {
            return Err(Error::domain("oracle tolerances must be positive"));
        }
        if matches!(self.grid_density, Some(d) if d < 2) {
            return Err(Error::domain("grid_density must be at least 2"));
        }
        Ok(())
    }

    pub fn density_for(&self, n: usize, e: &CompactSet) -> usize {
        let intervals = e.intervals().iter().filter(|i| !i.is_degenerate()).count().max(1);
        self.grid_density.unwrap_or_else(|| 64.max(20 * (n + 1) / intervals))
    }
}

/// Anything that can be evaluated with its derivative on the real line.
pub trait PolyEval {
    fn value(&self, x: f64) -> f64;
    fn slope(&self, x: f64) -> f64;
}

impl PolyEval for ChebPoly {
    fn value(&self, x: f64) -> f64 {
        self.eval(x)
    }

    fn slope(&self, x: f64) -> f64 {
        self.derivative().eval(x)
    }
}

/// Polynomial interpolating `values` at `nodes`, in barycentric form.
#[derive(Debug, Clone, PartialEq)]
pub struct Interpolant {
    nodes: Vec<f64>,
    values: Vec<f64>,
    /// Weights scaled by `exp(-log_scale)`; true weight = `w · e^{log_scale}`.
    w: Vec<f64>,
    log_scale: f64,
}

/// `(ln|w_j|, sign w_j)` for `w_j = 1/Π_{k≠j}(x_j - x_k)`.
fn log_weights(nodes: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = nodes.len();
    let mut lw = vec![0.0; n];
    let mut sg = vec![1.0; n];
    for j in 0..n {
        let mut acc = 0.0;
        let mut s = 1.0;
        for k in 0..n {
            if k != j {
                let d = nodes[j] - nodes[k];
                acc -= d.abs().ln();
                if d < 0.0 {
                    s = -s;
                }
            }
        }
        lw[j] = acc;
        sg[j] = s;
    }
    (lw, sg)
}

/// `(ln|ℓ(x)|, sign ℓ(x))` for the node polynomial `ℓ(x) = Π (x - x_k)`.
fn log_node_poly(nodes: &[f64], x: f64) -> (f64, f64) {
    let mut acc = 0.0;
    let mut s = 1.0;
    for &xk in nodes {
        let d = x - xk;
        acc += d.abs().ln();
        if d < 0.0 {
            s = -s;
        }
    }
    (acc, s)
}

impl Interpolant {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != values.len() {
            return Err(Error::domain("interpolant needs matching, nonempty nodes and values"));
        }
        let (lw, sg) = log_weights(&nodes);
        let log_scale = lw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w = lw.iter().zip(&sg).map(|(l, s)| s * (l - log_scale).exp()).collect();
        Ok(Interpolant { nodes, values, w, log_scale })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn degree(&self) -> usize {
        self.nodes.len() - 1
    }

    fn node_index(&self, x: f64) -> Option<usize> {
        self.nodes.iter().position(|&xk| xk == x)
    }

    /// Second barycentric form where the Lebesgue function of the nodes is
    /// moderate (on `E` for a good basis); falls back to the first form
    /// when the denominator cancels.
    pub fn value_inside(&self, x: f64) -> f64 {
        if let Some(j) = self.node_index(x) {
            return self.values[j];
        }
        let (mut num, mut den, mut mag) = (0.0, 0.0, 0.0);
        for ((&xj, &wj), &fj) in self.nodes.iter().zip(&self.w).zip(&self.values) {
            let t = wj / (x - xj);
            num += t * fj;
            den += t;
            mag += t.abs();
        }
        if den.abs() > 1e-8 * mag {
            num / den
        } else {
            self.value(x)
        }
    }

    /// `ℓ_j(x) = e^{scale}·out_j` with `max |out_j| = 1`; `x` must not be a
    /// node.
    fn lagrange_scaled(&self, x: f64) -> (Vec<f64>, f64) {
        let (ll, sl) = log_node_poly(&self.nodes, x);
        let logs: Vec<f64> = self.nodes.iter().zip(&self.w).map(|(&xj, &wj)| wj.abs().ln() - (x - xj).abs().ln()).collect();
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let out = self
            .nodes
            .iter()
            .zip(&self.w)
            .zip(&logs)
            .map(|((&xj, &wj), &l)| sl * wj.signum() * (x - xj).signum() * (l - top).exp())
            .collect();
        (out, ll + self.log_scale + top)
    }

    /// First barycentric form in log scale; `(ln|P(x)|, sign P(x))`.
    pub fn log_value(&self, x: f64) -> (f64, f64) {
        if let Some(j) = self.node_index(x) {
            let v = self.values[j];
            return (v.abs().ln(), v.signum());
        }
        let (ll, sl) = log_node_poly(&self.nodes, x);
        let s: f64 = self
            .nodes
            .iter()
            .zip(&self.w)
            .zip(&self.values)
            .map(|((&xj, &wj), &fj)| wj * fj / (x - xj))
            .sum();
        (ll + self.log_scale + s.abs().ln(), sl * s.signum())
    }
}

impl PolyEval for Interpolant {
    fn value(&self, x: f64) -> f64 {
        let (l, s) = self.log_value(x);
        s * l.exp()
    }

    fn slope(&self, x: f64) -> f64 {
        let x = if self.node_index(x).is_some() { x + 1e-13 * x.abs().max(1.0) } else { x };
        let (ll, sl) = log_node_poly(&self.nodes, x);
        let (mut s, mut ds, mut inv) = (0.0, 0.0, 0.0);
        for ((&xj, &wj), &fj) in self.nodes.iter().zip(&self.w).zip(&self.values) {
            let r = 1.0 / (x - xj);
            s += wj * fj * r;
            ds -= wj * fj * r * r;
            inv += r;
        }
        sl * (ll + self.log_scale).exp() * (s * inv + ds)
    }
}

/// Component structure of the n-extension relative to the hull of `E`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseTag {
    RightInterval,
    ExtendRight,
    ExtendLeft,
    LeftInterval,
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalResult {
    /// `M_n(x₀, E)`, reported as `P(x₀) > 0`.
    pub value: f64,
    /// `ln M_n`, finite even when `value` overflows.
    pub log_value: f64,
    pub poly: ChebPoly,
    pub interpolant: Interpolant,
    pub active_points: Vec<f64>,
    pub n_extension: Option<CompactSet>,
    pub case_tag: Option<CaseTag>,
    pub degree_deficient: bool,
    pub iterations: usize,
}

#[derive(Serialize)]
struct ExtremalResultRepr<'a> {
    value: f64,
    log_value: f64,
    degree: usize,
    coeffs: &'a [f64],
    active_points: &'a [f64],
    n_extension: &'a Option<CompactSet>,
    case_tag: Option<CaseTag>,
    degree_deficient: bool,
}

impl Serialize for ExtremalResult {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ExtremalResultRepr {
            value: self.value,
            log_value: self.log_value,
            degree: self.poly.degree(),
            coeffs: self.poly.coeffs(),
            active_points: &self.active_points,
            n_extension: &self.n_extension,
            case_tag: self.case_tag,
            degree_deficient: self.degree_deficient,
        }
        .serialize(s)
    }
}

/// Dual basis state: nodes with `y_i = ℓ_i(x₀)` scaled by `e^{-log_y}`.
struct Basis {
    interp: Interpolant,
    y: Vec<f64>,
    log_y: f64,
}

impl Basis {
    fn new(nodes: Vec<f64>, x0: f64) -> Result<Self> {
        let (lw, sg) = log_weights(&nodes);
        let (ll, sl) = log_node_poly(&nodes, x0);
        let logs: Vec<f64> = nodes.iter().zip(&lw).map(|(&xj, &l)| ll + l - (x0 - xj).abs().ln()).collect();
        let log_y = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !log_y.is_finite() {
            return Err(Error::Internal("dual weights are not finite".into()));
        }
        let y: Vec<f64> = nodes
            .iter()
            .zip(&logs)
            .zip(&sg)
            .map(|((&xj, &l), &s)| sl * s * (x0 - xj).signum() * (l - log_y).exp())
            .collect();
        // signum keeps the sign of weights that underflow to ±0
        let values = y.iter().map(|v| v.signum()).collect();
        Ok(Basis { interp: Interpolant::new(nodes, values)?, y, log_y })
    }

    fn log_value(&self) -> f64 {
        self.log_y + self.y.iter().map(|v| v.abs()).sum::<f64>().ln()
    }
}

/// Dual simplex on the grid starting from `nodes` (n+1 grid points).
fn simplex(grid: &[f64], x0: f64, nodes: Vec<f64>, max_iter: usize) -> Result<(Basis, usize)> {
    let mut basis = Basis::new(nodes, x0)?;
    for it in 0..max_iter {
        let interp = &basis.interp;
        // pricing: most violated grid point
        let mut best: Option<(usize, f64)> = None;
        for (i, &x) in grid.iter().enumerate() {
            if interp.node_index(x).is_some() {
                continue;
            }
            let p = interp.value_inside(x).abs();
            if p > 1.0 + PRICE_TOL && best.is_none_or(|(_, b)| p > b) {
                best = Some((i, p));
            }
        }
        let Some((i_new, _)) = best else {
            return Ok((basis, it));
        };
        let x_new = grid[i_new];
        // ℓ_j(x_new) = e^{l_scale}·l_j; the ratio test runs in those units
        let (l, l_scale) = interp.lagrange_scaled(x_new);
        let p_hat: f64 = l.iter().zip(&interp.values).map(|(a, f)| a * f).sum();
        let sigma = p_hat.signum();
        // long-step ratio test on the piecewise-linear dual objective
        let mut cands: Vec<(f64, usize)> = basis
            .y
            .iter()
            .zip(&l)
            .enumerate()
            .filter(|(_, (y, lj))| **lj != 0.0 && y.signum() == (sigma * **lj).signum())
            .map(|(j, (y, lj))| (y.abs() / lj.abs(), j))
            .collect();
        cands.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
        let mut slope = (-l_scale).exp() - p_hat.abs();
        let mut leave = None;
        for &(_, j) in &cands {
            slope += 2.0 * l[j].abs();
            if slope >= 0.0 {
                leave = Some(j);
                break;
            }
        }
        let j = leave.ok_or_else(|| Error::Internal("ratio test found no leaving point".into()))?;
        let mut nodes = basis.interp.nodes.clone();
        nodes[j] = x_new;
        nodes.sort_by(f64::total_cmp);
        basis = Basis::new(nodes, x0)?;
    }
    Err(Error::Internal(format!("simplex did not converge in {max_iter} iterations")))
}

/// `n+1` Chebyshev extrema on the hull of the grid, snapped to distinct
/// grid points.
fn initial_nodes(grid: &[f64], n: usize) -> Vec<f64> {
    let (lo, hi) = (grid[0], grid[grid.len() - 1]);
    let mut used = vec![false; grid.len()];
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let t = if n == 0 { 0.0 } else { -(PI * k as f64 / n as f64).cos() };
        let target = 0.5 * (lo + hi) + 0.5 * (hi - lo) * t;
        let pos = grid.partition_point(|&g| g < target);
        // nearest unused index around pos
        let mut best: Option<usize> = None;
        for d in 0..grid.len() {
            for i in [pos.checked_sub(d + 1), pos.checked_add(d)].into_iter().flatten() {
                if i < grid.len() && !used[i] && best.is_none_or(|b| (grid[i] - target).abs() < (grid[b] - target).abs()) {
                    best = Some(i);
                }
            }
            if best.is_some() {
                break;
            }
        }
        let i = best.expect("grid has at least n+1 points");
        used[i] = true;
        out.push(grid[i]);
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Continuous local maxima of `|P|` on `E`, seeded at discrete maxima of
/// the grid.
fn local_maxima(p: &Interpolant, e: &CompactSet, grid: &[f64]) -> Vec<f64> {
    let mut found = Vec::new();
    for iv in e.intervals() {
        let pts: Vec<f64> = grid.iter().copied().filter(|&x| iv.contains(x)).collect();
        if pts.len() < 3 {
            continue;
        }
        let vals: Vec<f64> = pts.iter().map(|&x| p.value_inside(x).abs()).collect();
        for i in 1..pts.len() - 1 {
            if vals[i] >= vals[i - 1] && vals[i] >= vals[i + 1] {
                let (lo, hi) = (pts[i - 1], pts[i + 1]);
                if let Ok((x, _)) = golden_max(|x| Ok(p.value_inside(x).abs()), lo, hi, 1e-15 * (1.0 + hi.abs())) {
                    found.push(x);
                }
            }
        }
    }
    found
}

/// Chebyshev coefficients of `p` on `[-1, 1]` from Lobatto samples.
fn to_cheb(p: &Interpolant) -> Result<ChebPoly> {
    let n = p.degree();
    if n == 0 {
        return ChebPoly::new(vec![p.values[0]]);
    }
    let f: Vec<f64> = (0..=n).map(|k| p.value((PI * k as f64 / n as f64).cos())).collect();
    let nf = n as f64;
    let coeffs = (0..=n)
        .map(|j| {
            let s: f64 = (0..=n)
                .map(|k| {
                    let w = if k == 0 || k == n { 0.5 } else { 1.0 };
                    w * f[k] * (PI * (j * k) as f64 / nf).cos()
                })
                .sum();
            let c = 2.0 * s / nf;
            if j == 0 || j == n {
                0.5 * c
            } else {
                c
            }
        })
        .collect();
    ChebPoly::new(coeffs)
}

fn trivial_result(n: usize, x0: f64) -> Result<ExtremalResult> {
    let mut coeffs = vec![0.0; n + 1];
    coeffs[0] = 1.0;
    Ok(ExtremalResult {
        value: 1.0,
        log_value: 0.0,
        poly: ChebPoly::new(coeffs)?,
        interpolant: Interpolant::new(vec![x0], vec![1.0])?,
        active_points: vec![x0],
        n_extension: None,
        case_tag: None,
        degree_deficient: n > 0,
        iterations: 0,
    })
}

fn solve_basis(e: &CompactSet, x0: f64, n: usize, cfg: &OracleConfig) -> Result<(Basis, usize)> {
    let mut grid = discretize(e, cfg.density_for(n, e));
    if grid.len() < n + 1 {
        return Err(Error::Unbounded(format!(
            "grid has {} points but degree {n} needs at least {}; increase grid_density",
            grid.len(),
            n + 1
        )));
    }
    let max_iter = cfg.max_iterations.unwrap_or(200 * (n + 1) + 1000);
    let (mut basis, mut iters) = simplex(&grid, x0, initial_nodes(&grid, n), max_iter)?;
    for _ in 0..cfg.refine_rounds {
        let extra = local_maxima(&basis.interp, e, &grid);
        let worst = extra.iter().map(|&x| basis.interp.value_inside(x).abs()).fold(0.0, f64::max);
        if worst <= 1.0 + PRICE_TOL {
            break;
        }
        grid.extend(extra);
        sort_dedup(&mut grid, 0.0);
        let (b, it) = simplex(&grid, x0, basis.interp.nodes.clone(), max_iter)?;
        basis = b;
        iters += it;
    }
    Ok((basis, iters))
}

fn check_inputs(e: &CompactSet, x0: f64, cfg: &OracleConfig) -> Result<()> {
    cfg.validate()?;
    if e.is_empty() {
        return Err(Error::domain("E must be nonempty"));
    }
    if !x0.is_finite() {
        return Err(Error::domain(format!("x0 must be finite, got {x0}")));
    }
    Ok(())
}

/// `(M_n, ln M_n)` without building coefficients or the n-extension.
pub fn extremal_value(e: &CompactSet, x0: f64, n: usize, cfg: &OracleConfig) -> Result<(f64, f64)> {
    check_inputs(e, x0, cfg)?;
    if e.contains(x0) || n == 0 {
        return Ok((1.0, 0.0));
    }
    let (basis, _) = solve_basis(e, x0, n, cfg)?;
    let lv = basis.log_value();
    Ok((lv.exp(), lv))
}

pub fn solve_extremal(e: &CompactSet, x0: f64, n: usize, cfg: &OracleConfig) -> Result<ExtremalResult> {
    check_inputs(e, x0, cfg)?;
    if e.contains(x0) || n == 0 {
        return trivial_result(n, x0);
    }
    let (basis, iterations) = solve_basis(e, x0, n, cfg)?;
    let log_value = basis.log_value();
    let interp = basis.interp;
    let poly = to_cheb(&interp)?;
    let degree_deficient = poly.is_degree_deficient(DEGREE_DEFICIENCY_TOL);
    let (n_extension, case_tag) = if cfg.compute_extension {
        let (set, tag) = n_extension(&interp, e, cfg.feas_tol.max(1e-9))?;
        (Some(set), Some(tag))
    } else {
        (None, None)
    };
    Ok(ExtremalResult {
        value: log_value.exp(),
        log_value,
        poly,
        active_points: interp.nodes.clone(),
        interpolant: interp,
        n_extension,
        case_tag,
        degree_deficient,
        iterations,
    })
}

fn bisect_level<P: PolyEval + ?Sized>(p: &P, level: f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = p.value(lo) - level;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (p.value(mid) - level).signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `P⁻¹([-1, 1]) ∩ ℝ` and its shape relative to the hull of `E`.
///
/// Critical points are located from sign changes of `P'` on a dense grid
/// over `[-1, 1]` and on `x = ±1/t`, `t ∈ [1e-3, 1]`; between consecutive
/// critical points `P` is monotone, so each piece contributes at most one
/// interval, whose ends are found by bisection on `P = ±1`.
pub fn n_extension<P: PolyEval + ?Sized>(p: &P, e: &CompactSet, tol: f64) -> Result<(CompactSet, CaseTag)> {
    let hull = e.hull().ok_or_else(|| Error::domain("E must be nonempty"))?;
    let m = 4000;
    let mut xs: Vec<f64> = (0..=m).map(|k| -(PI * k as f64 / m as f64).cos()).collect();
    for k in 0..400 {
        let t = 1e-3 + (1.0 - 1e-3) * k as f64 / 400.0;
        xs.push(1.0 / t);
        xs.push(-1.0 / t);
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();

    let ds: Vec<f64> = xs.iter().map(|&x| p.slope(x)).collect();
    let mut crit = Vec::new();
    for i in 0..xs.len() - 1 {
        if ds[i] == 0.0 {
            crit.push(xs[i]);
        } else if ds[i].signum() != ds[i + 1].signum() && ds[i + 1] != 0.0 {
            let (mut lo, mut hi) = (xs[i], xs[i + 1]);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if p.slope(mid).signum() == ds[i].signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            crit.push(0.5 * (lo + hi));
        }
    }

    // beyond the outermost critical point P is monotone; walk out until it
    // has left [-1, 1] moving away from its value there
    let first = crit.first().copied().unwrap_or(hull.lo()).min(hull.lo());
    let last = crit.last().copied().unwrap_or(hull.hi()).max(hull.hi());
    let escaped = |x: f64, anchor: f64| {
        let (v, va) = (p.value(x), p.value(anchor));
        v.abs() > 1.0 + tol && (v - va) * v.signum() > 0.0
    };
    let mut left = first - 1e-3;
    while !escaped(left, first) {
        left -= 1.0 + left.abs();
        if left < -1e6 {
            return Err(Error::RootIsolation("|P| stays below 1 far to the left".into()));
        }
    }
    let mut right = last + 1e-3;
    while !escaped(right, last) {
        right += 1.0 + right.abs();
        if right > 1e6 {
            return Err(Error::RootIsolation("|P| stays below 1 far to the right".into()));
        }
    }

    let mut breaks = vec![left];
    breaks.extend(crit.iter().copied().filter(|&c| c > left && c < right));
    breaks.push(right);

    let mut pieces: Vec<(f64, f64)> = Vec::new();
    for w in breaks.windows(2) {
        let (u, v) = (w[0], w[1]);
        let (pu, pv) = (p.value(u), p.value(v));
        let increasing = pv >= pu;
        let (lo_val, hi_val) = if increasing { (pu, pv) } else { (pv, pu) };
        if lo_val > 1.0 + tol || hi_val < -1.0 - tol {
            continue;
        }
        // preimage of [-1, 1] under a monotone map is one interval
        let at_minus = if lo_val >= -1.0 - tol { None } else { Some(bisect_level(p, -1.0, u, v)) };
        let at_plus = if hi_val <= 1.0 + tol { None } else { Some(bisect_level(p, 1.0, u, v)) };
        let (s, t) = if increasing {
            (at_minus.unwrap_or(u), at_plus.unwrap_or(v))
        } else {
            (at_plus.unwrap_or(u), at_minus.unwrap_or(v))
        };
        if s <= t {
            pieces.push((s, t));
        }
    }
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (s, t) in pieces {
        match merged.last_mut() {
            Some(last) if s <= last.1 + tol => last.1 = last.1.max(t),
            _ => merged.push((s, t)),
        }
    }
    let set = CompactSet::from_pairs(&merged)?;

    let (h_lo, h_hi) = (hull.lo(), hull.hi());
    let mut tags: Vec<(f64, CaseTag)> = Vec::new();
    for &(s, t) in &merged {
        if s > h_hi + tol {
            tags.push((t - s, CaseTag::RightInterval));
        } else if t < h_lo - tol {
            tags.push((t - s, CaseTag::LeftInterval));
        } else {
            if t > h_hi + tol {
                tags.push((t - h_hi, CaseTag::ExtendRight));
            }
            if s < h_lo - tol {
                tags.push((h_lo - s, CaseTag::ExtendLeft));
            }
        }
    }
    let tag = tags
        .into_iter()
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, t)| t)
        .unwrap_or(CaseTag::None);
    Ok((set, tag))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub max_abs: f64,
    pub location: f64,
    /// `max(0, max_abs - 1)`.
    pub violation: f64,
    pub feasible: bool,
}

/// Max of `|P|` over `probes` points spread over `E` by length (interval
/// ends always included).
pub fn verify_poly_feasibility<P: PolyEval + ?Sized>(p: &P, e: &CompactSet, probes: usize, feas_tol: f64) -> FeasibilityReport {
    let total = e.measure();
    let mut max_abs = 0.0f64;
    let mut location = f64::NAN;
    let mut check = |x: f64| {
        let v = p.value(x).abs();
        if v > max_abs || location.is_nan() {
            max_abs = v;
            location = x;
        }
    };
    for iv in e.intervals() {
        check(iv.lo());
        check(iv.hi());
        if total > 0.0 && !iv.is_degenerate() {
            let k = ((probes as f64) * iv.len() / total).ceil() as usize;
            for i in 1..k {
                check(iv.lo() + iv.len() * i as f64 / k as f64);
            }
        }
    }
    let violation = (max_abs - 1.0).max(0.0);
    FeasibilityReport { max_abs, location, violation, feasible: violation <= feas_tol }
}

pub fn verify_feasibility(result: &ExtremalResult, e: &CompactSet, probes: usize, feas_tol: f64) -> FeasibilityReport {
    verify_poly_feasibility(&result.interpolant, e, probes, feas_tol)
}

//! Self-checks grouped into suites; each check reports pass/fail with a
//! one-line detail.

use andrievskii::chebyshev::{cheb_t, remez_constant, remez_poly_value};
use andrievskii::envelope::{delta_star, diagram, x0_of_alpha, Region, Source};
use andrievskii::extremal::solve_extremal;
use andrievskii::green::{c_dot, critical_point_c, green_single_interval, green_two_interval, TwoIntervalGreen};
use andrievskii::interval_sets::{make_gap_set, CompactSet, GapParams};
use andrievskii::problem::{brute_force_theorem1, remez_residuals, totik_widom_residuals};
use andrievskii::Result;

use crate::config::Settings;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    ClosedForms,
    Green,
    Envelope,
    BruteForce,
    Residuals,
    All,
}

pub struct Check {
    pub name: &'static str,
    pub ok: bool,
    pub detail: String,
}

pub struct Options {
    pub seed: u64,
    pub trials: usize,
    pub n_max: usize,
}

fn check(name: &'static str, ok: bool, detail: String) -> Check {
    Check { name, ok, detail }
}

pub fn run(suite: Suite, s: &Settings, opt: &Options) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let all = suite == Suite::All;
    if all || suite == Suite::ClosedForms {
        out.extend(closed_forms(s)?);
    }
    if all || suite == Suite::Green {
        out.extend(green(s)?);
    }
    if all || suite == Suite::Envelope {
        out.extend(envelope(s)?);
    }
    if all || suite == Suite::BruteForce {
        let r = brute_force_theorem1(-0.1, 0.4, 6, opt.trials, opt.seed, &s.problem)?;
        out.push(check(
            "brute_force",
            r.passed(),
            format!("{} trials (seed {}), {} violations, max ratio {:.6}", r.trials, r.seed, r.violations.len(), r.max_ratio),
        ));
    }
    if all || suite == Suite::Residuals {
        out.extend(residuals(s, opt)?);
    }
    Ok(out)
}

fn closed_forms(s: &Settings) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let d = delta_star(1e-8)?;
    out.push(check("delta_star", (d - 0.543689).abs() <= 1e-5, format!("{d:.9}")));

    let t3 = cheb_t(3, 5.0 / 3.0);
    out.push(check("cheb_t(3, 5/3)", (t3 - 365.0 / 27.0).abs() < 1e-12, format!("{t3}")));

    let rc = remez_constant(10, 0.4);
    let rp = remez_poly_value(10, 0.4, -1.0);
    out.push(check("remez_constant", (rc - rp).abs() <= 1e-12 * rc, format!("{rc:e}")));

    let mut cfg = s.oracle();
    cfg.compute_extension = false;
    let e = CompactSet::from_pairs(&[(-0.2, 1.0)])?;
    let v = solve_extremal(&e, -1.0, 6, &cfg)?.value;
    let want = cheb_t(6, 7.0 / 3.0);
    out.push(check("lp_remez_n6", (v - want).abs() <= 1e-9 * want, format!("{v} vs {want}")));

    let e = make_gap_set(GapParams::new(0.0, 0.5)?)?;
    let v = solve_extremal(&e, 0.0, 6, &cfg)?.value;
    out.push(check("lp_akhiezer_n6", (v - t3).abs() <= 1e-9 * t3, format!("{v} vs {t3}")));

    let g = green_two_interval(0.0, 0.5, 0.0, &s.quad)?;
    out.push(check("green_symmetric", (g - 0.5 * 3f64.ln()).abs() <= 1e-8, format!("{g}")));
    Ok(out)
}

fn green(s: &Settings) -> Result<Vec<Check>> {
    let q = &s.quad;
    let mut out = Vec::new();
    let mut worst = 0.0f64;
    for k in 1..=9 {
        let delta = 0.1 * k as f64;
        worst = worst.max((green_two_interval(0.0, delta, 0.0, q)? - 0.5 * ((1.0 + delta) / (1.0 - delta)).ln()).abs());
    }
    out.push(check("symmetric_values", worst <= 1e-8, format!("max error {worst:.2e}")));

    let mut worst = 0.0f64;
    for delta in [0.3, 0.4] {
        let alpha = -1.0 + delta + 1e-6;
        let (a, b) = (alpha - delta, -1.0 + 2.0 * delta);
        for i in 1..=10 {
            let x = a + (b - a) * i as f64 / 11.0;
            worst = worst.max((green_two_interval(alpha, delta, x, q)? - green_single_interval(delta, x)?).abs());
        }
    }
    out.push(check("boundary_limit", worst <= 1e-3, format!("max difference {worst:.4} (bound 1e-3)")));

    let mut violations = 0;
    for delta in [0.2, 0.35, 0.5, 0.65] {
        for j in 0..5 {
            let alpha = (delta - 1.0) * (0.95 - 0.2 * j as f64);
            let gr = TwoIntervalGreen::new(alpha, delta, q)?;
            let (a, b) = gr.gap();
            let vals = (1..=100).map(|i| gr.dalpha(a + (b - a) * i as f64 / 101.0)).collect::<Result<Vec<f64>>>()?;
            violations += vals.windows(2).filter(|w| w[1] <= w[0]).count();
        }
    }
    out.push(check("dalpha_monotone", violations == 0, format!("{violations} violations over 20 pairs")));

    let h = 1e-5;
    let mut worst = 0.0f64;
    for delta in [0.2, 0.35, 0.5, 0.65] {
        for j in 0..5 {
            let alpha = (delta - 1.0) * (0.85 - 0.17 * j as f64);
            let fd = (critical_point_c(alpha + h, delta, q)? - critical_point_c(alpha - h, delta, q)?) / (2.0 * h);
            worst = worst.max((c_dot(alpha, delta, q)? - fd).abs());
        }
    }
    out.push(check("c_dot_vs_fd", worst <= 1e-6, format!("max difference {worst:.1e}")));

    let mut ratios = Vec::new();
    for eps in [1e-1, 10f64.powf(-1.5), 1e-2, 10f64.powf(-2.5), 1e-3] {
        ratios.push(c_dot(-1.0 + 0.4 * (1.0 + 0.5 * eps * eps), 0.4, q)? * (eps * eps.ln()).powi(2));
    }
    out.push(check(
        "c_dot_rate",
        ratios.iter().all(|r| (0.05..=20.0).contains(r)),
        format!("{:?}", ratios.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>()),
    ));
    Ok(out)
}

fn envelope(s: &Settings) -> Result<Vec<Check>> {
    let q = &s.quad;
    let mut out = Vec::new();
    let c = x0_of_alpha(0.0, 0.4, 1e-12, q)?;
    let e = x0_of_alpha(-0.6 + 1e-4, 0.4, 1e-12, q)?;
    out.push(check("stationary_limits", c.abs() <= 1e-8 && (e + 0.2).abs() <= 0.05, format!("x0(0) = {c:.1e}, x0(-0.6+1e-4) = {e:.5}")));

    let d = diagram(0.4, 200, &s.envelope)?;
    let (xs, xw) = (d.x_star.unwrap_or(f64::NAN), d.x_s.unwrap_or(f64::NAN));
    out.push(check("breakpoint_order", -1.0 < xs && xs < xw && xw < -0.2, format!("x_* = {xs:.6}, x_s = {xw:.6}")));
    let bad = d
        .rows
        .iter()
        .filter(|r| match (r.region, r.source) {
            (Region::A | Region::B, Source::Akhiezer { .. }) | (Region::C | Region::D, Source::Remez) => false,
            (_, Source::Tie { .. }) => (r.x - xw).abs() >= 1e-6,
            _ => true,
        })
        .count();
    out.push(check("region_sources", bad == 0, format!("{bad} rows disagree with their region")));
    Ok(out)
}

fn residuals(s: &Settings, opt: &Options) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let r = remez_residuals(-0.95, 0.4, &[25, 50, 100, 200])?;
    let abs: Vec<f64> = r.entries.iter().map(|e| e.residual.abs()).collect();
    out.push(check(
        "remez_residuals",
        abs.windows(2).all(|w| w[1] < w[0]) && abs[3] < 0.05,
        format!("|r_200| = {:.2e}", abs[3]),
    ));
    let ns: Vec<usize> = (1..=opt.n_max / 10).map(|k| 10 * k).collect();
    let t = totik_widom_residuals(-0.1, 0.4, &ns, &s.problem)?;
    let half = ns.get(ns.len() / 2).copied().unwrap_or(0);
    let slope = t.slope_from(half);
    out.push(check(
        "akhiezer_residuals",
        slope.is_some_and(|v| v.abs() < 1e-3),
        format!("slope over n >= {half}: {}", slope.map_or("n/a".into(), |v| format!("{v:.2e}"))),
    ));
    Ok(out)
}

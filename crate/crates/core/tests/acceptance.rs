//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//! Run with `cargo test -p andrievskii --test acceptance -- --nocapture`.

use std::time::Instant;

use andrievskii::chebyshev::cheb_t;
use andrievskii::envelope::{diagram, delta_star, x0_of_alpha, EnvelopeConfig, Region, Source};
use andrievskii::extremal::{solve_extremal, OracleConfig};
use andrievskii::green::{c_dot, critical_point_c, green_single_interval, green_two_interval, TwoIntervalGreen};
use andrievskii::interval_sets::{make_gap_set, CompactSet, GapParams};
use andrievskii::problem::{brute_force_theorem1, remez_residuals, totik_widom_residuals, ProblemConfig};
use andrievskii::quadrature::QuadratureConfig;

fn report(id: u32, name: &str, ok: bool, started: Instant, detail: String) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!("criterion {id:>2} {verdict} {name} ({detail}; {:.2?})", started.elapsed());
    assert!(ok, "criterion {id} ({name}) failed: {detail}");
}

fn q() -> QuadratureConfig {
    QuadratureConfig::default()
}

#[test]
fn criterion_01_delta_star() {
    let t = Instant::now();
    let d = delta_star(1e-8).unwrap();
    // defining equation δ²(1+δ) = 1−δ as an independent check
    let residual = d * d * (1.0 + d) - (1.0 - d);
    let ok = (d - 0.543689).abs() <= 1e-5 && residual.abs() < 1e-12;
    report(1, "delta_star", ok, t, format!("delta_star = {d:.9}, defining residual {residual:.1e}"));
}

#[test]
fn criterion_02_symmetric_green_value() {
    let t = Instant::now();
    let mut worst = 0.0f64;
    for k in 1..=9 {
        let delta = 0.1 * k as f64;
        let g = green_two_interval(0.0, delta, 0.0, &q()).unwrap();
        let want = 0.5 * ((1.0 + delta) / (1.0 - delta)).ln();
        worst = worst.max((g - want).abs());
    }
    report(2, "symmetric Green value", worst <= 1e-8, t, format!("max error {worst:.2e}"));
}

#[test]
fn criterion_03_boundary_limit() {
    let t = Instant::now();
    let mut worst = 0.0f64;
    for delta in [0.3, 0.4] {
        let alpha = -1.0 + delta + 1e-6;
        let (a, b) = (alpha - delta, -1.0 + 2.0 * delta);
        for i in 1..=10 {
            let x = a + (b - a) * i as f64 / 11.0;
            let two = green_two_interval(alpha, delta, x, &q()).unwrap();
            let one = green_single_interval(delta, x).unwrap();
            worst = worst.max((two - one).abs());
        }
    }
    report(3, "boundary limit", worst <= 1e-3, t, format!("max |G_two - G_single| = {worst:.4} against bound 1e-3"));
}

#[test]
fn criterion_04_lp_matches_closed_forms() {
    let t = Instant::now();
    let cfg = OracleConfig { compute_extension: false, ..Default::default() };
    let mut worst = 0.0f64;
    let mut where_ = String::new();
    for delta in [0.2, 0.4] {
        let e = CompactSet::from_pairs(&[(-1.0 + 2.0 * delta, 1.0)]).unwrap();
        for n in 1..=20u32 {
            let v = solve_extremal(&e, -1.0, n as usize, &cfg).unwrap().value;
            let want = cheb_t(n, (1.0 + delta) / (1.0 - delta));
            let rel = (v - want).abs() / want;
            if rel > worst {
                worst = rel;
                where_ = format!("remez n={n} delta={delta}");
            }
        }
    }
    let e = make_gap_set(GapParams::new(0.0, 0.5).unwrap()).unwrap();
    for m in 1..=10u32 {
        let v = solve_extremal(&e, 0.0, 2 * m as usize, &cfg).unwrap().value;
        let want = cheb_t(m, 5.0 / 3.0);
        let rel = (v - want).abs() / want;
        if rel > worst {
            worst = rel;
            where_ = format!("akhiezer 2m={}", 2 * m);
        }
    }
    report(4, "LP vs closed forms", worst <= 1e-9, t, format!("max relative error {worst:.2e} at {where_}"));
}

#[test]
fn criterion_05_dalpha_monotone_in_x() {
    let t = Instant::now();
    let mut violations = 0;
    let mut pairs = 0;
    for delta in [0.2, 0.35, 0.5, 0.65] {
        for j in 0..5 {
            let lo = delta - 1.0;
            let alpha = lo + (0.0 - lo) * (0.05 + 0.2 * j as f64);
            let gr = TwoIntervalGreen::new(alpha, delta, &q()).unwrap();
            let (a, b) = gr.gap();
            let vals: Vec<f64> = (1..=100).map(|i| gr.dalpha(a + (b - a) * i as f64 / 101.0).unwrap()).collect();
            violations += vals.windows(2).filter(|w| w[1] <= w[0]).count();
            pairs += 1;
        }
    }
    report(5, "dG/dalpha increasing in x", violations == 0 && pairs == 20, t, format!("{pairs} pairs, {violations} sign violations"));
}

#[test]
fn criterion_06_stationary_point_limits() {
    let t = Instant::now();
    let mut centre = 0.0f64;
    for delta in [0.2, 0.4, 0.6] {
        centre = centre.max(x0_of_alpha(0.0, delta, 1e-12, &q()).unwrap().abs());
    }
    let edge = x0_of_alpha(-1.0 + 0.4 + 1e-4, 0.4, 1e-12, &q()).unwrap();
    let ok = centre <= 1e-8 && (edge + 0.2).abs() <= 0.05;
    report(6, "stationary-point limits", ok, t, format!("max |x0(0)| = {centre:.1e}, x0(-0.6+1e-4) = {edge:.5}"));
}

#[test]
fn criterion_07_c_dot_consistency_and_rate() {
    let t = Instant::now();
    let h = 1e-5;
    let mut worst = 0.0f64;
    for (i, delta) in [0.2, 0.35, 0.5, 0.65].into_iter().enumerate() {
        for j in 0..5 {
            let lo = delta - 1.0;
            let alpha = lo + (0.0 - lo) * (0.15 + 0.17 * j as f64) + 0.01 * i as f64;
            let fd = (critical_point_c(alpha + h, delta, &q()).unwrap() - critical_point_c(alpha - h, delta, &q()).unwrap()) / (2.0 * h);
            worst = worst.max((c_dot(alpha, delta, &q()).unwrap() - fd).abs());
        }
    }
    let delta = 0.4;
    let ratios: Vec<f64> = [1e-1, 10f64.powf(-1.5), 1e-2, 10f64.powf(-2.5), 1e-3]
        .into_iter()
        .map(|eps: f64| c_dot(-1.0 + delta * (1.0 + 0.5 * eps * eps), delta, &q()).unwrap() * (eps * eps.ln()).powi(2))
        .collect();
    let in_bracket = ratios.iter().all(|r| (0.05..=20.0).contains(r));
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.3}")).collect();
    report(7, "c_dot consistency and rate", worst <= 1e-6 && in_bracket, t, format!("max |c_dot - FD| = {worst:.1e}, ratios [{}]", shown.join(", ")));
}

#[test]
fn criterion_08_totik_widom_remez_branch() {
    let t = Instant::now();
    let s = remez_residuals(-0.95, 0.4, &[25, 50, 100, 200]).unwrap();
    let r: Vec<f64> = s.entries.iter().map(|e| e.residual.abs()).collect();
    let decreasing = r.windows(2).all(|w| w[1] < w[0]);
    let last = r[r.len() - 1];
    let ok = decreasing && last < 0.05 && t.elapsed().as_secs_f64() < 1.0;
    report(8, "Totik-Widom Remez branch", ok, t, format!("|r_n| = {:?}", r.iter().map(|v| format!("{v:.3e}")).collect::<Vec<_>>()));
}

#[test]
fn criterion_09_totik_widom_akhiezer_branch() {
    let t = Instant::now();
    let ns: Vec<usize> = (1..=10).map(|k| 10 * k).collect();
    let s = totik_widom_residuals(-0.1, 0.4, &ns, &ProblemConfig::default()).unwrap();
    let slope = s.slope_from(50).unwrap();
    let r: Vec<String> = s.entries.iter().map(|e| format!("{:.4}", e.residual)).collect();
    report(9, "Totik-Widom Akhiezer branch", slope.abs() < 1e-3, t, format!("slope over n >= 50 = {slope:.2e}, r_n = [{}]", r.join(", ")));
}

#[test]
fn criterion_10_brute_force() {
    let t = Instant::now();
    let r = brute_force_theorem1(-0.1, 0.4, 6, 200, 20240601, &ProblemConfig::default()).unwrap();
    let again = brute_force_theorem1(-0.1, 0.4, 6, 200, 20240601, &ProblemConfig::default()).unwrap();
    let ok = r.passed() && r == again;
    report(10, "brute-force extremal configurations", ok, t, format!("{} trials, {} violations, max ratio {:.6}", r.trials, r.violations.len(), r.max_ratio));
}

#[test]
fn criterion_11_diagram_structure() {
    let t = Instant::now();
    let delta = 0.4;
    let d = diagram(delta, 400, &EnvelopeConfig::default()).unwrap();
    let (xs, xsw) = (d.x_star.unwrap(), d.x_s.unwrap());
    let ordered = -1.0 < xs && xs < xsw && xsw < -0.2 && -0.2 < 0.0;
    let mut wrong = Vec::new();
    for row in &d.rows {
        let ok = match (row.region, row.source) {
            (Region::A | Region::B, Source::Akhiezer { .. }) => true,
            (Region::C | Region::D, Source::Remez) => true,
            (_, Source::Tie { .. }) => (row.x - xsw).abs() < 1e-6,
            _ => false,
        };
        if !ok {
            wrong.push(format!("x={:.4} region={} source={}", row.x, row.region, row.source.label()));
        }
    }
    let counts: Vec<usize> = [Region::A, Region::B, Region::C, Region::D]
        .iter()
        .map(|r| d.rows.iter().filter(|row| row.region == *r).count())
        .collect();
    let ok = ordered && wrong.is_empty() && counts.iter().all(|&c| c > 0);
    report(
        11,
        "diagram structure",
        ok,
        t,
        format!("x_* = {xs:.6}, x_s = {xsw:.6}, rows per region a/b/c/d = {counts:?}, mismatches {wrong:?}"),
    );
}

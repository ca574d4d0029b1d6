//! Hand-written SVG for the asymptotic diagram.

use std::fmt::Write;

use andrievskii::envelope::Diagram;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 40.0;

struct Frame {
    ymax: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x + 1.0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - y / self.ymax * (HEIGHT - TOP - BOTTOM)
    }
}

fn points(frame: &Frame, pts: &[(f64, f64)]) -> String {
    pts.iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y)))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Data window is `[-1, 0] × [0, ymax]`, mapped onto an 800×500 canvas.
/// `curve` is the parametric Akhiezer curve `(x₀(α), G_{α,δ}(x₀(α)))`.
pub fn render(d: &Diagram, curve: &[(f64, f64)]) -> String {
    let remez: Vec<(f64, f64)> = d.rows.iter().filter_map(|r| r.g_remez.map(|g| (r.x, g))).collect();
    let envelope: Vec<(f64, f64)> = d.rows.iter().map(|r| (r.x, r.phi)).collect();
    let curve: Vec<(f64, f64)> = curve.iter().copied().filter(|(x, y)| (-1.0..=0.0).contains(x) && y.is_finite()).collect();
    let top = envelope.iter().chain(&curve).map(|p| p.1).fold(0.0f64, f64::max);
    let frame = Frame { ymax: if top > 0.0 { 1.05 * top } else { 1.0 } };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, "<title>Asymptotic diagram, delta = {}</title>", d.delta);
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);

    // axes and ticks every 0.1 in x
    let (x0, x1, y0, y1) = (frame.px(-1.0), frame.px(0.0), frame.py(0.0), frame.py(frame.ymax));
    let mut axes = format!("M{x0:.2},{y1:.2} L{x0:.2},{y0:.2} L{x1:.2},{y0:.2}");
    for k in 0..=10 {
        let xp = frame.px(-1.0 + 0.1 * k as f64);
        let _ = write!(axes, " M{xp:.2},{y0:.2} L{xp:.2},{:.2}", y0 + 5.0);
    }
    let _ = writeln!(s, r#"<path class="axes" d="{axes}" stroke="black" fill="none"/>"#);
    for k in 0..=10 {
        let xv = -1.0 + 0.1 * k as f64;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">{:.1}</text>"#,
            frame.px(xv),
            y0 + 18.0,
            xv
        );
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="11">{:.3}</text>"#, 5.0, y1 + 4.0, frame.ymax);

    let _ = writeln!(s, r#"<polyline class="remez" points="{}" stroke="steelblue" fill="none"/>"#, points(&frame, &remez));
    let _ = writeln!(s, r#"<polyline class="akhiezer" points="{}" stroke="darkorange" fill="none"/>"#, points(&frame, &curve));
    let env_path: String = envelope
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| format!("{}{:.2},{:.2}", if i == 0 { "M" } else { " L" }, frame.px(x), frame.py(y)))
        .collect();
    let _ = writeln!(s, r#"<path class="envelope" d="{env_path}" stroke="black" stroke-width="2" stroke-dasharray="6,3" fill="none"/>"#);

    for (label, x) in [("x_*", d.x_star), ("x_s", d.x_s), ("-1+2delta", Some(-1.0 + 2.0 * d.delta))] {
        if let Some(x) = x.filter(|x| (-1.0..=0.0).contains(x)) {
            let xp = frame.px(x);
            let _ = writeln!(
                s,
                r#"<line class="marker" x1="{xp:.2}" y1="{y0:.2}" x2="{xp:.2}" y2="{y1:.2}" stroke="gray" stroke-dasharray="2,2"><title>{label} = {x}</title></line>"#
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

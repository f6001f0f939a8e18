//! Unit spheres of planar quasinorms as SVG or CSV.

use std::f64::consts::PI;
use std::fmt::Write;

use normspace::NormSpec;

pub const ANGLES: usize = 720;
pub const CANVAS: u32 = 800;

const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];
const DASHES: [&str; 4] = ["none", "8 4", "2 3", "12 3 2 3"];

/// Points `u/‖u‖` for `u = (cos t, sin t)`, `t = 2πk/720`.
pub fn sphere(spec: &NormSpec) -> Vec<(f64, [f64; 2])> {
    (0..ANGLES)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / ANGLES as f64;
            let u = [t.cos(), t.sin()];
            let r = spec.value(&u);
            (t, [u[0] / r, u[1] / r])
        })
        .collect()
}

pub fn csv(specs: &[NormSpec]) -> String {
    let mut out = String::from("angle,x,y,spec_id\n");
    for (id, s) in specs.iter().enumerate() {
        for (t, p) in sphere(s) {
            writeln!(out, "{t:.9},{:.9},{:.9},{id}", p[0], p[1]).unwrap();
        }
    }
    out
}

pub fn svg(specs: &[NormSpec], labels: &[String]) -> String {
    let curves: Vec<Vec<(f64, [f64; 2])>> = specs.iter().map(sphere).collect();
    let reach = curves
        .iter()
        .flatten()
        .map(|(_, p)| p[0].abs().max(p[1].abs()))
        .fold(0.0, f64::max);
    let r = 1.05 * reach;
    let stroke = r / 200.0;
    let font = r / 18.0;

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS}" height="{CANVAS}" viewBox="{:.6} {:.6} {:.6} {:.6}">"#,
        -r,
        -r,
        2.0 * r,
        2.0 * r
    )
    .unwrap();
    writeln!(
        out,
        r#"<rect x="{:.6}" y="{:.6}" width="{:.6}" height="{:.6}" fill="white"/>"#,
        -r,
        -r,
        2.0 * r,
        2.0 * r
    )
    .unwrap();
    writeln!(
        out,
        r##"<g stroke="#bbbbbb" stroke-width="{:.6}"><line x1="{:.6}" y1="0" x2="{:.6}" y2="0"/><line x1="0" y1="{:.6}" x2="0" y2="{:.6}"/></g>"##,
        stroke / 2.0,
        -r,
        r,
        -r,
        r
    )
    .unwrap();
    for (i, curve) in curves.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let dash = DASHES[i % DASHES.len()];
        let dash_attr = if dash == "none" {
            String::new()
        } else {
            let scaled: Vec<String> = dash
                .split(' ')
                .map(|d| format!("{:.6}", d.parse::<f64>().unwrap() * stroke))
                .collect();
            format!(r#" stroke-dasharray="{}""#, scaled.join(" "))
        };
        let points: Vec<String> = curve
            .iter()
            .map(|(_, p)| format!("{:.6},{:.6}", p[0], -p[1]))
            .collect();
        writeln!(
            out,
            r#"<polygon fill="none" stroke="{color}" stroke-width="{stroke:.6}"{dash_attr} points="{}"/>"#,
            points.join(" ")
        )
        .unwrap();
        let label = labels.get(i).map(String::as_str).unwrap_or("");
        writeln!(
            out,
            r#"<text x="{:.6}" y="{:.6}" font-family="sans-serif" font-size="{font:.6}" fill="{color}">{}</text>"#,
            -r + font / 2.0,
            -r + font * (1.2 * i as f64 + 1.2),
            escape(label)
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_sphere_is_the_unit_circle() {
        for (_, p) in sphere(&NormSpec::euclidean(2)) {
            assert!(((p[0] * p[0] + p[1] * p[1]).sqrt() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn svg_is_deterministic() {
        let specs = [NormSpec::euclidean(2), NormSpec::lp(2, 1.0).unwrap()];
        let labels = ["a".to_string(), "b<c".to_string()];
        let a = svg(&specs, &labels);
        assert_eq!(a, svg(&specs, &labels));
        assert_eq!(a.matches("<polygon").count(), 2);
        assert!(a.contains("b&lt;c"));
        assert!(a.contains(r#"viewBox="-1.050000 -1.050000 2.100000 2.100000""#));
    }
}

//! Diverging heatmaps of sweep differences.
//!
//! Blue cells are positive (the second strategy has the smaller error), red
//! cells negative, white zero. The scale is symmetric about zero.

use std::fmt::Write;

const CELL: f64 = 12.0;
const LEFT: f64 = 70.0;
const TOP: f64 = 40.0;
const LEGEND_W: f64 = 90.0;

const POSITIVE: (f64, f64, f64) = (33.0, 102.0, 172.0);
const NEGATIVE: (f64, f64, f64) = (178.0, 24.0, 43.0);

fn colour(v: f64, scale: f64) -> String {
    let t = if scale > 0.0 { (v / scale).clamp(-1.0, 1.0) } else { 0.0 };
    let (r, g, b) = if t >= 0.0 { POSITIVE } else { NEGATIVE };
    let a = t.abs();
    let mix = |c: f64| (255.0 + a * (c - 255.0)).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(r), mix(g), mix(b))
}

fn label(x: f64) -> String {
    format!("{x:.3}")
}

/// `values[i][j]` belongs to `mu[i]` (vertical axis, increasing upwards) and
/// `mu_sigma[j]` (horizontal axis).
pub fn heatmap(title: &str, mu: &[f64], mu_sigma: &[f64], values: &[Vec<f64>]) -> String {
    let (rows, cols) = (mu.len(), mu_sigma.len());
    let width = LEFT + cols as f64 * CELL + 20.0 + LEGEND_W;
    let height = TOP + rows as f64 * CELL + 60.0;
    let finite = values.iter().flatten().copied().filter(|v| v.is_finite());
    let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let scale = lo.abs().max(hi.abs());
    let scale = if scale.is_finite() { scale } else { 0.0 };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<text x="{LEFT}" y="20" font-size="13">{title}</text>"#);
    for (i, row) in values.iter().enumerate() {
        // highest mu at the top
        let y = TOP + (rows - 1 - i) as f64 * CELL;
        for (j, v) in row.iter().enumerate() {
            let x = LEFT + j as f64 * CELL;
            let fill = if v.is_finite() { colour(*v, scale) } else { "#999999".into() };
            let _ = writeln!(
                s,
                r#"<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{fill}"><title>mu={} mu_sigma={} diff={v:e}</title></rect>"#,
                mu[i], mu_sigma[j]
            );
        }
    }

    let bottom = TOP + rows as f64 * CELL;
    let right = LEFT + cols as f64 * CELL;
    let _ = writeln!(s, r#"<text x="{LEFT}" y="{}" text-anchor="start">{}</text>"#, bottom + 14.0, label(mu_sigma[0]));
    let _ = writeln!(s, r#"<text x="{right}" y="{}" text-anchor="end">{}</text>"#, bottom + 14.0, label(mu_sigma[cols - 1]));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">μ_σ</text>"#, (LEFT + right) / 2.0, bottom + 32.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, LEFT - 4.0, bottom, label(mu[0]));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, LEFT - 4.0, TOP + 10.0, label(mu[rows - 1]));
    let _ = writeln!(
        s,
        r#"<text x="20" y="{}" text-anchor="middle" transform="rotate(-90 20 {})">μ</text>"#,
        (TOP + bottom) / 2.0,
        (TOP + bottom) / 2.0
    );

    // legend: a vertical bar from -scale (bottom) to +scale (top)
    let lx = right + 20.0;
    let steps = 20;
    let bar_h = (bottom - TOP).max(100.0);
    for k in 0..steps {
        let t = 1.0 - 2.0 * (k as f64 + 0.5) / steps as f64;
        let y = TOP + k as f64 * bar_h / steps as f64;
        let _ = writeln!(
            s,
            r#"<rect x="{lx}" y="{y}" width="14" height="{}" fill="{}"/>"#,
            bar_h / steps as f64,
            colour(t, 1.0)
        );
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}">+{scale:.2e}</text>"#, lx + 18.0, TOP + 10.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}">-{scale:.2e}</text>"#, lx + 18.0, TOP + bar_h);
    let _ = writeln!(s, r#"<text x="{lx}" y="{}">min {lo:.3e}</text>"#, TOP + bar_h + 18.0);
    let _ = writeln!(s, r#"<text x="{lx}" y="{}">max {hi:.3e}</text>"#, TOP + bar_h + 32.0);
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colour_scale_is_centred() {
        assert_eq!(colour(0.0, 1.0), "#ffffff");
        assert_eq!(colour(1.0, 1.0), "#2166ac");
        assert_eq!(colour(-5.0, 1.0), "#b2182b");
        assert_eq!(colour(0.3, 0.0), "#ffffff");
    }

    #[test]
    fn one_rect_per_cell_and_legend() {
        let v = vec![vec![0.0, 1.0, -1.0], vec![2.0, f64::NAN, 0.5]];
        let s = heatmap("t", &[0.0, 0.1], &[-0.1, 0.0, 0.1], &v);
        assert_eq!(s.matches("<title>").count(), 6);
        assert!(s.contains("min -1.000e0"));
        assert!(s.contains("max 2.000e0"));
        assert!(s.contains(">μ</text>") && s.contains(">μ_σ</text>"));
        assert!(s.trim_end().ends_with("</svg>"));
    }
}

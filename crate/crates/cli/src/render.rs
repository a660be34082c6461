//! Standalone SVG of circadian profiles: one line per scope with a
//! translucent mean ± SEM band, broken wherever an hour is missing.

use std::fmt::Write;

use moodcycle_core::signal::CircadianProfile;
use moodcycle_core::HOURS_PER_DAY;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 48.0;
const BOTTOM: f64 = 52.0;
const PALETTE: [&str; 6] = ["#c0392b", "#2471a3", "#1e8449", "#7d3c98", "#b9770e", "#566573"];

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

/// Runs of consecutive hours with a mean.
fn runs(p: &CircadianProfile) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut current = Vec::new();
    for h in 0..HOURS_PER_DAY {
        if p.mean[h].is_some() {
            current.push(h);
        } else if !current.is_empty() {
            out.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        out.push(current);
    }
    out
}

fn y_range(profiles: &[CircadianProfile]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for p in profiles {
        for h in 0..HOURS_PER_DAY {
            if let Some(m) = p.mean[h] {
                lo = lo.min(m - p.sem[h]);
                hi = hi.max(m + p.sem[h]);
            }
        }
    }
    if !lo.is_finite() {
        return (-1.0, 1.0);
    }
    if hi - lo < 1e-9 {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

/// Render the profiles of one mood.
pub fn render_profile_svg(profiles: &[CircadianProfile]) -> String {
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let (lo, hi) = y_range(profiles);
    let x = |h: usize| LEFT + plot_w * h as f64 / (HOURS_PER_DAY - 1) as f64;
    let y = |v: f64| TOP + plot_h * (hi - v) / (hi - lo);
    let mood = profiles.first().map_or("", |p| p.mood.as_str());
    let title = format!("{mood}: mean score by hour of day (band: ±1 SEM)");

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, "<title>{}</title>", escape(&title));
    for p in profiles {
        let missing: Vec<String> = p.missing_hours().map(|h| h.to_string()).collect();
        if !missing.is_empty() {
            let _ = writeln!(
                s,
                "<!-- scope {}: no observations at hours {}; line and band are broken there -->",
                escape(&p.scope),
                missing.join(" ")
            );
        }
    }
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="28" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(&title)
    );

    // axes
    let _ = writeln!(s, r##"<g class="axes" stroke="#333" fill="none">"##);
    let _ = writeln!(s, r#"<line x1="{LEFT}" y1="{}" x2="{}" y2="{}"/>"#, TOP + plot_h, LEFT + plot_w, TOP + plot_h);
    let _ = writeln!(s, r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{}"/>"#, TOP + plot_h);
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r##"<g class="ticks" fill="#333">"##);
    for h in (0..HOURS_PER_DAY).step_by(3).chain([HOURS_PER_DAY - 1]) {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{h}</text>"#,
            x(h),
            TOP + plot_h + 18.0
        );
    }
    for k in 0..=4 {
        let v = lo + (hi - lo) * k as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{v:.2}</text>"#,
            LEFT - 6.0,
            y(v) + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">hour of day</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">mood score</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );
    let _ = writeln!(s, "</g>");

    for (i, p) in profiles.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let _ = writeln!(s, r#"<g class="scope" data-scope="{}">"#, escape(&p.scope));
        for run in runs(p) {
            let mean = |h: usize| p.mean[h].expect("hour in run");
            let mut band: Vec<String> = run
                .iter()
                .map(|&h| format!("{:.2},{:.2}", x(h), y(mean(h) + p.sem[h])))
                .collect();
            band.extend(run.iter().rev().map(|&h| format!("{:.2},{:.2}", x(h), y(mean(h) - p.sem[h]))));
            let _ = writeln!(
                s,
                r#"<polygon class="band" points="{}" fill="{colour}" fill-opacity="0.2" stroke="none"/>"#,
                band.join(" ")
            );
        }
        for run in runs(p) {
            let line: Vec<String> = run
                .iter()
                .map(|&h| format!("{:.2},{:.2}", x(h), y(p.mean[h].expect("hour in run"))))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline class="mean" points="{}" fill="none" stroke="{colour}" stroke-width="2"/>"#,
                line.join(" ")
            );
        }
        let _ = writeln!(s, "</g>");
    }

    let _ = writeln!(s, r#"<g class="legend">"#);
    for (i, p) in profiles.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let ly = TOP + 10.0 + 22.0 * i as f64;
        let lx = WIDTH - RIGHT + 16.0;
        let _ = writeln!(
            s,
            r#"<rect x="{lx}" y="{}" width="18" height="10" fill="{colour}"/>"#,
            ly - 8.0
        );
        let _ = writeln!(s, r#"<text x="{}" y="{ly}">{}</text>"#, lx + 24.0, escape(&p.scope));
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, "</svg>");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(scope: &str, sem: f64) -> CircadianProfile {
        CircadianProfile {
            mood: "joy".into(),
            scope: scope.into(),
            mean: std::array::from_fn(|h| Some((h as f64 * 0.3).sin())),
            sem: [sem; HOURS_PER_DAY],
            n_obs: [5; HOURS_PER_DAY],
        }
    }

    #[test]
    fn one_polyline_per_scope() {
        let svg = render_profile_svg(&[profile("winter", 0.1), profile("summer", 0.1), profile("aggregate", 0.05)]);
        assert_eq!(svg.matches("<polyline").count(), 3);
        assert_eq!(svg.matches("<polygon").count(), 3);
        roxmltree::Document::parse(&svg).unwrap();
    }

    #[test]
    fn zero_sem_band_sits_on_the_line() {
        let svg = render_profile_svg(&[profile("all", 0.0)]);
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let line = doc.descendants().find(|n| n.has_tag_name("polyline")).unwrap();
        let band = doc.descendants().find(|n| n.has_tag_name("polygon")).unwrap();
        let upper: Vec<&str> = band.attribute("points").unwrap().split(' ').take(24).collect();
        assert_eq!(upper.join(" "), line.attribute("points").unwrap());
    }

    #[test]
    fn gaps_break_the_line_and_are_noted() {
        let mut p = profile("all", 0.1);
        p.mean[5] = None;
        p.mean[6] = None;
        let svg = render_profile_svg(&[p]);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("no observations at hours 5 6"));
        roxmltree::Document::parse(&svg).unwrap();
    }

    #[test]
    fn names_are_escaped() {
        let mut p = profile("a<b&c", 0.1);
        p.mood = "x\"y".into();
        roxmltree::Document::parse(&render_profile_svg(&[p])).unwrap();
    }
}

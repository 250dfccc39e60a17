//! Accuracy-versus-training-size plots as standalone SVG.
//!
//! Rows are grouped into series by every identifying column except the
//! training size. Each series draws a dashed train curve and a solid test
//! curve in the same color.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::results::ResultRow;
use crate::error::{Error, Result};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Parts of the configuration shared by all rows, and a label per series.
fn describe(rows: &[ResultRow]) -> (String, Vec<(String, Vec<&ResultRow>)>) {
    let fields = |r: &ResultRow| -> [(&'static str, String); 7] {
        [
            ("cost", r.cost.as_str().to_string()),
            ("pattern", r.pattern.as_str().to_string()),
            ("method", r.method.as_str().to_string()),
            ("mode", r.mode.as_str().to_string()),
            ("layers", r.layers.to_string()),
            ("test", r.test_size.to_string()),
            ("seed", r.master_seed.to_string()),
        ]
    };
    let first = fields(&rows[0]);
    let shared: Vec<bool> = (0..first.len())
        .map(|i| rows.iter().all(|r| fields(r)[i].1 == first[i].1))
        .collect();
    let title = first
        .iter()
        .zip(&shared)
        .filter(|(_, s)| **s)
        .map(|((k, v), _)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(", ");

    let mut groups: BTreeMap<Vec<String>, Vec<&ResultRow>> = BTreeMap::new();
    for r in rows {
        let key: Vec<String> = fields(r)
            .into_iter()
            .zip(&shared)
            .filter(|(_, s)| !**s)
            .map(|((k, v), _)| format!("{k}={v}"))
            .collect();
        groups.entry(key).or_default().push(r);
    }
    let series = groups
        .into_iter()
        .map(|(k, mut v)| {
            v.sort_by_key(|r| r.train_size);
            (if k.is_empty() { "accuracy".to_string() } else { k.join(" ") }, v)
        })
        .collect();
    (title, series)
}

pub fn render_svg(rows: &[ResultRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::InvalidArgument("nothing to plot".into()));
    }
    let (title, series) = describe(rows);
    let x_max = rows.iter().map(|r| r.train_size).max().unwrap_or(1).max(1) as f64;
    let x_min = 0.0;
    let (y_min, y_max) = (0.4, 1.0);
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x_min) / (x_max - x_min) * pw;
    let sy = |y: f64| TOP + (1.0 - (y.clamp(y_min, y_max) - y_min) / (y_max - y_min)) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + pw / 2.0,
        escape(&title)
    );

    // axes and ticks
    let _ = writeln!(
        s,
        r#"<path d="M{LEFT},{TOP} V{} H{}" fill="none" stroke="black"/>"#,
        TOP + ph,
        LEFT + pw
    );
    for i in 0..=6 {
        let y = y_min + (y_max - y_min) * i as f64 / 6.0;
        let py = sy(y);
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#ddd"/><text x="{}" y="{:.2}" text-anchor="end">{y:.1}</text>"##,
            LEFT + pw,
            LEFT - 6.0,
            py + 4.0
        );
    }
    for i in 0..=5 {
        let x = x_min + (x_max - x_min) * i as f64 / 5.0;
        let px = sx(x);
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{}" x2="{px:.2}" y2="{}" stroke="black"/><text x="{px:.2}" y="{}" text-anchor="middle">{}</text>"#,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 18.0,
            x.round()
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">training set size</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(18,{}) rotate(-90)" text-anchor="middle">accuracy</text>"#,
        TOP + ph / 2.0
    );

    for (i, (label, points)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let line = |acc: fn(&ResultRow) -> f64| {
            points
                .iter()
                .map(|r| format!("{:.2},{:.2}", sx(r.train_size as f64), sy(acc(r))))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let _ = writeln!(
            s,
            r#"<polyline class="train" points="{}" fill="none" stroke="{color}" stroke-width="1.5" stroke-dasharray="6 4"/>"#,
            line(|r| r.mean_train_acc)
        );
        let _ = writeln!(
            s,
            r#"<polyline class="test" points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            line(|r| r.mean_test_acc)
        );
        let ly = TOP + 14.0 + 34.0 * i as f64;
        let lx = LEFT + pw + 14.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{} test</text>"#,
            lx + 24.0,
            lx + 30.0,
            ly + 4.0,
            escape(label)
        );
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{}" x2="{}" y2="{}" stroke="{color}" stroke-width="1.5" stroke-dasharray="6 4"/><text x="{}" y="{}">{} train</text>"#,
            ly + 14.0,
            lx + 24.0,
            ly + 14.0,
            lx + 30.0,
            ly + 18.0,
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_svg(rows: &[ResultRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, render_svg(rows)?).map_err(|e| Error::io(path, e))
}

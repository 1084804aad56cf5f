//! File writers: CSV tables, pretty JSON and small SVG scatter plots.

use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::BoundaryRow;
use crate::mcmc::Trajectory;

pub fn write_json<W: Write, T: Serialize + ?Sized>(mut w: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::Io(e.into()))?;
    writeln!(w)?;
    Ok(())
}

/// CSV with columns `e,lower,upper,vertex`; `vertex` is empty off the
/// connection points.
pub fn write_boundary_csv<W: Write>(rows: &[BoundaryRow], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["e", "lower", "upper", "vertex"]).map_err(|e| Error::Io(e.into()))?;
    for r in rows {
        let vertex = r.vertex.map(|k| k.to_string()).unwrap_or_default();
        wr.write_record([r.e.to_string(), r.lower.to_string(), r.upper.to_string(), vertex])
            .map_err(|e| Error::Io(e.into()))?;
    }
    wr.flush()?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mark {
    Line,
    Dots,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub label: String,
    pub color: &'static str,
    pub mark: Mark,
    pub points: Vec<(f64, f64)>,
}

/// A plot on the unit square.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Plot {
    pub title: String,
    pub series: Vec<Series>,
}

const SIZE: f64 = 480.0;
const PAD: f64 = 40.0;

impl Plot {
    pub fn to_svg(&self) -> String {
        let span = SIZE - 2.0 * PAD;
        let px = |x: f64| PAD + x * span;
        let py = |y: f64| SIZE - PAD - y * span;
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<rect x="{PAD}" y="{PAD}" width="{span}" height="{span}" fill="none" stroke="black"/>"#
        );
        let _ = writeln!(s, r#"<text x="{PAD}" y="{}" font-size="14">{}</text>"#, PAD - 12.0, escape(&self.title));
        let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="12">e</text>"#, SIZE / 2.0, SIZE - 10.0);
        let _ = writeln!(s, r#"<text x="10" y="{}" font-size="12">t</text>"#, SIZE / 2.0);
        for (i, ser) in self.series.iter().enumerate() {
            match ser.mark {
                Mark::Line => {
                    let pts: Vec<String> = ser.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
                    let _ = writeln!(
                        s,
                        r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
                        ser.color,
                        pts.join(" ")
                    );
                }
                Mark::Dots => {
                    for &(x, y) in &ser.points {
                        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="{}"/>"#, px(x), py(y), ser.color);
                    }
                }
            }
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" font-size="11" fill="{}">{}</text>"#,
                PAD + 8.0,
                PAD + 16.0 + 14.0 * i as f64,
                ser.color,
                escape(&ser.label)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn boundary_series(rows: &[BoundaryRow]) -> Vec<Series> {
    vec![
        Series {
            label: "lower boundary".into(),
            color: "steelblue",
            mark: Mark::Line,
            points: rows.iter().map(|r| (r.e, r.lower)).collect(),
        },
        Series {
            label: "upper boundary".into(),
            color: "firebrick",
            mark: Mark::Line,
            points: rows.iter().map(|r| (r.e, r.upper)).collect(),
        },
        Series {
            label: "Turán points".into(),
            color: "black",
            mark: Mark::Dots,
            points: rows.iter().filter(|r| r.vertex.is_some()).map(|r| (r.e, r.lower)).collect(),
        },
    ]
}

pub fn boundary_plot(rows: &[BoundaryRow]) -> Plot {
    Plot { title: "edge-triangle region".into(), series: boundary_series(rows) }
}

/// The chain's recorded densities over the region boundary.
pub fn trajectory_plot(traj: &Trajectory, rows: &[BoundaryRow]) -> Plot {
    let mut series = boundary_series(rows);
    series.push(Series {
        label: format!("chain n = {}", traj.config.n),
        color: "darkorange",
        mark: Mark::Dots,
        points: traj.records.iter().map(|r| (r.e, r.t)).collect(),
    });
    Plot { title: format!("β = ({}, {})", traj.config.beta.0, traj.config.beta.1), series }
}

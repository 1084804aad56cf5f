//! Exact convex hulls and exposed faces of finite point sets in the density plane.

use crate::graph::DensityPoint;
use crate::rational::{Rational, qi};

use super::SupportTable;

fn cross(o: &DensityPoint, a: &DensityPoint, b: &DensityPoint) -> Rational {
    (a.e - o.e) * (b.t - o.t) - (a.t - o.t) * (b.e - o.e)
}

/// Vertices of the convex hull in counterclockwise order starting from the
/// lexicographically smallest point; collinear boundary points are dropped.
pub fn convex_hull(points: &[DensityPoint]) -> Vec<DensityPoint> {
    let mut pts = points.to_vec();
    pts.sort_by_key(|p| (p.e, p.t));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let zero = qi(0);
    let mut lower: Vec<DensityPoint> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= zero {
            lower.pop();
        }
        lower.push(*p);
    }
    let mut upper: Vec<DensityPoint> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= zero {
            upper.pop();
        }
        upper.push(*p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Convex support `P_n`: the hull of the support points of the table.
pub fn convex_support(table: &SupportTable) -> Vec<DensityPoint> {
    convex_hull(&table.points())
}

/// Points of `points` maximizing `⟨x, o⟩`.
pub fn exposed_face(points: &[DensityPoint], o: (Rational, Rational)) -> Vec<DensityPoint> {
    let val = |p: &DensityPoint| o.0 * p.e + o.1 * p.t;
    let Some(best) = points.iter().map(val).max() else {
        return Vec::new();
    };
    points.iter().filter(|p| val(p) == best).copied().collect()
}

/// Whether `x` lies strictly inside the convex polygon with CCW vertices `hull`.
pub fn strictly_inside(hull: &[DensityPoint], x: &DensityPoint) -> bool {
    hull.len() >= 3
        && (0..hull.len()).all(|i| cross(&hull[i], &hull[(i + 1) % hull.len()], x) > qi(0))
}

/// Float variant of [`strictly_inside`] for mean values, with a margin.
pub fn strictly_inside_f64(hull: &[DensityPoint], x: (f64, f64), margin: f64) -> bool {
    hull.len() >= 3
        && (0..hull.len()).all(|i| {
            let (a, b) = (hull[i].to_f64(), hull[(i + 1) % hull.len()].to_f64());
            (b.0 - a.0) * (x.1 - a.1) - (b.1 - a.1) * (x.0 - a.0) > margin
        })
}

//! Asymptotic geometry of the edge-triangle model.
//!
//! The convex hull of all realizable `(edge, triangle)` densities has extreme
//! points `v_k = t(Turán graphon with k+1 classes)` for `k = 0, 1, ...` plus
//! their limit `(1, 1)`. Consecutive vertices span the facets `L_k` with outer
//! normals `o_k`; `L_{-1}` joins `v_0` to `(1, 1)`. The normal cones
//! `C_k = cone(o_{k-1}, o_k)` partition the plane of directions.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{domain, Result};
use crate::graph::DensityPoint;
use crate::rational::{floor_i128, q, qi, signum, to_f64, Rational, Scalar};

/// Relative tolerance used when a float input is compared against a tie.
pub const FLOAT_TIE_TOL: f64 = 1e-12;

/// An extreme point of the limiting convex hull.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ExtremePoint {
    /// `v_k`, the Turán graphon with `k + 1` classes.
    Turan(u64),
    /// The limit point `(1, 1)`.
    One,
}

impl ExtremePoint {
    pub fn point(&self) -> DensityPoint {
        match *self {
            ExtremePoint::Turan(k) => v_k(k),
            ExtremePoint::One => DensityPoint::new(qi(1), qi(1)),
        }
    }
}

/// `v_k = (k/(k+1), k(k-1)/(k+1)²)`.
pub fn v_k(k: u64) -> DensityPoint {
    let k = k as i128;
    DensityPoint::new(q(k, k + 1), q(k * (k - 1), (k + 1) * (k + 1)))
}

/// Checked variant of [`v_k`] for signed input.
pub fn try_v_k(k: i64) -> Result<DensityPoint> {
    if k < 0 {
        return domain(format!("v_k needs k >= 0, got {k}"));
    }
    Ok(v_k(k as u64))
}

/// Slope of the facet `L_k`, `k(3k+5)/((k+1)(k+2))`.
pub fn facet_slope(k: u64) -> Rational {
    let k = k as i128;
    q(k * (3 * k + 5), (k + 1) * (k + 2))
}

/// `a_k = -k(3k+5)/((k+1)(k+2))`, the critical slopes of the repulsive regime.
pub fn a_k(k: u64) -> Rational {
    -facet_slope(k)
}

/// A nonzero direction in the parameter plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Direction {
    pub x: Scalar,
    pub y: Scalar,
}

impl Direction {
    pub fn new(x: impl Into<Scalar>, y: impl Into<Scalar>) -> Result<Self> {
        let d = Direction { x: x.into(), y: y.into() };
        if d.x.is_zero() && d.y.is_zero() {
            return domain("direction must be nonzero");
        }
        if !d.x.to_f64().is_finite() || !d.y.to_f64().is_finite() {
            return domain("direction must be finite");
        }
        Ok(d)
    }

    pub fn exact(x: Rational, y: Rational) -> Result<Self> {
        Direction::new(x, y)
    }

    pub fn as_exact(&self) -> Option<(Rational, Rational)> {
        Some((self.x.as_exact()?, self.y.as_exact()?))
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }
}

/// Critical direction `o_k`, the outer normal of the facet `L_k`.
pub fn o_k(k: i64) -> Result<Direction> {
    let (x, y) = match k {
        -1 => (qi(-1), qi(1)),
        0 => (qi(0), qi(-1)),
        k if k >= 1 => {
            let k = k as i128;
            (qi(1), q(-(k + 1) * (k + 2), k * (3 * k + 5)))
        }
        _ => return domain(format!("o_k is defined for k >= -1, got {k}")),
    };
    Direction::exact(x, y)
}

/// Unnormalized `l_k = (1, k(3k+5)/((k+1)(k+2)))`, parallel to the facet `L_k`.
pub fn l_k_exact(k: i64) -> Result<(Rational, Rational)> {
    if k < 1 {
        return domain(format!("l_k is defined for k >= 1, got {k}"));
    }
    Ok((qi(1), facet_slope(k as u64)))
}

/// Unit vector `l_k` spanning the line through the origin parallel to `L_k`.
pub fn l_k(k: i64) -> Result<(f64, f64)> {
    let (x, y) = l_k_exact(k)?;
    let (x, y) = (to_f64(&x), to_f64(&y));
    let norm = x.hypot(y);
    Ok((x / norm, y / norm))
}

/// Sign of `⟨l_k, β⟩`: `+1` on `H_k^+`, `-1` on `H_k^-`, `0` on `H_k`.
/// Exact when both components of `β` are exact.
pub fn hyperplane_side(k: i64, beta: (Scalar, Scalar)) -> Result<i8> {
    let (lx, ly) = l_k_exact(k)?;
    if let (Some(b1), Some(b2)) = (beta.0.as_exact(), beta.1.as_exact()) {
        return Ok(signum(&(lx * b1 + ly * b2)));
    }
    let (ux, uy) = l_k(k)?;
    let v = ux * beta.0.to_f64() + uy * beta.1.to_f64();
    Ok(if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    })
}

/// Upper boundary of the realizable region, `e^{3/2}`.
pub fn kk_upper(e: f64) -> Result<f64> {
    check_unit(e)?;
    Ok(e.powf(1.5))
}

fn check_unit(e: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&e) {
        return domain(format!("edge density must lie in [0, 1], got {e}"));
    }
    Ok(())
}

/// Index `k >= 2` of the lower-boundary segment `[(k-1)/k, k/(k+1)]` holding
/// `e ∈ (1/2, 1)`; a shared endpoint belongs to the left segment.
fn segment_index(e: f64) -> u64 {
    let mut k = (e / (1.0 - e)).ceil().max(2.0) as u64;
    while (k as f64) / (k as f64 + 1.0) < e {
        k += 1;
    }
    while k > 2 && e <= (k as f64 - 1.0) / k as f64 {
        k -= 1;
    }
    k
}

/// Exact lower boundary of the realizable `(e, t)` region: `0` on `[0, 1/2]`,
/// the flag-algebra curve on each `[(k-1)/k, k/(k+1)]` for `k >= 2`.
pub fn razborov_lower(e: f64) -> Result<f64> {
    check_unit(e)?;
    if e <= 0.5 {
        return Ok(0.0);
    }
    if e == 1.0 {
        return Ok(1.0);
    }
    let k = segment_index(e) as f64;
    let r = (k * (k - e * (k + 1.0))).max(0.0).sqrt();
    Ok((k - 1.0) * (k - 2.0 * r) * (k + r).powi(2) / (k * k * (k + 1.0).powi(2)))
}

/// Derivative of [`razborov_lower`] in `e`, one-sided from the left at the
/// connection points.
pub fn razborov_slope(e: f64) -> Result<f64> {
    check_unit(e)?;
    if e <= 0.5 {
        return Ok(0.0);
    }
    if e == 1.0 {
        return Ok(3.0);
    }
    let k = segment_index(e) as f64;
    let r = (k * (k - e * (k + 1.0))).max(0.0).sqrt();
    Ok(3.0 * (k - 1.0) * (k + r) / (k * (k + 1.0)))
}

/// Exact value of the lower boundary when the radicand is a rational square
/// (always the case at the connection points `k/(k+1)`); `None` otherwise.
pub fn razborov_lower_exact(e: Rational) -> Result<Option<Rational>> {
    if e.is_negative() || e > qi(1) {
        return domain(format!("edge density must lie in [0, 1], got {e}"));
    }
    if e <= q(1, 2) {
        return Ok(Some(qi(0)));
    }
    if e == qi(1) {
        return Ok(Some(qi(1)));
    }
    // smallest k with e <= k/(k+1), i.e. k >= e/(1-e)
    let k = (e / (qi(1) - e)).ceil();
    let radicand = k * (k - e * (k + qi(1)));
    let Some(r) = rational_sqrt(&radicand) else {
        return Ok(None);
    };
    let two = qi(2);
    let one = qi(1);
    Ok(Some(
        (k - one) * (k - two * r) * (k + r) * (k + r) / (k * k * (k + one) * (k + one)),
    ))
}

fn rational_sqrt(x: &Rational) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    let (n, d) = (*x.numer(), *x.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    (rn * rn == n && rd * rd == d).then(|| q(rn, rd))
}

/// The partition cell of the direction plane holding a direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "k")]
pub enum RayClassification {
    /// Interior of the normal cone `C_k` at `v_k`: the argmax of `⟨o, ·⟩` over
    /// the extreme points is uniquely `v_k`.
    InteriorCone(u64),
    /// The argmax is uniquely the limit point `(1, 1)`.
    InteriorConeAtOne,
    /// Positive multiple of the critical direction `o_k`, `k >= -1`.
    CriticalRay(i64),
}

/// Outcome of [`classify_direction`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DirectionReport {
    pub classification: RayClassification,
    /// For float input, the index of a critical ray lying within the
    /// relative tolerance [`FLOAT_TIE_TOL`]; the classification is then the
    /// numerically preferred neighboring cone.
    pub near_critical: Option<i64>,
    /// Whether the classification was certified in exact arithmetic.
    pub exact: bool,
}

/// Sign of `⟨o, v_{k+1} - v_k⟩`, telling whether `v_{k+1}`
/// beats `v_k` under the linear functional `o`.
fn gain_sign(x: &Rational, y: &Rational, k: &BigInt) -> i8 {
    // x (k+1)(k+2) + y k(3k+5), evaluated over BigInt to avoid overflow at huge k
    let to_big = |r: &Rational| (BigInt::from(*r.numer()), BigInt::from(*r.denom()));
    let (xn, xd) = to_big(x);
    let (yn, yd) = to_big(y);
    let k1 = k + BigInt::from(1);
    let k2 = k + BigInt::from(2);
    let k3 = BigInt::from(3) * k + BigInt::from(5);
    let s: BigInt = xn * k1 * k2 * yd + yn * k * k3 * xd;
    match s.sign() {
        num_bigint::Sign::Minus => -1,
        num_bigint::Sign::NoSign => 0,
        num_bigint::Sign::Plus => 1,
    }
}

fn gain_f64(x: f64, y: f64, k: f64) -> (f64, f64) {
    let a = x * (k + 1.0) * (k + 2.0);
    let b = y * k * (3.0 * k + 5.0);
    (a + b, a.abs() + b.abs())
}

/// Locates the cell of the direction complex containing `o`.
///
/// `k ↦ ⟨o, v_k⟩` is a quadratic in `s = 1/(k+1)`:
/// `(x + y) - (x + 3y) s + 2 y s²`. For `y >= 0` it is convex and the maximum
/// over the extreme points sits at `v_0` or `(1, 1)`; for `y < 0` it is
/// concave with vertex `s* = (x + 3y)/(4y)`, so the argmax is one of the two
/// Turán points bracketing `k* = 1/s* - 1`.
pub fn classify_direction(o: &Direction) -> Result<DirectionReport> {
    if o.x.is_zero() && o.y.is_zero() {
        return domain("cannot classify the zero direction");
    }
    match o.as_exact() {
        Some((x, y)) => Ok(DirectionReport {
            classification: classify_exact(x, y),
            near_critical: None,
            exact: true,
        }),
        None => {
            let (x, y) = o.to_f64();
            let (classification, near_critical) = classify_f64(x, y);
            Ok(DirectionReport { classification, near_critical, exact: false })
        }
    }
}

fn classify_exact(x: Rational, y: Rational) -> RayClassification {
    use RayClassification::*;
    if !y.is_negative() {
        let s = if y.is_zero() { x } else { x + y };
        return match signum(&s) {
            1 => InteriorConeAtOne,
            -1 => InteriorCone(0),
            _ => CriticalRay(-1),
        };
    }
    let num = x + qi(3) * y;
    if !num.is_negative() {
        return InteriorConeAtOne;
    }
    let s_star = num / (qi(4) * y);
    if s_star >= qi(1) {
        return InteriorCone(0);
    }
    let k_lo = BigInt::from(floor_i128(&(qi(1) / s_star - qi(1))));
    let k_u64 = |k: &BigInt| u64::try_from(k).unwrap_or(u64::MAX);
    match gain_sign(&x, &y, &k_lo) {
        1 => InteriorCone(k_u64(&k_lo) + 1),
        -1 => InteriorCone(k_u64(&k_lo)),
        _ => CriticalRay(i64::try_from(&k_lo).unwrap_or(i64::MAX)),
    }
}

fn classify_f64(x: f64, y: f64) -> (RayClassification, Option<i64>) {
    use RayClassification::*;
    let near = |v: f64, scale: f64| v.abs() <= FLOAT_TIE_TOL * scale;
    if y >= 0.0 {
        let (s, scale) = if y == 0.0 { (x, x.abs()) } else { (x + y, x.abs() + y.abs()) };
        let flag = near(s, scale).then_some(-1);
        return match s.partial_cmp(&0.0) {
            Some(Ordering::Greater) => (InteriorConeAtOne, flag),
            Some(Ordering::Less) => (InteriorCone(0), flag),
            _ => (CriticalRay(-1), None),
        };
    }
    let num = x + 3.0 * y;
    if num >= 0.0 {
        return (InteriorConeAtOne, None);
    }
    let s_star = num / (4.0 * y);
    let k_star = 1.0 / s_star - 1.0;
    if k_star.is_nan() || k_star >= 9.0e15 {
        // beyond f64 integer resolution the cell cannot be pinned down
        return (InteriorConeAtOne, None);
    }
    let mut k = k_star.floor().max(0.0);
    while k > 0.0 && gain_f64(x, y, k - 1.0).0 < 0.0 {
        k -= 1.0;
    }
    while gain_f64(x, y, k).0 > 0.0 {
        k += 1.0;
    }
    // now gain(k-1) >= 0 (or k = 0) and gain(k) <= 0
    let (g_hi, s_hi) = gain_f64(x, y, k);
    if g_hi == 0.0 {
        return (CriticalRay(k as i64), None);
    }
    let mut flag = near(g_hi, s_hi).then_some(k as i64);
    if k > 0.0 {
        let (g_lo, s_lo) = gain_f64(x, y, k - 1.0);
        if g_lo == 0.0 {
            return (CriticalRay(k as i64 - 1), None);
        }
        if flag.is_none() && near(g_lo, s_lo) {
            flag = Some(k as i64 - 1);
        }
    }
    (InteriorCone(k as u64), flag)
}

/// One row of the region boundary table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryRow {
    pub e: f64,
    pub lower: f64,
    pub upper: f64,
    /// `Some(k)` when `e = k/(k+1)`, where the lower boundary passes through `v_k`.
    pub vertex: Option<u64>,
}

/// Evenly spaced samples `e = i/(resolution-1)` merged with every connection
/// point `k/(k+1)` no finer than the grid spacing. Connection rows are
/// evaluated exactly.
pub fn boundary_samples(resolution: usize) -> Result<Vec<BoundaryRow>> {
    if resolution < 2 {
        return domain(format!("boundary resolution must be >= 2, got {resolution}"));
    }
    let m = (resolution - 1) as i128;
    let mut points: Vec<Rational> = (0..=m).map(|i| q(i, m)).collect();
    points.extend((0..m).map(|k| q(k, k + 1)));
    points.sort();
    points.dedup();
    points
        .into_iter()
        .map(|e| {
            let ef = to_f64(&e);
            let vertex = (e < qi(1) && (qi(1) / (qi(1) - e)).is_integer())
                .then(|| floor_i128(&(e / (qi(1) - e))) as u64);
            let lower = match razborov_lower_exact(e)? {
                Some(t) => to_f64(&t),
                None => razborov_lower(ef)?,
            };
            Ok(BoundaryRow { e: ef, lower, upper: kk_upper(ef)?, vertex })
        })
        .collect()
}

/// A cone of the normal fan, anchored at its vertex.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConeCell {
    pub k: u64,
    pub apex: DensityPoint,
    pub generators: [[f64; 2]; 2],
}

/// Normal cones `C_k = cone(o_{k-1}, o_k)` for `k = 0..=k_max`.
pub fn cone_complex(k_max: u64) -> Vec<ConeCell> {
    (0..=k_max)
        .map(|k| {
            let gen = |j: i64| {
                let (x, y) = o_k(j).expect("k >= -1").to_f64();
                [x, y]
            };
            ConeCell { k, apex: v_k(k), generators: [gen(k as i64 - 1), gen(k as i64)] }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use proptest::prelude::*;

    fn dot(d: &Direction, p: &DensityPoint) -> Rational {
        let (x, y) = d.as_exact().unwrap();
        x * p.e + y * p.t
    }

    #[test]
    fn v_k_values() {
        assert_eq!(v_k(0), DensityPoint::new(qi(0), qi(0)));
        assert_eq!(v_k(1), DensityPoint::new(q(1, 2), qi(0)));
        assert_eq!(v_k(2), DensityPoint::new(q(2, 3), q(2, 9)));
        assert!(try_v_k(-1).is_err());
        for k in 1..100 {
            let (a, b) = (v_k(k), v_k(k + 1));
            assert!(a.e < b.e && a.t < b.t);
        }
    }

    #[test]
    fn a_k_values() {
        assert_eq!(a_k(0), qi(0));
        assert_eq!(a_k(1), q(-4, 3));
        assert_eq!(a_k(2), q(-11, 6));
        for k in 0..500 {
            assert!(a_k(k + 1) < a_k(k));
            assert!(a_k(k) > qi(-3));
        }
        assert!(to_f64(&a_k(1_000_000)) + 3.0 < 1e-5);
    }

    #[test]
    fn o_k_values() {
        assert_eq!(o_k(-1).unwrap().as_exact().unwrap(), (qi(-1), qi(1)));
        assert_eq!(o_k(0).unwrap().as_exact().unwrap(), (qi(0), qi(-1)));
        assert_eq!(o_k(1).unwrap().as_exact().unwrap(), (qi(1), q(-3, 4)));
        assert!(o_k(-2).is_err());
    }

    #[test]
    fn critical_directions_are_facet_normals() {
        for k in 0..=200u64 {
            let o = o_k(k as i64).unwrap();
            assert!(dot(&o, &v_k(k + 1)) - dot(&o, &v_k(k)) == qi(0), "k = {k}");
        }
        let o = o_k(-1).unwrap();
        assert!(dot(&o, &ExtremePoint::One.point()) == dot(&o, &v_k(0)));
    }

    #[test]
    fn l_k_is_unit_and_orthogonal_to_o_k() {
        let (x, y) = l_k(1).unwrap();
        assert!((y / x - 4.0 / 3.0).abs() < 1e-15);
        for k in 1..=100 {
            let (lx, ly) = l_k_exact(k).unwrap();
            let (ox, oy) = o_k(k).unwrap().as_exact().unwrap();
            assert!((lx * ox + ly * oy).is_zero());
            let (ux, uy) = l_k(k).unwrap();
            assert!((ux.hypot(uy) - 1.0).abs() < 1e-15);
        }
        let (ux, uy) = l_k(1_000_000).unwrap();
        let lim = 10f64.sqrt();
        assert!((ux - 1.0 / lim).abs() < 1e-5 && (uy - 3.0 / lim).abs() < 1e-5);
        assert!(l_k(0).is_err());
    }

    #[test]
    fn razborov_examples() {
        assert_eq!(razborov_lower(0.5).unwrap(), 0.0);
        assert_eq!(razborov_lower(0.3).unwrap(), 0.0);
        assert!((razborov_lower(2.0 / 3.0).unwrap() - 2.0 / 9.0).abs() < 1e-15);
        assert_eq!(razborov_lower(1.0).unwrap(), 1.0);
        assert_eq!(razborov_lower_exact(q(2, 3)).unwrap(), Some(q(2, 9)));
        assert!(razborov_lower(1.5).is_err());
        assert!(razborov_lower(-0.1).is_err());
        assert!(razborov_lower(f64::NAN).is_err());
    }

    #[test]
    fn razborov_exact_at_connection_points() {
        for k in 1..=50u64 {
            let v = v_k(k);
            assert_eq!(razborov_lower_exact(v.e).unwrap(), Some(v.t), "k = {k}");
        }
    }

    #[test]
    fn razborov_continuous_and_concave_on_segments() {
        for k in 2..=60u64 {
            let ek = k as f64 / (k as f64 + 1.0);
            let left = razborov_lower(ek - 1e-14).unwrap();
            let right = razborov_lower(ek + 1e-14).unwrap();
            assert!((left - right).abs() < 1e-12);
            let (lo, hi) = ((k - 1) as f64 / k as f64, ek);
            let m = 1000;
            let vals: Vec<f64> =
                (0..=m).map(|i| razborov_lower(lo + (hi - lo) * i as f64 / m as f64).unwrap()).collect();
            for w in vals.windows(3) {
                assert!(w[0] - 2.0 * w[1] + w[2] <= 1e-12);
            }
        }
    }

    #[test]
    fn razborov_slope_matches_finite_differences() {
        for &e in &[0.55, 0.6, 0.7, 0.76, 0.81, 0.91, 0.97] {
            let h = 1e-7;
            let fd = (razborov_lower(e + h).unwrap() - razborov_lower(e - h).unwrap()) / (2.0 * h);
            assert!((fd - razborov_slope(e).unwrap()).abs() < 1e-5, "e = {e}");
        }
    }

    #[test]
    fn kk_upper_values() {
        assert_eq!(kk_upper(0.0).unwrap(), 0.0);
        assert_eq!(kk_upper(1.0).unwrap(), 1.0);
        assert_eq!(kk_upper(0.25).unwrap(), 0.125);
    }

    #[test]
    fn classify_examples() {
        let c = |x: Rational, y: Rational| classify_direction(&Direction::exact(x, y).unwrap()).unwrap();
        assert_eq!(c(qi(1), q(-1, 2)).classification, RayClassification::InteriorCone(3));
        assert_eq!(c(qi(1), q(-3, 4)).classification, RayClassification::CriticalRay(1));
        assert_eq!(c(qi(-1), qi(-1)).classification, RayClassification::InteriorCone(0));
        assert_eq!(c(qi(-1), qi(1)).classification, RayClassification::CriticalRay(-1));
        assert_eq!(c(qi(0), qi(-7)).classification, RayClassification::CriticalRay(0));
        assert_eq!(c(qi(1), qi(0)).classification, RayClassification::InteriorConeAtOne);
        assert_eq!(c(qi(3), qi(-1)).classification, RayClassification::InteriorConeAtOne);
        assert_eq!(c(qi(-1), qi(0)).classification, RayClassification::InteriorCone(0));
        for k in -1..=300 {
            let o = o_k(k).unwrap();
            assert_eq!(classify_direction(&o).unwrap().classification, RayClassification::CriticalRay(k));
        }
        assert!(Direction::new(0i64, 0i64).is_err());
    }

    #[test]
    fn float_inputs_flag_near_critical() {
        let d = Direction::new(1.0, -0.75 + 1e-15).unwrap();
        let r = classify_direction(&d).unwrap();
        assert_eq!(r.near_critical, Some(1));
        assert!(matches!(r.classification, RayClassification::InteriorCone(1 | 2)));
        let d = Direction::new(1.0, -0.5).unwrap();
        let r = classify_direction(&d).unwrap();
        assert_eq!((r.classification, r.near_critical), (RayClassification::InteriorCone(3), None));
    }

    #[test]
    fn hyperplane_sides() {
        let s = |b1: i64, b2: i64| hyperplane_side(1, (b1.into(), b2.into())).unwrap();
        assert_eq!(s(20, -80), -1);
        assert_eq!(s(10, -6), 1);
        assert_eq!(s(0, 0), 0);
        assert_eq!(hyperplane_side(1, (Scalar::Float(10.0), Scalar::Float(-6.0))).unwrap(), 1);
        assert!(hyperplane_side(0, (0i64.into(), 0i64.into())).is_err());
    }

    #[test]
    fn boundary_rows() {
        let rows = boundary_samples(3).unwrap();
        let es: Vec<f64> = rows.iter().map(|r| r.e).collect();
        assert_eq!(es, vec![0.0, 0.5, 1.0]);
        let lows: Vec<f64> = rows.iter().map(|r| r.lower).collect();
        assert_eq!(lows, vec![0.0, 0.0, 1.0]);
        assert_eq!(rows[1].vertex, Some(1));
        let rows = boundary_samples(101).unwrap();
        for r in &rows {
            assert!(r.lower <= r.upper);
            if let Some(k) = r.vertex {
                let (e, t) = v_k(k).to_f64();
                assert_eq!((r.e, r.lower), (e, t));
            }
        }
        assert!(boundary_samples(1).is_err());
    }

    #[test]
    fn cone_complex_generators() {
        let cones = cone_complex(3);
        assert_eq!(cones[0].generators, [[-1.0, 1.0], [0.0, -1.0]]);
        assert_eq!(cones[2].generators[0], [1.0, -0.75]);
    }

    proptest! {
        #[test]
        fn classification_is_scale_invariant(xn in -200i128..200, yn in -200i128..200, xd in 1i128..50, yd in 1i128..50, c in 1i128..1000, cd in 1i128..50) {
            prop_assume!(xn != 0 || yn != 0);
            let (x, y) = (q(xn, xd), q(yn, yd));
            let s = q(c, cd);
            let a = classify_direction(&Direction::exact(x, y).unwrap()).unwrap();
            let b = classify_direction(&Direction::exact(x * s, y * s).unwrap()).unwrap();
            prop_assert_eq!(a.classification, b.classification);
        }

        #[test]
        fn exact_classification_is_the_argmax(xn in -200i128..200, yn in -200i128..200, xd in 1i128..50, yd in 1i128..50) {
            prop_assume!(xn != 0 || yn != 0);
            let d = Direction::exact(q(xn, xd), q(yn, yd)).unwrap();
            let vals: Vec<Rational> = (0..2000u64).map(|k| dot(&d, &v_k(k))).collect();
            let best = vals.iter().max().unwrap();
            let winners: Vec<usize> = (0..vals.len()).filter(|&k| vals[k] == *best).collect();
            let one = dot(&d, &ExtremePoint::One.point());
            match classify_direction(&d).unwrap().classification {
                RayClassification::InteriorCone(k) if (k as usize) < 1990 => {
                    prop_assert_eq!(winners, vec![k as usize]);
                    prop_assert!(one < *best);
                }
                RayClassification::CriticalRay(-1) => prop_assert!(one == vals[0] && one == *best),
                RayClassification::CriticalRay(k) => prop_assert_eq!(winners, vec![k as usize, k as usize + 1]),
                RayClassification::InteriorConeAtOne => prop_assert!(one > *best),
                RayClassification::InteriorCone(_) => {}
            }
        }
    }
}

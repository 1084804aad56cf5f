//! The limiting variational problem and its extremal regimes.
//!
//! For `β2 > -1/2` the normalized log-partition function reduces to the scalar
//! problem `sup_u β1 u + β2 u³ - I(u)`. Along lines `β1 = a β2 + b` with
//! `|β2| → ∞` the maximizing graphons concentrate on empty, complete,
//! bipartite or Turán structure depending on where `a` sits relative to the
//! critical slopes `a_k`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{domain, Result};
use crate::geometry::{
    a_k, classify_direction, hyperplane_side, Direction, DirectionReport, RayClassification, FLOAT_TIE_TOL,
};
use crate::rational::{q, qi, signum, to_f64, Rational, Scalar};

/// `I(u) = ½ u ln u + ½ (1-u) ln(1-u)` with `0 ln 0 = 0`.
pub fn entropy(u: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) {
        return domain(format!("entropy needs u in [0, 1], got {u}"));
    }
    Ok(entropy_split(u, 1.0 - u))
}

fn xlnx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Entropy given `u` and `1 - u` computed independently, accurate near both ends.
fn entropy_split(u: f64, w: f64) -> f64 {
    0.5 * xlnx(u) + 0.5 * xlnx(w)
}

/// `β1 u + β2 u³ - I(u)`.
pub fn scalar_objective(beta1: f64, beta2: f64, u: f64) -> f64 {
    beta1 * u + beta2 * u.powi(3) - entropy_split(u, 1.0 - u)
}

/// A global maximizer of the scalar problem.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScalarMaximizer {
    pub u: f64,
    /// `ln(u/(1-u))`, which keeps full precision when `u` is close to 0 or 1.
    pub logit: f64,
    pub objective: f64,
}

/// Candidates whose objective is within this of the best are reported as
/// co-maximizers.
pub const SCALAR_TIE_TOL: f64 = 1e-10;
const SCALAR_DEDUP_TOL: f64 = 1e-8;

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// All global maximizers of `β1 u + β2 u³ - I(u)` over `[0, 1]`.
pub fn solve_scalar(beta1: f64, beta2: f64) -> Result<Vec<ScalarMaximizer>> {
    let mut cands = scalar_local_maxima(beta1, beta2)?;
    let best = cands.iter().map(|c| c.objective).fold(f64::NEG_INFINITY, f64::max);
    cands.retain(|c| c.objective >= best - SCALAR_TIE_TOL);
    cands.dedup_by(|b, a| (b.u - a.u).abs() < SCALAR_DEDUP_TOL);
    Ok(cands)
}

/// Every local maximizer of the scalar problem, in increasing `u`.
///
/// Works in the logit `z = ln(u/(1-u))`, where stationarity reads
/// `h(z) = β1 + 3β2 σ(z)² - z/2 = 0`. Since `h → ±∞` at the ends the
/// maximizers are interior. `h` has at most two turning points, located where
/// `σ²(1-σ) = 1/(12β2)`, so it splits into at most three monotone pieces;
/// a downward crossing on a piece is a local maximum.
pub fn scalar_local_maxima(beta1: f64, beta2: f64) -> Result<Vec<ScalarMaximizer>> {
    if !beta1.is_finite() || !beta2.is_finite() {
        return domain("scalar problem needs finite parameters");
    }
    let h = |z: f64| {
        let s = sigmoid(z);
        beta1 + 3.0 * beta2 * s * s - 0.5 * z
    };
    let zmax = 2.0 * (beta1.abs() + 3.0 * beta2.abs()) + 2.0;
    let mut cuts = vec![-zmax];
    if beta2 > 0.0 {
        let c = 1.0 / (12.0 * beta2);
        if c < 4.0 / 27.0 {
            let g = |s: f64| s * s * (1.0 - s) - c;
            for (lo, hi) in [(0.0, 2.0 / 3.0), (2.0 / 3.0, 1.0)] {
                let s = bisect(g, lo, hi);
                cuts.push((s / (1.0 - s)).ln());
            }
        }
    }
    cuts.push(zmax);
    cuts.sort_by(f64::total_cmp);

    let mut roots = Vec::new();
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if h(lo) >= 0.0 && h(hi) < 0.0 {
            roots.push(bisect(h, lo, hi));
        }
    }
    Ok(roots
        .into_iter()
        .map(|z| {
            let (u, w) = (sigmoid(z), sigmoid(-z));
            ScalarMaximizer { u, logit: z, objective: beta1 * u + beta2 * u.powi(3) - entropy_split(u, w) }
        })
        .collect())
}

/// Bisection for a sign change of `f` on `[lo, hi]`.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo) > 0.0;
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == flo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Direction in which `β2` is sent to infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Limit {
    PlusInfinity,
    MinusInfinity,
}

/// The line `β1 = a β2 + b` traversed toward `limit`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Line {
    pub a: Scalar,
    pub b: Scalar,
    pub limit: Limit,
}

/// Limiting set of maximizing graphons.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum ExtremalClass {
    Empty,
    Complete,
    /// Both the empty and the complete graphon.
    EmptyOrComplete,
    /// Random bipartite graphon with equal halves and cross density `p`.
    DilutedBipartite { p: f64 },
    /// Complete multipartite graphon with `classes` equal classes.
    TuranClass { classes: u64 },
    /// Both Turán graphons, with `classes[0]` and `classes[1]` classes.
    TuranPair { classes: [u64; 2] },
}

impl ExtremalClass {
    pub fn name(&self) -> &'static str {
        match self {
            ExtremalClass::Empty => "empty",
            ExtremalClass::Complete => "complete",
            ExtremalClass::EmptyOrComplete => "empty_or_complete",
            ExtremalClass::DilutedBipartite { .. } => "diluted_bipartite",
            ExtremalClass::TuranClass { .. } => "turan",
            ExtremalClass::TuranPair { .. } => "turan_pair",
        }
    }

    pub fn parameters(&self) -> Value {
        match *self {
            ExtremalClass::DilutedBipartite { p } => json!({ "p": p }),
            ExtremalClass::TuranClass { classes } => json!({ "classes": classes }),
            ExtremalClass::TuranPair { classes } => json!({ "classes": classes }),
            _ => json!({}),
        }
    }
}

/// The critical slope closest to `a` for the chosen limit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CriticalProximity {
    /// Index `k` of `a_k`; `None` for the slope `-1` of the attractive regime
    /// and for the accumulation point `-3`.
    pub k: Option<u64>,
    pub slope: f64,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LineReport {
    pub class: ExtremalClass,
    pub nearest_critical: CriticalProximity,
    /// Set when a float input was snapped onto a critical value within
    /// [`FLOAT_TIE_TOL`].
    pub near_critical: bool,
}

impl LineReport {
    pub fn to_json(&self, line: &Line) -> Value {
        json!({
            "input": {
                "a": line.a.to_string(),
                "b": line.b.to_string(),
                "limit": line.limit,
            },
            "class": self.class.name(),
            "parameters": self.class.parameters(),
            "nearest_critical": self.nearest_critical,
            "near_critical": self.near_critical,
        })
    }
}

/// Compares a scalar with an exact target; floats within the tolerance count
/// as equal and set `snapped`.
fn cmp_scalar(x: &Scalar, target: &Rational, snapped: &mut bool) -> Ordering {
    match x {
        Scalar::Exact(r) => r.cmp(target),
        Scalar::Float(f) => {
            let t = to_f64(target);
            if (f - t).abs() <= FLOAT_TIE_TOL * t.abs().max(1.0) {
                if *f != t {
                    *snapped = true;
                }
                Ordering::Equal
            } else {
                f.total_cmp(&t)
            }
        }
    }
}

/// Position of `a` relative to `a_k`, valid for arbitrarily large `k`.
fn cmp_a_k(a: &Scalar, k: u64, snapped: &mut bool) -> Ordering {
    match a {
        Scalar::Exact(r) => {
            // a - a_k has the sign of p(k+1)(k+2) + d k(3k+5) for a = p/d, d > 0
            let (p, d) = (BigInt::from(*r.numer()), BigInt::from(*r.denom()));
            let k = BigInt::from(k);
            let s: BigInt = p * (&k + 1) * (&k + 2) + d * &k * (&k * 3 + 5);
            s.sign().cmp(&num_bigint::Sign::NoSign)
        }
        Scalar::Float(f) => {
            let kf = k as f64;
            let t = -kf * (3.0 * kf + 5.0) / ((kf + 1.0) * (kf + 2.0));
            if (f - t).abs() <= FLOAT_TIE_TOL * 3.0 {
                if *f != t {
                    *snapped = true;
                }
                Ordering::Equal
            } else {
                f.total_cmp(&t)
            }
        }
    }
}

fn a_k_f64(k: u64) -> f64 {
    let kf = k as f64;
    -kf * (3.0 * kf + 5.0) / ((kf + 1.0) * (kf + 2.0))
}

/// For `-3 < a <= 0`, the largest `k` with `a_k >= a`.
fn bracket(a: &Scalar, snapped: &mut bool) -> u64 {
    let below = |k: u64, s: &mut bool| cmp_a_k(a, k, s) != Ordering::Greater;
    let mut hi = 1u64;
    while below(hi, snapped) {
        hi = hi.saturating_mul(2);
        if hi == u64::MAX {
            return hi;
        }
    }
    let mut lo = hi / 2;
    // invariant: a_lo >= a > a_hi
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if below(mid, snapped) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Classifies the limit of maximizing graphons along a line.
pub fn classify_line(line: &Line) -> Result<LineReport> {
    let (af, bf) = (line.a.to_f64(), line.b.to_f64());
    if !af.is_finite() || !bf.is_finite() {
        return domain("line parameters must be finite");
    }
    let mut snapped = false;
    let b_sign = cmp_scalar(&line.b, &qi(0), &mut snapped);
    match line.limit {
        Limit::PlusInfinity => {
            let class = match (cmp_scalar(&line.a, &qi(-1), &mut snapped), b_sign) {
                (Ordering::Greater, _) | (Ordering::Equal, Ordering::Greater) => ExtremalClass::Complete,
                (Ordering::Less, _) | (Ordering::Equal, Ordering::Less) => ExtremalClass::Empty,
                (Ordering::Equal, Ordering::Equal) => ExtremalClass::EmptyOrComplete,
            };
            let nearest_critical = CriticalProximity { k: None, slope: -1.0, distance: (af + 1.0).abs() };
            Ok(LineReport { class, nearest_critical, near_critical: snapped })
        }
        Limit::MinusInfinity => {
            let zero = cmp_scalar(&line.a, &qi(0), &mut snapped);
            let minus_three = cmp_scalar(&line.a, &qi(-3), &mut snapped);
            let (class, nearest_critical) = if zero == Ordering::Greater {
                (ExtremalClass::Empty, CriticalProximity { k: Some(0), slope: 0.0, distance: af })
            } else if zero == Ordering::Equal {
                let p = 1.0 / (1.0 + (-2.0 * bf).exp());
                (ExtremalClass::DilutedBipartite { p }, CriticalProximity { k: Some(0), slope: 0.0, distance: af.abs() })
            } else if minus_three != Ordering::Greater {
                (ExtremalClass::Complete, CriticalProximity { k: None, slope: -3.0, distance: (af + 3.0).abs() })
            } else {
                let k = bracket(&line.a, &mut snapped);
                let class = if cmp_a_k(&line.a, k, &mut snapped) == Ordering::Equal {
                    match b_sign {
                        Ordering::Greater => ExtremalClass::TuranClass { classes: k + 2 },
                        Ordering::Less => ExtremalClass::TuranClass { classes: k + 1 },
                        Ordering::Equal => ExtremalClass::TuranPair { classes: [k + 1, k + 2] },
                    }
                } else {
                    ExtremalClass::TuranClass { classes: k + 2 }
                };
                let (dk, dk1) = ((af - a_k_f64(k)).abs(), (af - a_k_f64(k + 1)).abs());
                let (kk, d) = if dk <= dk1 { (k, dk) } else { (k + 1, dk1) };
                (class, CriticalProximity { k: Some(kk), slope: a_k_f64(kk), distance: d })
            };
            Ok(LineReport { class, nearest_critical, near_critical: snapped })
        }
    }
}

/// A point of the lower boundary minimizing `a e + t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundaryMinimizer {
    /// `Some(k)` for the Turán vertex `v_k`, `None` for the complete limit.
    pub vertex: Option<u64>,
    #[serde(serialize_with = "ser_rational")]
    pub e: Rational,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(to_f64(r))
}

/// Edge densities where `a e + t` is minimized over the lower boundary of the
/// realizable region, for `a < 0`. These are `e_{k+1}` on `(a_{k+1}, a_k)`,
/// both `e_k` and `e_{k+1}` at `a = a_k`, and `e = 1` once `a <= -3`.
pub fn razborov_minimizer(a: Scalar) -> Result<Vec<BoundaryMinimizer>> {
    let mut snapped = false;
    if !a.to_f64().is_finite() || cmp_scalar(&a, &qi(0), &mut snapped) != Ordering::Less {
        return domain(format!("boundary minimizer needs a < 0, got {a}"));
    }
    if cmp_scalar(&a, &qi(-3), &mut snapped) != Ordering::Greater {
        return Ok(vec![BoundaryMinimizer { vertex: None, e: qi(1) }]);
    }
    let vertex = |k: u64| BoundaryMinimizer { vertex: Some(k), e: q(k as i128, k as i128 + 1) };
    let k = bracket(&a, &mut snapped);
    if cmp_a_k(&a, k, &mut snapped) == Ordering::Equal {
        Ok(vec![vertex(k), vertex(k + 1)])
    } else {
        Ok(vec![vertex(k + 1)])
    }
}

/// `a_k` as a float, for reporting.
pub fn critical_slope(k: u64) -> f64 {
    to_f64(&a_k(k))
}

/// Limit of the model along a ray `β + r·o` as `r → ∞`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DirectionLimit {
    pub report: DirectionReport,
    /// Side of the hyperplane through the critical facet, when `o` is a
    /// critical ray and `β` was supplied.
    pub side: Option<i8>,
    /// `None` only on the vertical ray `o_0` without a base `β`.
    pub class: Option<ExtremalClass>,
}

/// Classifies a direction and, on a critical ray with a base point, resolves
/// which end of the critical facet wins.
///
/// Inside a cone `C_k` the limit is the Turán graphon with `k + 1` classes.
/// On `o_k`, `k >= 1`, it is `k + 2` classes for `β` on or above `H_k` and
/// `k + 1` below. On `o_{-1}` the sign of `β1 + β2` picks complete or empty,
/// and on `o_0` the limit retains each bipartite edge with probability
/// `e^{2β1}/(1 + e^{2β1})`.
pub fn direction_limit(o: &Direction, beta: Option<(Scalar, Scalar)>) -> Result<DirectionLimit> {
    let report = classify_direction(o)?;
    let (side, class) = match (report.classification, beta) {
        (RayClassification::InteriorCone(k), _) => (None, Some(ExtremalClass::TuranClass { classes: k + 1 })),
        (RayClassification::InteriorConeAtOne, _) => (None, Some(ExtremalClass::Complete)),
        (RayClassification::CriticalRay(-1), None) => (None, Some(ExtremalClass::EmptyOrComplete)),
        (RayClassification::CriticalRay(-1), Some((b1, b2))) => {
            let side = match (b1.as_exact(), b2.as_exact()) {
                (Some(x), Some(y)) => signum(&(x + y)),
                _ => sign_f64(b1.to_f64() + b2.to_f64()),
            };
            let class = match side {
                1 => ExtremalClass::Complete,
                -1 => ExtremalClass::Empty,
                _ => ExtremalClass::EmptyOrComplete,
            };
            (Some(side), Some(class))
        }
        (RayClassification::CriticalRay(0), None) => (None, None),
        (RayClassification::CriticalRay(0), Some((b1, _))) => {
            let p = 1.0 / (1.0 + (-2.0 * b1.to_f64()).exp());
            (None, Some(ExtremalClass::DilutedBipartite { p }))
        }
        (RayClassification::CriticalRay(k), None) => {
            let k = k as u64;
            (None, Some(ExtremalClass::TuranPair { classes: [k + 1, k + 2] }))
        }
        (RayClassification::CriticalRay(k), Some(b)) => {
            let side = hyperplane_side(k, b)?;
            let classes = if side >= 0 { k as u64 + 2 } else { k as u64 + 1 };
            (Some(side), Some(ExtremalClass::TuranClass { classes }))
        }
    };
    Ok(DirectionLimit { report, side, class })
}

fn sign_f64(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

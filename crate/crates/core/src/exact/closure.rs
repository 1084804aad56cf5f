//! Limits of the finite family along diverging parameter rays.
//!
//! Along `β + r·o` the family concentrates on the face of the support that
//! `o` exposes. For a critical direction `o_k` at `n` divisible by
//! `(k+1)(k+2)` that face is `{v_k, v_{k+1}}`, giving a two-point family whose
//! only remaining parameter is `⟨l_k, β⟩`.

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::geometry::{l_k_exact, v_k};
use crate::graph::DensityPoint;
use crate::rational::{qi, to_f64, Rational, Scalar};

use super::family::{exponent, ln_biguint, log_sum_exp, nu_turan, Distribution, FiniteFamily};
use super::{exact_family_where, exposed_face, SupportTable};

/// `P_{n,k,β}` on `{v_k, v_{k+1}}` with Turán-isomorphic counts.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoPointFamily {
    pub n: usize,
    pub k: u64,
    /// `⟨(1, k(3k+5)/((k+1)(k+2))), β⟩`, a multiple of `⟨l_k, β⟩`.
    pub reduced_parameter: Scalar,
    /// `n²⟨β, v_{k+1} - v_k⟩`.
    pub exponent: f64,
    /// `ν(T(n, k+1))` and `ν(T(n, k+2))`.
    pub counts: [BigUint; 2],
    /// `ln P(v_{k+1}) - ln P(v_k)`.
    pub log_ratio: f64,
    pub distribution: Distribution,
}

impl TwoPointFamily {
    /// `(P(v_k), P(v_{k+1}))`.
    pub fn probs(&self) -> (f64, f64) {
        let k = self.k;
        (self.distribution.prob(&v_k(k)), self.distribution.prob(&v_k(k + 1)))
    }
}

fn check_divisible(n: usize, k: u64) -> Result<()> {
    if k == 0 {
        return domain("two-point closure needs k >= 1");
    }
    let m = (k + 1) * (k + 2);
    if n == 0 || !(n as u64).is_multiple_of(m) {
        return domain(format!(
            "n = {n} must be a positive multiple of (k+1)(k+2) = {m} so that v_k and v_{{k+1}} are realizable"
        ));
    }
    Ok(())
}

/// `n²⟨β, v_{k+1} - v_k⟩`, exact when `β` is.
fn two_point_exponent(n: usize, k: u64, beta: (Scalar, Scalar)) -> f64 {
    let (a, b) = (v_k(k), v_k(k + 1));
    let (de, dt) = (b.e - a.e, b.t - a.t);
    let nn = (n * n) as i128;
    match (beta.0.as_exact(), beta.1.as_exact()) {
        (Some(b1), Some(b2)) => to_f64(&((b1 * de + b2 * dt) * qi(nn))),
        _ => (beta.0.to_f64() * to_f64(&de) + beta.1.to_f64() * to_f64(&dt)) * nn as f64,
    }
}

pub fn closure_two_point(n: usize, k: u64, beta: (Scalar, Scalar)) -> Result<TwoPointFamily> {
    check_divisible(n, k)?;
    if !beta.0.to_f64().is_finite() || !beta.1.to_f64().is_finite() {
        return domain("family parameters must be finite");
    }
    let (lx, ly) = l_k_exact(k as i64)?;
    let reduced_parameter = match (beta.0.as_exact(), beta.1.as_exact()) {
        (Some(b1), Some(b2)) => Scalar::Exact(lx * b1 + ly * b2),
        _ => Scalar::Float(to_f64(&lx) * beta.0.to_f64() + to_f64(&ly) * beta.1.to_f64()),
    };
    let exponent = two_point_exponent(n, k, beta);
    let counts = [nu_turan(n, k as usize + 1)?, nu_turan(n, k as usize + 2)?];
    let (lc0, lc1) = (ln_biguint(&counts[0]), ln_biguint(&counts[1]));
    let (distribution, _) = Distribution::from_log_weights(vec![(v_k(k), lc0), (v_k(k + 1), lc1 + exponent)])?;
    Ok(TwoPointFamily {
        n,
        k,
        reduced_parameter,
        exponent,
        counts,
        log_ratio: exponent + lc1 - lc0,
        distribution,
    })
}

/// Limit of `P_{n, β + r·o}` as `r → ∞`: the family restricted to the face of
/// the support exposed by `o`.
pub fn closure_limit(table: &SupportTable, beta: (f64, f64), o: (Rational, Rational)) -> Result<FiniteFamily> {
    if o.0 == qi(0) && o.1 == qi(0) {
        return domain("closure direction must be nonzero");
    }
    let face = exposed_face(&table.points(), o);
    exact_family_where(table, beta, |x| face.contains(x))
}

/// One step of a closure convergence schedule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClosureStep {
    pub r: f64,
    /// `TV(P_{n, β + r·o}, closure limit)`.
    pub tv: f64,
    /// Natural log of `tv`, finite even when `tv` underflows.
    pub log_tv: f64,
}

/// Total variation between `P_{n, β + r·o}` and its closure limit along `o`
/// for each `r` in the schedule.
///
/// The limit is proportional to the family on the exposed face, so the
/// distance equals the mass off the face. It is evaluated as a ratio of
/// log-sum-exps with the `o`-part of every exponent taken relative to the
/// face value in exact arithmetic, so it stays accurate far below `1e-16`.
pub fn closure_convergence_check(
    table: &SupportTable,
    beta: (f64, f64),
    o: (Rational, Rational),
    schedule: &[f64],
) -> Result<Vec<ClosureStep>> {
    if o.0 == qi(0) && o.1 == qi(0) {
        return domain("closure direction must be nonzero");
    }
    if !beta.0.is_finite() || !beta.1.is_finite() || schedule.iter().any(|r| !r.is_finite() || *r < 0.0) {
        return domain("closure needs finite parameters and nonnegative radii");
    }
    let n = table.n();
    let nn = qi((n * n) as i128);
    let rows: Vec<(f64, Rational)> = table
        .entries()
        .map(|(e, t, c)| {
            let x = DensityPoint::from_counts(n, e, t);
            ((c as f64).ln() + exponent(n, beta, e, t), (o.0 * x.e + o.1 * x.t) * nn)
        })
        .collect();
    let top = rows.iter().map(|r| r.1).max().expect("support is nonempty");
    Ok(schedule
        .iter()
        .map(|&r| {
            let mut all = Vec::with_capacity(rows.len());
            let mut off = Vec::new();
            for (w, s) in &rows {
                let gap = to_f64(&(*s - top));
                let lw = w + r * gap;
                all.push(lw);
                if *s != top {
                    off.push(lw);
                }
            }
            let log_tv = log_sum_exp(&off) - log_sum_exp(&all);
            ClosureStep { r, tv: log_tv.exp(), log_tv }
        })
        .collect())
}

/// Exact and asymptotic `P(v_{k+1})/P(v_k)` at one `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RatioPoint {
    pub n: usize,
    pub log_ratio: f64,
    /// `ln C - ½ ln n + n ln((k+2)/(k+1)) + n²⟨β, v_{k+1} - v_k⟩`.
    pub stirling_log_ratio: f64,
}

/// The constant `ln C` in the Stirling form of `ν(T(n,k+2))/ν(T(n,k+1))` at
/// `n` divisible by `(k+1)(k+2)`.
pub fn stirling_log_constant(k: u64) -> f64 {
    let (a, b) = (k as f64 + 1.0, k as f64 + 2.0);
    -0.5 * (2.0 * std::f64::consts::PI).ln() + 0.5 * b * b.ln() - 0.5 * a * a.ln() - b.ln()
}

pub fn ratio_trend(k: u64, beta: (Scalar, Scalar), ns: &[usize]) -> Result<Vec<RatioPoint>> {
    ns.iter()
        .map(|&n| {
            let fam = closure_two_point(n, k, beta)?;
            let nf = n as f64;
            let growth = ((k as f64 + 2.0) / (k as f64 + 1.0)).ln();
            Ok(RatioPoint {
                n,
                log_ratio: fam.log_ratio,
                stirling_log_ratio: stirling_log_constant(k) - 0.5 * nf.ln() + nf * growth + fam.exponent,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{enumerate, enumerate_support, exact_family, tv_distance, EnumerationOptions};
    use crate::geometry::o_k;
    use crate::rational::q;
    use proptest::prelude::*;

    fn ex(n: i128, d: i128) -> Scalar {
        Scalar::Exact(q(n, d))
    }

    #[test]
    fn two_point_at_zero() {
        let f = closure_two_point(6, 1, (ex(0, 1), ex(0, 1))).unwrap();
        let (p1, p2) = f.probs();
        assert!((p1 - 0.4).abs() < 1e-15 && (p2 - 0.6).abs() < 1e-15);
        assert_eq!(f.counts, [BigUint::from(10u32), BigUint::from(15u32)]);
        assert!((f.log_ratio - 1.5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn two_point_h_plus() {
        let f = closure_two_point(6, 1, (ex(10, 1), ex(-6, 1))).unwrap();
        // n²⟨β, v_2 - v_1⟩ = 36 (10/6 - 6·2/9) = 12
        assert!((f.exponent - 12.0).abs() < 1e-12);
        assert!(f.probs().1 > 0.999);
    }

    #[test]
    fn divisibility() {
        assert!(closure_two_point(7, 1, (ex(0, 1), ex(0, 1))).is_err());
        assert!(closure_two_point(6, 2, (ex(0, 1), ex(0, 1))).is_err());
        assert!(closure_two_point(12, 2, (ex(0, 1), ex(0, 1))).is_ok());
        assert!(closure_two_point(6, 0, (ex(0, 1), ex(0, 1))).is_err());
    }

    #[test]
    fn statistic_counts_at_v1_v2_n6() {
        let en = enumerate(6, EnumerationOptions::default(), None).unwrap();
        assert_eq!(en.table.count_at(&v_k(1)), 10);
        assert_eq!(en.multipartite_count(&[3, 3]), 10);
        assert_eq!(en.multipartite_count(&[2, 2, 2]), 15);
        let face = exposed_face(&en.table.points(), o_k(1).unwrap().as_exact().unwrap());
        assert_eq!(face, vec![v_k(1), v_k(2)]);
    }

    #[test]
    fn closure_along_o1_decreases() {
        let t = enumerate_support(6).unwrap();
        let o = o_k(1).unwrap().as_exact().unwrap();
        let steps = closure_convergence_check(&t, (1.0, 1.0), o, &[0.0, 5.0, 10.0, 20.0, 40.0]).unwrap();
        assert!(steps[0].tv > 0.0 && steps[0].tv < 1.0);
        for w in steps.windows(2) {
            assert!(w[1].log_tv < w[0].log_tv);
        }
        // direct TV agrees where it is representable
        let lim = closure_limit(&t, (1.0, 1.0), o).unwrap();
        for s in &steps[..3] {
            let (b1, b2) = (1.0 + s.r * to_f64(&o.0), 1.0 + s.r * to_f64(&o.1));
            let full = exact_family(&t, (b1, b2)).unwrap();
            let direct = tv_distance(&full.distribution, &lim.distribution);
            assert!((direct - s.tv).abs() < 1e-12 * s.tv.max(1e-3), "r = {}: {direct} vs {}", s.r, s.tv);
        }
    }

    #[test]
    fn closure_along_o_minus1_is_edge_complete_family() {
        let t = enumerate_support(6).unwrap();
        // at finite n the face through the empty and complete graph has normal (-1, n/(n-2))
        let o = (qi(-1), q(6, 4));
        let lim = closure_limit(&t, (1.0, -1.0), o).unwrap();
        let ec = crate::exact::edge_complete_family(6, (1.0, -1.0)).unwrap();
        assert!(tv_distance(&lim.distribution, &ec) < 1e-14);
        let steps = closure_convergence_check(&t, (1.0, -1.0), o, &[10.0, 20.0]).unwrap();
        assert!(steps[1].tv < steps[0].tv);
    }

    #[test]
    fn closure_along_o0_is_triangle_free_family() {
        let t = enumerate_support(5).unwrap();
        let lim = closure_limit(&t, (0.7, 0.0), (qi(0), qi(-1))).unwrap();
        let tf = crate::exact::triangle_free_family(&t, 0.7).unwrap();
        assert!(tv_distance(&lim.distribution, &tf) < 1e-14);
    }

    #[test]
    fn generic_direction_limit_is_face_family() {
        // o = (1, -1/2) lies in the open cone at v_3, but at n = 6 its face is
        // the collinear edge through v_{2,6}, v_{3,6}, v_{4,6}, v_{5,6}
        let t = enumerate_support(6).unwrap();
        let o = (qi(1), q(-1, 2));
        let face = exposed_face(&t.points(), o);
        assert_eq!(face.len(), 4);
        let steps = closure_convergence_check(&t, (0.0, 0.0), o, &[10.0, 40.0, 80.0]).unwrap();
        assert!(steps[2].tv < 1e-6);
        assert!(steps.windows(2).all(|w| w[1].tv < w[0].tv));
    }

    #[test]
    fn ratio_trend_k1() {
        let ns: Vec<usize> = (1..=10).map(|i| 6 * i).collect();
        let zero = ratio_trend(1, (ex(0, 1), ex(0, 1)), &ns).unwrap();
        assert!((zero[0].log_ratio - 1.5f64.ln()).abs() < 1e-15);
        assert!(zero.windows(2).all(|w| w[1].log_ratio > w[0].log_ratio));
        let last = zero.last().unwrap();
        assert!((last.log_ratio - last.stirling_log_ratio).abs() < 0.01);
        let minus = ratio_trend(1, (ex(20, 1), ex(-80, 1)), &ns).unwrap();
        assert!(minus.last().unwrap().log_ratio < -1000.0);
        assert!(ratio_trend(1, (ex(0, 1), ex(0, 1)), &[7]).is_err());
    }

    #[test]
    fn stirling_constant_k1() {
        assert!((stirling_log_constant(1).exp() - 0.3455).abs() < 1e-4);
    }

    proptest! {
        #[test]
        fn two_point_reparametrization_invariance(
            b1n in -500i128..500, b2n in -500i128..500, d in 1i128..30, cn in -400i128..400, cd in 1i128..30, k in 1u64..4
        ) {
            let n = ((k + 1) * (k + 2)) as usize;
            let (b1, b2) = (q(b1n, d), q(b2n, d));
            let c = q(cn, cd);
            let (ox, oy) = o_k(k as i64).unwrap().as_exact().unwrap();
            let f = closure_two_point(n, k, (b1.into(), b2.into())).unwrap();
            let g = closure_two_point(n, k, ((b1 + c * ox).into(), (b2 + c * oy).into())).unwrap();
            prop_assert_eq!(&f.reduced_parameter, &g.reduced_parameter);
            prop_assert_eq!(f.distribution, g.distribution);
        }
    }
}

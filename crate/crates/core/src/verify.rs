//! Self-checks behind `etquant verify`, grouped into suites.

use std::time::Instant;

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{
    closure_convergence_check, convex_support, edge_complete_family, enumerate, exact_family, ratio_trend,
    EnumerationOptions,
};
use crate::geometry::{a_k, o_k, razborov_lower, razborov_lower_exact, v_k, Direction, ExtremePoint};
use crate::graph::{turan_class_sizes, turan_densities, DensityPoint};
use crate::harness::{run_tracked, turan_mode_check, FigurePreset};
use crate::mcmc::{Init, Sampler, SamplerConfig};
use crate::rational::{q, qi, to_f64, Scalar};
use crate::variational::{classify_line, solve_scalar, ExtremalClass, Limit, Line};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Geometry,
    Variational,
    Exact,
    Closure,
    Mcmc,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "geometry" => Suite::Geometry,
            "variational" => Suite::Variational,
            "exact" => Suite::Exact,
            "closure" => Suite::Closure,
            "mcmc" => Suite::Mcmc,
            "all" => Suite::All,
            _ => return Err(Error::Parse(format!("unknown suite `{s}`"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub suite: Suite,
    pub passed: bool,
    pub checks: Vec<Check>,
}

fn timed(name: &str, f: impl FnOnce() -> Result<(bool, String)>) -> Check {
    let start = Instant::now();
    let (passed, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
    Check { name: name.into(), passed, detail, seconds: start.elapsed().as_secs_f64() }
}

pub fn run_suite(suite: Suite) -> Report {
    let checks = match suite {
        Suite::Geometry => geometry_checks(),
        Suite::Variational => variational_checks(),
        Suite::Exact => exact_checks(),
        Suite::Closure => closure_checks(),
        Suite::Mcmc => mcmc_checks(),
        Suite::All => [geometry_checks(), variational_checks(), exact_checks(), closure_checks(), mcmc_checks()].concat(),
    };
    Report { suite, passed: checks.iter().all(|c| c.passed), checks }
}

pub type CriticalDirectionFn<'a> = &'a dyn Fn(i64) -> Result<Direction>;

/// `⟨o_k, v_{k+1} - v_k⟩ = 0` exactly for `k = 0..=k_max`, and `o_{-1}`
/// against `(1, 1) - v_0`. The direction function is injectable so a
/// corrupted implementation can be shown to fail.
pub fn orthogonality_check(o: CriticalDirectionFn<'_>, k_max: u64) -> Check {
    timed("critical directions are facet normals", || {
        let dot = |d: &Direction, a: &DensityPoint, b: &DensityPoint| -> Result<bool> {
            let (x, y) = d.as_exact().ok_or_else(|| Error::Domain("inexact critical direction".into()))?;
            Ok(x * (b.e - a.e) + y * (b.t - a.t) == qi(0))
        };
        if !dot(&o(-1)?, &v_k(0), &ExtremePoint::One.point())? {
            return Ok((false, "o_-1 fails".into()));
        }
        for k in 0..=k_max {
            if !dot(&o(k as i64)?, &v_k(k), &v_k(k + 1))? {
                return Ok((false, format!("o_{k} is not normal to v_{k}v_{}", k + 1)));
            }
        }
        Ok((true, format!("k = -1..={k_max}")))
    })
}

fn geometry_checks() -> Vec<Check> {
    vec![
        orthogonality_check(&o_k, 200),
        timed("critical slopes decrease toward -3", || {
            let ok = (0..200).all(|k| a_k(k + 1) < a_k(k));
            let a200 = to_f64(&a_k(200));
            Ok((ok && a200 > -3.0 && a200 < -2.97, format!("a_200 = {a200}")))
        }),
        timed("lower boundary passes through the Turán points", || {
            for k in 1..=50 {
                let v = v_k(k);
                if razborov_lower_exact(v.e)? != Some(v.t) {
                    return Ok((false, format!("mismatch at k = {k}")));
                }
            }
            Ok((true, "k = 1..=50".into()))
        }),
        timed("lower boundary is continuous and concave on each segment", || {
            let mut gap: f64 = 0.0;
            let mut worst: f64 = f64::NEG_INFINITY;
            for k in 1..=50u64 {
                let ek = k as f64 / (k as f64 + 1.0);
                if k >= 2 {
                    gap = gap.max((razborov_lower(ek - 1e-15)? - razborov_lower((ek + 1e-15).min(1.0))?).abs());
                }
                let (lo, hi) = ((k as f64 - 1.0) / k as f64, ek);
                let vals: Vec<f64> =
                    (0..=1000).map(|i| razborov_lower(lo + (hi - lo) * i as f64 / 1000.0)).collect::<Result<_>>()?;
                for w in vals.windows(3) {
                    worst = worst.max(w[0] - 2.0 * w[1] + w[2]);
                }
            }
            Ok((gap < 1e-12 && worst <= 1e-12, format!("max gap {gap:.3e}, max second difference {worst:.3e}")))
        }),
    ]
}

/// Argmin of `a e + lower(e)` over `grid` (precomputed lower values).
fn grid_argmin(a: f64, grid: &[(f64, f64)]) -> f64 {
    grid.iter()
        .map(|&(e, t)| (e, a * e + t))
        .fold((0.0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc })
        .0
}

fn variational_checks() -> Vec<Check> {
    vec![
        timed("line classification matches boundary minimization", || {
            let mut es: Vec<f64> = (0..=1_000_000).map(|i| i as f64 / 1e6).collect();
            es.extend((1..100_000).map(|k| k as f64 / (k as f64 + 1.0)));
            let grid: Vec<(f64, f64)> = es.into_iter().map(|e| Ok((e, razborov_lower(e)?))).collect::<Result<_>>()?;
            let slopes: Vec<f64> = (0..200_000u64).map(|k| to_f64(&a_k(k))).collect();
            let mut stream = crate::mcmc::Stream::new(2024);
            let mut checked = 0;
            while checked < 1000 {
                let a = -3.0 * stream.uniform();
                let i = slopes.partition_point(|&s| s > a);
                let near = [i.saturating_sub(1), i.min(slopes.len() - 1)].iter().any(|&j| (a - slopes[j]).abs() < 1e-9);
                if a == 0.0 || near {
                    continue;
                }
                let e = grid_argmin(a, &grid);
                let idx = (e / (1.0 - e)).round() as u64;
                let line = Line { a: Scalar::Float(a), b: Scalar::Exact(qi(0)), limit: Limit::MinusInfinity };
                match classify_line(&line)?.class {
                    ExtremalClass::TuranClass { classes } if classes == idx + 1 => {}
                    c => return Ok((false, format!("a = {a}: {c:?} vs grid e = {e}"))),
                }
                checked += 1;
            }
            Ok((true, "1000 slopes".into()))
        }),
        timed("attractive regime maximizers", || {
            let b2 = 1e4;
            let at = |a: f64, b: f64| solve_scalar(a * b2 + b, b2);
            let mut detail = Vec::new();
            for (a, b, target) in [(-0.5, 0.0, 1.0), (-1.0, 1.0, 1.0), (-2.0, 0.0, 0.0), (-1.0, -1.0, 0.0)] {
                let s = at(a, b)?;
                let ok = s.len() == 1 && (s[0].u - target).abs() < 1e-3;
                detail.push(format!("({a}, {b}) -> {:?}", s.iter().map(|m| m.u).collect::<Vec<_>>()));
                if !ok {
                    return Ok((false, detail.join("; ")));
                }
            }
            let s = at(-1.0, 0.0)?;
            let ok = s.len() == 2 && (s[0].objective - s[1].objective).abs() < 1e-6 && s[0].u < 1e-3 && s[1].u > 1.0 - 1e-3;
            detail.push(format!("(-1, 0) -> {} maximizers", s.len()));
            Ok((ok, detail.join("; ")))
        }),
    ]
}

fn exact_checks() -> Vec<Check> {
    vec![
        timed("n = 6 enumeration, hull, Turán counts and the face on L_1", || {
            let en = enumerate(6, EnumerationOptions::default(), None)?;
            let t = &en.table;
            let total_ok = t.total() == 1u128 << 15;
            let hull = convex_support(t);
            let want = [v_k(0), v_k(1), v_k(2), DensityPoint::new(q(5, 6), q(5, 9))];
            let hull_ok = want.iter().all(|w| hull.contains(w));
            let counts_ok = en.multipartite_count(&turan_class_sizes(6, 2)?) == 10
                && en.multipartite_count(&turan_class_sizes(6, 3)?) == 15
                && crate::exact::nu_turan(6, 2)? == BigUint::from(10u32)
                && crate::exact::nu_turan(6, 3)? == BigUint::from(15u32);
            let (ox, oy) = o_k(1)?.as_exact().expect("exact");
            let level = ox * v_k(1).e + oy * v_k(1).t;
            let on_line: Vec<DensityPoint> = t.points().into_iter().filter(|p| ox * p.e + oy * p.t == level).collect();
            let line_ok = on_line == vec![v_k(1), v_k(2)];
            Ok((
                total_ok && hull_ok && counts_ok && line_ok,
                format!("total {total_ok}, hull {hull_ok}, counts {counts_ok}, L_1 face {line_ok}"),
            ))
        }),
        timed("empty/complete family", || {
            let d = edge_complete_family(6, (0.0, 0.0))?;
            let half = d.iter().all(|(_, p)| p == 0.5);
            let d = edge_complete_family(6, (1.0, -1.0))?;
            let p = d.prob(&turan_densities(6, 6)?);
            let want = 10f64.exp() / (1.0 + 10f64.exp());
            Ok((half && (p - want).abs() < 1e-15, format!("P(complete) = {p}")))
        }),
    ]
}

/// Regression bound on the closure distance at `r = 40`, frozen from the
/// first exact evaluation (2.3245e-8).
pub const CLOSURE_TV_AT_40: f64 = 2.33e-8;

fn closure_checks() -> Vec<Check> {
    vec![
        timed("closure along o_1 at n = 6", || {
            let en = enumerate(6, EnumerationOptions::default(), None)?;
            let o = o_k(1)?.as_exact().expect("exact");
            let steps = closure_convergence_check(&en.table, (1.0, 1.0), o, &[5.0, 10.0, 20.0, 40.0])?;
            let dec = steps.windows(2).all(|w| w[1].log_tv < w[0].log_tv);
            let last = steps[3].tv;
            Ok((dec && last < CLOSURE_TV_AT_40, format!("tv = {:?}", steps.iter().map(|s| s.tv).collect::<Vec<_>>())))
        }),
        timed("phase transition across H_1", || {
            let ns: Vec<usize> = (1..=10).map(|i| 6 * i).collect();
            let ex = |a: i128, b: i128| (Scalar::Exact(qi(a)), Scalar::Exact(qi(b)));
            let plus = ratio_trend(1, ex(10, -6), &ns)?;
            let plus_ok = plus.windows(2).all(|w| w[1].log_ratio > w[0].log_ratio)
                && plus.iter().all(|p| p.log_ratio >= (p.n * p.n) as f64 / 3.0);
            let minus = ratio_trend(1, ex(20, -80), &ns)?;
            let minus_ok = minus.last().map(|p| p.log_ratio < -1000.0).unwrap_or(false);
            let zero = ratio_trend(1, ex(0, 0), &ns)?;
            let fam = crate::exact::closure_two_point(6, 1, ex(0, 0))?;
            let exact_ok = &fam.counts[1] * 2u32 == &fam.counts[0] * 3u32;
            let last = zero.last().expect("nonempty");
            let reference = 60.0 * 1.5f64.ln() - 0.5 * 60f64.ln();
            let rel = (last.log_ratio - reference).abs() / reference;
            Ok((
                plus_ok && minus_ok && exact_ok && rel < 0.05,
                format!("H+ {plus_ok}, H- {minus_ok}, ratio 3/2 {exact_ok}, relative gap at 60 {rel:.4}"),
            ))
        }),
    ]
}

fn mcmc_checks() -> Vec<Check> {
    let mut checks = vec![timed("independent edges at zero triangle weight", || {
        let mut worst: f64 = 0.0;
        for (i, b1) in [-1.0f64, 0.0, 1.0].into_iter().enumerate() {
            let cfg = SamplerConfig { n: 20, beta: (b1, 0.0), steps: 1, seed: 100 + i as u64, init: Init::Empty, thin: 1 };
            let mut s = Sampler::new(&cfg)?;
            for _ in 0..100_000 {
                s.step();
            }
            let mut sum = 0.0;
            for _ in 0..1_000_000 {
                s.step();
                sum += s.counts().0 as f64;
            }
            let p = (2.0 * b1).exp() / (1.0 + (2.0 * b1).exp());
            worst = worst.max((sum / 1e6 / 190.0 - p).abs());
        }
        Ok((worst < 0.01, format!("max deviation {worst:.4}")))
    })];
    checks.push(timed("n = 4 chain matches the exact law", || {
        let beta = (0.3, -0.2);
        let en = enumerate(4, EnumerationOptions::default(), None)?;
        let fam = exact_family(&en.table, beta)?;
        let cfg = SamplerConfig { n: 4, beta, steps: 1, seed: 5, init: Init::Empty, thin: 1 };
        let mut s = Sampler::new(&cfg)?;
        let mut hist = std::collections::BTreeMap::new();
        let m = 10_000_000u64;
        for _ in 0..m {
            s.step();
            *hist.entry(s.counts()).or_insert(0u64) += 1;
        }
        let tv: f64 = en
            .table
            .entries()
            .map(|(e, t, _)| {
                let emp = *hist.get(&(e, t)).unwrap_or(&0) as f64 / m as f64;
                (emp - fam.distribution.prob(&DensityPoint::from_counts(4, e, t))).abs()
            })
            .sum::<f64>()
            / 2.0;
        Ok((tv < 0.02, format!("tv = {tv:.4}")))
    }));
    for p in FigurePreset::ALL {
        checks.push(timed(&format!("{} mode and stability", p.name()), || {
            let m = turan_mode_check(FigurePreset::NODES, p.beta())?;
            let r = p.predicted_classes();
            let target = turan_densities(FigurePreset::NODES, r)?.to_f64();
            let cfg = SamplerConfig { n: FigurePreset::NODES, beta: p.beta(), steps: 1_000_000, seed: 9, init: Init::Turan(r), thin: 1_000_000 };
            let (_, excursion) = run_tracked(&cfg, target)?;
            Ok((m.r_star == r && excursion < 0.05, format!("r* = {}, max excursion {excursion:.4}", m.r_star)))
        }));
    }
    checks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry_suite_passes() {
        let r = run_suite(Suite::Geometry);
        assert!(r.passed, "{:?}", r.checks);
    }

    #[test]
    fn corrupted_direction_fails_orthogonality() {
        let bad = |k: i64| -> Result<Direction> {
            let d = o_k(k)?;
            if k == 3 {
                let (x, y) = d.as_exact().expect("exact");
                return Direction::exact(x, -y);
            }
            Ok(d)
        };
        assert!(!orthogonality_check(&bad, 200).passed);
    }

    #[test]
    fn suite_names() {
        assert_eq!("all".parse::<Suite>().unwrap(), Suite::All);
        assert!("bogus".parse::<Suite>().is_err());
    }
}

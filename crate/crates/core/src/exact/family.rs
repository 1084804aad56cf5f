//! Exact finite-`n` distributions over density points.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde_json::{json, Value};
use statrs::function::gamma::ln_gamma;

use crate::error::{domain, Result};
use crate::graph::{turan_class_sizes, DensityPoint};

use super::{Enumeration, SupportTable};

/// `ln Σ exp(w_i)`, shifted by the maximum and accurate when one term dominates.
pub fn log_sum_exp(ws: &[f64]) -> f64 {
    let Some((imax, &m)) = ws.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)) else {
        return f64::NEG_INFINITY;
    };
    if m == f64::NEG_INFINITY {
        return m;
    }
    let rest: f64 = ws
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != imax)
        .map(|(_, &w)| (w - m).exp())
        .sum();
    m + rest.ln_1p()
}

/// A probability distribution on finitely many density points, stored as
/// log-probabilities sorted by point.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    entries: Vec<(DensityPoint, f64)>,
}

impl Distribution {
    /// Normalizes unnormalized log-weights; returns the distribution and the
    /// log-normalizer.
    pub fn from_log_weights(mut entries: Vec<(DensityPoint, f64)>) -> Result<(Self, f64)> {
        if entries.is_empty() {
            return domain("distribution needs a nonempty support");
        }
        if entries.iter().any(|(_, w)| w.is_nan() || *w == f64::INFINITY) {
            return domain("log-weights must be finite or -inf");
        }
        entries.sort_by_key(|a| a.0);
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return domain("duplicate support point");
        }
        let ws: Vec<f64> = entries.iter().map(|e| e.1).collect();
        let lz = log_sum_exp(&ws);
        if lz == f64::NEG_INFINITY {
            return domain("distribution has zero total mass");
        }
        for e in &mut entries {
            e.1 -= lz;
        }
        Ok((Distribution { entries }, lz))
    }

    pub fn point_mass(x: DensityPoint) -> Self {
        Distribution { entries: vec![(x, 0.0)] }
    }

    pub fn log_prob(&self, x: &DensityPoint) -> f64 {
        match self.entries.binary_search_by(|e| e.0.cmp(x)) {
            Ok(i) => self.entries[i].1,
            Err(_) => f64::NEG_INFINITY,
        }
    }

    pub fn prob(&self, x: &DensityPoint) -> f64 {
        self.log_prob(x).exp()
    }

    /// `(point, probability)` in point order.
    pub fn iter(&self) -> impl Iterator<Item = (DensityPoint, f64)> + '_ {
        self.entries.iter().map(|&(x, lp)| (x, lp.exp()))
    }

    pub fn log_entries(&self) -> &[(DensityPoint, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.iter().map(|(_, p)| p).sum()
    }

    /// Expected `(e, t)`.
    pub fn mean(&self) -> (f64, f64) {
        self.iter().fold((0.0, 0.0), |(a, b), (x, p)| {
            let (e, t) = x.to_f64();
            (a + p * e, b + p * t)
        })
    }

    /// Mass on points satisfying `pred`.
    pub fn mass_where(&self, pred: impl Fn(&DensityPoint) -> bool) -> f64 {
        self.iter().filter(|(x, _)| pred(x)).map(|(_, p)| p).sum()
    }

    /// JSON array of `{point: [e, t], prob}`.
    pub fn to_json(&self) -> Value {
        Value::Array(self.iter().map(|(x, p)| json!({ "point": x, "prob": p })).collect())
    }
}

/// `½ Σ |p - q|` over the union of supports. Each term is formed from the
/// log-probabilities as `exp(max)·(1 - exp(-|Δ|))`, which keeps relative
/// accuracy when the distributions nearly agree.
pub fn tv_distance(p: &Distribution, q: &Distribution) -> f64 {
    let (a, b) = (p.log_entries(), q.log_entries());
    let (mut i, mut j) = (0, 0);
    let mut terms = Vec::with_capacity(a.len() + b.len());
    let term = |lp: f64, lq: f64| {
        let (hi, lo) = if lp >= lq { (lp, lq) } else { (lq, lp) };
        if hi == f64::NEG_INFINITY {
            0.0
        } else {
            hi.exp() * -(lo - hi).exp_m1()
        }
    };
    while i < a.len() || j < b.len() {
        let ord = match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) => x.0.cmp(&y.0),
            (Some(_), None) => std::cmp::Ordering::Less,
            _ => std::cmp::Ordering::Greater,
        };
        match ord {
            std::cmp::Ordering::Less => {
                terms.push(term(a[i].1, f64::NEG_INFINITY));
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                terms.push(term(f64::NEG_INFINITY, b[j].1));
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                terms.push(term(a[i].1, b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    terms.sort_by(f64::total_cmp);
    (0.5 * terms.iter().sum::<f64>()).clamp(0.0, 1.0)
}

/// `n²⟨β, x⟩` at the point with `E` edges and `T` triangles: `2β₁E + 6β₂T/n`.
pub fn exponent(n: usize, beta: (f64, f64), edges: u64, triangles: u64) -> f64 {
    2.0 * beta.0 * edges as f64 + 6.0 * beta.1 * triangles as f64 / n as f64
}

/// The exponential family `P_{n,β}(x) ∝ exp(n²⟨β, x⟩) ν_n(x)` on a support table.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteFamily {
    pub n: usize,
    pub beta: (f64, f64),
    /// `n² ψ_n(β)`, the log-normalizer.
    pub log_normalizer: f64,
    pub distribution: Distribution,
}

impl FiniteFamily {
    /// `ψ_n(β)`.
    pub fn psi(&self) -> f64 {
        self.log_normalizer / (self.n * self.n) as f64
    }

    pub fn mean(&self) -> (f64, f64) {
        self.distribution.mean()
    }
}

pub fn exact_family(table: &SupportTable, beta: (f64, f64)) -> Result<FiniteFamily> {
    exact_family_where(table, beta, |_| true)
}

/// The family restricted to the support points accepted by `keep`.
pub fn exact_family_where(
    table: &SupportTable,
    beta: (f64, f64),
    keep: impl Fn(&DensityPoint) -> bool,
) -> Result<FiniteFamily> {
    if !beta.0.is_finite() || !beta.1.is_finite() {
        return domain("family parameters must be finite");
    }
    let n = table.n();
    let weights: Vec<(DensityPoint, f64)> = table
        .entries()
        .map(|(e, t, c)| (DensityPoint::from_counts(n, e, t), (c as f64).ln() + exponent(n, beta, e, t)))
        .filter(|(x, _)| keep(x))
        .collect();
    let (distribution, log_normalizer) = Distribution::from_log_weights(weights)?;
    Ok(FiniteFamily { n, beta, log_normalizer, distribution })
}

/// Number of labeled graphs isomorphic to `T(n, r)`:
/// `n! / (Π size! · Π multiplicity!)` over the class sizes.
pub fn nu_turan(n: usize, r: usize) -> Result<BigUint> {
    let sizes = turan_class_sizes(n, r)?;
    let fact = |m: usize| (1..=m as u64).fold(BigUint::one(), |acc, i| acc * i);
    let mut denom = BigUint::one();
    for &s in &sizes {
        denom *= fact(s);
    }
    for (_, mult) in multiplicities(&sizes) {
        denom *= fact(mult);
    }
    Ok(fact(n) / denom)
}

/// `ln ν(T(n, r))` via log-gamma, for sizes beyond exact arithmetic.
pub fn ln_nu_turan(n: usize, r: usize) -> Result<f64> {
    let sizes = turan_class_sizes(n, r)?;
    let lf = |m: usize| ln_gamma(m as f64 + 1.0);
    let mut v = lf(n);
    for &s in &sizes {
        v -= lf(s);
    }
    for (_, mult) in multiplicities(&sizes) {
        v -= lf(mult);
    }
    Ok(v)
}

fn multiplicities(sizes: &[usize]) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    for &s in sizes {
        match out.iter_mut().find(|(v, _)| *v == s) {
            Some(e) => e.1 += 1,
            None => out.push((s, 1)),
        }
    }
    out
}

/// Natural log of a big integer, exact to double precision at any size.
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// The family on `{v_{0,n}, v_{n-1,n}}` (empty and complete graph) obtained as
/// the limit along `o_{-1}`: `P(complete) = 1/(1 + exp(-(β₁n(n-1) + β₂(n-1)(n-2))))`.
pub fn edge_complete_family(n: usize, beta: (f64, f64)) -> Result<Distribution> {
    if n < 2 {
        return domain(format!("edge/complete family needs n >= 2, got {n}"));
    }
    if !beta.0.is_finite() || !beta.1.is_finite() {
        return domain("family parameters must be finite");
    }
    let nf = n as f64;
    let x = beta.0 * nf * (nf - 1.0) + beta.1 * (nf - 1.0) * (nf - 2.0);
    let pairs = (n * (n - 1) / 2) as u64;
    let triples = (n * (n - 1) * (n - 2) / 6) as u64;
    Ok(Distribution::from_log_weights(vec![
        (DensityPoint::from_counts(n, 0, 0), 0.0),
        (DensityPoint::from_counts(n, pairs, triples), x),
    ])?
    .0)
}

/// `Q_{n,β₁}(x) ∝ exp(n²β₁x₁) ν_n(x)` on the triangle-free support points.
pub fn triangle_free_family(table: &SupportTable, beta1: f64) -> Result<Distribution> {
    Ok(exact_family_where(table, (beta1, 0.0), |x| x.t == crate::rational::qi(0))?.distribution)
}

/// Mass that `Q_{n,β₁}` puts on triangle-free graphs that are not bipartite.
pub fn non_bipartite_mass(en: &Enumeration, beta1: f64) -> Result<f64> {
    if !beta1.is_finite() {
        return domain("family parameter must be finite");
    }
    let mut all = Vec::new();
    let mut odd = Vec::new();
    for (e, t, c) in en.table.entries() {
        if t != 0 {
            continue;
        }
        let w = 2.0 * beta1 * e as f64;
        all.push((c as f64).ln() + w);
        let nb = c - en.bipartite_by_edges[e as usize];
        if nb > 0 {
            odd.push((nb as f64).ln() + w);
        }
    }
    Ok((log_sum_exp(&odd) - log_sum_exp(&all)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{convex_support, enumerate, enumerate_support, strictly_inside_f64, EnumerationOptions};
    use crate::graph::turan_class_sizes;
    use crate::rational::{q, qi};
    use proptest::prelude::*;

    #[test]
    fn uniform_at_zero() {
        let t = enumerate_support(3).unwrap();
        let f = exact_family(&t, (0.0, 0.0)).unwrap();
        assert!((f.distribution.prob(&DensityPoint::from_counts(3, 1, 0)) - 3.0 / 8.0).abs() < 1e-15);
        assert!((f.log_normalizer - 8f64.ln()).abs() < 1e-14);
        assert!((f.distribution.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn strong_edge_field() {
        let t = enumerate_support(5).unwrap();
        let f = exact_family(&t, (5.0, 0.0)).unwrap();
        // e = 2E/n² tops out at (n-1)/n = 0.8, so compare the edge fraction
        assert!(f.mean().0 / 0.8 > 0.99);
    }

    #[test]
    fn mean_inside_support_at_zero() {
        let t = enumerate_support(6).unwrap();
        let f = exact_family(&t, (0.0, 0.0)).unwrap();
        assert!(strictly_inside_f64(&convex_support(&t), f.mean(), 1e-12));
    }

    #[test]
    fn nu_turan_values() {
        assert_eq!(nu_turan(6, 2).unwrap(), BigUint::from(10u32));
        assert_eq!(nu_turan(6, 3).unwrap(), BigUint::from(15u32));
        assert_eq!(nu_turan(7, 3).unwrap(), BigUint::from(105u32));
        for n in 1..12 {
            assert_eq!(nu_turan(n, 1).unwrap(), BigUint::one());
            assert_eq!(nu_turan(n, n).unwrap(), BigUint::one());
        }
        assert!(nu_turan(3, 4).is_err());
        for (n, r) in [(30, 4), (60, 3), (200, 7)] {
            let exact = ln_biguint(&nu_turan(n, r).unwrap());
            assert!((exact - ln_nu_turan(n, r).unwrap()).abs() < 1e-9 * exact.max(1.0));
        }
    }

    #[test]
    fn nu_turan_matches_enumeration() {
        for n in 2..=7 {
            let en = enumerate(n, EnumerationOptions::default(), None).unwrap();
            for r in 1..=n {
                let sizes = turan_class_sizes(n, r).unwrap();
                assert_eq!(BigUint::from(en.multipartite_count(&sizes)), nu_turan(n, r).unwrap(), "n={n} r={r}");
            }
        }
    }

    #[test]
    fn tv_examples() {
        let a = DensityPoint::new(qi(0), qi(0));
        let b = DensityPoint::new(q(1, 2), qi(0));
        let pm = Distribution::point_mass(a);
        assert_eq!(tv_distance(&pm, &pm), 0.0);
        assert_eq!(tv_distance(&pm, &Distribution::point_mass(b)), 1.0);
        let two = Distribution::from_log_weights(vec![(a, 0.4f64.ln()), (b, 0.6f64.ln())]).unwrap().0;
        assert!((tv_distance(&Distribution::point_mass(b), &two) - 0.4).abs() < 1e-15);
        assert!((tv_distance(&Distribution::point_mass(a), &two) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn edge_complete_examples() {
        let d = edge_complete_family(6, (0.0, 0.0)).unwrap();
        let ps: Vec<f64> = d.iter().map(|x| x.1).collect();
        assert_eq!(ps, vec![0.5, 0.5]);
        let d = edge_complete_family(6, (1.0, -1.0)).unwrap();
        let kn = DensityPoint::new(q(5, 6), q(20, 36));
        let want = 10f64.exp() / (1.0 + 10f64.exp());
        assert!((d.prob(&kn) - want).abs() < 1e-15);
        // exponent zero away from the origin
        let d = edge_complete_family(6, (2.0, -3.0)).unwrap();
        assert!(d.iter().all(|(_, p)| (p - 0.5).abs() < 1e-15));
        assert!(edge_complete_family(1, (0.0, 0.0)).is_err());
    }

    #[test]
    fn triangle_free_examples() {
        let t = enumerate_support(3).unwrap();
        let d = triangle_free_family(&t, 0.0).unwrap();
        let ps: Vec<f64> = d.iter().map(|x| x.1).collect();
        for (p, want) in ps.iter().zip([1.0 / 7.0, 3.0 / 7.0, 3.0 / 7.0]) {
            assert!((p - want).abs() < 1e-15);
        }
        let t6 = enumerate_support(6).unwrap();
        let d = triangle_free_family(&t6, 5.0).unwrap();
        assert!(d.prob(&DensityPoint::new(q(1, 2), qi(0))) > 0.999);
        let d = triangle_free_family(&t6, -20.0).unwrap();
        assert!(d.prob(&DensityPoint::new(qi(0), qi(0))) > 1.0 - 1e-12);
    }

    #[test]
    fn non_bipartite_fraction() {
        let en = enumerate(5, EnumerationOptions::default(), None).unwrap();
        // n = 5: the only triangle-free non-bipartite graphs are the 12 labeled 5-cycles
        let m0 = non_bipartite_mass(&en, 0.0).unwrap();
        let tf: u64 = en.table.entries().filter(|e| e.1 == 0).map(|e| e.2).sum();
        assert!((m0 - 12.0 / tf as f64).abs() < 1e-15);
        assert!(non_bipartite_mass(&en, 5.0).unwrap() < 1e-4);
    }

    #[test]
    fn log_sum_exp_precision() {
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert!((log_sum_exp(&[0.0, -40.0]) - (-40f64).exp()).abs() < 1e-30);
        assert_eq!(log_sum_exp(&[1000.0, 1000.0]), 1000.0 + 2f64.ln());
    }

    #[test]
    fn psi_convex_n5() {
        let t = enumerate_support(5).unwrap();
        let psi = |b1: f64, b2: f64| exact_family(&t, (b1, b2)).unwrap().psi();
        let h = 1e-2;
        for i in -3..=3 {
            for j in -3..=3 {
                let (b1, b2) = (0.5 * i as f64, 0.5 * j as f64);
                let f11 = (psi(b1 + h, b2) - 2.0 * psi(b1, b2) + psi(b1 - h, b2)) / (h * h);
                let f22 = (psi(b1, b2 + h) - 2.0 * psi(b1, b2) + psi(b1, b2 - h)) / (h * h);
                let f12 = (psi(b1 + h, b2 + h) - psi(b1 + h, b2 - h) - psi(b1 - h, b2 + h) + psi(b1 - h, b2 - h))
                    / (4.0 * h * h);
                assert!(f11 >= -1e-9 && f22 >= -1e-9, "({b1}, {b2})");
                assert!(f11 * f22 - f12 * f12 >= -1e-9, "({b1}, {b2})");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn normalized_and_mean_inside(b1 in -3.0f64..3.0, b2 in -3.0f64..3.0, n in 3usize..=6) {
            let t = enumerate_support(n).unwrap();
            let f = exact_family(&t, (b1, b2)).unwrap();
            prop_assert!((f.distribution.total_mass() - 1.0).abs() < 1e-12);
            prop_assert!(strictly_inside_f64(&convex_support(&t), f.mean(), 0.0));
        }
    }
}

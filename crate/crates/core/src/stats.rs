//! Small statistics helpers shared by the metrics, ingest and experiment code.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Pearson correlation; `None` when either vector has zero variance or the
/// lengths differ / are below two.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Mean and sample standard deviation (n-1 denominator). `sd` is `NaN` for
/// a single value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanSd {
    pub mean: f64,
    pub sd: f64,
}

pub fn mean_sd(values: &[f64]) -> MeanSd {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    MeanSd {
        mean,
        sd: if values.len() > 1 { (ss / (n - 1.0)).sqrt() } else { f64::NAN },
    }
}

/// Poisson probabilities `P(K = k)` for `k = 0..=kmax`.
pub fn poisson_pmf(lambda: f64, kmax: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(kmax + 1);
    let mut p = (-lambda).exp();
    for k in 0..=kmax {
        if k > 0 {
            p *= lambda / k as f64;
        }
        out.push(p);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareFit {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub bins: usize,
}

/// Pearson chi-square goodness of fit of integer counts `observed[k]`
/// against a Poisson(lambda). The last bin absorbs the upper tail; adjacent
/// bins are pooled left to right until each expects at least five
/// observations. `estimated` is the number of parameters fitted from the
/// same data (subtracted from the degrees of freedom).
pub fn poisson_chi_square(observed: &[u64], lambda: f64, estimated: usize) -> ChiSquareFit {
    let total: u64 = observed.iter().sum();
    let kmax = observed.len().saturating_sub(1);
    let pmf = poisson_pmf(lambda, kmax);
    let mut expected: Vec<f64> = pmf.iter().map(|p| p * total as f64).collect();
    let head: f64 = pmf[..kmax].iter().sum();
    if let Some(last) = expected.last_mut() {
        *last = (1.0 - head).max(0.0) * total as f64;
    }

    let mut pooled: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for (k, &exp) in expected.iter().enumerate() {
        o += observed[k] as f64;
        e += exp;
        if e >= 5.0 {
            pooled.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    if o > 0.0 || e > 0.0 {
        match pooled.last_mut() {
            Some(last) => {
                last.0 += o;
                last.1 += e;
            }
            None => pooled.push((o, e)),
        }
    }

    let statistic: f64 = pooled
        .iter()
        .map(|&(o, e)| if e > 0.0 { (o - e) * (o - e) / e } else { 0.0 })
        .sum();
    let dof = pooled.len().saturating_sub(1 + estimated);
    let p_value = if dof == 0 {
        1.0
    } else {
        ChiSquared::new(dof as f64).map(|d| d.sf(statistic)).unwrap_or(f64::NAN)
    };
    ChiSquareFit {
        statistic,
        dof,
        p_value,
        bins: pooled.len(),
    }
}

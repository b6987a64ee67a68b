//! Least-squares fits on dyadic ladders and seeded bootstrap intervals.

use serde::{Deserialize, Serialize};

/// Ordinary least squares y = intercept + slope * x with R^2.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn line_fit(xs: &[f64], ys: &[f64]) -> LineFit {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let r2 = if syy > 0.0 {
        let ss_res: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| {
                let e = y - (intercept + slope * x);
                e * e
            })
            .sum();
        1.0 - ss_res / syy
    } else {
        1.0
    };
    LineFit {
        slope,
        intercept,
        r2,
    }
}

/// Fit log|v| = intercept + exponent * log h. Values at or below `floor`
/// are clamped so a roundoff-dead ladder point cannot poison the slope.
pub fn log_log_fit(hs: &[f64], values: &[f64], floor: f64) -> LineFit {
    let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.abs().max(floor).ln()).collect();
    line_fit(&xs, &ys)
}

/// Percentile bootstrap CI for a statistic of (x, y) pairs, seeded resampling.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BootstrapCi {
    pub lo: f64,
    pub hi: f64,
    pub resamples: usize,
}

pub fn bootstrap_slope_ci(
    xs: &[f64],
    ys: &[f64],
    resamples: usize,
    seed: u64,
    level: f64,
) -> BootstrapCi {
    let n = xs.len();
    let mut slopes = Vec::with_capacity(resamples);
    for r in 0..resamples {
        let mut rx = Vec::with_capacity(n);
        let mut ry = Vec::with_capacity(n);
        for i in 0..n {
            let u = crate::rng::uniform01(seed, 0xb007, (r * n + i) as u64);
            let k = ((u * n as f64) as usize).min(n - 1);
            rx.push(xs[k]);
            ry.push(ys[k]);
        }
        // a resample can be degenerate (all equal x); line_fit returns slope 0 there
        slopes.push(line_fit(&rx, &ry).slope);
    }
    slopes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let alpha = (1.0 - level) / 2.0;
    let lo_idx = ((resamples as f64) * alpha) as usize;
    let hi_idx = (((resamples as f64) * (1.0 - alpha)) as usize).min(resamples - 1);
    BootstrapCi {
        lo: slopes[lo_idx],
        hi: slopes[hi_idx],
        resamples,
    }
}

/// Mean bootstrap CI over scalar samples.
pub fn bootstrap_mean_ci(samples: &[f64], resamples: usize, seed: u64, level: f64) -> BootstrapCi {
    let n = samples.len();
    let mut means = Vec::with_capacity(resamples);
    for r in 0..resamples {
        let mut acc = 0.0;
        for i in 0..n {
            let u = crate::rng::uniform01(seed, 0xb008, (r * n + i) as u64);
            let k = ((u * n as f64) as usize).min(n - 1);
            acc += samples[k];
        }
        means.push(acc / n as f64);
    }
    means.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let alpha = (1.0 - level) / 2.0;
    let lo_idx = ((resamples as f64) * alpha) as usize;
    let hi_idx = (((resamples as f64) * (1.0 - alpha)) as usize).min(resamples - 1);
    BootstrapCi {
        lo: means[lo_idx],
        hi: means[hi_idx],
        resamples,
    }
}

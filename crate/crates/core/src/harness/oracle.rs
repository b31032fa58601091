//! Independent checks of the closed forms: direct quadrature for the
//! Marcum Q function, envelope simulation for the Rician CDF and the
//! inclusion–exclusion expansion for serial outage.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel_stats::{marcum_q1, rician_cdf_linear, RicianChannel};
use crate::error::Result;
use crate::math::{bessel_i0e, from_db, integrate_panels};
use crate::outage::{expanded_outage, serial_outage};

/// `Q₁(a, b) = ∫_b^∞ x exp(−(x² + a²)/2) I₀(ax) dx` by adaptive
/// Gauss–Kronrod quadrature, using the scaled Bessel function so that the
/// integrand is `x exp(−(x − a)²/2) I₀e(ax)`.
pub fn marcum_q1_quadrature(a: f64, b: f64) -> Result<f64> {
    let f = |x: f64| x * (-(x - a) * (x - a) / 2.0).exp() * bessel_i0e(a * x);
    // the integrand is negligible 40 standard deviations past its peak
    let upper = a.max(b) + 40.0;
    let mut pts = vec![b];
    if a > b {
        pts.push(a);
    }
    pts.push(upper);
    Ok(integrate_panels(f, &pts, 1e-14, 1e-12, 100_000)?.value)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarcumRow {
    pub a: f64,
    pub b: f64,
    pub series: f64,
    pub quadrature: f64,
    pub abs_diff: f64,
}

/// `n × n` grid with `a, b ∈ {step, 2 step, …, n step}`.
pub fn marcum_grid(n: usize, step: f64) -> Result<Vec<MarcumRow>> {
    let mut rows = Vec::with_capacity(n * n);
    for i in 1..=n {
        for j in 1..=n {
            let (a, b) = (i as f64 * step, j as f64 * step);
            let series = marcum_q1(a, b)?;
            let quadrature = marcum_q1_quadrature(a, b)?;
            rows.push(MarcumRow {
                a,
                b,
                series,
                quadrature,
                abs_diff: (series - quadrature).abs(),
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloRow {
    pub k_db: f64,
    pub mean_snr_db: f64,
    pub threshold_db: f64,
    pub samples: u64,
    pub analytic: f64,
    pub empirical: f64,
    pub std_error: f64,
    /// `(empirical − analytic) / std_error`.
    pub z: f64,
}

impl MonteCarloRow {
    pub fn within(&self, sigmas: f64) -> bool {
        self.z.abs() <= sigmas
    }
}

const CHUNK: u64 = 1 << 16;

/// Fraction of `samples` simulated envelopes below the threshold. Chunks
/// have their own seeded generators, so the count does not depend on the
/// thread count.
pub fn rician_monte_carlo(k_db: f64, mean_snr_db: f64, threshold_db: f64, samples: u64, seed: u64) -> Result<MonteCarloRow> {
    let ch = RicianChannel::new(k_db, from_db(mean_snr_db))?;
    let th = from_db(threshold_db);
    let chunks = samples.div_ceil(CHUNK);
    let below: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(c.wrapping_mul(0x9E37_79B9_7F4A_7C15)));
            let n = CHUNK.min(samples - c * CHUNK);
            (0..n).filter(|_| ch.sample(&mut rng) < th).count() as u64
        })
        .sum();
    let pair = rician_cdf_linear(th, ch.k_linear(), ch.mean_snr)?;
    let p = pair.value;
    let empirical = below as f64 / samples as f64;
    let std_error = (p * pair.complement / samples as f64).sqrt();
    let z = if std_error > 0.0 {
        (empirical - p) / std_error
    } else if empirical == p {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(MonteCarloRow {
        k_db,
        mean_snr_db,
        threshold_db,
        samples,
        analytic: p,
        empirical,
        std_error,
        z,
    })
}

/// The nine (K, γ̄) pairs at a 10 dB threshold.
pub fn rician_monte_carlo_table(samples: u64, seed: u64) -> Result<Vec<MonteCarloRow>> {
    let mut rows = Vec::new();
    for (i, k) in [10.0, 20.0, 30.0].into_iter().enumerate() {
        for (j, snr) in [5.0, 15.0, 25.0].into_iter().enumerate() {
            rows.push(rician_monte_carlo(k, snr, 10.0, samples, seed + (3 * i + j) as u64)?);
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageCheck {
    pub tuples: usize,
    pub max_abs_diff: f64,
}

/// Serial outage against its expansion on random one-, two- and three-hop
/// CDF tuples. Half the draws are log-uniform down to 1e−12 so that small
/// outages are exercised too.
pub fn outage_expansion_check(tuples: usize, seed: u64) -> Result<OutageCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for i in 0..tuples {
        let n = 1 + i % 3;
        let cdfs: Vec<f64> = (0..n)
            .map(|_| {
                if rng.gen_bool(0.5) {
                    rng.gen::<f64>()
                } else {
                    10f64.powf(-12.0 * rng.gen::<f64>())
                }
            })
            .collect();
        worst = worst.max((serial_outage(&cdfs)? - expanded_outage(&cdfs)?).abs());
    }
    Ok(OutageCheck {
        tuples,
        max_abs_diff: worst,
    })
}

/// Largest deviation of the `K = 0` Rician CDF from the Rayleigh form
/// `1 − exp(−γ/γ̄)` over a grid of thresholds and mean SNRs.
pub fn rayleigh_limit_check() -> Result<f64> {
    let mut worst = 0.0f64;
    for i in 0..=40 {
        let gamma = from_db(-20.0 + i as f64);
        for j in 0..=8 {
            let mean = from_db(-10.0 + 5.0 * j as f64);
            let f = rician_cdf_linear(gamma, 0.0, mean)?.value;
            worst = worst.max((f + (-gamma / mean).exp_m1()).abs());
        }
    }
    Ok(worst)
}

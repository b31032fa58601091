//! Rician fading statistics: mean SNR, first-order Marcum Q and the CDF of
//! the instantaneous SNR.
//!
//! `Q₁(a, b)` is evaluated through its Poisson-mixture series. With
//! `λ = a²/2` and `x = b²/2`, and independent `N_λ ~ Poisson(λ)`,
//! `N_x ~ Poisson(x)`:
//!
//! ```text
//! Q₁(a, b)     = P(N_x ≤ N_λ) = Σ_j p_λ(j) · P(N_x ≤ j)
//! 1 − Q₁(a, b) = P(N_x > N_λ) = Σ_i p_x(i) · P(N_λ ≤ i − 1)
//! ```
//!
//! Both sums have nonnegative terms only, so whichever side is small is
//! computed directly (in log space) and the other is its complement. This
//! keeps relative accuracy deep into either tail.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{from_db, lit, Real};

/// Mean SNR `γ̄ = P_R / N` (fading normalised to unit mean power).
pub fn mean_snr<T: Real>(received_power_w: T, noise_power_w: T) -> Result<T> {
    if !(noise_power_w > T::zero()) || !noise_power_w.is_finite() {
        return Err(Error::domain("mean_snr", "noise power must be positive and finite"));
    }
    if !(received_power_w >= T::zero()) {
        return Err(Error::domain("mean_snr", "received power must be >= 0"));
    }
    Ok(received_power_w / noise_power_w)
}

/// A probability together with its complement, each accurate on its own.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityPair<T> {
    pub value: T,
    pub complement: T,
}

impl<T: Real> ProbabilityPair<T> {
    fn from_small(small: T, small_is_value: bool) -> Self {
        let small = small.max(T::zero()).min(T::one());
        let big = T::one() - small;
        if small_is_value {
            Self { value: small, complement: big }
        } else {
            Self { value: big, complement: small }
        }
    }
}

/// First-order Marcum Q function, clamped to `[0, 1]`.
pub fn marcum_q1<T: Real>(a: T, b: T) -> Result<T> {
    Ok(marcum_q1_pair(a, b)?.value)
}

/// `Q₁(a, b)` and `1 − Q₁(a, b)`.
pub fn marcum_q1_pair<T: Real>(a: T, b: T) -> Result<ProbabilityPair<T>> {
    if !(a >= T::zero()) || !(b >= T::zero()) {
        return Err(Error::domain("marcum_q1", format!("arguments must be >= 0, got a = {a}, b = {b}")));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::domain("marcum_q1", "arguments must be finite"));
    }
    let half = lit::<T>(0.5);
    let lam = a * a * half;
    let x = b * b * half;
    if x == T::zero() {
        return Ok(ProbabilityPair { value: T::one(), complement: T::zero() });
    }
    // Q₁ behaves like exp(-(b - a)²/2) away from the centre; past the
    // underflow point the small side is exactly zero in this precision.
    let gap = (b - a) * (b - a) * half;
    let underflow = -T::min_positive_value().ln() + lit(10.0);
    if gap > underflow {
        return Ok(ProbabilityPair::from_small(T::zero(), b > a));
    }
    if x <= lam {
        // 1 − Q₁ is the smaller side
        let p = poisson_dominance(x, lam, 1)?;
        Ok(ProbabilityPair::from_small(p, false))
    } else {
        let q = poisson_dominance(lam, x, 0)?;
        Ok(ProbabilityPair::from_small(q, true))
    }
}

/// `Σ_i p_a(i) · P(N_b ≤ i − shift)` for Poisson means `a`, `b`.
fn poisson_dominance<T: Real>(mu_a: T, mu_b: T, shift: usize) -> Result<T> {
    let big = mu_a.max(mu_b);
    let hi = big + lit::<T>(40.0) * big.sqrt() + lit(60.0);
    let hi = hi
        .to_usize()
        .ok_or_else(|| Error::numeric("marcum_q1", "series length overflow"))?;

    let ln_a = if mu_a > T::zero() { mu_a.ln() } else { T::neg_infinity() };
    let ln_b = if mu_b > T::zero() { mu_b.ln() } else { T::neg_infinity() };

    // Log pmf of both Poisson laws, advanced incrementally.
    let mut lp_a = -mu_a;
    let mut lp_b = -mu_b;
    // r(n) = P(N_b ≤ n − 1) / p_b(n), kept while it stays representable;
    // past the mean of N_b the CDF itself is used.
    let mut r = T::zero();
    let mut cdf_direct: Option<T> = None;
    // ln P(N_b ≤ n), carried to the next step as ln P(N_b ≤ n − 1)
    let mut ln_cdf_b = T::neg_infinity();

    let mut terms: Vec<T> = Vec::with_capacity(hi + 1);
    for n in 0..=hi {
        if n > 0 {
            let ln_n = lit::<T>(n as f64).ln();
            lp_a = lp_a + ln_a - ln_n;
            lp_b = lp_b + ln_b - ln_n;
            match cdf_direct.as_mut() {
                None => r = lit::<T>(n as f64) / mu_b * (T::one() + r),
                Some(c) => *c += lp_b.exp(),
            }
        }
        let mut ln_cdf_b_prev = ln_cdf_b;
        ln_cdf_b = match cdf_direct {
            Some(c) => c.min(T::one()).ln(),
            None => lp_b + r.ln_1p(),
        };
        if cdf_direct.is_none() && lit::<T>(n as f64) > mu_b && mu_b > T::zero() {
            cdf_direct = Some(ln_cdf_b.exp());
        }
        if mu_b == T::zero() {
            // N_b ≡ 0
            ln_cdf_b = T::zero();
            if n == 0 {
                ln_cdf_b_prev = T::neg_infinity();
            }
        }
        let ln_cdf = if shift == 0 { ln_cdf_b } else { ln_cdf_b_prev };
        let term = if mu_a == T::zero() {
            if n == 0 { ln_cdf } else { T::neg_infinity() }
        } else {
            lp_a + ln_cdf
        };
        terms.push(term);
    }
    let max = terms.iter().copied().fold(T::neg_infinity(), T::max);
    if max == T::neg_infinity() {
        return Ok(T::zero());
    }
    if !max.is_finite() {
        return Err(Error::numeric("marcum_q1", "non-finite series term"));
    }
    // compensated summation of the rescaled terms
    let mut sum = T::zero();
    let mut comp = T::zero();
    for t in terms {
        let y = (t - max).exp() - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    Ok((max.exp() * sum).min(T::one()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RicianChannel<T> {
    pub k_factor_db: T,
    /// Linear mean SNR `γ̄`.
    pub mean_snr: T,
}

impl<T: Real> RicianChannel<T> {
    pub fn new(k_factor_db: T, mean_snr: T) -> Result<Self> {
        let ch = Self { k_factor_db, mean_snr };
        ch.validate()?;
        Ok(ch)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.k_factor_db.is_finite() {
            return Err(Error::domain("rician_channel", "K factor must be finite"));
        }
        if !(self.mean_snr > T::zero()) || !self.mean_snr.is_finite() {
            return Err(Error::domain("rician_channel", format!("mean SNR {} must be > 0", self.mean_snr)));
        }
        Ok(())
    }

    pub fn k_linear(&self) -> T {
        from_db(self.k_factor_db)
    }

    /// `F(γ)` and `1 − F(γ)`.
    pub fn cdf_pair(&self, gamma: T) -> Result<ProbabilityPair<T>> {
        self.validate()?;
        rician_cdf_linear(gamma, self.k_linear(), self.mean_snr)
    }

    pub fn cdf(&self, gamma: T) -> Result<T> {
        Ok(self.cdf_pair(gamma)?.value)
    }

    /// Draws an instantaneous SNR: `γ̄ |h|²` with `h` Rician, `E|h|² = 1`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        let k = self.k_linear();
        let los = (k / (k + T::one())).sqrt();
        let sigma = (T::one() / (lit::<T>(2.0) * (k + T::one()))).sqrt();
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        let re = los + sigma * lit(re);
        let im = sigma * lit(im);
        self.mean_snr * (re * re + im * im)
    }
}

/// Rician CDF of the instantaneous SNR at `gamma`.
pub fn rician_cdf<T: Real>(gamma: T, channel: &RicianChannel<T>) -> Result<T> {
    channel.cdf(gamma)
}

/// `F(γ) = 1 − Q₁(√(2K), √(2(1+K)γ/γ̄))` with linear K.
pub fn rician_cdf_linear<T: Real>(gamma: T, k_linear: T, mean_snr: T) -> Result<ProbabilityPair<T>> {
    if !(gamma >= T::zero()) {
        return Err(Error::domain("rician_cdf", "gamma must be >= 0"));
    }
    if !(k_linear >= T::zero()) || !(mean_snr > T::zero()) {
        return Err(Error::domain("rician_cdf", "need K >= 0 and mean SNR > 0"));
    }
    if gamma.is_infinite() {
        return Ok(ProbabilityPair { value: T::one(), complement: T::zero() });
    }
    let two = lit::<T>(2.0);
    let a = (two * k_linear).sqrt();
    let b = (two * (T::one() + k_linear) * gamma / mean_snr).sqrt();
    let q = marcum_q1_pair(a, b)?;
    Ok(ProbabilityPair { value: q.complement, complement: q.value })
}

/// An instantaneous SNR against the decoding threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrSample<T> {
    pub value: T,
    pub threshold: T,
}

impl<T: Real> SnrSample<T> {
    pub fn new(value: T, threshold: T) -> Result<Self> {
        if !(value > T::zero()) || !(threshold > T::zero()) {
            return Err(Error::domain("snr_sample", "SNR and threshold must be > 0"));
        }
        Ok(Self { value, threshold })
    }

    pub fn in_outage(&self) -> bool {
        self.value < self.threshold
    }
}

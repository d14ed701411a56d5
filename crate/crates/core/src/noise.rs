//! Perturbation distributions for perturb-and-MAP sampling.
//!
//! Besides the usual Gumbel perturbations this module implements the
//! Sum-of-Gamma family
//!
//! ```text
//! SoG(κ, τ, s) = (τ/κ) · ( Σ_{i=1..s} Gamma(1/κ, κ/i)  −  log s )
//! ```
//!
//! whose κ-fold sum converges (in s) to Gumbel(0, τ). Perturbing each
//! coordinate of θ with SoG(k, τ, s) therefore perturbs the weight of every
//! state with exactly k ones by (approximately) Gumbel(0, τ) noise.

use rand::distributions::Open01;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Euler–Mascheroni constant γ (the Gumbel(0,1) mean).
pub const EULER_MASCHERONI: f64 = 0.577_215_664_901_532_9;

/// A perturbation distribution ρ(ε) applied i.i.d. per coordinate of θ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoiseSpec {
    /// Dirac delta at zero: no perturbation, MAP becomes deterministic.
    DiracZero,
    /// Gumbel(0, τ).
    Gumbel { tau: f64 },
    /// Sum-of-Gamma SoG(κ, τ, s) with truncation length `s`.
    SumOfGamma { kappa: u32, tau: f64, s: u32 },
}

impl NoiseSpec {
    pub fn gumbel(tau: f64) -> Result<Self> {
        require_positive(tau, "tau")?;
        Ok(Self::Gumbel { tau })
    }

    pub fn sum_of_gamma(kappa: u32, tau: f64, s: u32) -> Result<Self> {
        require_positive(tau, "tau")?;
        if kappa == 0 {
            return Err(Error::InvalidArgument("kappa must be >= 1".into()));
        }
        if s == 0 {
            return Err(Error::InvalidArgument("s must be >= 1".into()));
        }
        Ok(Self::SumOfGamma { kappa, tau, s })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::DiracZero => Ok(()),
            Self::Gumbel { tau } => require_positive(tau, "tau"),
            Self::SumOfGamma { kappa, tau, s } => {
                Self::sum_of_gamma(kappa, tau, s)?;
                Ok(())
            }
        }
    }

    /// One draw from this distribution.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        self.validate()?;
        Ok(self.sample_unchecked(rng))
    }

    fn sample_unchecked<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::DiracZero => 0.0,
            Self::Gumbel { tau } => gumbel_unchecked(tau, rng),
            Self::SumOfGamma { kappa, tau, s } => sog_unchecked(kappa, tau, s, rng),
        }
    }
}

fn require_positive(x: f64, name: &str) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive and finite, got {x}")))
    }
}

/// A vector of i.i.d. draws, one per coordinate of θ. The caller adds it
/// to θ before solving MAP.
pub fn perturb<R: Rng + ?Sized>(theta: &[f64], spec: &NoiseSpec, rng: &mut R) -> Result<Vec<f64>> {
    spec.validate()?;
    if theta.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidArgument("theta must be finite".into()));
    }
    Ok((0..theta.len()).map(|_| spec.sample_unchecked(rng)).collect())
}

/// One draw from Gumbel(0, τ) via the inverse CDF −τ·log(−log U).
pub fn sample_gumbel<R: Rng + ?Sized>(tau: f64, rng: &mut R) -> Result<f64> {
    require_positive(tau, "tau")?;
    Ok(gumbel_unchecked(tau, rng))
}

fn gumbel_unchecked<R: Rng + ?Sized>(tau: f64, rng: &mut R) -> f64 {
    // Open01 excludes both endpoints, keeping log(−log u) finite.
    let u: f64 = rng.sample(Open01);
    gumbel_from_uniform(tau, u)
}

fn gumbel_from_uniform(tau: f64, u: f64) -> f64 {
    -tau * (-u.ln()).ln()
}

/// One draw from Gamma(shape, scale) in the shape–scale parameterization.
///
/// Marsaglia–Tsang for shape > 1, the exponential special case at shape = 1,
/// and the U^{1/shape} boost for shape < 1 (the Sum-of-Gamma series needs
/// shape 1/κ < 1 whenever κ > 1).
pub fn sample_gamma<R: Rng + ?Sized>(shape: f64, scale: f64, rng: &mut R) -> Result<f64> {
    require_positive(shape, "shape")?;
    require_positive(scale, "scale")?;
    Ok(gamma_unchecked(shape, scale, rng))
}

fn gamma_unchecked<R: Rng + ?Sized>(shape: f64, scale: f64, rng: &mut R) -> f64 {
    if shape == 1.0 {
        let u: f64 = rng.sample(Open01);
        return -scale * u.ln();
    }
    if shape < 1.0 {
        let boosted = gamma_large_shape(shape + 1.0, scale, rng);
        let u: f64 = rng.sample(Open01);
        return boosted * u.powf(1.0 / shape);
    }
    gamma_large_shape(shape, scale, rng)
}

// Marsaglia & Tsang (2000), valid for shape > 1.
fn gamma_large_shape<R: Rng + ?Sized>(shape: f64, scale: f64, rng: &mut R) -> f64 {
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x: f64 = rng.sample(StandardNormal);
        let v_cbrt = 1.0 + c * x;
        if v_cbrt <= 0.0 {
            continue;
        }
        let v = v_cbrt * v_cbrt * v_cbrt;
        let u: f64 = rng.sample(Open01);
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 || u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d * v * scale;
        }
    }
}

/// One draw from SoG(κ, τ, s).
pub fn sample_sog<R: Rng + ?Sized>(kappa: u32, tau: f64, s: u32, rng: &mut R) -> Result<f64> {
    NoiseSpec::sum_of_gamma(kappa, tau, s)?;
    Ok(sog_unchecked(kappa, tau, s, rng))
}

fn sog_unchecked<R: Rng + ?Sized>(kappa: u32, tau: f64, s: u32, rng: &mut R) -> f64 {
    let shape = 1.0 / f64::from(kappa);
    let mut sum = 0.0;
    for i in 1..=s {
        sum += gamma_unchecked(shape, f64::from(kappa) / f64::from(i), rng);
    }
    tau / f64::from(kappa) * (sum - f64::from(s).ln())
}

/// s-th harmonic number Σ_{i=1..s} 1/i.
pub fn harmonic(s: u32) -> f64 {
    (1..=s).rev().map(|i| 1.0 / f64::from(i)).sum()
}

/// Analytic mean of SoG(κ, τ, s): (τ/κ)(H_s − log s).
pub fn sog_mean(kappa: u32, tau: f64, s: u32) -> f64 {
    tau / f64::from(kappa) * (harmonic(s) - f64::from(s).ln())
}

/// Analytic variance of SoG(κ, τ, s): (τ²/κ) Σ_{i=1..s} i⁻².
pub fn sog_variance(kappa: u32, tau: f64, s: u32) -> f64 {
    let sum_inv_sq: f64 = (1..=s).rev().map(|i| (f64::from(i)).powi(-2)).sum();
    tau * tau / f64::from(kappa) * sum_inv_sq
}

/// Exact bias of the κ-fold SoG sum against the Gumbel(0, τ) mean at finite
/// truncation: τ·(H_s − log s − γ). Lies strictly inside
/// (τ/(2(s+1)), τ/(2s)) for every s ≥ 1.
pub fn sog_mean_bias(s: u32, tau: f64) -> Result<f64> {
    require_positive(tau, "tau")?;
    if s == 0 {
        return Err(Error::InvalidArgument("s must be >= 1".into()));
    }
    Ok(tau * (harmonic(s) - f64::from(s).ln() - EULER_MASCHERONI))
}

/// Analytic Gumbel(0, τ) mean τ·γ.
pub fn gumbel_mean(tau: f64) -> f64 {
    tau * EULER_MASCHERONI
}

/// Analytic Gumbel(0, τ) variance π²τ²/6.
pub fn gumbel_variance(tau: f64) -> f64 {
    std::f64::consts::PI.powi(2) * tau * tau / 6.0
}

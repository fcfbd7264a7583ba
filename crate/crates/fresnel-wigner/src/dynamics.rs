//! Synthesis of the measurable signals: the resonant ground-state
//! probability of the two-level atom and the generalized autocorrelation
//! function, with optional measurement noise.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Normal};

use crate::error::{Error, Result};
use crate::fock::{displaced_number_statistics, DisplacementAmplitude, FockDensityMatrix, NumberStatistics};
use crate::spectra::SpectrumModel;

/// One measured point of a Rabi signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalSample {
    pub tau: f64,
    pub p: f64,
    pub sigma: f64,
}

/// Sampled atomic ground-state probabilities for one displacement.
/// Times are strictly increasing, probabilities lie in [0, 1].
#[derive(Debug, Clone)]
pub struct RabiSignal {
    alpha: DisplacementAmplitude,
    samples: Vec<SignalSample>,
}

impl RabiSignal {
    pub fn new(alpha: DisplacementAmplitude, samples: Vec<SignalSample>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidInput("signal has no samples".into()));
        }
        let mut prev = f64::NEG_INFINITY;
        for (j, s) in samples.iter().enumerate() {
            if !s.tau.is_finite() || s.tau < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "sample {j}: interaction time must be finite and nonnegative, got {}",
                    s.tau
                )));
            }
            if s.tau <= prev {
                return Err(Error::InvalidInput(format!(
                    "sample {j}: interaction times must be strictly increasing"
                )));
            }
            if !(0.0..=1.0).contains(&s.p) {
                return Err(Error::InvalidInput(format!(
                    "sample {j}: probability {} outside [0, 1]",
                    s.p
                )));
            }
            if !s.sigma.is_finite() || s.sigma < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "sample {j}: standard deviation must be nonnegative, got {}",
                    s.sigma
                )));
            }
            prev = s.tau;
        }
        Ok(Self { alpha, samples })
    }

    pub fn alpha(&self) -> DisplacementAmplitude {
        self.alpha
    }

    pub fn samples(&self) -> &[SignalSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn taus(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.tau).collect()
    }

    pub fn sigmas(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.sigma).collect()
    }
}

/// Sampled autocorrelation values for one displacement.
#[derive(Debug, Clone)]
pub struct AutocorrelationTrace {
    alpha: DisplacementAmplitude,
    samples: Vec<(f64, Complex64)>,
}

impl AutocorrelationTrace {
    pub fn new(alpha: DisplacementAmplitude, samples: Vec<(f64, Complex64)>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidInput("trace has no samples".into()));
        }
        let mut prev = f64::NEG_INFINITY;
        for (j, (t, c)) in samples.iter().enumerate() {
            if !t.is_finite() || *t <= prev {
                return Err(Error::InvalidInput(format!(
                    "trace sample {j}: times must be finite and strictly increasing"
                )));
            }
            if !c.re.is_finite() || !c.im.is_finite() || c.norm() > 1.0 + 1e-9 {
                return Err(Error::InvalidInput(format!(
                    "trace sample {j}: |C| = {} exceeds 1",
                    c.norm()
                )));
            }
            prev = *t;
        }
        Ok(Self { alpha, samples })
    }

    pub fn alpha(&self) -> DisplacementAmplitude {
        self.alpha
    }

    pub fn samples(&self) -> &[(f64, Complex64)] {
        &self.samples
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|(t, _)| *t).collect()
    }
}

/// Measurement noise applied by [`simulate_signal`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseKind {
    None,
    /// Additive Gaussian noise with the given standard deviation.
    Gaussian { sigma: f64 },
    /// Finite-shot projection noise: the reported probability is the
    /// fraction of successes over `shots` Bernoulli draws.
    Binomial { shots: u64 },
}

/// Noise description plus the seed that makes a simulation reproducible.
/// Each simulation builds its own generator from the seed, so a model value
/// can be shared freely across threads.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    pub seed: u64,
}

impl NoiseModel {
    pub fn none() -> Self {
        Self {
            kind: NoiseKind::None,
            seed: 0,
        }
    }

    pub fn gaussian(sigma: f64, seed: u64) -> Result<Self> {
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "gaussian noise level must be positive, got {sigma}"
            )));
        }
        Ok(Self {
            kind: NoiseKind::Gaussian { sigma },
            seed,
        })
    }

    pub fn binomial(shots: u64, seed: u64) -> Result<Self> {
        if shots == 0 {
            return Err(Error::InvalidInput("shot count must be positive".into()));
        }
        Ok(Self {
            kind: NoiseKind::Binomial { shots },
            seed,
        })
    }
}

/// Ground-state probability from precomputed occupation statistics:
/// P_g(tau) = 1/2 - 1/2 sum_n P_n cos(2 sqrt(n+1) tau).
pub fn rabi_probability_from_stats(stats: &NumberStatistics, tau: f64) -> f64 {
    let mut acc = 0.0;
    for (n, &p) in stats.probs().iter().enumerate() {
        acc += p * (2.0 * ((n + 1) as f64).sqrt() * tau).cos();
    }
    (0.5 - 0.5 * acc).clamp(0.0, 1.0)
}

/// Ground-state probability at interaction time `tau` for the state
/// displaced by `alpha`. The atom starts in the excited state, so the
/// probability vanishes at tau = 0.
pub fn rabi_probability(
    rho: &FockDensityMatrix,
    alpha: DisplacementAmplitude,
    tau: f64,
) -> Result<f64> {
    if !tau.is_finite() || tau < 0.0 {
        return Err(Error::InvalidInput(format!(
            "interaction time must be finite and nonnegative, got {tau}"
        )));
    }
    let stats = displaced_number_statistics(rho, alpha);
    Ok(rabi_probability_from_stats(&stats, tau))
}

/// Synthesize a Rabi signal on the given time grid, perturbed per the noise
/// model. Reported standard deviations are 0 without noise, the configured
/// sigma for Gaussian noise, and sqrt(p (1-p) / shots) from the recorded
/// probability for binomial noise.
pub fn simulate_signal(
    rho: &FockDensityMatrix,
    alpha: DisplacementAmplitude,
    taus: &[f64],
    noise: &NoiseModel,
) -> Result<RabiSignal> {
    if taus.is_empty() {
        return Err(Error::InvalidInput("empty time grid".into()));
    }
    let mut prev = f64::NEG_INFINITY;
    for &tau in taus {
        if !tau.is_finite() || tau < 0.0 || tau <= prev {
            return Err(Error::InvalidInput(
                "time grid must be strictly increasing and nonnegative".into(),
            ));
        }
        prev = tau;
    }
    let stats = displaced_number_statistics(rho, alpha);
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let mut samples = Vec::with_capacity(taus.len());
    for &tau in taus {
        let p0 = rabi_probability_from_stats(&stats, tau);
        let (p, sigma) = match noise.kind {
            NoiseKind::None => (p0, 0.0),
            NoiseKind::Gaussian { sigma } => {
                let normal = Normal::new(0.0, sigma).expect("validated sigma");
                ((p0 + normal.sample(&mut rng)).clamp(0.0, 1.0), sigma)
            }
            NoiseKind::Binomial { shots } => {
                let bin = Binomial::new(shots, p0).expect("probability in range");
                let p = bin.sample(&mut rng) as f64 / shots as f64;
                (p, (p * (1.0 - p) / shots as f64).sqrt())
            }
        };
        samples.push(SignalSample { tau, p, sigma });
    }
    RabiSignal::new(alpha, samples)
}

/// Autocorrelation value C(t) = sum_n P_n exp(-i omega_n t).
pub fn autocorrelation(
    spectrum: &SpectrumModel,
    stats: &NumberStatistics,
    t: f64,
) -> Result<Complex64> {
    if spectrum.dim() < stats.len() {
        return Err(Error::InvalidInput(format!(
            "spectrum defined for {} levels but statistics cover {}",
            spectrum.dim(),
            stats.len()
        )));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (n, &p) in stats.probs().iter().enumerate() {
        let phase = -spectrum.omega(n) * t;
        acc += Complex64::new(p, 0.0) * Complex64::new(phase.cos(), phase.sin());
    }
    Ok(acc)
}

/// Autocorrelation trace of the state displaced by `alpha`, sampled on a
/// strictly increasing time grid.
pub fn autocorrelation_trace(
    spectrum: &SpectrumModel,
    rho: &FockDensityMatrix,
    alpha: DisplacementAmplitude,
    times: &[f64],
) -> Result<AutocorrelationTrace> {
    if times.is_empty() {
        return Err(Error::InvalidInput("empty time grid".into()));
    }
    let stats = displaced_number_statistics(rho, alpha);
    if spectrum.dim() < stats.len() {
        return Err(Error::InvalidInput(format!(
            "spectrum defined for {} levels but the displaced state occupies {}",
            spectrum.dim(),
            stats.len()
        )));
    }
    let samples = times
        .iter()
        .map(|&t| {
            let c = autocorrelation(spectrum, &stats, t)?;
            Ok((t, c))
        })
        .collect::<Result<Vec<_>>>()?;
    AutocorrelationTrace::new(alpha, samples)
}

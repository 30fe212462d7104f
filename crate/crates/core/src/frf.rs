//! Damping extraction from measured frequency-response curves.
//!
//! The peak of the displacement curve is refined with a least-squares
//! polynomial of degree 6, the half-power frequencies give the bandwidth,
//! and Q = f0/(f2 − f1). With an effective mass the damping follows as
//! c = 2π f0 m_eff / Q.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use statrs::statistics::Statistics;
use thiserror::Error;

/// Degree of the peak-interpolating polynomial.
pub const POLY_DEGREE: usize = 6;
/// Smallest default fit window (samples).
pub const MIN_WINDOW: usize = 9;
const MIN_SAMPLES: usize = 8;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum FrfError {
    #[error("curve needs at least {MIN_SAMPLES} samples, got {0}")]
    TooShort(usize),
    #[error("frequency and amplitude columns differ in length ({freqs} vs {amps})")]
    LengthMismatch { freqs: usize, amps: usize },
    #[error("frequencies must be finite and strictly increasing (sample {0})")]
    NotIncreasing(usize),
    #[error("amplitudes must be finite and non-negative (sample {0})")]
    BadAmplitude(usize),
    #[error("half-power level is never crossed on the {0} side of the peak")]
    BandwidthUndefined(&'static str),
    #[error("fit window of {window} samples does not fit around the peak at sample {peak}")]
    WindowOutOfRange { window: usize, peak: usize },
    #[error("polynomial fit is rank deficient")]
    IllConditioned,
    #[error("resonator parameter `{0}` must be positive")]
    BadResonator(&'static str),
    #[error("no curves given")]
    Empty,
}

/// Sampled displacement amplitude versus frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct FrfCurve {
    freqs: Vec<f64>,
    amps: Vec<f64>,
}

impl FrfCurve {
    pub fn new(freqs: Vec<f64>, amps: Vec<f64>) -> Result<Self, FrfError> {
        if freqs.len() != amps.len() {
            return Err(FrfError::LengthMismatch {
                freqs: freqs.len(),
                amps: amps.len(),
            });
        }
        if freqs.len() < MIN_SAMPLES {
            return Err(FrfError::TooShort(freqs.len()));
        }
        if let Some(i) = freqs.iter().position(|f| !f.is_finite()) {
            return Err(FrfError::NotIncreasing(i));
        }
        if let Some(i) = freqs.windows(2).position(|w| w[1] <= w[0]) {
            return Err(FrfError::NotIncreasing(i + 1));
        }
        if let Some(i) = amps.iter().position(|a| !(a.is_finite() && *a >= 0.0)) {
            return Err(FrfError::BadAmplitude(i));
        }
        Ok(Self { freqs, amps })
    }

    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn amps(&self) -> &[f64] {
        &self.amps
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    /// Same curve with every amplitude multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self, FrfError> {
        Self::new(
            self.freqs.clone(),
            self.amps.iter().map(|a| a * factor).collect(),
        )
    }
}

/// Driven single-degree-of-freedom resonator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Resonator {
    /// Effective mass (kg).
    pub mass: f64,
    /// Damping coefficient (Ns/m).
    pub damping: f64,
    /// Stiffness (N/m).
    pub stiffness: f64,
    /// Drive force amplitude (N).
    pub force: f64,
}

impl Resonator {
    /// Resonator with stiffness chosen so the undamped natural frequency is `f0`.
    pub fn tuned(mass: f64, damping: f64, f0: f64, force: f64) -> Self {
        Self {
            mass,
            damping,
            stiffness: mass * (2.0 * PI * f0).powi(2),
            force,
        }
    }

    pub fn natural_frequency(&self) -> f64 {
        (self.stiffness / self.mass).sqrt() / (2.0 * PI)
    }

    /// Q = √(m k)/c.
    pub fn quality_factor(&self) -> f64 {
        (self.mass * self.stiffness).sqrt() / self.damping
    }

    pub fn amplitude(&self, freq: f64) -> f64 {
        let omega = 2.0 * PI * freq;
        self.force
            / ((self.stiffness - self.mass * omega * omega).powi(2)
                + (self.damping * omega).powi(2))
            .sqrt()
    }

    fn validate(&self) -> Result<(), FrfError> {
        for (name, v) in [
            ("m_eff", self.mass),
            ("k", self.stiffness),
            ("F0", self.force),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(FrfError::BadResonator(name));
            }
        }
        if !(self.damping.is_finite() && self.damping >= 0.0) {
            return Err(FrfError::BadResonator("c"));
        }
        Ok(())
    }
}

pub fn synth_frf(resonator: &Resonator, freqs: &[f64]) -> Result<FrfCurve, FrfError> {
    resonator.validate()?;
    FrfCurve::new(
        freqs.to_vec(),
        freqs.iter().map(|&f| resonator.amplitude(f)).collect(),
    )
}

/// Uniform grid of `points` samples spanning ±`half_span` bandwidths around `f0`.
pub fn resonance_grid(f0: f64, q: f64, half_span: f64, points: usize) -> Vec<f64> {
    let bandwidth = f0 / q;
    let start = f0 - half_span * bandwidth;
    let step = 2.0 * half_span * bandwidth / (points - 1) as f64;
    (0..points).map(|i| start + step * i as f64).collect()
}

/// Where the half-power crossings are read.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum CrossingSource {
    /// Polynomial inside the fit window, raw samples outside it.
    #[default]
    Polynomial,
    /// Raw samples with linear interpolation.
    Raw,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExtractOptions {
    /// Fit window size in samples; `None` picks the span above half the raw peak.
    pub window: Option<usize>,
    pub crossings: CrossingSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtractionResult {
    #[serde(rename = "f0_hz")]
    pub f0: f64,
    #[serde(rename = "A_peak_m")]
    pub a_peak: f64,
    #[serde(rename = "f1_hz")]
    pub f1: f64,
    #[serde(rename = "f2_hz")]
    pub f2: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    #[serde(rename = "c_Ns_per_m", skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
}

impl ExtractionResult {
    pub fn with_mass(self, m_eff: f64) -> Self {
        Self {
            c: Some(damping_from_q(self.f0, self.q, m_eff)),
            ..self
        }
    }
}

/// c = 2π f0 m_eff / Q.
pub fn damping_from_q(f0: f64, q: f64, m_eff: f64) -> f64 {
    2.0 * PI * f0 * m_eff / q
}

/// Polynomial in the normalised variable x = (f − center)/half_width.
struct PeakFit {
    coeffs: Vec<f64>,
    center: f64,
    half_width: f64,
}

impl PeakFit {
    fn new(freqs: &[f64], amps: &[f64]) -> Result<Self, FrfError> {
        let (lo, hi) = (freqs[0], freqs[freqs.len() - 1]);
        let center = 0.5 * (lo + hi);
        let half_width = 0.5 * (hi - lo);
        let cols = POLY_DEGREE + 1;
        let design = DMatrix::from_fn(freqs.len(), cols, |r, c| {
            ((freqs[r] - center) / half_width).powi(c as i32)
        });
        let rhs = DVector::from_column_slice(amps);
        let svd = design.svd(true, true);
        let max_sv = svd.singular_values.max();
        if svd.rank(max_sv * 1e-12) < cols {
            return Err(FrfError::IllConditioned);
        }
        let coeffs = svd
            .solve(&rhs, max_sv * 1e-14)
            .map_err(|_| FrfError::IllConditioned)?;
        Ok(Self {
            coeffs: coeffs.iter().copied().collect(),
            center,
            half_width,
        })
    }

    fn eval(&self, f: f64) -> f64 {
        let x = (f - self.center) / self.half_width;
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    /// Golden-section search for the maximum on [lo, hi].
    fn argmax(&self, mut lo: f64, mut hi: f64) -> f64 {
        let ratio = (5f64.sqrt() - 1.0) / 2.0;
        let mut x1 = hi - ratio * (hi - lo);
        let mut x2 = lo + ratio * (hi - lo);
        let (mut y1, mut y2) = (self.eval(x1), self.eval(x2));
        for _ in 0..200 {
            if hi - lo <= 1e-13 * hi.abs().max(1.0) {
                break;
            }
            if y1 < y2 {
                lo = x1;
                x1 = x2;
                y1 = y2;
                x2 = lo + ratio * (hi - lo);
                y2 = self.eval(x2);
            } else {
                hi = x2;
                x2 = x1;
                y2 = y1;
                x1 = hi - ratio * (hi - lo);
                y1 = self.eval(x1);
            }
        }
        0.5 * (lo + hi)
    }

    /// Bisection for p(f) = level on [lo, hi]; `None` without a sign change.
    fn crossing(&self, mut lo: f64, mut hi: f64, level: f64) -> Option<f64> {
        let mut g_lo = self.eval(lo) - level;
        let g_hi = self.eval(hi) - level;
        if g_lo == 0.0 {
            return Some(lo);
        }
        if g_lo.signum() == g_hi.signum() {
            return None;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let g = self.eval(mid) - level;
            if g.signum() == g_lo.signum() {
                lo = mid;
                g_lo = g;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }
}

fn raw_peak(amps: &[f64]) -> usize {
    amps.iter()
        .enumerate()
        .fold(0, |best, (i, &a)| if a > amps[best] { i } else { best })
}

fn linear_crossing(f: &[f64], a: &[f64], lo: usize, level: f64) -> f64 {
    let (f0, f1, a0, a1) = (f[lo], f[lo + 1], a[lo], a[lo + 1]);
    f0 + (level - a0) * (f1 - f0) / (a1 - a0)
}

fn default_half_window(amps: &[f64], peak: usize) -> usize {
    let half_max = amps[peak] / 2.0;
    let mut w = 0;
    while peak > w
        && peak + w + 1 < amps.len()
        && amps[peak - w - 1] >= half_max
        && amps[peak + w + 1] >= half_max
    {
        w += 1;
    }
    w.max(MIN_WINDOW / 2)
}

pub fn extract(curve: &FrfCurve, opts: ExtractOptions) -> Result<ExtractionResult, FrfError> {
    let (f, a) = (curve.freqs(), curve.amps());
    let n = f.len();
    let peak = raw_peak(a);

    let raw_level = a[peak] * FRAC_1_SQRT_2;
    if !a[..peak].iter().any(|&v| v < raw_level) {
        return Err(FrfError::BandwidthUndefined("low"));
    }
    if !a[peak + 1..].iter().any(|&v| v < raw_level) {
        return Err(FrfError::BandwidthUndefined("high"));
    }

    let half = match opts.window {
        Some(w) => w / 2,
        None => default_half_window(a, peak),
    };
    let window = 2 * half + 1;
    if half > peak || peak + half >= n || window < POLY_DEGREE + 1 {
        return Err(FrfError::WindowOutOfRange { window, peak });
    }
    let (w_lo, w_hi) = (peak - half, peak + half);
    let fit = PeakFit::new(&f[w_lo..=w_hi], &a[w_lo..=w_hi])?;

    let f0 = fit.argmax(f[peak - 1].max(f[w_lo]), f[peak + 1].min(f[w_hi]));
    let a_peak = fit.eval(f0);
    let level = a_peak * FRAC_1_SQRT_2;

    // first raw samples below the half-power level, walking outward
    let low = (0..peak)
        .rev()
        .find(|&j| a[j] < level)
        .ok_or(FrfError::BandwidthUndefined("low"))?;
    let high = (peak + 1..n)
        .find(|&j| a[j] < level)
        .ok_or(FrfError::BandwidthUndefined("high"))?;

    let in_window = |j: usize| j >= w_lo && j <= w_hi;
    let pick = |lo: usize, hi: usize, left: usize| -> f64 {
        let poly = (opts.crossings == CrossingSource::Polynomial && in_window(lo) && in_window(hi))
            .then(|| fit.crossing(f[lo], f[hi], level))
            .flatten();
        poly.unwrap_or_else(|| linear_crossing(f, a, left, level))
    };
    let f1 = pick(low, low + 1, low);
    let f2 = pick(high - 1, high, high - 1);

    Ok(ExtractionResult {
        f0,
        a_peak,
        f1,
        f2,
        q: f0 / (f2 - f1),
        c: None,
    })
}

/// Mean and sample standard deviation over repeated sweeps of one device.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RepeatedExtraction {
    pub count: usize,
    pub f0_mean: f64,
    pub f0_std: f64,
    pub q_mean: f64,
    pub q_std: f64,
}

pub fn extract_repeated(
    curves: &[FrfCurve],
    opts: ExtractOptions,
) -> Result<RepeatedExtraction, FrfError> {
    if curves.is_empty() {
        return Err(FrfError::Empty);
    }
    let results = curves
        .iter()
        .map(|c| extract(c, opts))
        .collect::<Result<Vec<_>, _>>()?;
    let f0: Vec<f64> = results.iter().map(|r| r.f0).collect();
    let q: Vec<f64> = results.iter().map(|r| r.q).collect();
    let std = |v: &[f64]| if v.len() > 1 { v.std_dev() } else { 0.0 };
    Ok(RepeatedExtraction {
        count: results.len(),
        f0_mean: f0.as_slice().mean(),
        f0_std: std(&f0),
        q_mean: q.as_slice().mean(),
        q_std: std(&q),
    })
}

//! Time-domain simulation of the switched-antenna waveform.
//!
//! The first BPSK stream is root-raised-cosine shaped and fed to the single
//! RF chain; the ratio s2/s1 drives the switch state, so the radiated
//! envelope in a fixed direction is the shaped stream times a piecewise
//! pattern gain. Abrupt gain switching at symbol boundaries regrows the
//! spectrum outside the pulse-shaped mask; ramped transitions model a driver
//! that reshapes the pattern smoothly.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::pattern::VectorPattern;
use crate::rng::make_rng;

/// Root-raised-cosine pulse shaping parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseShape {
    /// Roll-off factor, 0..=1.
    pub rolloff: f64,
    /// Filter span in symbols on each side of the peak; taps = 2 * span * sps + 1.
    pub span: usize,
    /// Samples per symbol.
    pub sps: usize,
}

impl PulseShape {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.rolloff) {
            return Err(Error::InvalidParameter(format!(
                "roll-off must be in [0, 1], got {}",
                self.rolloff
            )));
        }
        if self.span == 0 || self.sps < 2 {
            return Err(Error::InvalidParameter(
                "pulse shape needs span >= 1 symbol and sps >= 2".into(),
            ));
        }
        Ok(())
    }
}

/// Unit-energy RRC impulse response with exact even symmetry (the second
/// half is mirrored from the first; singular points use analytic limits).
pub fn rrc_taps(shape: &PulseShape) -> Result<Vec<f64>> {
    shape.validate()?;
    let beta = shape.rolloff;
    let n = 2 * shape.span * shape.sps + 1;
    let center = (n - 1) / 2;
    let mut taps = vec![0.0f64; n];
    for i in 0..=center {
        // time in symbol periods
        let t = (i as f64 - center as f64) / shape.sps as f64;
        let h = if t == 0.0 {
            1.0 + beta * (4.0 / PI - 1.0)
        } else if beta > 0.0 && (t.abs() - 1.0 / (4.0 * beta)).abs() < 1e-9 {
            (beta / 2.0_f64.sqrt())
                * ((1.0 + 2.0 / PI) * (PI / (4.0 * beta)).sin()
                    + (1.0 - 2.0 / PI) * (PI / (4.0 * beta)).cos())
        } else {
            let num = (PI * t * (1.0 - beta)).sin()
                + 4.0 * beta * t * (PI * t * (1.0 + beta)).cos();
            let den = PI * t * (1.0 - (4.0 * beta * t).powi(2));
            num / den
        };
        taps[i] = h;
        taps[n - 1 - i] = h;
    }
    let energy: f64 = taps.iter().map(|x| x * x).sum();
    let norm = energy.sqrt();
    for t in &mut taps {
        *t /= norm;
    }
    Ok(taps)
}

/// How the pattern gain moves between the two switch states at a boundary.
///
/// `Rectangular` switches within one sample (the high-slew-rate drive);
/// the ramps blend the two states' complex pattern values over `duration`
/// seconds, linearly or with a raised-cosine easing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TransitionProfile {
    Rectangular,
    LinearRamp { duration: f64 },
    CosineRamp { duration: f64 },
}

impl TransitionProfile {
    pub fn duration(&self) -> f64 {
        match self {
            TransitionProfile::Rectangular => 0.0,
            TransitionProfile::LinearRamp { duration } | TransitionProfile::CosineRamp { duration } => {
                *duration
            }
        }
    }
}

/// The two instantaneous-pattern states. State I radiates G1 (s2/s1 = -1),
/// state II radiates G2 (s2/s1 = +1), matching the superposition identities
/// (1, -1) -> G1 and (1, 1) -> G2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AntennaState {
    I,
    II,
}

/// Per-symbol switch states from the two BPSK streams.
pub fn state_sequence(s1: &[i8], s2: &[i8]) -> Result<Vec<AntennaState>> {
    if s1.len() != s2.len() {
        return Err(Error::StreamLengthMismatch(s1.len(), s2.len()));
    }
    s1.iter()
        .zip(s2)
        .map(|(&a, &b)| {
            if !(a == 1 || a == -1) || !(b == 1 || b == -1) {
                return Err(Error::BadSymbol);
            }
            Ok(if a == b {
                AntennaState::II
            } else {
                AntennaState::I
            })
        })
        .collect()
}

/// Fraction of symbol transitions that keep the switch state unchanged.
pub fn state_preserving_fraction(states: &[AntennaState]) -> f64 {
    if states.len() < 2 {
        return 1.0;
    }
    let kept = states.windows(2).filter(|w| w[0] == w[1]).count();
    kept as f64 / (states.len() - 1) as f64
}

/// Complex pattern gains of the two states in the chosen direction.
#[derive(Debug, Clone, Copy)]
pub struct StateGains {
    pub state_i: Complex64,
    pub state_ii: Complex64,
}

/// Which field component the receiver picks up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Polarization {
    #[default]
    Theta,
    Phi,
}

impl StateGains {
    /// Sample the two state patterns at the grid node nearest the requested
    /// direction (no interpolation).
    pub fn from_patterns(
        g1: &VectorPattern,
        g2: &VectorPattern,
        theta: f64,
        phi: f64,
        pol: Polarization,
    ) -> Result<Self> {
        if !g1.same_grid(g2) {
            return Err(Error::GridMismatch);
        }
        let (it, ip) = g1.grid().nearest_node(theta, phi);
        let idx = g1.grid().node_index(it, ip);
        let pick = |p: &VectorPattern| match pol {
            Polarization::Theta => p.sample(idx).0,
            Polarization::Phi => p.sample(idx).1,
        };
        Ok(StateGains {
            state_i: pick(g1),
            state_ii: pick(g2),
        })
    }

    fn value(&self, s: AntennaState) -> Complex64 {
        match s {
            AntennaState::I => self.state_i,
            AntennaState::II => self.state_ii,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MultiplexConfig {
    pub shape: PulseShape,
    pub profile: TransitionProfile,
    /// Symbols per second.
    pub symbol_rate: f64,
}

impl MultiplexConfig {
    pub fn sample_rate(&self) -> f64 {
        self.symbol_rate * self.shape.sps as f64
    }

    pub fn validate(&self) -> Result<()> {
        self.shape.validate()?;
        if !(self.symbol_rate > 0.0) {
            return Err(Error::InvalidParameter("symbol rate must be positive".into()));
        }
        let t_symbol = 1.0 / self.symbol_rate;
        if self.profile.duration() < 0.0 || self.profile.duration() >= t_symbol {
            return Err(Error::InvalidParameter(format!(
                "transition duration {} s must be shorter than the symbol period {} s",
                self.profile.duration(),
                t_symbol
            )));
        }
        Ok(())
    }
}

/// Per-sample pattern gain for a state sequence, aligned so that symbol n of
/// the shaped stream (group delay included) sees state n. Gains change only
/// at symbol boundaries where the state flips, blending per the profile.
pub fn gain_timeline(
    states: &[AntennaState],
    gains: &StateGains,
    cfg: &MultiplexConfig,
    total_len: usize,
    delay: usize,
) -> Vec<Complex64> {
    let sps = cfg.shape.sps;
    let ramp_len = (cfg.profile.duration() * cfg.sample_rate()).round() as usize;
    let mut g = vec![Complex64::ZERO; total_len];
    for (m, slot) in g.iter_mut().enumerate() {
        let rel = m as isize - delay as isize;
        let sym = (rel.div_euclid(sps as isize)).clamp(0, states.len() as isize - 1) as usize;
        let cur = gains.value(states[sym]);
        *slot = cur;
        if ramp_len > 0 && sym > 0 && states[sym] != states[sym - 1] {
            let into = rel.rem_euclid(sps as isize) as usize;
            if rel >= 0 && into < ramp_len {
                let prev = gains.value(states[sym - 1]);
                let frac = (into as f64 + 1.0) / ramp_len as f64;
                let alpha = match cfg.profile {
                    TransitionProfile::LinearRamp { .. } => frac,
                    TransitionProfile::CosineRamp { .. } => 0.5 * (1.0 - (PI * frac).cos()),
                    TransitionProfile::Rectangular => 1.0,
                };
                *slot = prev + (cur - prev) * alpha;
            }
        }
    }
    g
}

/// Shape the first stream and multiply by the switched pattern gain.
///
/// Returns the full-convolution envelope: n_symbols * sps + taps - 1 samples.
pub fn multiplex_timeseries(
    s1: &[i8],
    s2: &[i8],
    gains: &StateGains,
    cfg: &MultiplexConfig,
) -> Result<Vec<Complex64>> {
    cfg.validate()?;
    let states = state_sequence(s1, s2)?;
    let taps = rrc_taps(&cfg.shape)?;
    let sps = cfg.shape.sps;
    let total = s1.len() * sps + taps.len() - 1;

    // upsampled impulse train convolved with the shaping filter
    let mut x1 = vec![0.0f64; total];
    for (n, &sym) in s1.iter().enumerate() {
        let base = n * sps;
        let s = sym as f64;
        for (k, &t) in taps.iter().enumerate() {
            x1[base + k] += s * t;
        }
    }

    let delay = (taps.len() - 1) / 2;
    let g = gain_timeline(&states, gains, cfg, total, delay);
    Ok(x1.iter().zip(&g).map(|(&x, &gg)| gg * x).collect())
}

/// Deterministic random BPSK stream (+1/-1).
pub fn random_bpsk(n: usize, seed: u64) -> Vec<i8> {
    let mut rng = make_rng(seed);
    (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect()
}

/// Welch-averaged power spectral density, peak-normalized.
#[derive(Debug, Clone)]
pub struct SpectrumEstimate {
    /// Baseband frequency offsets, ascending, length = segment length.
    pub freqs: Vec<f64>,
    /// dB relative to the in-band peak.
    pub psd_db: Vec<f64>,
    /// Equivalent noise bandwidth of one bin.
    pub rbw_hz: f64,
}

/// Welch periodogram with a Hann window and the given overlap in samples.
pub fn psd_estimate(
    y: &[Complex64],
    fs: f64,
    segment_len: usize,
    overlap: usize,
) -> Result<SpectrumEstimate> {
    if segment_len < 2 {
        return Err(Error::InvalidParameter(
            "segment length must be at least 2".into(),
        ));
    }
    if segment_len > y.len() {
        return Err(Error::SegmentTooLong {
            seg: segment_len,
            len: y.len(),
        });
    }
    if overlap >= segment_len {
        return Err(Error::InvalidParameter(
            "overlap must be smaller than the segment length".into(),
        ));
    }
    let hop = segment_len - overlap;
    let window: Vec<f64> = (0..segment_len)
        .map(|i| 0.5 * (1.0 - (2.0 * PI * i as f64 / (segment_len - 1) as f64).cos()))
        .collect();
    let wsum: f64 = window.iter().sum();
    let w2sum: f64 = window.iter().map(|w| w * w).sum();

    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(segment_len);
    let mut acc = vec![0.0f64; segment_len];
    let mut count = 0usize;
    let mut start = 0usize;
    let mut buf = vec![Complex64::ZERO; segment_len];
    while start + segment_len <= y.len() {
        for i in 0..segment_len {
            buf[i] = y[start + i] * window[i];
        }
        fft.process(&mut buf);
        for (a, b) in acc.iter_mut().zip(&buf) {
            *a += b.norm_sqr();
        }
        count += 1;
        start += hop;
    }
    // fftshift to ascending baseband offsets
    let half = segment_len / 2;
    let mut power = vec![0.0f64; segment_len];
    let mut freqs = vec![0.0f64; segment_len];
    for k in 0..segment_len {
        let src = (k + half) % segment_len;
        power[k] = acc[src] / count as f64;
        freqs[k] = (k as f64 - half as f64) * fs / segment_len as f64;
    }
    let peak = power.iter().cloned().fold(0.0f64, f64::max);
    let psd_db = power
        .iter()
        .map(|&p| 10.0 * (p / peak).log10())
        .collect();
    Ok(SpectrumEstimate {
        freqs,
        psd_db,
        rbw_hz: fs * w2sum / (wsum * wsum),
    })
}

/// Integrated power beyond +-band_edge relative to the total, in dB.
/// A spectrum with no out-of-band content reports `f64::NEG_INFINITY`.
pub fn oob_power_ratio(spec: &SpectrumEstimate, band_edge: f64) -> Result<f64> {
    let nyquist = spec.freqs.last().copied().unwrap_or(0.0).abs().max(
        spec.freqs.first().copied().unwrap_or(0.0).abs(),
    );
    if !(band_edge > 0.0) || band_edge >= nyquist {
        return Err(Error::BandEdgeBeyondNyquist {
            edge: band_edge,
            nyquist,
        });
    }
    let mut total = 0.0f64;
    let mut oob = 0.0f64;
    for (f, db) in spec.freqs.iter().zip(&spec.psd_db) {
        let p = 10f64.powf(db / 10.0);
        total += p;
        if f.abs() > band_edge {
            oob += p;
        }
    }
    if oob == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(10.0 * (oob / total).log10())
}

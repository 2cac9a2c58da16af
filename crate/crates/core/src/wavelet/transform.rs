//! Atoms `ψ_{x,s} = √s ψ(s(· − x))` and the transform `W_ψ f(x, s) = ⟨f, ψ_{x,s}⟩` in the finite model.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{MotherWavelet, SignalModel, WaveletError, WaveletResult};

fn check_scale(s: f64) -> WaveletResult<()> {
    if !(s.is_finite() && s > 0.0) {
        return Err(WaveletError::InvalidScale(s));
    }
    Ok(())
}

/// `e^{2πi x j / n}` with the phase reduced before the trigonometric call.
pub(crate) fn phase(x: f64, j: usize, n: usize) -> Complex64 {
    let turns = (x * j as f64 / n as f64).rem_euclid(1.0);
    Complex64::from_polar(1.0, TAU * turns)
}

/// Coefficients `s^{−1/2} F(ξ_j/s) e^{−2πi x ξ_j}` of `ψ_{x,s}`.
pub fn atom_spectrum(w: &MotherWavelet, x: f64, s: f64, n: usize) -> WaveletResult<SignalModel> {
    check_scale(s)?;
    if !x.is_finite() {
        return Err(WaveletError::InvalidParameter(format!("translation {x}")));
    }
    let amp = s.sqrt().recip();
    SignalModel::zeros(n)?;
    let coeffs = (1..n / 2)
        .map(|j| amp * w.profile(j as f64 / (n as f64 * s)) * phase(x, j, n).conj())
        .collect();
    SignalModel::from_coefficients(n, coeffs)
}

/// One transform value by direct summation over the bins.
pub fn cwt_direct(f: &SignalModel, w: &MotherWavelet, x: f64, s: f64) -> WaveletResult<Complex64> {
    check_scale(s)?;
    if !x.is_finite() {
        return Err(WaveletError::InvalidParameter(format!("translation {x}")));
    }
    let n = f.len();
    let amp = s.sqrt().recip();
    let sum: Complex64 = f
        .coefficients()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let j = i + 1;
            c * (amp * w.profile(j as f64 / (n as f64 * s))) * phase(x, j, n)
        })
        .sum();
    Ok(sum * f.bin_width())
}

/// Transform values at arbitrary `(x, s)` points, in input order.
pub fn cwt(f: &SignalModel, w: &MotherWavelet, points: &[(f64, f64)]) -> WaveletResult<Vec<Complex64>> {
    points.par_iter().map(|&(x, s)| cwt_direct(f, w, x, s)).collect()
}

/// `W_ψ f(x₀ + m, s)` for `m = 0 … N−1` from one inverse FFT.
pub fn cwt_scale_row(f: &SignalModel, w: &MotherWavelet, s: f64, x0: f64) -> WaveletResult<Vec<Complex64>> {
    check_scale(s)?;
    let n = f.len();
    let amp = s.sqrt().recip();
    let dxi = f.bin_width();
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (i, c) in f.coefficients().iter().enumerate() {
        let j = i + 1;
        buf[j] = c * (dxi * amp * w.profile(j as f64 / (n as f64 * s))) * phase(x0, j, n);
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    Ok(buf)
}

/// Measure on the half-plane used to weigh `|W_ψ f|²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    DxDs,
    DxDsOverS2,
}

/// Midpoint rule in `s` on `[s_min, s_max]`; unit spacing in `x` over one full period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParsevalGrid {
    pub s_min: f64,
    pub s_max: f64,
    pub scales: usize,
}

/// `Σ_{x,s} |W_ψ f(x, s)|² Δx Δs · weight(s)`.
pub fn parseval_sum(f: &SignalModel, w: &MotherWavelet, grid: &ParsevalGrid, measure: Measure) -> WaveletResult<f64> {
    if !(grid.s_min > 0.0 && grid.s_max > grid.s_min && grid.scales > 0) {
        return Err(WaveletError::InvalidParameter(format!("parseval grid {grid:?}")));
    }
    let ds = (grid.s_max - grid.s_min) / grid.scales as f64;
    let rows: Vec<f64> = (0..grid.scales)
        .into_par_iter()
        .map(|i| {
            let s = grid.s_min + (i as f64 + 0.5) * ds;
            let energy: f64 = cwt_scale_row(f, w, s, 0.0)?.iter().map(|v| v.norm_sqr()).sum();
            let weight = match measure {
                Measure::DxDs => 1.0,
                Measure::DxDsOverS2 => 1.0 / (s * s),
            };
            Ok(energy * ds * weight)
        })
        .collect::<WaveletResult<_>>()?;
    Ok(rows.iter().sum())
}

//! Periodic length-`N` signals with spectrum on the bins `j = 1 … N/2 − 1`.
//!
//! Time samples sit at `t = 0, 1, …, N−1`; bin `j` is the frequency `ξ_j = j/N`.
//! Coefficients approximate the continuous transform, `f̂_j ≈ Σ_t f(t) e^{−2πi ξ_j t}`,
//! and inner products are Riemann sums `⟨f, g⟩ = Δξ Σ_j f̂_j conj(ĝ_j)` with `Δξ = 1/N`.

use std::io::{Read, Write};

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::{WaveletError, WaveletResult};

/// Binary layout written by [`SignalModel::write_binary`].
pub const BINARY_FORMAT: &str =
    "N/2-1 records of (re: f64, im: f64), little-endian IEEE 754, bins j = 1, 2, ... in order; N is inferred";

#[derive(Debug, Clone, PartialEq)]
pub struct SignalModel {
    n: usize,
    coeffs: Vec<Complex64>,
}

fn check_length(n: usize) -> WaveletResult<()> {
    if n < 8 || !n.is_power_of_two() {
        return Err(WaveletError::InvalidModel(format!("length must be a power of two >= 8, got {n}")));
    }
    Ok(())
}

impl SignalModel {
    pub fn zeros(n: usize) -> WaveletResult<Self> {
        check_length(n)?;
        Ok(Self { n, coeffs: vec![Complex64::new(0.0, 0.0); n / 2 - 1] })
    }

    pub fn from_coefficients(n: usize, coeffs: Vec<Complex64>) -> WaveletResult<Self> {
        check_length(n)?;
        if coeffs.len() != n / 2 - 1 {
            return Err(WaveletError::InvalidModel(format!(
                "expected {} coefficients for N = {n}, got {}",
                n / 2 - 1,
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(WaveletError::InvalidModel("non-finite coefficient".into()));
        }
        Ok(Self { n, coeffs })
    }

    /// Samples a spectrum `ξ ↦ f̂(ξ)` on the model bins.
    pub fn from_spectrum(n: usize, spectrum: impl Fn(f64) -> Complex64) -> WaveletResult<Self> {
        check_length(n)?;
        let coeffs = (1..n / 2).map(|j| spectrum(j as f64 / n as f64)).collect();
        Self::from_coefficients(n, coeffs)
    }

    /// Projects `N` time samples onto the positive-frequency bins; the rest of the spectrum is dropped.
    pub fn from_time_samples(samples: &[Complex64]) -> WaveletResult<Self> {
        let n = samples.len();
        check_length(n)?;
        let mut buf = samples.to_vec();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        Self::from_coefficients(n, buf[1..n / 2].to_vec())
    }

    pub fn to_time_samples(&self) -> Vec<Complex64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.n];
        let dxi = self.bin_width();
        for (j, c) in self.coeffs.iter().enumerate() {
            buf[j + 1] = c * dxi;
        }
        FftPlanner::new().plan_fft_inverse(self.n).process(&mut buf);
        buf
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn bins(&self) -> usize {
        self.coeffs.len()
    }

    pub fn bin_width(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Frequency of coefficient index `i` (bin `i + 1`).
    pub fn xi(&self, i: usize) -> f64 {
        (i + 1) as f64 / self.n as f64
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coefficients_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coefficients(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn check_same(&self, other: &Self) -> WaveletResult<()> {
        if self.n != other.n {
            return Err(WaveletError::ModelMismatch(self.n, other.n));
        }
        Ok(())
    }

    pub fn inner(&self, other: &Self) -> WaveletResult<Complex64> {
        self.check_same(other)?;
        let sum: Complex64 = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b.conj()).sum();
        Ok(sum * self.bin_width())
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.bin_width()
    }

    /// `self ← a·self + b·other`.
    pub fn combine(&self, a: Complex64, other: &Self, b: Complex64) -> WaveletResult<Self> {
        self.check_same(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(x, y)| a * x + b * y).collect();
        Ok(Self { n: self.n, coeffs })
    }

    /// `t ↦ f(t − τ)`.
    pub fn shifted(&self, tau: f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * Complex64::from_polar(1.0, -std::f64::consts::TAU * tau * self.xi(i)))
            .collect();
        Self { n: self.n, coeffs }
    }

    /// Zeroes every bin outside `[first_bin, last_bin]`.
    pub fn band_limited(&self, first_bin: usize, last_bin: usize) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| if (first_bin..=last_bin).contains(&(i + 1)) { c } else { Complex64::new(0.0, 0.0) })
            .collect();
        Self { n: self.n, coeffs }
    }

    /// CSV with header `re,im` and one row per bin.
    pub fn write_csv<W: Write>(&self, out: W) -> WaveletResult<()> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| WaveletError::Io(e.to_string());
        w.write_record(["re", "im"]).map_err(err)?;
        for c in &self.coeffs {
            w.write_record([format!("{:e}", c.re), format!("{:e}", c.im)]).map_err(err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> WaveletResult<Self> {
        let mut r = csv::Reader::from_reader(input);
        let mut coeffs = Vec::new();
        for (row, record) in r.records().enumerate() {
            let record = record.map_err(|e| WaveletError::Format(e.to_string()))?;
            if record.len() != 2 {
                return Err(WaveletError::Format(format!("row {}: expected 2 fields", row + 1)));
            }
            let field = |i: usize| {
                record[i]
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| WaveletError::Format(format!("row {}: bad number {:?}", row + 1, &record[i])))
            };
            coeffs.push(Complex64::new(field(0)?, field(1)?));
        }
        Self::from_coefficients(2 * (coeffs.len() + 1), coeffs)
    }

    pub fn write_binary<W: Write>(&self, mut out: W) -> WaveletResult<()> {
        for c in &self.coeffs {
            out.write_all(&c.re.to_le_bytes())?;
            out.write_all(&c.im.to_le_bytes())?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_binary<R: Read>(mut input: R) -> WaveletResult<Self> {
        let mut bytes = Vec::new();
        input.read_to_end(&mut bytes)?;
        if bytes.len() % 16 != 0 {
            return Err(WaveletError::Format(format!("{} bytes is not a whole number of records", bytes.len())));
        }
        let coeffs = bytes
            .chunks_exact(16)
            .map(|rec| {
                let re = f64::from_le_bytes(rec[..8].try_into().expect("8-byte slice"));
                let im = f64::from_le_bytes(rec[8..].try_into().expect("8-byte slice"));
                Complex64::new(re, im)
            })
            .collect::<Vec<_>>();
        Self::from_coefficients(2 * (coeffs.len() + 1), coeffs)
    }
}

//! Analysis, synthesis and `S f = Σ_λ ⟨f, ψ_λ⟩ ψ_λ` on a band of model bins.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{Band, FrameResult, SampleSet};
use crate::wavelet::{cwt, phase, BinSampler, MotherWavelet, SignalModel};

const CHUNK: usize = 256;
/// Bins between direct re-evaluations of the phase recurrence.
const PHASE_ANCHOR: usize = 64;

/// Frame operator restricted to `band`, applied matrix-free. Vectors hold the band's coefficients.
pub struct FrameOperator {
    n: usize,
    band: Band,
    sampler: BinSampler,
    points: Vec<(f64, f64)>,
}

fn zeros(d: usize) -> Vec<Complex64> {
    vec![Complex64::new(0.0, 0.0); d]
}

/// Adjacent pairs summed level by level, so the result does not depend on scheduling.
fn tree_sum(mut parts: Vec<Vec<Complex64>>, d: usize) -> Vec<Complex64> {
    if parts.is_empty() {
        return zeros(d);
    }
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(mut a) = it.next() {
            if let Some(b) = it.next() {
                for (x, y) in a.iter_mut().zip(&b) {
                    *x += y;
                }
            }
            next.push(a);
        }
        parts = next;
    }
    parts.pop().expect("non-empty")
}

impl FrameOperator {
    pub fn new(set: &SampleSet, w: &MotherWavelet, n: usize, band: Band) -> FrameResult<Self> {
        SignalModel::zeros(n)?;
        let band = Band::new(band.first, band.last, n)?;
        Ok(Self {
            n,
            band,
            sampler: BinSampler::new(w, n, band.first, band.dimension()),
            points: set.points.clone(),
        })
    }

    pub fn dimension(&self) -> usize {
        self.band.dimension()
    }

    pub fn points(&self) -> usize {
        self.points.len()
    }

    pub fn band(&self) -> Band {
        self.band
    }

    /// Band coefficients of `ψ_{x,s}`.
    fn atom(&self, (x, s): (f64, f64), amp: &mut [f64], out: &mut [Complex64]) {
        self.sampler.sample(s, amp);
        let step = phase(x, 1, self.n).conj();
        let mut p = Complex64::new(1.0, 0.0);
        for (i, (o, a)) in out.iter_mut().zip(amp.iter()).enumerate() {
            if i % PHASE_ANCHOR == 0 {
                p = phase(x, self.band.first + i, self.n).conj();
            } else {
                p *= step;
            }
            *o = p * *a;
        }
    }

    fn coefficient(&self, f: &[Complex64], atom: &[Complex64]) -> Complex64 {
        let sum: Complex64 = f.iter().zip(atom).map(|(a, b)| a * b.conj()).sum();
        sum / self.n as f64
    }

    /// `⟨f, ψ_λ⟩` for every point, in point order.
    pub fn analysis(&self, f: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(f.len(), self.dimension(), "band vector length");
        let d = self.dimension();
        self.points
            .par_chunks(CHUNK)
            .flat_map_iter(|chunk| {
                let mut amp = vec![0.0; d];
                let mut atom = zeros(d);
                chunk
                    .iter()
                    .map(|&p| {
                        self.atom(p, &mut amp, &mut atom);
                        self.coefficient(f, &atom)
                    })
                    .collect::<Vec<_>>()
            })
            .collect()
    }

    /// `Σ_λ c_λ ψ_λ`.
    pub fn synthesis(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(coeffs.len(), self.points(), "one coefficient per point");
        let d = self.dimension();
        let parts: Vec<Vec<Complex64>> = self
            .points
            .par_chunks(CHUNK)
            .zip(coeffs.par_chunks(CHUNK))
            .map(|(pts, cs)| {
                let mut amp = vec![0.0; d];
                let mut atom = zeros(d);
                let mut acc = zeros(d);
                for (&p, &c) in pts.iter().zip(cs) {
                    self.atom(p, &mut amp, &mut atom);
                    for (o, a) in acc.iter_mut().zip(&atom) {
                        *o += c * a;
                    }
                }
                acc
            })
            .collect();
        tree_sum(parts, d)
    }

    /// `S f`, fusing analysis and synthesis per point.
    pub fn apply(&self, f: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(f.len(), self.dimension(), "band vector length");
        let d = self.dimension();
        let parts: Vec<Vec<Complex64>> = self
            .points
            .par_chunks(CHUNK)
            .map(|pts| {
                let mut amp = vec![0.0; d];
                let mut atom = zeros(d);
                let mut acc = zeros(d);
                for &p in pts {
                    self.atom(p, &mut amp, &mut atom);
                    let c = self.coefficient(f, &atom);
                    for (o, a) in acc.iter_mut().zip(&atom) {
                        *o += c * a;
                    }
                }
                acc
            })
            .collect();
        tree_sum(parts, d)
    }

    /// `⟨u, v⟩ = Δξ Σ u_j conj(v_j)` on band vectors.
    pub fn inner(&self, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        let sum: Complex64 = u.iter().zip(v).map(|(a, b)| a * b.conj()).sum();
        sum / self.n as f64
    }
}

/// `W_ψ f` at every point of the set.
pub fn analysis(f: &SignalModel, set: &SampleSet, w: &MotherWavelet) -> FrameResult<Vec<Complex64>> {
    Ok(cwt(f, w, &set.points)?)
}

/// `S f` on the full positive-frequency model.
pub fn frame_operator_apply(f: &SignalModel, set: &SampleSet, w: &MotherWavelet) -> FrameResult<SignalModel> {
    let op = FrameOperator::new(set, w, f.len(), Band::full(f.len()))?;
    Ok(SignalModel::from_coefficients(f.len(), op.apply(f.coefficients()))?)
}

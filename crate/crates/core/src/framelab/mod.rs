//! Discrete sample sets in phase space and their frame operators in the finite model.

mod compare;
mod eigen;
mod operator;

use serde::Serialize;
use thiserror::Error;

use crate::covering::{beta_for_delta, CoverError};
use crate::lattice::{enumerate_in_rect, LatticeError, LatticeSpec, Rect};
use crate::wavelet::{MotherWavelet, WaveletError};

pub use compare::{compare_schemes, density_matched_dyadic, write_comparison_csv, ComparisonReport, ComparisonRow, CSV_COLUMNS};
pub use eigen::{estimate_bounds, EstimateOptions, FrameEstimate, Method};
pub use operator::{analysis, frame_operator_apply, FrameOperator};

#[derive(Debug, Error)]
pub enum FrameError {
    #[error("sampling region must lie in the upper half-plane, got s >= {0}")]
    RegionNotInHalfPlane(f64),
    #[error("dyadic parameters need a > 1 and b > 0, got a = {a}, b = {b}")]
    InvalidDyadic { a: f64, b: f64 },
    #[error("band [{first}, {last}] is not inside bins 1..={max}")]
    InvalidBand { first: usize, last: usize, max: usize },
    #[error("A = 0: rank-deficient, {points} points cannot span a band of dimension {dimension}")]
    RankDeficient { points: usize, dimension: usize },
    #[error("A = 0: numerically singular frame operator (lower {lower:e}, upper {upper:e})")]
    Singular { lower: f64, upper: f64 },
    #[error("eigenvalue iteration did not converge after {iterations} steps")]
    NotConverged { iterations: usize },
    #[error("density matching failed: {0}")]
    DensityMatch(String),
    #[error("invalid option: {0}")]
    InvalidOption(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Wavelet(#[from] WaveletError),
}

pub type FrameResult<T> = Result<T, FrameError>;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "scheme", rename_all = "lowercase")]
pub enum Provenance {
    Golden { beta: f64, delta: Option<f64> },
    Dyadic { a: f64, b: f64 },
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleSet {
    pub points: Vec<(f64, f64)>,
    pub provenance: Provenance,
    pub region: Rect,
}

impl SampleSet {
    pub fn explicit(points: Vec<(f64, f64)>, region: Rect) -> FrameResult<Self> {
        if !(region.c > 0.0) {
            return Err(FrameError::RegionNotInHalfPlane(region.c));
        }
        let mut points: Vec<_> = points.into_iter().filter(|&(x, s)| region.contains(x, s)).collect();
        points.sort_by(|p, q| p.partial_cmp(q).expect("finite points"));
        points.dedup();
        Ok(Self { points, provenance: Provenance::Explicit, region })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `βΓ ∩ region`; `beta` defaults to `beta_for_delta(delta)`.
pub fn golden_sample_set(delta: Option<f64>, beta: Option<f64>, region: &Rect) -> FrameResult<SampleSet> {
    if !(region.c > 0.0) {
        return Err(FrameError::RegionNotInHalfPlane(region.c));
    }
    let beta = match (beta, delta) {
        (Some(b), _) => b,
        (None, Some(d)) => beta_for_delta(d)?,
        (None, None) => return Err(FrameError::InvalidOption("golden set needs delta or beta".into())),
    };
    let spec = LatticeSpec::new(beta)?.with_upper_half(true);
    let points = enumerate_in_rect(&spec, region)?.iter().map(|p| p.coords(beta)).collect();
    Ok(SampleSet { points, provenance: Provenance::Golden { beta, delta }, region: *region })
}

fn check_dyadic(a: f64, b: f64, region: &Rect) -> FrameResult<()> {
    if !(a > 1.0 && a.is_finite() && b > 0.0 && b.is_finite()) {
        return Err(FrameError::InvalidDyadic { a, b });
    }
    if !(region.c > 0.0) {
        return Err(FrameError::RegionNotInHalfPlane(region.c));
    }
    Ok(())
}

/// Scales `a^j` inside `[c, d)`, in increasing order.
fn dyadic_scales(a: f64, region: &Rect) -> Vec<f64> {
    let mut j = (region.c.ln() / a.ln()).floor() as i64 - 1;
    let mut out = Vec::new();
    loop {
        let s = a.powi(j as i32);
        if s >= region.d {
            return out;
        }
        if s >= region.c {
            out.push(s);
        }
        j += 1;
    }
}

/// Half-open index range of `l` with `l·step ∈ [a, b)`, using the same float products as the enumeration.
fn translation_range(step: f64, region: &Rect) -> (i64, i64) {
    let inside_from = |l: i64| l as f64 * step >= region.a;
    let before_end = |l: i64| (l as f64 * step) < region.b;
    let mut lo = (region.a / step).ceil() as i64;
    while inside_from(lo - 1) {
        lo -= 1;
    }
    while !inside_from(lo) {
        lo += 1;
    }
    let mut hi = (region.b / step).ceil() as i64;
    while !before_end(hi - 1) && hi > lo {
        hi -= 1;
    }
    while before_end(hi) {
        hi += 1;
    }
    (lo, hi.max(lo))
}

/// `{(a^{−j} l b, a^j) : j, l ∈ ℤ} ∩ region`, ordered by `(j, l)`.
pub fn dyadic_sample_set(a: f64, b: f64, region: &Rect) -> FrameResult<SampleSet> {
    check_dyadic(a, b, region)?;
    let mut points = Vec::new();
    for s in dyadic_scales(a, region) {
        let step = b / s;
        let (lo, hi) = translation_range(step, region);
        points.extend((lo..hi).map(|l| (l as f64 * step, s)));
    }
    Ok(SampleSet { points, provenance: Provenance::Dyadic { a, b }, region: *region })
}

/// `|dyadic_sample_set(a, b, region)|` without building the set.
pub fn dyadic_count(a: f64, b: f64, region: &Rect) -> FrameResult<u64> {
    check_dyadic(a, b, region)?;
    Ok(dyadic_scales(a, region)
        .into_iter()
        .map(|s| {
            let (lo, hi) = translation_range(b / s, region);
            (hi - lo) as u64
        })
        .sum())
}

/// Contiguous model bins `first ..= last` on which the frame operator is restricted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Band {
    pub first: usize,
    pub last: usize,
}

impl Band {
    pub fn new(first: usize, last: usize, n: usize) -> FrameResult<Self> {
        if first == 0 || last < first || last > n / 2 - 1 {
            return Err(FrameError::InvalidBand { first, last, max: n / 2 - 1 });
        }
        Ok(Self { first, last })
    }

    pub fn full(n: usize) -> Self {
        Self { first: 1, last: n / 2 - 1 }
    }

    pub fn dimension(&self) -> usize {
        self.last - self.first + 1
    }

    /// Frequency range `[first/n, last/n]`.
    pub fn frequencies(&self, n: usize) -> (f64, f64) {
        (self.first as f64 / n as f64, self.last as f64 / n as f64)
    }
}

/// Frequency at which `|F|` peaks, located on a log grid.
pub fn peak_frequency(w: &MotherWavelet) -> f64 {
    let mut best = (0.0, 1.0);
    for i in 0..=20_000 {
        let xi = 10f64.powf(-6.0 + 10.0 * i as f64 / 20_000.0);
        let v = w.profile(xi).abs();
        if v > best.0 {
            best = (v, xi);
        }
    }
    best.1
}

/// Phase-space window whose scales reach `guard_octaves` beyond the scales peaking inside `band`.
pub fn guarded_region(w: &MotherWavelet, n: usize, band: Band, guard_octaves: f64) -> FrameResult<Rect> {
    if !(guard_octaves >= 0.0 && guard_octaves.is_finite()) {
        return Err(FrameError::InvalidOption(format!("guard octaves {guard_octaves}")));
    }
    let peak = peak_frequency(w);
    let (lo, hi) = band.frequencies(n);
    let widen = 2f64.powf(guard_octaves);
    Ok(Rect::new(0.0, n as f64, lo / peak / widen, hi / peak * widen)?)
}

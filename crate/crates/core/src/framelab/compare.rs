//! Golden lattice versus density-matched dyadic sampling at equal point budgets.

use std::io::Write;

use serde::Serialize;

use super::{
    dyadic_count, dyadic_sample_set, estimate_bounds, golden_sample_set, Band, EstimateOptions, FrameError, FrameEstimate,
    FrameOperator, FrameResult, SampleSet,
};
use crate::covering::beta_for_delta;
use crate::lattice::Rect;
use crate::wavelet::{FamilyTag, MotherWavelet};

pub const CSV_COLUMNS: [&str; 9] = ["delta", "scheme", "beta_or_ab", "points", "A", "B", "ratio", "iters", "converged"];

/// Largest accepted relative point-count mismatch between the two schemes.
const MATCH_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub delta: f64,
    pub scheme: &'static str,
    pub beta_or_ab: String,
    pub points: usize,
    pub estimate: Option<FrameEstimate>,
    /// Set when the estimator refused the set, e.g. for rank deficiency.
    pub error: Option<String>,
}

impl ComparisonRow {
    pub fn lower(&self) -> f64 {
        self.estimate.as_ref().map_or(0.0, |e| e.lower)
    }

    pub fn upper(&self) -> f64 {
        self.estimate.as_ref().map_or(f64::NAN, |e| e.upper)
    }

    pub fn ratio(&self) -> f64 {
        self.estimate.as_ref().map_or(f64::INFINITY, |e| e.ratio)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub n: usize,
    pub band: Band,
    pub region: Rect,
    pub wavelet: FamilyTag,
    pub rows: Vec<ComparisonRow>,
}

/// Dyadic set with basis `a` whose size is within 2% of `target`, found by bisection on `b`.
pub fn density_matched_dyadic(a: f64, target: usize, region: &Rect) -> FrameResult<SampleSet> {
    if target == 0 {
        return Err(FrameError::DensityMatch("target count is zero".into()));
    }
    let count = |b: f64| dyadic_count(a, b, region).map(|c| c as usize);
    let ok = |c: usize| (c as f64 - target as f64).abs() <= MATCH_TOLERANCE * target as f64;
    let (mut lo, mut hi) = (1e-6, 1.0);
    while count(hi)? > target {
        hi *= 4.0;
        if hi > 1e12 {
            return Err(FrameError::DensityMatch("no b small enough in count".into()));
        }
    }
    while count(lo)? < target {
        lo /= 4.0;
        if lo < 1e-15 {
            return Err(FrameError::DensityMatch("no b large enough in count".into()));
        }
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        let c = count(mid)?;
        if ok(c) {
            return dyadic_sample_set(a, mid, region);
        }
        if c > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(FrameError::DensityMatch(format!("could not match {target} points within 2%")))
}

fn row(delta: f64, scheme: &'static str, label: String, set: &SampleSet, w: &MotherWavelet, n: usize, band: Band, opts: &EstimateOptions) -> FrameResult<ComparisonRow> {
    let op = FrameOperator::new(set, w, n, band)?;
    let (estimate, error) = match estimate_bounds(&op, opts) {
        Ok(e) => (Some(e), None),
        Err(e @ (FrameError::RankDeficient { .. } | FrameError::Singular { .. })) => (None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    Ok(ComparisonRow { delta, scheme, beta_or_ab: label, points: set.len(), estimate, error })
}

/// For each `δ`: the golden set at `β(δ)` and a dyadic set with `a = e^δ` matched to the same point count.
pub fn compare_schemes(
    deltas: &[f64],
    w: &MotherWavelet,
    n: usize,
    region: &Rect,
    band: Band,
    opts: &EstimateOptions,
) -> FrameResult<ComparisonReport> {
    let mut rows = Vec::with_capacity(2 * deltas.len());
    for &delta in deltas {
        let beta = beta_for_delta(delta)?;
        let golden = golden_sample_set(Some(delta), Some(beta), region)?;
        rows.push(row(delta, "golden", format!("{beta}"), &golden, w, n, band, opts)?);
        let a = delta.exp();
        let dyadic = density_matched_dyadic(a, golden.len(), region)?;
        let b = match dyadic.provenance {
            super::Provenance::Dyadic { b, .. } => b,
            _ => unreachable!("dyadic provenance"),
        };
        rows.push(row(delta, "dyadic", format!("a={a};b={b}"), &dyadic, w, n, band, opts)?);
    }
    Ok(ComparisonReport { n, band, region: *region, wavelet: w.tag(), rows })
}

pub fn write_comparison_csv<W: Write>(report: &ComparisonReport, out: W) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in &report.rows {
        let (iters, converged) = r.estimate.as_ref().map_or((0, false), |e| (e.iterations, e.converged));
        w.write_record([
            r.delta.to_string(),
            r.scheme.to_string(),
            r.beta_or_ab.clone(),
            r.points.to_string(),
            r.lower().to_string(),
            r.upper().to_string(),
            r.ratio().to_string(),
            iters.to_string(),
            converged.to_string(),
        ])?;
    }
    w.flush()
}

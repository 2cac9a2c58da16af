//! Exponential phase-space tiling of `ℝ × ℝ⁺` by rectangles of area `δ²`.
//!
//! Cell `(k, l)` is `[δ²k/|I_l|, δ²(k+1)/|I_l|) × I_l` with `I_l = [e^{δl}, e^{δ(l+1)})`.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::goldenring::ALPHA_F64;
use crate::lattice::{count_in_rect, LatticeError, LatticeSpec, Rect};

#[derive(Debug, Error)]
pub enum CoverError {
    #[error("delta must be positive and finite, got {0}")]
    InvalidDelta(f64),
    #[error("beta must be positive and finite, got {0}")]
    InvalidBeta(f64),
    #[error("point ({x}, {s}) is outside the upper half-plane")]
    OutsideHalfPlane { x: f64, s: f64 },
    #[error("empty index range {0}..={1}")]
    EmptyRange(i64, i64),
    #[error("cell ({k}, {l}) is not representable in floating point")]
    Degenerate { k: i64, l: i64 },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

pub type CoverResult<T> = Result<T, CoverError>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverSpec {
    delta: f64,
}

impl CoverSpec {
    pub fn new(delta: f64) -> CoverResult<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(CoverError::InvalidDelta(delta));
        }
        Ok(Self { delta })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    fn scale_edge(&self, l: i64) -> f64 {
        (self.delta * l as f64).exp()
    }

    /// `|I_l|`, computed from the same edge values the cells use.
    pub fn band_length(&self, l: i64) -> f64 {
        self.scale_edge(l + 1) - self.scale_edge(l)
    }

    fn translation_edge(&self, k: i64, len: f64) -> f64 {
        self.delta * self.delta * k as f64 / len
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub k: i64,
    pub l: i64,
    pub rect: Rect,
}

impl Cell {
    pub fn lower_left(&self) -> (f64, f64) {
        (self.rect.a, self.rect.c)
    }
}

fn cell_edges(spec: &CoverSpec, k: i64, l: i64) -> [f64; 4] {
    let len = spec.band_length(l);
    [
        spec.translation_edge(k, len),
        spec.translation_edge(k + 1, len),
        spec.scale_edge(l),
        spec.scale_edge(l + 1),
    ]
}

pub fn cell(spec: &CoverSpec, k: i64, l: i64) -> CoverResult<Cell> {
    let [a, b, c, d] = cell_edges(spec, k, l);
    let rect = Rect::new(a, b, c, d).map_err(|_| CoverError::Degenerate { k, l })?;
    if !(c > 0.0) {
        return Err(CoverError::Degenerate { k, l });
    }
    Ok(Cell { k, l, rect })
}

/// The unique `(k, l)` whose cell contains `(x, s)`, judged against the float edges `cell` produces.
pub fn cell_index(x: f64, s: f64, spec: &CoverSpec) -> CoverResult<(i64, i64)> {
    if !(s > 0.0 && s.is_finite() && x.is_finite()) {
        return Err(CoverError::OutsideHalfPlane { x, s });
    }
    let delta = spec.delta();
    let mut l = (s.ln() / delta).floor() as i64;
    while s < spec.scale_edge(l) {
        l -= 1;
    }
    while s >= spec.scale_edge(l + 1) {
        l += 1;
    }
    let len = spec.band_length(l);
    let mut k = (x * len / (delta * delta)).floor() as i64;
    while x < spec.translation_edge(k, len) {
        k -= 1;
    }
    while x >= spec.translation_edge(k + 1, len) {
        k += 1;
    }
    Ok((k, l))
}

/// `δ²/(2+α)`.
pub fn beta_for_delta(delta: f64) -> CoverResult<f64> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(CoverError::InvalidDelta(delta));
    }
    Ok(delta * delta / (2.0 + ALPHA_F64))
}

/// `δ/√(2+α)`: the scaling under which a cell of area `δ²` becomes a rectangle of area exactly `2+α`.
pub fn beta_area_matched(delta: f64) -> CoverResult<f64> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(CoverError::InvalidDelta(delta));
    }
    Ok(delta / (2.0 + ALPHA_F64).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverAudit {
    pub delta: f64,
    pub beta: f64,
    pub k_range: (i64, i64),
    pub l_range: (i64, i64),
    pub cells: u64,
    pub min_count: usize,
    pub max_count: usize,
    pub empty_cells: Vec<(i64, i64)>,
}

/// Counts `βΓ` in every cell of the index box. Reports; never asserts bounds.
pub fn audit_cover(
    delta: f64,
    beta: f64,
    k_range: (i64, i64),
    l_range: (i64, i64),
) -> CoverResult<CoverAudit> {
    let spec = CoverSpec::new(delta)?;
    if !(beta.is_finite() && beta > 0.0) {
        return Err(CoverError::InvalidBeta(beta));
    }
    for (lo, hi) in [k_range, l_range] {
        if lo > hi {
            return Err(CoverError::EmptyRange(lo, hi));
        }
    }
    let lattice = LatticeSpec::new(beta)?;
    let per_row: Vec<(usize, usize, Vec<(i64, i64)>)> = (l_range.0..=l_range.1)
        .into_par_iter()
        .map(|l| {
            let mut lo = usize::MAX;
            let mut hi = 0;
            let mut empty = Vec::new();
            for k in k_range.0..=k_range.1 {
                let c = cell(&spec, k, l)?;
                let n = count_in_rect(&lattice, &c.rect)?;
                lo = lo.min(n);
                hi = hi.max(n);
                if n == 0 {
                    empty.push((k, l));
                }
            }
            Ok((lo, hi, empty))
        })
        .collect::<CoverResult<_>>()?;
    let mut audit = CoverAudit {
        delta,
        beta,
        k_range,
        l_range,
        cells: ((k_range.1 - k_range.0 + 1) as u64) * ((l_range.1 - l_range.0 + 1) as u64),
        min_count: usize::MAX,
        max_count: 0,
        empty_cells: Vec::new(),
    };
    for (lo, hi, empty) in per_row {
        audit.min_count = audit.min_count.min(lo);
        audit.max_count = audit.max_count.max(hi);
        audit.empty_cells.extend(empty);
    }
    Ok(audit)
}

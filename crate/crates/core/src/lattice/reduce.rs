//! Candidate generation for rectangle queries.
//!
//! The rectangle `[a, b) × [c, d)` is mapped to the unit square by
//! `(x, s) ↦ ((x − a)/w, (s − c)/h)`. In those coordinates `βΓ` is a lattice
//! whose Gauss-reduced basis is nearly orthogonal, so the integer box of
//! reduced coordinates covering the square has `O(1 + points)` cells no matter
//! how elongated the original rectangle is. Basis vectors are tracked as exact
//! integer index pairs and re-embedded through [`GoldenNumber::to_f64`], which
//! keeps the embedding accurate while the coefficients grow.

use super::{LatticeError, LatticeResult, LatticeSpec, Rect};
use crate::goldenring::{GoldenNumber, RingError};

const MAX_REDUCTION_STEPS: usize = 2_000;
/// Reduced coordinates beyond this magnitude no longer resolve single lattice points.
const MAX_COORDINATE: f64 = 1.0e15;

type Index = (i128, i128);

struct Embedding {
    beta: f64,
    inv_w: f64,
    inv_h: f64,
}

impl Embedding {
    fn apply(&self, (n, m): Index) -> (f64, f64) {
        let x = GoldenNumber::new(n, -m).to_f64();
        let s = GoldenNumber::new(m, n).to_f64();
        (self.beta * x * self.inv_w, self.beta * s * self.inv_h)
    }
}

fn dot(u: (f64, f64), v: (f64, f64)) -> f64 {
    u.0 * v.0 + u.1 * v.1
}

fn combine(u: Index, k: i128, v: Index) -> LatticeResult<Index> {
    let ovf = || LatticeError::Ring(RingError::Overflow("reduction"));
    Ok((
        u.0.checked_add(k.checked_mul(v.0).ok_or_else(ovf)?).ok_or_else(ovf)?,
        u.1.checked_add(k.checked_mul(v.1).ok_or_else(ovf)?).ok_or_else(ovf)?,
    ))
}

/// Lagrange–Gauss reduction of the standard basis under `emb`.
fn reduced_basis(emb: &Embedding) -> LatticeResult<[(Index, (f64, f64)); 2]> {
    let mut u: Index = (1, 0);
    let mut v: Index = (0, 1);
    let mut eu = emb.apply(u);
    let mut ev = emb.apply(v);
    for _ in 0..MAX_REDUCTION_STEPS {
        if dot(eu, eu) > dot(ev, ev) {
            std::mem::swap(&mut u, &mut v);
            std::mem::swap(&mut eu, &mut ev);
        }
        let nu = dot(eu, eu);
        if !(nu.is_finite() && nu > 0.0) {
            return Err(LatticeError::PrecisionLoss);
        }
        let mu = (dot(eu, ev) / nu).round();
        if mu == 0.0 {
            break;
        }
        if mu.abs() > 1.0e30 {
            return Err(LatticeError::PrecisionLoss);
        }
        let next = combine(v, -(mu as i128), u)?;
        let enext = emb.apply(next);
        if dot(enext, enext) >= dot(ev, ev) {
            break;
        }
        v = next;
        ev = enext;
    }
    Ok([(u, eu), (v, ev)])
}

/// Calls `visit(n, m)` for every index in a box guaranteed to contain all
/// lattice points of `βΓ ∩ rect`.
pub(super) fn for_each_candidate(
    spec: &LatticeSpec,
    rect: &Rect,
    mut visit: impl FnMut(i128, i128) -> LatticeResult<()>,
) -> LatticeResult<()> {
    let (w, h) = (rect.width(), rect.height());
    let emb = Embedding {
        beta: spec.beta(),
        inv_w: 1.0 / w,
        inv_h: 1.0 / h,
    };
    let [(u, eu), (v, ev)] = reduced_basis(&emb)?;
    let det = eu.0 * ev.1 - eu.1 * ev.0;
    if !(det.is_finite() && det != 0.0) {
        return Err(LatticeError::PrecisionLoss);
    }
    let (x0, s0) = (rect.a / w, rect.c / h);
    let (mut p_lo, mut p_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut q_lo, mut q_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (dx, ds) in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
        let (tx, ts) = (x0 + dx, s0 + ds);
        let p = (tx * ev.1 - ts * ev.0) / det;
        let q = (eu.0 * ts - eu.1 * tx) / det;
        p_lo = p_lo.min(p);
        p_hi = p_hi.max(p);
        q_lo = q_lo.min(q);
        q_hi = q_hi.max(q);
    }
    let bounds = [p_lo, p_hi, q_lo, q_hi];
    if bounds.iter().any(|b| !b.is_finite() || b.abs() > MAX_COORDINATE) {
        return Err(LatticeError::PrecisionLoss);
    }
    let (p_lo, p_hi) = (p_lo.floor() as i128 - 1, p_hi.ceil() as i128 + 1);
    let (q_lo, q_hi) = (q_lo.floor() as i128 - 1, q_hi.ceil() as i128 + 1);
    let cells = ((p_hi - p_lo + 1) as u128).saturating_mul((q_hi - q_lo + 1) as u128);
    if cells > spec.candidate_cap() as u128 {
        return Err(LatticeError::CandidateCapExceeded {
            cells: cells.min(u64::MAX as u128) as u64,
            cap: spec.candidate_cap(),
        });
    }
    for p in p_lo..=p_hi {
        let base = (
            p.checked_mul(u.0).ok_or(RingError::Overflow("candidate"))?,
            p.checked_mul(u.1).ok_or(RingError::Overflow("candidate"))?,
        );
        for q in q_lo..=q_hi {
            let (n, m) = combine(base, q, v)?;
            visit(n, m)?;
        }
    }
    Ok(())
}

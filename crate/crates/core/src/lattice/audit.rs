//! Randomised and adversarial point-count audits on `Γ` (scale 1).
//!
//! Every audited rectangle is exact: sides and corners are rationals or
//! elements of `Q(α)`, the area equals the requested value exactly, and
//! membership is decided with integer sign tests. Each trial draws from its
//! own ChaCha stream keyed by `(seed, trial)`, so results do not depend on how
//! rayon schedules the work.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{count_in_rect, enumerate_in_rect, LatticeError, LatticeResult, LatticeSpec, Rect};
use crate::goldenring::{GoldenNumber, GoldenRational, RingError};

const SIDE_DEN: i128 = 1 << 20;
const CORNER_DEN: i128 = 1 << 16;
const ANCHOR_STREAM_OFFSET: u64 = 1 << 63;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuditConfig {
    pub area: GoldenRational,
    /// Uniformly placed rectangles.
    pub trials: u64,
    pub seed: u64,
    /// Side ratio `w/h` is log-uniform in this range.
    pub aspect_range: (f64, f64),
    /// Lower-left corners are uniform in `[−center_range, center_range]²`.
    pub center_range: f64,
    /// Aspect draws for the lattice-anchored sweep; each draw yields one
    /// rectangle per admissible anchor.
    pub anchored_trials: u64,
}

impl AuditConfig {
    pub fn new(area: GoldenRational, trials: u64, seed: u64) -> Self {
        Self {
            area,
            trials,
            seed,
            aspect_range: (1e-3, 1e3),
            center_range: 1e3,
            anchored_trials: trials,
        }
    }

    fn validate(&self) -> LatticeResult<()> {
        let bad = |msg: &str| Err(LatticeError::InvalidAudit(msg.to_string()));
        if self.area.signum()? <= 0 {
            return bad("area must be positive");
        }
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        let (lo, hi) = self.aspect_range;
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi) {
            return bad("aspect range must satisfy 0 < lo <= hi");
        }
        if !(self.center_range.is_finite() && self.center_range >= 0.0) {
            return bad("center range must be finite and non-negative");
        }
        Ok(())
    }
}

/// Evidence record for an audit: extreme counts with reproducible witnesses.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CountAudit {
    pub trials: u64,
    pub anchored_rects: u64,
    pub area: f64,
    pub area_exact: String,
    pub min_count: usize,
    pub max_count: usize,
    pub witness_min: Rect,
    pub witness_max: Rect,
    /// `count -> number of rectangles` over all audited rectangles.
    pub histogram: BTreeMap<usize, u64>,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Anchoring {
    /// Lattice points on the open right edge and the open top edge.
    OpenEdges,
    /// Lattice points on the closed left edge and the closed bottom edge.
    ClosedEdges,
}

fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn sample_sides(
    rng: &mut ChaCha8Rng,
    cfg: &AuditConfig,
) -> LatticeResult<(GoldenRational, GoldenRational)> {
    let (lo, hi) = cfg.aspect_range;
    let ratio = if lo == hi {
        lo
    } else {
        rng.gen_range(lo.ln()..=hi.ln()).exp()
    };
    let mut w = GoldenRational::from_f64((cfg.area.to_f64() * ratio).sqrt(), SIDE_DEN)?;
    if w.signum()? <= 0 {
        w = GoldenRational::from_ratio(1, SIDE_DEN)?;
    }
    let h = cfg.area.checked_div(w)?;
    Ok((w, h))
}

fn random_rect(cfg: &AuditConfig, trial: u64) -> LatticeResult<Rect> {
    let mut rng = trial_rng(cfg.seed, trial);
    let (w, h) = sample_sides(&mut rng, cfg)?;
    let r = cfg.center_range;
    let mut corner = || -> LatticeResult<GoldenRational> {
        let v = if r > 0.0 { rng.gen_range(-r..=r) } else { 0.0 };
        Ok(GoldenRational::from_f64(v, CORNER_DEN)?)
    };
    let a = corner()?;
    let c = corner()?;
    Rect::exact(a, a.checked_add(w)?, c, c.checked_add(h)?)
}

/// Rectangles of the requested area normalised so lattice points sit on two edges.
///
/// The origin is one anchor; every lattice point admissible as the second
/// anchor produces a rectangle.
fn anchored_rects(cfg: &AuditConfig, draw: u64, mode: Anchoring) -> LatticeResult<Vec<Rect>> {
    let mut rng = trial_rng(cfg.seed, ANCHOR_STREAM_OFFSET + draw);
    let (w, h) = sample_sides(&mut rng, cfg)?;
    let zero = GoldenRational::ZERO;
    let neg_w = w.checked_neg()?;
    let probe = Rect::exact(neg_w, zero, zero, h)?;
    let mut anchors = enumerate_in_rect(&LatticeSpec::unit(), &probe)?;
    let mut out = Vec::with_capacity(anchors.len() + 1);
    match mode {
        Anchoring::OpenEdges => {
            // origin on the right edge at height 0 ∈ [c, d); anchor on the top edge
            for q in anchors {
                let d = GoldenRational::from_golden(q.s);
                if d.signum()? <= 0 {
                    continue;
                }
                out.push(Rect::exact(neg_w, zero, d.checked_sub(h)?, d)?);
            }
        }
        Anchoring::ClosedEdges => {
            // origin on the bottom edge; anchor on the left edge with x ∈ (−w, 0]
            anchors.push(super::lattice_point(0, 0)?);
            for q in anchors {
                let a = GoldenRational::from_golden(q.x);
                if a.cmp_exact(neg_w)?.is_le() {
                    continue;
                }
                out.push(Rect::exact(a, a.checked_add(w)?, zero, h)?);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Witness {
    Random(u64),
    Anchored(u64, usize),
}

fn run_audit(cfg: &AuditConfig, mode: Anchoring) -> LatticeResult<CountAudit> {
    cfg.validate()?;
    let unit = LatticeSpec::unit();
    let random: Vec<usize> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| count_in_rect(&unit, &random_rect(cfg, t)?))
        .collect::<LatticeResult<_>>()?;
    let anchored: Vec<Vec<usize>> = (0..cfg.anchored_trials)
        .into_par_iter()
        .map(|t| {
            anchored_rects(cfg, t, mode)?
                .iter()
                .map(|r| count_in_rect(&unit, r))
                .collect::<LatticeResult<Vec<_>>>()
        })
        .collect::<LatticeResult<_>>()?;

    let observations = random
        .iter()
        .enumerate()
        .map(|(t, &c)| (c, Witness::Random(t as u64)))
        .chain(anchored.iter().enumerate().flat_map(|(t, counts)| {
            counts
                .iter()
                .enumerate()
                .map(move |(j, &c)| (c, Witness::Anchored(t as u64, j)))
        }));
    let mut histogram = BTreeMap::new();
    let mut min: Option<(usize, Witness)> = None;
    let mut max: Option<(usize, Witness)> = None;
    let mut anchored_total = 0u64;
    for (count, witness) in observations {
        *histogram.entry(count).or_insert(0u64) += 1;
        if matches!(witness, Witness::Anchored(..)) {
            anchored_total += 1;
        }
        if min.is_none_or(|(c, _)| count < c) {
            min = Some((count, witness));
        }
        if max.is_none_or(|(c, _)| count > c) {
            max = Some((count, witness));
        }
    }
    let (min_count, min_w) = min.expect("trials >= 1");
    let (max_count, max_w) = max.expect("trials >= 1");
    let rebuild = |w: Witness| -> LatticeResult<Rect> {
        match w {
            Witness::Random(t) => random_rect(cfg, t),
            Witness::Anchored(t, j) => Ok(anchored_rects(cfg, t, mode)?[j]),
        }
    };
    Ok(CountAudit {
        trials: cfg.trials,
        anchored_rects: anchored_total,
        area: cfg.area.to_f64(),
        area_exact: cfg.area.to_string(),
        min_count,
        max_count,
        witness_min: rebuild(min_w)?,
        witness_max: rebuild(max_w)?,
        histogram,
        seed: cfg.seed,
    })
}

/// Searches for sparsely populated rectangles of the given area.
///
/// The sweep anchors lattice points on the open right and top edges, the
/// configuration every point-free rectangle can be pushed into.
pub fn audit_min_count(cfg: &AuditConfig) -> LatticeResult<CountAudit> {
    run_audit(cfg, Anchoring::OpenEdges)
}

/// Searches for crowded rectangles of the given area.
///
/// The sweep anchors lattice points on the closed left and bottom edges.
pub fn audit_max_count(cfg: &AuditConfig) -> LatticeResult<CountAudit> {
    run_audit(cfg, Anchoring::ClosedEdges)
}

/// `|nα + m|` in `f64`; accurate even for Fibonacci convergents.
pub fn diophantine_gap(n: i128, m: i128) -> LatticeResult<f64> {
    if n == 0 {
        return Err(RingError::DivisionByZero.into());
    }
    Ok(GoldenNumber::new(m, n).to_f64().abs())
}

/// Exact check of `|nα + m| ≥ 1/((3 + 2α)|n|)`, i.e. `|n|·|nα + m| ≥ 2α − 1`.
pub fn diophantine_bound_holds(n: i128, m: i128) -> LatticeResult<bool> {
    if n == 0 {
        return Err(RingError::DivisionByZero.into());
    }
    let v = GoldenNumber::new(m, n);
    let abs = if v.signum()? < 0 { v.checked_neg()? } else { v };
    let lhs = abs.checked_scale(n.abs())?;
    Ok(lhs.checked_sub(GoldenNumber::new(-1, 2))?.signum()? >= 0)
}

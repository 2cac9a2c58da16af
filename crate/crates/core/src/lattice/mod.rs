//! The rotated lattice `Γ = A·Z²` with `A = [[1, −α], [α, 1]]`, its isotropic
//! dilations `βΓ`, and point counting in half-open axis-parallel rectangles.
//!
//! A lattice point is kept as its integer index `(n, m)` together with the
//! exact coordinates `x = n − mα` and `s = m + nα` in `Z[α]`. Membership is
//! decided exactly when both `β` and the rectangle edges are exact values of
//! `Q(α)`; otherwise coordinates are embedded in `f64` and compared with plain
//! IEEE comparisons (no epsilon).

mod audit;
mod reduce;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::goldenring::{GoldenNumber, GoldenRational, RingError, ALPHA_F64};

pub use audit::{
    audit_max_count, audit_min_count, diophantine_bound_holds, diophantine_gap, AuditConfig,
    CountAudit,
};

/// Largest candidate box [`enumerate_in_rect`] will scan unless configured otherwise.
pub const DEFAULT_CANDIDATE_CAP: u64 = 100_000_000;

/// `det A = 1 + α² = 2 − α`.
pub const DET_A: f64 = 2.0 - ALPHA_F64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LatticeError {
    #[error("invalid rectangle [{a}, {b}) x [{c}, {d}): need a < b and c < d with finite edges")]
    InvalidRect { a: f64, b: f64, c: f64, d: f64 },
    #[error("lattice scale must be positive and finite, got {0}")]
    InvalidBeta(f64),
    #[error("candidate box of {cells} cells exceeds the cap of {cap}")]
    CandidateCapExceeded { cells: u64, cap: u64 },
    #[error("rectangle is too far from the origin relative to its size for f64 enumeration")]
    PrecisionLoss,
    #[error("invalid audit parameters: {0}")]
    InvalidAudit(String),
    #[error(transparent)]
    Ring(#[from] RingError),
}

pub type LatticeResult<T> = Result<T, LatticeError>;

/// Scale and restriction of the point set `βΓ` (optionally `∩ ℝ×ℝ⁺`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    beta: f64,
    exact_beta: Option<GoldenRational>,
    restrict_upper_half: bool,
    candidate_cap: u64,
}

impl LatticeSpec {
    pub fn new(beta: f64) -> LatticeResult<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(LatticeError::InvalidBeta(beta));
        }
        Ok(Self {
            beta,
            exact_beta: None,
            restrict_upper_half: false,
            candidate_cap: DEFAULT_CANDIDATE_CAP,
        })
    }

    /// A scale known exactly; enables exact membership for exact rectangles.
    pub fn exact(beta: GoldenRational) -> LatticeResult<Self> {
        if beta.signum()? <= 0 {
            return Err(LatticeError::InvalidBeta(beta.to_f64()));
        }
        let mut spec = Self::new(beta.to_f64())?;
        spec.exact_beta = Some(beta);
        Ok(spec)
    }

    /// `Γ` itself.
    pub fn unit() -> Self {
        Self::exact(GoldenRational::ONE).expect("1 is a valid scale")
    }

    pub fn with_upper_half(mut self, restrict: bool) -> Self {
        self.restrict_upper_half = restrict;
        self
    }

    pub fn with_candidate_cap(mut self, cap: u64) -> Self {
        self.candidate_cap = cap;
        self
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn exact_beta(&self) -> Option<GoldenRational> {
        self.exact_beta
    }

    pub fn restrict_upper_half(&self) -> bool {
        self.restrict_upper_half
    }

    pub fn candidate_cap(&self) -> u64 {
        self.candidate_cap
    }
}

/// `A·(n, m)ᵀ` with exact coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticePoint {
    pub n: i128,
    pub m: i128,
    pub x: GoldenNumber,
    pub s: GoldenNumber,
}

impl LatticePoint {
    /// Phase-space location `(βx, βs)` in `f64`.
    pub fn coords(&self, beta: f64) -> (f64, f64) {
        (beta * self.x.to_f64(), beta * self.s.to_f64())
    }
}

pub fn lattice_point(n: i128, m: i128) -> LatticeResult<LatticePoint> {
    Ok(LatticePoint {
        n,
        m,
        x: GoldenNumber::new(n, m.checked_neg().ok_or(RingError::Overflow("lattice_point"))?),
        s: GoldenNumber::new(m, n),
    })
}

/// Half-open rectangle `[a, b) × [c, d)`, optionally with exact edges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    exact: Option<[GoldenRational; 4]>,
}

impl Rect {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> LatticeResult<Self> {
        let finite = [a, b, c, d].iter().all(|v| v.is_finite());
        if !finite || a >= b || c >= d {
            return Err(LatticeError::InvalidRect { a, b, c, d });
        }
        Ok(Self {
            a,
            b,
            c,
            d,
            exact: None,
        })
    }

    pub fn exact(
        a: GoldenRational,
        b: GoldenRational,
        c: GoldenRational,
        d: GoldenRational,
    ) -> LatticeResult<Self> {
        let invalid = || LatticeError::InvalidRect {
            a: a.to_f64(),
            b: b.to_f64(),
            c: c.to_f64(),
            d: d.to_f64(),
        };
        if a.cmp_exact(b)?.is_ge() || c.cmp_exact(d)?.is_ge() {
            return Err(invalid());
        }
        let mut rect = Self::new(a.to_f64(), b.to_f64(), c.to_f64(), d.to_f64())
            .map_err(|_| invalid())?;
        rect.exact = Some([a, b, c, d]);
        Ok(rect)
    }

    pub fn exact_edges(&self) -> Option<[GoldenRational; 4]> {
        self.exact
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn height(&self) -> f64 {
        self.d - self.c
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    /// Float half-open containment.
    pub fn contains(&self, x: f64, s: f64) -> bool {
        self.a <= x && x < self.b && self.c <= s && s < self.d
    }

    /// Translate by `(dx, ds)`; exact when both the rectangle and shift are.
    pub fn translated(&self, dx: GoldenRational, ds: GoldenRational) -> LatticeResult<Self> {
        match self.exact {
            Some([a, b, c, d]) => Self::exact(
                a.checked_add(dx)?,
                b.checked_add(dx)?,
                c.checked_add(ds)?,
                d.checked_add(ds)?,
            ),
            None => {
                let (dx, ds) = (dx.to_f64(), ds.to_f64());
                Self::new(self.a + dx, self.b + dx, self.c + ds, self.d + ds)
            }
        }
    }
}

/// `edge ≤ β·v` decided exactly.
fn exact_le(edge: GoldenRational, beta: GoldenRational, v: GoldenNumber) -> LatticeResult<bool> {
    let scaled = beta.checked_mul(GoldenRational::from_golden(v))?;
    Ok(edge.cmp_exact(scaled)?.is_le())
}

/// Whether `p` (a point of `Γ`) lies in `rect` after scaling by `spec.beta`.
pub fn contains_point(spec: &LatticeSpec, rect: &Rect, p: &LatticePoint) -> LatticeResult<bool> {
    if spec.restrict_upper_half && p.s.signum()? <= 0 {
        return Ok(false);
    }
    if let (Some(beta), Some([a, b, c, d])) = (spec.exact_beta, rect.exact) {
        return Ok(exact_le(a, beta, p.x)?
            && !exact_le(b, beta, p.x)?
            && exact_le(c, beta, p.s)?
            && !exact_le(d, beta, p.s)?);
    }
    let (x, s) = p.coords(spec.beta);
    Ok(rect.contains(x, s))
}

/// All points of `βΓ` (optionally restricted to `s > 0`) inside `rect`, sorted by `(n, m)`.
///
/// Candidates come from a Gauss-reduced basis of the lattice after the
/// rectangle is normalised to the unit square, so the scanned box stays
/// proportional to the number of points even for extreme aspect ratios.
pub fn enumerate_in_rect(spec: &LatticeSpec, rect: &Rect) -> LatticeResult<Vec<LatticePoint>> {
    let mut found = Vec::new();
    reduce::for_each_candidate(spec, rect, |n, m| {
        let p = lattice_point(n, m)?;
        if contains_point(spec, rect, &p)? {
            found.push(p);
        }
        Ok(())
    })?;
    found.sort_by_key(|p| (p.n, p.m));
    Ok(found)
}

pub fn count_in_rect(spec: &LatticeSpec, rect: &Rect) -> LatticeResult<usize> {
    let mut count = 0usize;
    reduce::for_each_candidate(spec, rect, |n, m| {
        if contains_point(spec, rect, &lattice_point(n, m)?)? {
            count += 1;
        }
        Ok(())
    })?;
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::goldenring::GoldenRational as Q;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_force(spec: &LatticeSpec, rect: &Rect, radius: i128) -> Vec<(i128, i128)> {
        let mut out = Vec::new();
        for n in -radius..=radius {
            for m in -radius..=radius {
                let p = lattice_point(n, m).unwrap();
                if contains_point(spec, rect, &p).unwrap() {
                    out.push((n, m));
                }
            }
        }
        out
    }

    fn indices(points: &[LatticePoint]) -> Vec<(i128, i128)> {
        points.iter().map(|p| (p.n, p.m)).collect()
    }

    #[test]
    fn lattice_point_examples() {
        let o = lattice_point(0, 0).unwrap();
        assert_eq!((o.x, o.s), (GoldenNumber::ZERO, GoldenNumber::ZERO));
        let e1 = lattice_point(1, 0).unwrap();
        assert_eq!((e1.x, e1.s), (GoldenNumber::new(1, 0), GoldenNumber::new(0, 1)));
        let e2 = lattice_point(0, 1).unwrap();
        assert_eq!((e2.x, e2.s), (GoldenNumber::new(0, -1), GoldenNumber::new(1, 0)));
    }

    #[test]
    fn origin_cell() {
        let spec = LatticeSpec::new(1.0).unwrap();
        let rect = Rect::new(-0.5, 0.5, -0.5, 0.5).unwrap();
        let pts = enumerate_in_rect(&spec, &rect).unwrap();
        assert_eq!(indices(&pts), vec![(0, 0)]);
        assert_eq!(indices(&pts), brute_force(&spec, &rect, 5));
    }

    #[test]
    fn tiny_rect_around_known_point() {
        let spec = LatticeSpec::new(1.0).unwrap();
        let rect = Rect::new(1.0, 1.0 + 1e-9, ALPHA_F64, ALPHA_F64 + 1e-9).unwrap();
        assert_eq!(indices(&enumerate_in_rect(&spec, &rect).unwrap()), vec![(1, 0)]);
    }

    #[test]
    fn ten_by_ten_square_matches_brute_force() {
        let spec = LatticeSpec::new(1.0).unwrap();
        let rect = Rect::new(0.0, 10.0, 0.0, 10.0).unwrap();
        let pts = indices(&enumerate_in_rect(&spec, &rect).unwrap());
        let oracle = brute_force(&spec, &rect, 20);
        assert_eq!(pts, oracle);
        assert!((70..=75).contains(&pts.len()), "{}", pts.len());
    }

    #[test]
    fn degenerate_thin_rect() {
        let spec = LatticeSpec::new(1.0).unwrap();
        let rect = Rect::new(0.0, 1e6, 0.2, 0.200000001).unwrap();
        let count = count_in_rect(&spec, &rect).unwrap();
        assert!(count <= 1);
        // Points with s near 0.2 have x ≈ n(1 + α²), so n < 1e6 / (2 − α) < 730_000.
        let mut oracle = 0;
        for n in 0i128..730_000 {
            // s = m + nα in [0.2, 0.200000001) fixes m = floor(0.2 − nα) + 1 at most.
            let m = (0.2 - n as f64 * ALPHA_F64).ceil() as i128;
            for mm in [m - 1, m, m + 1] {
                let p = lattice_point(n, mm).unwrap();
                if contains_point(&spec, &rect, &p).unwrap() {
                    oracle += 1;
                }
            }
        }
        assert_eq!(count, oracle);
    }

    #[test]
    fn invalid_inputs() {
        assert!(Rect::new(1.0, 0.0, 0.0, 1.0).is_err());
        assert!(Rect::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(Rect::new(0.0, f64::NAN, 0.0, 1.0).is_err());
        assert!(LatticeSpec::new(0.0).is_err());
        assert!(LatticeSpec::new(-1.0).is_err());
        assert!(LatticeSpec::exact(Q::from_int(-2)).is_err());
    }

    #[test]
    fn candidate_cap_is_enforced() {
        let spec = LatticeSpec::new(1.0).unwrap().with_candidate_cap(1000);
        let rect = Rect::new(0.0, 100.0, 0.0, 100.0).unwrap();
        assert!(matches!(
            count_in_rect(&spec, &rect),
            Err(LatticeError::CandidateCapExceeded { .. })
        ));
    }

    #[test]
    fn upper_half_restriction() {
        let full = LatticeSpec::new(0.5).unwrap();
        let upper = full.with_upper_half(true);
        let rect = Rect::new(-3.0, 3.0, -3.0, 3.0).unwrap();
        let all = enumerate_in_rect(&full, &rect).unwrap();
        let pos = enumerate_in_rect(&upper, &rect).unwrap();
        let expected: Vec<_> = all.into_iter().filter(|p| p.s.to_f64() > 0.0).collect();
        assert_eq!(pos, expected);
    }

    #[test]
    fn exact_and_float_paths_agree_on_generic_rects() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let den = 1 << 12;
            let a = Q::from_f64(rng.gen_range(-30.0..30.0), den).unwrap();
            let c = Q::from_f64(rng.gen_range(-30.0..30.0), den).unwrap();
            let w = Q::from_f64(rng.gen_range(0.01..6.0), den).unwrap();
            let h = Q::from_f64(rng.gen_range(0.01..6.0), den).unwrap();
            let rect = Rect::exact(a, a.checked_add(w).unwrap(), c, c.checked_add(h).unwrap())
                .unwrap();
            let float_rect = Rect::new(rect.a, rect.b, rect.c, rect.d).unwrap();
            let exact = enumerate_in_rect(&LatticeSpec::unit(), &rect).unwrap();
            let float = enumerate_in_rect(&LatticeSpec::new(1.0).unwrap(), &float_rect).unwrap();
            assert_eq!(exact, float);
        }
    }

    #[test]
    fn extreme_aspect_ratio_enumerates_quickly() {
        // x-width 1e-12, s-height 1e12 at beta = 1: roughly one point expected.
        let spec = LatticeSpec::new(1.0).unwrap();
        let rect = Rect::new(0.3, 0.3 + 1e-12, 5.0e11, 1.5e12).unwrap();
        let pts = enumerate_in_rect(&spec, &rect).unwrap();
        for p in &pts {
            let (x, s) = p.coords(1.0);
            assert!(rect.contains(x, s));
        }
        assert!(pts.len() <= 5);
    }
}

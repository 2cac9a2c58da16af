//! Independent oracles shared by the integration tests.
//!
//! Nothing here calls the library's exact arithmetic: signs in `Q(√5)` are
//! decided by integer squaring, and lattice counts by scanning an integer box.
#![allow(dead_code)]

use golden_frames::goldenring::GoldenRational;
use golden_frames::lattice::Rect;
use rand::Rng;

/// Denominator of every oracle rectangle edge.
pub const EDGE_DEN: i128 = 1 << 16;

/// Sign of `p + q√5`.
pub fn sign_sqrt5(p: i128, q: i128) -> i8 {
    let sp = p.signum() as i8;
    let sq = q.signum() as i8;
    if sp >= 0 && sq >= 0 {
        return if p == 0 && q == 0 { 0 } else { 1 };
    }
    if sp <= 0 && sq <= 0 {
        return -1;
    }
    // Opposite signs: compare p² with 5q².
    let (pp, qq) = (p * p, 5 * q * q);
    match pp.cmp(&qq) {
        std::cmp::Ordering::Equal => 0,
        std::cmp::Ordering::Greater => sp,
        std::cmp::Ordering::Less => sq,
    }
}

/// Sign of `x + yα`, using `2(x + yα) = (2x − y) + y√5`.
pub fn sign_alpha(x: i128, y: i128) -> i8 {
    sign_sqrt5(2 * x - y, y)
}

/// `α^n` as `(a, b)` meaning `a + bα`, by repeated multiplication with `α² = 1 − α`.
pub fn alpha_power_oracle(n: u32) -> (i128, i128) {
    let (mut a, mut b) = (1i128, 0i128);
    for _ in 0..n {
        (a, b) = (b, a - b);
    }
    (a, b)
}

/// `k!` as a float, exact for `k <= 22`.
pub fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// Rectangle `[a,b) × [c,d)` with edges `num / EDGE_DEN`, and lattice scale `p/q`.
#[derive(Debug, Clone, Copy)]
pub struct ExactInstance {
    pub edges: [i128; 4],
    pub p: i128,
    pub q: i128,
}

impl ExactInstance {
    pub fn rect(&self) -> Rect {
        let e = self.edges.map(|v| GoldenRational::from_ratio(v, EDGE_DEN).unwrap());
        Rect::exact(e[0], e[1], e[2], e[3]).unwrap()
    }

    pub fn beta(&self) -> GoldenRational {
        GoldenRational::from_ratio(self.p, self.q).unwrap()
    }

    /// `edge ≤ (p/q)(u + vα)` for an edge numerator over `EDGE_DEN`.
    fn edge_le(&self, edge: i128, u: i128, v: i128) -> bool {
        let x = EDGE_DEN * self.p * u - edge * self.q;
        let y = EDGE_DEN * self.p * v;
        sign_alpha(x, y) >= 0
    }

    fn contains(&self, n: i128, m: i128) -> bool {
        // x = n − mα, s = m + nα
        let [a, b, c, d] = self.edges;
        self.edge_le(a, n, -m) && !self.edge_le(b, n, -m) && self.edge_le(c, m, n) && !self.edge_le(d, m, n)
    }

    /// Every `(n, m)` with `β A (n, m)ᵀ` in the rectangle, found by scanning a padded integer box.
    pub fn brute_force(&self) -> Vec<(i128, i128)> {
        let alpha = (5f64.sqrt() - 1.0) / 2.0;
        let beta = self.p as f64 / self.q as f64;
        let det = 1.0 + alpha * alpha;
        let f = |v: i128| v as f64 / EDGE_DEN as f64;
        let [a, b, c, d] = self.edges.map(f);
        let (mut nlo, mut nhi, mut mlo, mut mhi) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for (x, s) in [(a, c), (a, d), (b, c), (b, d)] {
            let n = (x + alpha * s) / (beta * det);
            let m = (s - alpha * x) / (beta * det);
            nlo = nlo.min(n);
            nhi = nhi.max(n);
            mlo = mlo.min(m);
            mhi = mhi.max(m);
        }
        let mut out = Vec::new();
        for n in (nlo.floor() as i128 - 2)..=(nhi.ceil() as i128 + 2) {
            for m in (mlo.floor() as i128 - 2)..=(mhi.ceil() as i128 + 2) {
                if self.contains(n, m) {
                    out.push((n, m));
                }
            }
        }
        out
    }

    /// Random instance: scale in `[1/4, 4]`, corner in `[−60, 60]²`, sides log-uniform with at most ~12 units.
    pub fn random(rng: &mut impl Rng) -> Self {
        let (p, q) = loop {
            let (p, q) = (rng.gen_range(1..=24i128), rng.gen_range(1..=24i128));
            if 4 * p >= q && p <= 4 * q {
                break (p, q);
            }
        };
        let side = |rng: &mut dyn rand::RngCore| {
            let len = 10f64.powf(rng.gen_range(-2.5..1.1));
            ((len * EDGE_DEN as f64).round() as i128).max(1)
        };
        let a = rng.gen_range(-60 * EDGE_DEN..60 * EDGE_DEN);
        let c = rng.gen_range(-60 * EDGE_DEN..60 * EDGE_DEN);
        let w = side(rng);
        let h = side(rng);
        Self { edges: [a, a + w, c, c + h], p, q }
    }
}

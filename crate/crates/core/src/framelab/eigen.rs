//! Extreme eigenvalues of the band-restricted frame operator.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Band, FrameError, FrameOperator, FrameResult};

/// Smallest `A/B` still distinguished from a singular operator.
const SINGULAR_RATIO: f64 = 1e-12;
/// Consecutive Lanczos steps the extremes must stay within tolerance.
const SETTLED_STEPS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Lanczos with full reorthogonalization.
    Lanczos,
    /// Power iteration for `B`, then power iteration on `μI − S` with `μ = 1.01 B` for `A`.
    Power,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateOptions {
    pub method: Method,
    pub max_iters: usize,
    pub seed: u64,
    /// Relative change of the extreme estimates below which iteration stops.
    pub tol: f64,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self { method: Method::Lanczos, max_iters: 1000, seed: 0x5eed, tol: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameEstimate {
    pub lower: f64,
    pub upper: f64,
    pub ratio: f64,
    pub iterations: usize,
    pub converged: bool,
    pub method: Method,
    /// `‖S y − θ y‖ / ‖y‖` for the Ritz pair behind each bound.
    pub residual_lower: f64,
    pub residual_upper: f64,
    pub band: Band,
    pub dimension: usize,
    pub points: usize,
}

fn random_unit(rng: &mut ChaCha8Rng, d: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..d).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    scaled(&v, 1.0 / norm(&v))
}

fn dot(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| b.conj() * a).sum()
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn scaled(v: &[Complex64], k: f64) -> Vec<Complex64> {
    v.iter().map(|c| c * k).collect()
}

fn axpy(y: &mut [Complex64], a: Complex64, x: &[Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Matrix operator in the Euclidean inner product; `S` is Hermitian there because `Δξ` is constant.
trait Operator {
    fn dim(&self) -> usize;
    fn apply(&self, v: &[Complex64]) -> Vec<Complex64>;
}

impl Operator for FrameOperator {
    fn dim(&self) -> usize {
        self.dimension()
    }
    fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        FrameOperator::apply(self, v)
    }
}

struct Extremes {
    lower: f64,
    upper: f64,
    residual_lower: f64,
    residual_upper: f64,
    iterations: usize,
    converged: bool,
}

fn lanczos(op: &impl Operator, opts: &EstimateOptions) -> Extremes {
    let d = op.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut basis = vec![random_unit(&mut rng, d)];
    let (mut alphas, mut betas) = (Vec::new(), Vec::<f64>::new());
    let mut prev: Option<(f64, f64)> = None;
    let mut calm = 0;
    let mut out = Extremes {
        lower: f64::NAN,
        upper: f64::NAN,
        residual_lower: f64::INFINITY,
        residual_upper: f64::INFINITY,
        iterations: 0,
        converged: false,
    };
    let limit = opts.max_iters.min(d);
    for k in 0..limit {
        let q = &basis[k];
        let mut w = op.apply(q);
        let a = dot(&w, q).re;
        axpy(&mut w, Complex64::new(-a, 0.0), q);
        if k > 0 {
            axpy(&mut w, Complex64::new(-betas[k - 1], 0.0), &basis[k - 1]);
        }
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&w, b);
                axpy(&mut w, -c, b);
            }
        }
        alphas.push(a);
        let beta = norm(&w);
        let m = k + 1;
        let t = DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                alphas[i]
            } else if i + 1 == j {
                betas[i]
            } else if j + 1 == i {
                betas[j]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(t);
        let (mut lo, mut hi) = (0, 0);
        for i in 0..m {
            if eig.eigenvalues[i] < eig.eigenvalues[lo] {
                lo = i;
            }
            if eig.eigenvalues[i] > eig.eigenvalues[hi] {
                hi = i;
            }
        }
        let (theta_lo, theta_hi) = (eig.eigenvalues[lo], eig.eigenvalues[hi]);
        out.lower = theta_lo;
        out.upper = theta_hi;
        out.residual_lower = beta * eig.eigenvectors[(m - 1, lo)].abs();
        out.residual_upper = beta * eig.eigenvectors[(m - 1, hi)].abs();
        out.iterations = m;
        let exhausted = m == d || beta <= 1e-14 * theta_hi.abs().max(f64::MIN_POSITIVE);
        let settled = prev.is_some_and(|(pl, ph)| {
            (theta_lo - pl).abs() <= opts.tol * theta_lo.abs() && (theta_hi - ph).abs() <= opts.tol * theta_hi.abs()
        });
        calm = if settled { calm + 1 } else { 0 };
        // A Ritz value is within its residual of an eigenvalue; demand that relative to the spread.
        let slack = 1e-4 * (theta_hi - theta_lo) + 1e-12 * theta_hi.abs();
        let small = out.residual_upper <= slack && out.residual_lower <= slack;
        if exhausted || (calm >= SETTLED_STEPS && small) {
            out.converged = true;
            break;
        }
        prev = Some((theta_lo, theta_hi));
        betas.push(beta);
        basis.push(scaled(&w, 1.0 / beta));
    }
    out
}

/// Dominant eigenvalue of `shift·I + sign·S` by power iteration; returns `(θ, residual, iterations, converged)`.
fn power(op: &impl Operator, shift: f64, sign: f64, opts: &EstimateOptions, seed: u64) -> (f64, f64, usize, bool) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = random_unit(&mut rng, op.dim());
    let mut theta = f64::NAN;
    for it in 1..=opts.max_iters {
        let sv = op.apply(&v);
        let mut w: Vec<Complex64> = sv.iter().zip(&v).map(|(s, x)| x * shift + s * sign).collect();
        let next = dot(&w, &v).re;
        let residual = {
            let mut r = w.clone();
            axpy(&mut r, Complex64::new(-next, 0.0), &v);
            norm(&r)
        };
        let settled = (next - theta).abs() <= opts.tol * next.abs();
        theta = next;
        if settled {
            return (theta, residual, it, true);
        }
        let nw = norm(&w);
        if nw == 0.0 {
            return (0.0, 0.0, it, true);
        }
        w.iter_mut().for_each(|c| *c /= nw);
        v = w;
        if it == opts.max_iters {
            return (theta, residual, it, false);
        }
    }
    (theta, f64::INFINITY, opts.max_iters, false)
}

fn power_extremes(op: &impl Operator, opts: &EstimateOptions) -> Extremes {
    let (upper, residual_upper, it_b, ok_b) = power(op, 0.0, 1.0, opts, opts.seed);
    let mu = 1.01 * upper;
    let (top, residual_lower, it_a, ok_a) = power(op, mu, -1.0, opts, opts.seed.wrapping_add(1));
    Extremes {
        lower: mu - top,
        upper,
        residual_lower,
        residual_upper,
        iterations: it_a + it_b,
        converged: ok_a && ok_b,
    }
}

/// Frame bounds of the set restricted to the operator's band.
///
/// Fewer points than band dimensions, or `A/B` below `1e-12`, is reported as an error.
pub fn estimate_bounds(op: &FrameOperator, opts: &EstimateOptions) -> FrameResult<FrameEstimate> {
    if opts.max_iters == 0 || !(opts.tol > 0.0) {
        return Err(FrameError::InvalidOption(format!("iterations {} tolerance {}", opts.max_iters, opts.tol)));
    }
    let (points, dimension) = (op.points(), op.dimension());
    if points < dimension {
        return Err(FrameError::RankDeficient { points, dimension });
    }
    let ext = match opts.method {
        Method::Lanczos => lanczos(op, opts),
        Method::Power => power_extremes(op, opts),
    };
    if !(ext.lower > SINGULAR_RATIO * ext.upper) {
        return Err(FrameError::Singular { lower: ext.lower, upper: ext.upper });
    }
    Ok(FrameEstimate {
        lower: ext.lower,
        upper: ext.upper,
        ratio: ext.upper / ext.lower,
        iterations: ext.iterations,
        converged: ext.converged,
        method: opts.method,
        residual_lower: ext.residual_lower,
        residual_upper: ext.residual_upper,
        band: op.band(),
        dimension,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framelab::{golden_sample_set, SampleSet};
    use crate::lattice::Rect;
    use crate::wavelet::cauchy_wavelet;

    struct Dense(DMatrix<Complex64>);

    impl Operator for Dense {
        fn dim(&self) -> usize {
            self.0.nrows()
        }
        fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
            let x = nalgebra::DVector::from_column_slice(v);
            (&self.0 * x).as_slice().to_vec()
        }
    }

    fn hermitian(d: usize, seed: u64) -> DMatrix<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = DMatrix::from_fn(d, d, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        &g * g.adjoint() + DMatrix::identity(d, d).map(|c: Complex64| c * 0.05)
    }

    fn dense_extremes(m: &DMatrix<Complex64>) -> (f64, f64) {
        let ev = m.clone().symmetric_eigenvalues();
        (ev.min(), ev.max())
    }

    #[test]
    fn lanczos_matches_dense_eigensolver() {
        for (d, seed) in [(5, 1), (40, 2), (120, 3)] {
            let m = hermitian(d, seed);
            let (lo, hi) = dense_extremes(&m);
            let ext = lanczos(&Dense(m), &EstimateOptions::default());
            assert!(ext.converged);
            assert!((ext.lower - lo).abs() <= 1e-8 * hi, "d={d}: {} vs {lo}", ext.lower);
            assert!((ext.upper - hi).abs() <= 1e-8 * hi);
        }
    }

    #[test]
    fn power_iteration_matches_dense_eigensolver() {
        let m = hermitian(12, 7);
        let (lo, hi) = dense_extremes(&m);
        let opts = EstimateOptions { method: Method::Power, max_iters: 200_000, tol: 1e-13, ..Default::default() };
        let ext = power_extremes(&Dense(m), &opts);
        assert!(ext.converged);
        assert!((ext.upper - hi).abs() <= 1e-6 * hi);
        assert!((ext.lower - lo).abs() <= 1e-4 * hi, "{} vs {lo}", ext.lower);
    }

    fn setup(beta: f64) -> FrameOperator {
        let w = cauchy_wavelet(6.0).unwrap();
        let n = 256;
        let band = Band::new(8, 32, n).unwrap();
        let region = crate::framelab::guarded_region(&w, n, band, 2.0).unwrap();
        let set = golden_sample_set(None, Some(beta), &region).unwrap();
        FrameOperator::new(&set, &w, n, band).unwrap()
    }

    #[test]
    fn frame_operator_bounds_match_dense_matrix() {
        let op = setup(0.03);
        let d = op.dimension();
        let mut m = DMatrix::zeros(d, d);
        for j in 0..d {
            let mut e = vec![Complex64::new(0.0, 0.0); d];
            e[j] = Complex64::new(1.0, 0.0);
            for (i, v) in FrameOperator::apply(&op, &e).into_iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        let (lo, hi) = dense_extremes(&m);
        let est = estimate_bounds(&op, &EstimateOptions::default()).unwrap();
        assert!(est.converged);
        assert!((est.lower - lo).abs() <= 1e-8 * hi && (est.upper - hi).abs() <= 1e-8 * hi);
        assert!(est.ratio >= 1.0);
    }

    #[test]
    fn bounds_enclose_random_rayleigh_quotients() {
        let op = setup(0.03);
        let est = estimate_bounds(&op, &EstimateOptions::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for _ in 0..1000 {
            let f = random_unit(&mut rng, op.dimension());
            let q = dot(&FrameOperator::apply(&op, &f), &f).re;
            assert!(q <= est.upper * (1.0 + 1e-6) && q >= est.lower * (1.0 - 1e-6));
        }
    }

    #[test]
    fn too_few_points_is_rank_deficient() {
        let w = cauchy_wavelet(6.0).unwrap();
        let n = 256;
        let region = Rect::new(0.0, 4.0, 0.01, 0.02).unwrap();
        let set = SampleSet::explicit(vec![(1.0, 0.015), (2.0, 0.012)], region).unwrap();
        let op = FrameOperator::new(&set, &w, n, Band::new(8, 32, n).unwrap()).unwrap();
        assert!(matches!(
            estimate_bounds(&op, &EstimateOptions::default()),
            Err(FrameError::RankDeficient { points: 2, dimension: 25 })
        ));
    }

    #[test]
    fn invalid_options() {
        let op = setup(0.05);
        assert!(estimate_bounds(&op, &EstimateOptions { max_iters: 0, ..Default::default() }).is_err());
    }
}

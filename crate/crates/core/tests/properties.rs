//! Property tests for invariants that hold on every input.

mod common;

use golden_frames::covering::{cell, cell_index, CoverSpec};
use golden_frames::framelab::{dyadic_count, dyadic_sample_set, Band, FrameOperator, SampleSet};
use golden_frames::goldenring::{GoldenNumber, GoldenRational};
use golden_frames::lattice::{count_in_rect, enumerate_in_rect, lattice_point, LatticeSpec, Rect};
use golden_frames::wavelet::{cauchy_wavelet, cwt, SignalModel};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{sign_alpha, ExactInstance};

fn golden() -> impl Strategy<Value = GoldenNumber> {
    (-10_000i128..10_000, -10_000i128..10_000).prop_map(|(a, b)| GoldenNumber::new(a, b))
}

fn signal(n: usize) -> impl Strategy<Value = SignalModel> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n / 2 - 1).prop_map(move |v| {
        SignalModel::from_coefficients(n, v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn ring_axioms(x in golden(), y in golden(), z in golden()) {
        let mul = |p: GoldenNumber, q: GoldenNumber| p.checked_mul(q).unwrap();
        let add = |p: GoldenNumber, q: GoldenNumber| p.checked_add(q).unwrap();
        prop_assert_eq!(mul(x, y), mul(y, x));
        prop_assert_eq!(mul(mul(x, y), z), mul(x, mul(y, z)));
        prop_assert_eq!(mul(x, add(y, z)), add(mul(x, y), mul(x, z)));
        prop_assert_eq!(mul(x, y).norm().unwrap(), x.norm().unwrap() * y.norm().unwrap());
        prop_assert_eq!(x.conjugate().unwrap().conjugate().unwrap(), x);
    }

    #[test]
    fn sign_matches_oracle(x in golden()) {
        prop_assert_eq!(x.signum().unwrap(), sign_alpha(x.a, x.b));
    }

    #[test]
    fn rational_order_matches_float(p in -1000i128..1000, q in 1i128..1000, a in -50i128..50, b in -50i128..50) {
        let r = GoldenRational::new(GoldenNumber::new(a, b), q).unwrap();
        let s = GoldenRational::from_ratio(p, q).unwrap();
        let gap = r.to_f64() - s.to_f64();
        if gap.abs() > 1e-9 {
            prop_assert_eq!(r.cmp_exact(s).unwrap(), gap.partial_cmp(&0.0).unwrap());
        }
    }

    #[test]
    fn enumeration_matches_box_scan(seed in any::<u64>()) {
        let inst = ExactInstance::random(&mut ChaCha8Rng::seed_from_u64(seed));
        let spec = LatticeSpec::exact(inst.beta()).unwrap();
        let got: Vec<_> = enumerate_in_rect(&spec, &inst.rect()).unwrap().iter().map(|p| (p.n, p.m)).collect();
        prop_assert_eq!(got, inst.brute_force());
    }

    #[test]
    fn counts_add_over_a_split(a in -100.0f64..100.0, c in -100.0f64..100.0, w in 0.01f64..20.0, h in 0.01f64..20.0, t in 0.01f64..0.99, beta in 0.3f64..3.0) {
        let spec = LatticeSpec::new(beta).unwrap();
        let whole = Rect::new(a, a + w, c, c + h).unwrap();
        let cut = a + t * w;
        prop_assume!(cut > a && cut < a + w);
        let left = Rect::new(a, cut, c, c + h).unwrap();
        let right = Rect::new(cut, a + w, c, c + h).unwrap();
        let n = count_in_rect(&spec, &whole).unwrap();
        prop_assert_eq!(n, count_in_rect(&spec, &left).unwrap() + count_in_rect(&spec, &right).unwrap());
    }

    #[test]
    fn counts_invariant_under_lattice_shifts(seed in any::<u64>(), n in -40i128..40, m in -40i128..40) {
        let inst = ExactInstance::random(&mut ChaCha8Rng::seed_from_u64(seed));
        let spec = LatticeSpec::exact(inst.beta()).unwrap();
        let shift = lattice_point(n, m).unwrap();
        let beta = inst.beta();
        let dx = beta.checked_mul(GoldenRational::from_golden(shift.x)).unwrap();
        let ds = beta.checked_mul(GoldenRational::from_golden(shift.s)).unwrap();
        let rect = inst.rect();
        let moved = rect.translated(dx, ds).unwrap();
        prop_assert_eq!(count_in_rect(&spec, &rect).unwrap(), count_in_rect(&spec, &moved).unwrap());
    }

    #[test]
    fn cover_cells_tile_the_half_plane(delta in 0.05f64..2.0, x in -1e4f64..1e4, s in 1e-6f64..1e6) {
        let spec = CoverSpec::new(delta).unwrap();
        let (k, l) = cell_index(x, s, &spec).unwrap();
        let c = cell(&spec, k, l).unwrap();
        prop_assert!(c.rect.contains(x, s));
        // Edges are floats, so the measured sides carry their rounding.
        let r = c.rect;
        let slack = 4.0 * f64::EPSILON * ((r.a.abs() + r.b.abs()) / r.width() + (r.c.abs() + r.d.abs()) / r.height());
        prop_assert!((r.area() / (delta * delta) - 1.0).abs() <= 1e-12 + slack);
        let right = cell(&spec, k + 1, l).unwrap();
        prop_assert_eq!(right.rect.a, c.rect.b);
        let up = cell(&spec, k, l + 1).unwrap();
        prop_assert_eq!(up.rect.c, c.rect.d);
    }

    #[test]
    fn dyadic_count_matches_set(a in 1.05f64..3.0, b in 0.05f64..2.0, x0 in -20.0f64..20.0, w in 1.0f64..40.0, c in 0.05f64..1.0, span in 1.5f64..20.0) {
        let region = Rect::new(x0, x0 + w, c, c * span).unwrap();
        let set = dyadic_sample_set(a, b, &region).unwrap();
        prop_assert_eq!(dyadic_count(a, b, &region).unwrap(), set.len() as u64);
        prop_assert!(set.points.iter().all(|&(x, s)| region.contains(x, s)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn transform_is_linear(f in signal(64), g in signal(64), p in -2.0f64..2.0, q in -2.0f64..2.0) {
        let w = cauchy_wavelet(6.0).unwrap();
        let pts = [(0.0, 0.02), (3.5, 0.05), (-11.0, 0.1), (40.0, 0.3)];
        let (p, q) = (Complex64::new(p, -q), Complex64::new(q, p));
        let mix = cwt(&f.combine(p, &g, q).unwrap(), &w, &pts).unwrap();
        let (wf, wg) = (cwt(&f, &w, &pts).unwrap(), cwt(&g, &w, &pts).unwrap());
        for i in 0..pts.len() {
            let want = p * wf[i] + q * wg[i];
            prop_assert!((mix[i] - want).norm() <= 1e-12 * (1.0 + want.norm()));
        }
    }

    #[test]
    fn adding_points_never_lowers_the_energy(f in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 25), pts in prop::collection::vec((0.0f64..256.0, 0.002f64..0.2), 2..60), keep in 1usize..60) {
        let w = cauchy_wavelet(6.0).unwrap();
        let n = 256;
        let band = Band::new(8, 32, n).unwrap();
        let region = Rect::new(0.0, 256.0, 0.001, 0.5).unwrap();
        let all = SampleSet::explicit(pts.clone(), region).unwrap();
        let some = SampleSet::explicit(pts[..keep.min(pts.len())].to_vec(), region).unwrap();
        let f: Vec<Complex64> = f.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
        let energy = |set: &SampleSet| {
            let op = FrameOperator::new(set, &w, n, band).unwrap();
            op.inner(&op.apply(&f), &f).re
        };
        let (small, big) = (energy(&some), energy(&all));
        prop_assert!(small >= -1e-12 && small <= big * (1.0 + 1e-12) + 1e-15);
    }
}

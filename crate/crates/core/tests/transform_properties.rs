//! Biloop geometry, rank invariance and transformed dCor.

use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robdcor::transforms::{apply_transform, biloop, midranks, DEFAULT_BILOOP_C};
use robdcor::{DataMatrix, MethodSpec, TransformSpec};

/// The biloop map exactly as its defining piecewise formula reads.
fn biloop_literal(z: f64, c: f64) -> (f64, f64) {
    let theta = 2.0 * PI * (z / c).tanh();
    let u = if z >= 0.0 {
        c * (1.0 + (theta + PI).cos())
    } else {
        -c * (1.0 + (theta - PI).cos())
    };
    (u, theta.sin())
}

#[test]
fn matches_literal_formula_on_grid() {
    for c in [1.0, 2.5, DEFAULT_BILOOP_C] {
        for i in 0..1000 {
            let z = -25.0 + 50.0 * i as f64 / 999.0;
            let p = biloop(z, c);
            let (u, v) = biloop_literal(z, c);
            assert!((p.u - u).abs() < 1e-12 * c, "u at z={z}: {} vs {u}", p.u);
            assert!((p.v - v).abs() < 1e-12, "v at z={z}");
        }
    }
}

#[test]
fn ellipse_tails_and_origin() {
    let c = DEFAULT_BILOOP_C;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100_000 {
        let z = rng.random_range(-1.0..1.0) * 10f64.powf(rng.random_range(-3.0..8.0));
        let p = biloop(z, c);
        let centre = if z >= 0.0 { c } else { -c };
        let lhs = (p.u - centre).powi(2) + c * c * p.v * p.v;
        assert!((lhs - c * c).abs() < 1e-9, "z = {z}");
        if z.abs() > 1e6 * c {
            assert!(p.u.abs() < 1e-6 && p.v.abs() < 1e-6, "z = {z}");
        }
    }
    let o = biloop(0.0, c);
    assert_eq!((o.u, o.v), (0.0, 0.0));
}

#[test]
fn distinct_inputs_map_to_distinct_points() {
    let c = DEFAULT_BILOOP_C;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut z: Vec<f64> = (0..400)
        .map(|_| rng.random_range(-10.0 * c..10.0 * c))
        .collect();
    z.sort_by(f64::total_cmp);
    z.dedup();
    let pts: Vec<_> = z.iter().map(|&v| biloop(v, c)).collect();
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let d = (pts[i].u - pts[j].u).hypot(pts[i].v - pts[j].v);
            assert!(d > 0.0, "{} and {} collide", z[i], z[j]);
        }
    }
}

fn column(v: &[f64]) -> DataMatrix {
    DataMatrix::from_column(v.to_vec()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ranks_survive_increasing_maps(x in prop::collection::vec(-5.0..5.0f64, 3..40)) {
        let mapped: Vec<f64> = x.iter().map(|v| v.exp() + v.powi(3)).collect();
        prop_assert_eq!(midranks(&x), midranks(&mapped));
    }

    #[test]
    fn rank_dcor_survives_increasing_maps(
        pairs in prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 4..40),
    ) {
        let x: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let y: Vec<f64> = pairs.iter().map(|p| p.0 * p.1).collect();
        let fx: Vec<f64> = x.iter().map(|v| v.atan()).collect();
        let fy: Vec<f64> = y.iter().map(|v| v.powi(3) + 2.0 * v).collect();
        for m in [MethodSpec::rank(), MethodSpec::normal_scores()] {
            let a = m.statistic(&column(&x), &column(&y)).unwrap();
            let b = m.statistic(&column(&fx), &column(&fy)).unwrap();
            prop_assert!((a.value - b.value).abs() < 1e-12);
        }
    }

    #[test]
    fn biloop_output_is_bounded(x in prop::collection::vec(-1e8..1e8f64, 5..30)) {
        let spec = TransformSpec::biloop(DEFAULT_BILOOP_C).unwrap();
        if let Ok(t) = apply_transform(&column(&x), &spec) {
            prop_assert_eq!(t.dim(), 2);
            for i in 0..t.n() {
                prop_assert!(t.get(i, 0).abs() <= 2.0 * DEFAULT_BILOOP_C + 1e-12);
                prop_assert!(t.get(i, 1).abs() <= 1.0);
            }
        }
    }
}

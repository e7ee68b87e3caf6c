//! Sample estimators against an independent plug-in formula, and their
//! invariance properties.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robdcor::{sample_dcor, sample_dcov, sample_dvar, DataMatrix};

/// Three-term plug-in
/// `(1/n²)Σ a_ij b_ij + ā b̄ − (2/n³) Σ_i Σ_j Σ_k a_ij b_ik`
/// with `a_ij = |x_i − x_j|^α`, evaluated by direct summation.
fn three_term_dcov(x: &[Vec<f64>], y: &[Vec<f64>], alpha: f64) -> f64 {
    let n = x.len();
    let dist = |p: &[f64], q: &[f64]| {
        p.iter()
            .zip(q)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
            .powf(alpha)
    };
    let a: Vec<Vec<f64>> = x
        .iter()
        .map(|p| x.iter().map(|q| dist(p, q)).collect())
        .collect();
    let b: Vec<Vec<f64>> = y
        .iter()
        .map(|p| y.iter().map(|q| dist(p, q)).collect())
        .collect();
    let nf = n as f64;
    let mut t1 = 0.0;
    let mut abar = 0.0;
    let mut bbar = 0.0;
    let mut t3 = 0.0;
    for i in 0..n {
        for j in 0..n {
            t1 += a[i][j] * b[i][j];
            abar += a[i][j];
            bbar += b[i][j];
            t3 += a[i][j] * b[i].iter().sum::<f64>();
        }
    }
    t1 / (nf * nf) + (abar / (nf * nf)) * (bbar / (nf * nf)) - 2.0 * t3 / (nf * nf * nf)
}

fn random_rows(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..d).map(|_| rng.random_range(-3.0..3.0)).collect())
        .collect()
}

#[test]
fn delta_form_matches_three_term_plug_in() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for case in 0..200 {
        let n = rng.random_range(2..=12);
        let dx = rng.random_range(1..=3);
        let dy = rng.random_range(1..=3);
        let alpha = [0.5, 1.0, 1.5][case % 3];
        let x = random_rows(&mut rng, n, dx);
        let y = random_rows(&mut rng, n, dy);
        let oracle = three_term_dcov(&x, &y, alpha);
        let got = sample_dcov(
            &DataMatrix::from_rows(&x).unwrap(),
            &DataMatrix::from_rows(&y).unwrap(),
            alpha,
        )
        .unwrap()
        .value;
        let scale = three_term_dcov(&x, &x, alpha)
            .max(three_term_dcov(&y, &y, alpha))
            .max(1e-300);
        assert!(
            (got - oracle).abs() <= 1e-10 * scale.max(oracle.abs()),
            "case {case}: {got} vs {oracle}"
        );
    }
}

fn matrix(rows: &[Vec<f64>]) -> DataMatrix {
    DataMatrix::from_rows(rows).unwrap()
}

fn sample_strategy(d: usize) -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    (4usize..20).prop_flat_map(move |n| {
        (
            prop::collection::vec(prop::collection::vec(-10.0..10.0f64, d), n),
            prop::collection::vec(prop::collection::vec(-10.0..10.0f64, 1), n),
        )
    })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn translation_and_rotation_invariance((x, y) in sample_strategy(2), shift in -50.0..50.0f64, angle in 0.0..std::f64::consts::TAU, alpha in 0.3..1.9f64) {
        let base = sample_dcov(&matrix(&x), &matrix(&y), alpha).unwrap().value;
        let (c, s) = (angle.cos(), angle.sin());
        let moved: Vec<Vec<f64>> = x.iter().map(|r| vec![c * r[0] - s * r[1] + shift, s * r[0] + c * r[1] - shift]).collect();
        let other = sample_dcov(&matrix(&moved), &matrix(&y), alpha).unwrap().value;
        prop_assert!(close(base, other, 1e-9), "{base} vs {other}");
    }

    #[test]
    fn scale_equivariance((x, y) in sample_strategy(1), b in 0.1..10.0f64, alpha in 0.3..1.9f64) {
        let base = sample_dcov(&matrix(&x), &matrix(&y), alpha).unwrap().value;
        let scaled: Vec<Vec<f64>> = x.iter().map(|r| vec![b * r[0]]).collect();
        let other = sample_dcov(&matrix(&scaled), &matrix(&y), alpha).unwrap().value;
        prop_assert!(close(other, b.powf(alpha) * base, 1e-9));
    }

    #[test]
    fn dcor_affine_invariance((x, y) in sample_strategy(1), a in -100.0..100.0f64, b in prop_oneof![-10.0..-0.1f64, 0.1..10.0f64]) {
        let base = sample_dcor(&matrix(&x), &matrix(&y), 1.0).unwrap().value;
        let moved: Vec<Vec<f64>> = x.iter().map(|r| vec![a + b * r[0]]).collect();
        let other = sample_dcor(&matrix(&moved), &matrix(&y), 1.0).unwrap().value;
        prop_assert!((base - other).abs() < 1e-10);
    }

    #[test]
    fn symmetry_is_exact((x, y) in sample_strategy(1), alpha in 0.3..1.9f64) {
        let xy = sample_dcov(&matrix(&x), &matrix(&y), alpha).unwrap().value;
        let yx = sample_dcov(&matrix(&y), &matrix(&x), alpha).unwrap().value;
        prop_assert_eq!(xy, yx);
    }

    #[test]
    fn joint_row_permutation((x, y) in sample_strategy(2), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut perm: Vec<usize> = (0..x.len()).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let px: Vec<Vec<f64>> = perm.iter().map(|&i| x[i].clone()).collect();
        let py: Vec<Vec<f64>> = perm.iter().map(|&i| y[i].clone()).collect();
        let a = sample_dcor(&matrix(&x), &matrix(&y), 1.0).unwrap();
        let b = sample_dcor(&matrix(&px), &matrix(&py), 1.0).unwrap();
        prop_assert!((a.value - b.value).abs() < 1e-12);
        let va = sample_dvar(&matrix(&x), 1.0).unwrap().value;
        let vb = sample_dvar(&matrix(&px), 1.0).unwrap().value;
        prop_assert!(close(va, vb, 1e-12));
    }

    #[test]
    fn dcor_in_unit_interval((x, y) in sample_strategy(2), alpha in 0.3..1.9f64) {
        let r = sample_dcor(&matrix(&x), &matrix(&y), alpha).unwrap().value;
        prop_assert!((0.0..=1.0 + 1e-12).contains(&r));
    }
}

use approx::assert_relative_eq;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use pairgan_lab::convergence::{check_sufficient, ParametricGenerator, SoftmaxGenerator};
use pairgan_lab::function_space::{bilinear_form, project_simplex, DensityVector, PairwiseOperator};
use pairgan_lab::multi_align::{multi_gradients, multi_loss, DistributionFamily};
use pairgan_lab::sampling;

fn vector(k: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0..5.0f64, k)
}

fn density(k: usize) -> impl Strategy<Value = DensityVector> {
    prop::collection::vec(0.01..1.0f64, k).prop_map(|v| {
        let s: f64 = v.iter().sum();
        DensityVector::new(v.into_iter().map(|x| x / s).collect()).unwrap()
    })
}

fn symmetric(k: usize) -> impl Strategy<Value = PairwiseOperator> {
    prop::collection::vec(-3.0..3.0f64, k * k).prop_map(move |v| {
        let m = DMatrix::from_vec(k, k, v);
        PairwiseOperator::from_symmetric((&m + m.transpose()) * 0.5).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn projection_is_idempotent_and_feasible(v in (2usize..9).prop_flat_map(vector)) {
        let p = project_simplex(&v).unwrap();
        prop_assert!(p.as_slice().iter().all(|&x| x >= 0.0));
        prop_assert!((p.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let again = project_simplex(p.as_slice()).unwrap();
        for (a, b) in p.as_slice().iter().zip(again.as_slice()) {
            prop_assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn projection_is_nearest_point((v, other) in (2usize..9).prop_flat_map(|k| (vector(k), density(k)))) {
        let p = project_simplex(&v).unwrap();
        let dist = |d: &[f64]| d.iter().zip(&v).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
        prop_assert!(dist(p.as_slice()) <= dist(other.as_slice()) + 1e-12);
        // Variational inequality ⟨v − p, y − p⟩ ≤ 0 for any density y.
        let vi: f64 = (0..v.len()).map(|i| (v[i] - p.as_slice()[i]) * (other.as_slice()[i] - p.as_slice()[i])).sum();
        prop_assert!(vi <= 1e-10);
    }

    #[test]
    fn bilinear_form_is_symmetric_and_bilinear(
        (a, x, y, c) in (2usize..7).prop_flat_map(|k| (symmetric(k), vector(k), vector(k), -2.0..2.0f64))
    ) {
        let (x, y) = (DVector::from_vec(x), DVector::from_vec(y));
        let xy = bilinear_form(&x, &a, &y).unwrap();
        prop_assert!((xy - bilinear_form(&y, &a, &x).unwrap()).abs() <= 1e-10 * (1.0 + xy.abs()));
        let scaled = bilinear_form(&(&x * c + &y), &a, &y).unwrap();
        let expected = c * xy + bilinear_form(&y, &a, &y).unwrap();
        prop_assert!((scaled - expected).abs() <= 1e-9 * (1.0 + expected.abs()));
    }

    #[test]
    fn rank_one_update_keeps_min_eigenvalue(seed in any::<u64>(), k in 2usize..9, beta in 1e-4..20.0f64) {
        let mut rng = sampling::rng(seed);
        let a = sampling::random_pd(&mut rng, k, 1e-3);
        let v = sampling::random_normal_vector(&mut rng, k);
        let b = a.rank_one_update(beta, &v).unwrap();
        prop_assert!(b.min_eigenvalue() >= a.min_eigenvalue() - 1e-12);
        prop_assert!(b.is_positive_definite());
    }

    #[test]
    fn aligned_members_share_gradients(seed in any::<u64>(), k in 2usize..7, n in 2usize..7) {
        let mut rng = sampling::rng(seed);
        let shared = sampling::random_density(&mut rng, k, 0.0);
        let mut members: Vec<_> = (0..n).map(|_| sampling::random_density(&mut rng, k, 0.0)).collect();
        members[0] = shared.clone();
        members[n - 1] = shared;
        let a = sampling::random_symmetric(&mut rng, k);
        let fam = DistributionFamily::new(members.clone()).unwrap();
        let g = multi_gradients(&fam, &a).unwrap();
        prop_assert_eq!(&g[0], &g[n - 1]);

        // Permuting members permutes gradients.
        members.rotate_left(1);
        let rotated = multi_gradients(&DistributionFamily::new(members).unwrap(), &a).unwrap();
        for i in 0..n {
            let diff = (&rotated[i] - &g[(i + 1) % n]).amax();
            prop_assert!(diff <= 1e-12);
        }
    }

    #[test]
    fn two_member_loss_is_the_quadratic_form((p, q, a) in (2usize..7).prop_flat_map(|k| (density(k), density(k), symmetric(k)))) {
        let fam = DistributionFamily::new(vec![p.clone(), q.clone()]).unwrap();
        let d = p.diff(&q).unwrap();
        assert_relative_eq!(multi_loss(&fam, &a).unwrap(), bilinear_form(&d, &a, &d).unwrap(), epsilon = 1e-14, max_relative = 1e-12);
    }

    #[test]
    fn sufficiency_survives_small_perturbations(seed in any::<u64>(), k in 2usize..7) {
        let mut rng = sampling::rng(seed);
        let p = sampling::random_density(&mut rng, k, 0.1);
        let gen = SoftmaxGenerator::new(k).unwrap();
        let theta = gen.parameters_for(&p).unwrap();
        let a = sampling::random_pd(&mut rng, k, 0.5);
        let report = check_sufficient(&gen, &theta, &a).unwrap();
        prop_assert!(report.is_sufficient());
        // ‖J‖₂ ≤ 1 for the softmax Jacobian, so a perturbation of spectral
        // norm m/4 moves the restricted Hessian by at most m/2.
        let margin = report.min_margin.unwrap();
        let s = sampling::random_symmetric(&mut rng, k);
        let norm = s.eigenvalues().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let perturbed = a.try_add(&s.scaled(margin / (4.0 * norm))).unwrap();
        prop_assert!(check_sufficient(&gen, &theta, &perturbed).unwrap().is_sufficient());
    }
}

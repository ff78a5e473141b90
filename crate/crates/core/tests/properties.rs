use hbspace::grid::{boundary_from_taylor, taylor_from_boundary};
use hbspace::hb::{hb_norm, monomial_norm, szego_kernel_norm, SchurRow};
use hbspace::json::SeriesJson;
use hbspace::linalg::CMat;
use hbspace::models::{from_row, model_from_json, model_to_json, ModelInstance};
use hbspace::scalar::Cx;
use hbspace::series::{adjugate_det, MatrixTaylorSeries, TaylorSeries};
use hbspace::Config;
use proptest::prelude::*;

fn small_config() -> Config {
    Config::default().with_degree(96).with_grid(256)
}

fn complex() -> impl Strategy<Value = Cx<f64>> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Cx::new(re, im))
}

fn series(max_degree: usize) -> impl Strategy<Value = TaylorSeries<f64>> {
    prop::collection::vec(complex(), 1..=max_degree + 1).prop_map(TaylorSeries::new)
}

fn matrix(n: usize) -> impl Strategy<Value = CMat<f64>> {
    prop::collection::vec(complex(), n * n).prop_map(move |v| CMat::from_vec(n, n, v))
}

/// Polynomial rows whose coefficient mass is at most `0.8`, hence strictly Schur.
fn schur_row() -> impl Strategy<Value = Vec<TaylorSeries<f64>>> {
    (1usize..=3).prop_flat_map(|n| {
        prop::collection::vec(prop::collection::vec(complex(), 1..=4), n).prop_map(|comps| {
            let mass: f64 = comps.iter().flatten().map(|c| c.norm()).sum();
            let scale = if mass > 0.0 { 0.8 / mass } else { 0.0 };
            comps
                .into_iter()
                .map(|c| TaylorSeries::new(c.into_iter().map(|z| z * scale).collect()))
                .collect()
        })
    })
}

fn factored(comps: Vec<TaylorSeries<f64>>) -> ModelInstance<f64> {
    let cfg = small_config();
    from_row(
        SchurRow::new(comps, &cfg)
            .unwrap()
            .suppress_independence_warning(),
        &cfg,
    )
    .unwrap()
}

fn unitary(m: &CMat<f64>) -> Option<CMat<f64>> {
    m.polar().map(|(u, _)| u)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn grid_round_trip(f in series(20)) {
        let back = taylor_from_boundary(&boundary_from_taylor(&f, 64).unwrap(), f.degree()).unwrap();
        for k in 0..=f.degree() {
            prop_assert!((back.coeff(k) - f.coeff(k)).norm() < 1e-12);
        }
    }

    #[test]
    fn multiplication_is_associative(f in series(6), g in series(6), h in series(6)) {
        let left = f.multiply(&g).multiply(&h);
        let right = f.multiply(&g.multiply(&h));
        for k in 0..=left.degree() {
            prop_assert!((left.coeff(k) - right.coeff(k)).norm() < 1e-12);
        }
    }

    #[test]
    fn adjugate_times_matrix_is_determinant(coeffs in prop::collection::vec(matrix(3), 1..4)) {
        let a = MatrixTaylorSeries::from_coeffs(3, 3, coeffs);
        let (adj, det) = adjugate_det(&a).unwrap();
        let prod = a.multiply_truncated(&adj, a.degree()).unwrap();
        for k in 0..=a.degree() {
            let expected = CMat::identity(3).scale(det.coeff(k));
            prop_assert!((&prod.coeff(k) - &expected).max_abs() < 1e-11);
        }
    }

    #[test]
    fn backward_shift_recovers_the_series(f in series(10)) {
        let rebuilt = f.backward_shift().shift_up().add(&TaylorSeries::constant(f.coeff(0)));
        for k in 0..=f.degree() {
            prop_assert!((rebuilt.coeff(k) - f.coeff(k)).norm() < 1e-15);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn factored_models_satisfy_the_norm_invariants(comps in schur_row(), f in series(6), turn in matrix(3)) {
        let model = factored(comps);
        let cfg = small_config();
        prop_assert!(model.residuals(&cfg).unwrap().max() < 1e-8);

        // ‖f‖_H(B) dominates ‖f‖_H².
        let rep = hb_norm(&f, &model.phi).unwrap();
        prop_assert!(rep.norm_sq >= rep.hardy_norm_sq * (1.0 - 1e-14));

        // Monomial norms never decrease.
        let norms: Vec<f64> = (0..30).map(|m| monomial_norm(m, &model.phi).unwrap()).collect();
        prop_assert!(norms.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-14)));

        // Gauge invariance under A -> UA.
        let n = model.n();
        let block = CMat::from_fn(n, n, |i, j| turn[(i, j)]);
        if let Some(u) = unitary(&block) {
            let turned = model.regauged(&u).unwrap();
            let lambda = Cx::new(0.2, 0.4);
            let a = szego_kernel_norm(lambda, &model.row, &model.matrix_mate).unwrap();
            let b = szego_kernel_norm(lambda, &turned.row, &turned.matrix_mate).unwrap();
            prop_assert!((a - b).abs() < 1e-10 * a);
            let c = hb_norm(&f, &turned.phi).unwrap().norm_sq;
            prop_assert!((c - rep.norm_sq).abs() < 1e-10 * rep.norm_sq);
        }
    }

    #[test]
    fn models_survive_json(comps in schur_row()) {
        let model = factored(comps);
        let back = model_from_json::<f64>(&model_to_json(&model).unwrap(), &small_config()).unwrap();
        prop_assert_eq!(back.phi.coeffs(), model.phi.coeffs());
        prop_assert_eq!(back.matrix_mate.coeffs(), model.matrix_mate.coeffs());
        prop_assert_eq!(back.scalar_mate.coeffs(), model.scalar_mate.coeffs());
    }

    #[test]
    fn single_precision_tracks_double(comps in schur_row(), f in series(4)) {
        let model = factored(comps);
        let wide = hb_norm(&f, &model.phi).unwrap().norm_sq;
        let narrow = hb_norm(&f.cast::<f32>(), &model.cast::<f32>().phi).unwrap().norm_sq as f64;
        prop_assert!((wide - narrow).abs() < 1e-4 * wide);
    }
}

#[test]
fn series_json_rejects_short_coefficient_lists() {
    let text = r#"{"rows":1,"cols":1,"degree":3,"coeffs":[[[1.0,0.0]],[[0.0,0.0]]]}"#;
    let parsed: SeriesJson = serde_json::from_str(text).unwrap();
    assert!(parsed.to_taylor::<f64>().is_err());
}

use hbspace::config::Config;
use hbspace::factorization::{factor_symbol, outerness_certificate};
use hbspace::models::{corpus_specs, ModelSpec};
use std::time::Instant;

#[test]
fn corpus_factors_to_tolerance() {
    let cfg = Config::default();
    for spec in corpus_specs() {
        let start = Instant::now();
        let model = ModelSpec::parse(spec).unwrap().build::<f64>(&cfg).unwrap();
        let result = factor_symbol(&model.row, &cfg).unwrap();
        let r = &result.residuals;
        println!(
            "{spec}: scalar {:.2e} matrix {:.2e} relation {:.2e} gaps {:.2e}/{:.2e} refined {} pins {} in {:?}",
            r.scalar,
            r.matrix,
            r.relation,
            result.outer_gap_scalar.gap,
            result.outer_gap_matrix.gap,
            result.trace.refined,
            result.trace.boundary_zeros,
            start.elapsed()
        );
        assert!(r.max() < 1e-8, "{spec}: {r:?}");
        assert!(
            result.outer_gap_matrix.gap < 1e-8 && result.outer_gap_scalar.gap < 1e-8,
            "{spec}"
        );
        let gap = outerness_certificate(&model.matrix_mate, cfg.grid)
            .unwrap()
            .gap;
        assert!(gap < 1e-8, "{spec}: stored mate gap {gap:.2e}");
    }
}

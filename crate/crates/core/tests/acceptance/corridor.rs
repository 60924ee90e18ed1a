//! Criteria 1-3: corridor simulation anchors, asymptotic agreement, and
//! t-test significance replication.

use gridbelief_core::{
    paired_t_test, run_corridor_experiment, CorridorConfig, MapModel, Method, RunResult,
};

const LENGTH: usize = 100;
const SEED: u64 = 1;

fn cell(model: MapModel, method: Method, n: u32, runs: usize) -> RunResult {
    run_corridor_experiment(&CorridorConfig {
        length: LENGTH,
        n,
        model,
        method,
        runs,
        seed: SEED,
    })
    .unwrap()
}

/// Criterion 1: corridor mean-rho anchors at n=1, run at 2,000 runs with the
/// correspondingly doubled tolerances.
#[test]
// one anchor (0.318) happens to sit near 1/pi; it is a Monte-Carlo mean
#[allow(clippy::approx_constant)]
fn criterion_01_corridor_anchors() {
    const RUNS: usize = 2000;
    let checks = [
        (MapModel::Reflection, Method::Mlm, 0.039, 0.020),
        (MapModel::Reflection, Method::FmpUniform, 0.318, 0.080),
        (MapModel::Reflection, Method::FmpConjugate, 0.429, 0.160),
        (MapModel::Decay, Method::Mlm, 0.444, 0.180),
        (MapModel::Decay, Method::FmpUniform, 0.651, 0.100),
    ];
    for (model, method, target, tol) in checks {
        let r = cell(model, method, 1, RUNS);
        println!(
            "criterion 1: {} {} n=1: mean rho {:.4} vs {target} +- {tol}",
            model.as_str(),
            method.as_str(),
            r.mean
        );
        assert!(
            (r.mean - target).abs() <= tol,
            "{} {} n=1: mean rho {:.4} outside {target} +- {tol}",
            model.as_str(),
            method.as_str(),
            r.mean
        );
    }
}

/// Criterion 2: at n=200 the three methods agree with each other and with the
/// published asymptote within 0.01.
#[test]
fn criterion_02_asymptotic_agreement() {
    const RUNS: usize = 2000;
    for (model, target) in [(MapModel::Reflection, 0.764), (MapModel::Decay, 0.885)] {
        let means: Vec<f64> = [Method::Mlm, Method::FmpUniform, Method::FmpConjugate]
            .into_iter()
            .map(|m| cell(model, m, 200, RUNS).mean)
            .collect();
        println!(
            "criterion 2: {} n=200: mlm {:.4} fmp_uniform {:.4} fmp_conjugate {:.4} vs {target}",
            model.as_str(),
            means[0],
            means[1],
            means[2]
        );
        for (i, &m) in means.iter().enumerate() {
            assert!(
                (m - target).abs() <= 0.01,
                "{} method {i}: {m:.4} vs {target}",
                model.as_str()
            );
            for &other in &means[i + 1..] {
                assert!(
                    (m - other).abs() <= 0.01,
                    "{} methods disagree: {m:.4} vs {other:.4}",
                    model.as_str()
                );
            }
        }
    }
}

/// Criterion 3: one-tailed paired t-test of FMP-conjugate against MLM at
/// 10,000 runs; significant (confidence > 0.9999) for every swept n <= 100
/// (reflection) and n <= 4 (decay).  Pairing holds because both methods
/// replay identical per-run map and measurement draws.
#[test]
fn criterion_03_significance_replication() {
    const RUNS: usize = 10_000;
    let sweeps = [
        (MapModel::Reflection, vec![1u32, 2, 3, 4, 5, 10, 20, 50, 100]),
        (MapModel::Decay, vec![1, 2, 3, 4]),
    ];
    for (model, ns) in sweeps {
        for n in ns {
            let conj = cell(model, Method::FmpConjugate, n, RUNS);
            let mlm = cell(model, Method::Mlm, n, RUNS);
            let tt = paired_t_test(&conj.rhos, &mlm.rhos).unwrap();
            println!(
                "criterion 3: {} n={n}: t {:.3} confidence {:.6}",
                model.as_str(),
                tt.t,
                tt.confidence
            );
            assert!(
                tt.confidence > 0.9999,
                "{} n={n}: confidence {:.6} (t {:.3})",
                model.as_str(),
                tt.confidence,
                tt.t
            );
        }
    }
}

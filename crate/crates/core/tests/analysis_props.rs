mod common;

use common::{random_admissible, tri};
use fuzzfrac::analysis::{
    apriori_norm_bound, holder_params, run_perturbation, run_perturbation_experiment, sup_norm,
    verify_holder, Direction, HolderCase, PerturbationKind,
};
use fuzzfrac::{example2, solve, AddressMap, Error, FuzzyDataSet, RifsSpec, SolveOptions};
use proptest::prelude::*;

fn constant_spec(value: f64, alpha: f64) -> RifsSpec {
    let pts = (0..=4)
        .map(|k| (k as f64 / 4.0, tri(value, 0.0, 0.0)))
        .collect();
    let data = FuzzyDataSet::new(pts).unwrap();
    RifsSpec::new(
        data,
        AddressMap::new(vec![(0, 2), (1, 4), (0, 2), (1, 3)]),
        vec![alpha; 4],
    )
    .unwrap()
}

proptest! {
    #[test]
    fn case_dispatch_is_total(alpha in 0.0..1.0f64, c_min in 0.01..1.0f64) {
        let delta = alpha / c_min;
        let case = HolderCase::of(delta);
        let expected = if delta == 1.0 {
            HolderCase::DeltaEq1
        } else if delta < 1.0 {
            HolderCase::DeltaLt1
        } else {
            HolderCase::DeltaGt1
        };
        prop_assert_eq!(case, expected);
    }

    #[test]
    fn holder_params_invariants(seed in 0u64..5000) {
        let spec = random_admissible(seed);
        match holder_params(&spec) {
            Ok(hp) => {
                prop_assert!(hp.tau > 0.0 && hp.tau <= 1.0);
                prop_assert!(hp.q > 0.0);
                prop_assert_eq!(hp.h, 2.0 * hp.q);
                prop_assert_eq!(hp.case, HolderCase::of(hp.delta));
                prop_assert!((hp.delta - hp.alpha / hp.c_min).abs() <= 1e-15);
            }
            Err(Error::NonPositiveExponent { tau, delta, .. }) => {
                prop_assert!(tau <= 0.0 && delta > 1.0);
            }
            Err(e) => prop_assert!(false, "unexpected error {}", e),
        }
    }
}

#[test]
fn case_boundary_at_alpha_equal_c_min() {
    let spec = example2();
    let c_min = spec
        .contraction_factors()
        .iter()
        .copied()
        .fold(1.0, f64::min);
    let at = spec.with_alphas(vec![0.2, c_min, 0.2, 0.2]).unwrap();
    assert_eq!(holder_params(&at).unwrap().case, HolderCase::DeltaEq1);
    let below = spec.with_alphas(vec![0.2, c_min - 1e-6, 0.2, 0.2]).unwrap();
    assert_eq!(holder_params(&below).unwrap().case, HolderCase::DeltaLt1);
    let above = spec.with_alphas(vec![0.2, c_min + 1e-6, 0.2, 0.2]).unwrap();
    assert_eq!(holder_params(&above).unwrap().case, HolderCase::DeltaGt1);
}

#[test]
fn apriori_bound_on_random_family() {
    for seed in 0..20 {
        let spec = random_admissible(seed);
        let (f, _) = solve(
            &spec,
            &SolveOptions {
                grid_density: 16,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(sup_norm(&f) <= apriori_norm_bound(&spec), "seed {seed}");
    }
}

#[test]
fn apriori_bound_fails_for_constant_crisp_data() {
    // L_q vanishes for constant data while f is the nonzero constant
    let spec = constant_spec(3.0, 0.2);
    assert_eq!(apriori_norm_bound(&spec), 0.0);
    let (f, _) = solve(
        &spec,
        &SolveOptions {
            grid_density: 8,
            ..Default::default()
        },
    )
    .unwrap();
    assert!((sup_norm(&f) - 3.0).abs() < 1e-12);
}

#[test]
fn holder_check_on_random_family() {
    for seed in 0..10 {
        let spec = random_admissible(seed);
        let Ok(hp) = holder_params(&spec) else {
            continue;
        };
        let opts = SolveOptions {
            grid_density: 16,
            ..Default::default()
        };
        let (f, _) = solve(&spec, &opts).unwrap();
        let check = verify_holder(&f, &hp, 2000, seed, 10.0 * opts.tol);
        assert!(check.passed(), "seed {seed}: {check:?}");
        assert!(check.worst_ratio <= hp.h);
    }
}

#[test]
fn constant_function_has_zero_ratio() {
    let spec = constant_spec(3.0, 0.0);
    let hp = holder_params(&spec).unwrap();
    let (f, _) = solve(
        &spec,
        &SolveOptions {
            grid_density: 8,
            ..Default::default()
        },
    )
    .unwrap();
    let check = verify_holder(&f, &hp, 500, 1, 0.0);
    assert!(check.passed());
    assert_eq!(check.worst_ratio, 0.0);
}

#[test]
fn zero_size_perturbations_change_nothing() {
    let spec = example2();
    let opts = SolveOptions {
        grid_density: 16,
        ..Default::default()
    };
    for kind in PerturbationKind::ALL {
        let r = run_perturbation_experiment(&spec, kind, 0.0, 1, &opts).unwrap();
        assert_eq!(r.theoretical_bound, 0.0, "{kind}");
        assert!(r.observed_d <= 2.0 * opts.tol, "{kind}");
        assert!(r.passed());
    }
}

#[test]
fn single_component_experiments() {
    let spec = example2();
    let opts = SolveOptions::default();
    let u = run_perturbation(
        &spec,
        PerturbationKind::PerturbU,
        0.01,
        Direction::Component(2),
        &opts,
    )
    .unwrap();
    assert!(u.margin >= 0.0, "{u:?}");
    let a = run_perturbation(
        &spec,
        PerturbationKind::PerturbAlpha,
        -0.01,
        Direction::Component(3),
        &opts,
    )
    .unwrap();
    assert!(a.margin >= 0.0, "{a:?}");
    let x = run_perturbation(
        &spec,
        PerturbationKind::PerturbX,
        0.01,
        Direction::Component(2),
        &opts,
    )
    .unwrap();
    assert!(x.margin >= 0.0, "{x:?}");
    let err = run_perturbation(
        &spec,
        PerturbationKind::PerturbAlpha,
        0.34,
        Direction::Component(3),
        &opts,
    )
    .unwrap_err();
    assert!(matches!(err, Error::InadmissiblePerturbation(_)));
}

#[test]
fn experiments_on_random_family() {
    let opts = SolveOptions {
        grid_density: 16,
        ..Default::default()
    };
    for seed in 0..5 {
        let spec = random_admissible(seed);
        if holder_params(&spec).is_err() {
            continue;
        }
        for kind in PerturbationKind::ALL {
            match run_perturbation_experiment(&spec, kind, 0.01, seed, &opts) {
                Ok(r) => assert!(r.passed(), "seed {seed}: {r:?}"),
                Err(Error::InadmissiblePerturbation(_)) => {}
                Err(e) => panic!("seed {seed} {kind}: {e}"),
            }
        }
    }
}

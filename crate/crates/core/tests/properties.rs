use std::sync::Arc;

use hardy_forge::agmon::{self, AgmonMetric};
use hardy_forge::catalog::{self, MultipoleConfig, MultipoleVariant};
use hardy_forge::construct::{hardy_weight_multi, hardy_weight_pair, HardyWeight, MetricSpec, ScalarField};
use hardy_forge::numgrid::{integrate, LogGrid, SampledFunction};
use hardy_forge::radial;
use hardy_forge::varify::{self, AnnulusProblem, RadialTestFunction};
use proptest::prelude::*;

fn shifted_power(n: usize, center: Vec<f64>, p: f64, scale: f64) -> ScalarField {
    ScalarField::new(n, "c |x - a|^p", move |x| {
        let r2: f64 = x.iter().zip(&center).map(|(a, b)| (a - b) * (a - b)).sum();
        scale * r2.powf(0.5 * p)
    })
}

fn point3() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, 3).prop_filter("away from poles", |x| {
        let d0 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let d1 = ((x[0] - 1.0).powi(2) + x[1] * x[1] + x[2] * x[2]).sqrt();
        d0 > 0.05 && d1 > 0.05
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn integrate_is_linear_and_additive(a in -2.0f64..2.0, b in -2.0f64..2.0, lo in 1e-3f64..0.5, mid in 0.6f64..5.0, hi in 6.0f64..50.0) {
        let grid = Arc::new(LogGrid::new(1e-4, 100.0, 2001).unwrap());
        let f = SampledFunction::from_fn(grid.clone(), |r| (-r).exp());
        let g = SampledFunction::from_fn(grid.clone(), |r| r.sqrt() / (1.0 + r));
        let h = SampledFunction::from_fn(grid, |r| a * (-r).exp() + b * r.sqrt() / (1.0 + r));
        let lhs = integrate(&h, lo, hi).unwrap();
        let rhs = a * integrate(&f, lo, hi).unwrap() + b * integrate(&g, lo, hi).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        let split = integrate(&f, lo, mid).unwrap() + integrate(&f, mid, hi).unwrap();
        prop_assert!((split - integrate(&f, lo, hi).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn pair_weight_scale_invariant_and_symmetric(c0 in 1e-3f64..1e3, c1 in 1e-3f64..1e3, x in point3()) {
        let m = MetricSpec::identity(3);
        let v0 = || shifted_power(3, vec![0.0; 3], -1.0, 1.0);
        let v1 = || shifted_power(3, vec![1.0, 0.0, 0.0], -1.0, 1.0);
        let w = hardy_weight_pair(&v0(), &v1(), &m).unwrap().value(&x).unwrap();
        let scaled = hardy_weight_pair(&shifted_power(3, vec![0.0; 3], -1.0, c0), &shifted_power(3, vec![1.0, 0.0, 0.0], -1.0, c1), &m)
            .unwrap()
            .value(&x)
            .unwrap();
        let swapped = hardy_weight_pair(&v1(), &v0(), &m).unwrap().value(&x).unwrap();
        prop_assert!((w - scaled).abs() <= 1e-10 * w.abs().max(1e-300));
        prop_assert!((w - swapped).abs() <= 1e-12 * w.abs().max(1e-300));
        let multi = hardy_weight_multi(&[v0(), v1()], &[0.5, 0.5], &m).unwrap().value(&x).unwrap();
        prop_assert!((w - multi).abs() <= 1e-12 * w.abs().max(1e-300));
    }

    #[test]
    fn multipolar_closed_form_equals_sum(
        poles in prop::collection::vec(prop::collection::vec(-2.0f64..2.0, 3), 2..=4),
        x in prop::collection::vec(-3.0f64..3.0, 3),
        variant in prop::sample::select(vec!["uniform", "bde", "cz"]),
    ) {
        let sep = poles.iter().enumerate().all(|(i, p)| poles[..i].iter().all(|q| p.iter().zip(q).map(|(a, b)| (a - b).powi(2)).sum::<f64>() > 0.01));
        let clear = poles.iter().all(|p| p.iter().zip(&x).map(|(a, b)| (a - b).powi(2)).sum::<f64>() > 1e-4);
        prop_assume!(sep && clear);
        let cfg = MultipoleConfig::new(3, poles, MultipoleVariant::parse(variant).unwrap());
        let (w, _) = catalog::multipolar_weight(&cfg).unwrap();
        let brute = catalog::multipolar_brute_force(&cfg).unwrap();
        let (a, b) = (w.value(&x).unwrap(), brute.value(&x).unwrap());
        prop_assert!((a - b).abs() <= 1e-10 * b.abs().max(1e-12), "{a} vs {b}");
    }

    #[test]
    fn oscillation_count_monotone_in_lambda(l1 in 0.0f64..6.0, dl in 0.0f64..6.0, decades in 1.0f64..30.0) {
        let zero = |_: f64| 0.0;
        let w = |r: f64| 0.25 / (r * r);
        let hi = 10f64.powf(decades);
        let a = radial::oscillation_count(3, &zero, &w, l1, 1.0, hi).unwrap().sign_changes;
        let b = radial::oscillation_count(3, &zero, &w, l1 + dl, 1.0, hi).unwrap().sign_changes;
        prop_assert!(a <= b, "{a} > {b}");
    }

    #[test]
    fn prefactor_strictly_decreasing(mu in 0.0f64..0.99, d in 1e-3f64..0.01, lambda in 0.1f64..2.0) {
        prop_assert!(agmon::rellich_prefactor(mu + d, lambda) < agmon::rellich_prefactor(mu, lambda));
    }

    #[test]
    fn agmon_length_additive(a in 0.1f64..5.0, b in 5.0f64..50.0, c in 50.0f64..500.0) {
        let k = catalog::hardy_constant(3);
        let metric = AgmonMetric::new(HardyWeight::radial(3, "1/(4|x|^2)", move |r| k / (r * r)), MetricSpec::identity(3)).unwrap();
        let len = |r0, r1| agmon::agmon_length(&metric, &agmon::radial_segment(3, r0, r1)).unwrap().length;
        prop_assert!((len(a, b) + len(b, c) - len(a, c)).abs() <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn lambda0_domain_monotone(lo in 1e-3f64..0.5, shrink_lo in 1.0f64..3.0, shrink_hi in 1.0f64..3.0, hi in 5.0f64..500.0) {
        let zero = |_: f64| 0.0;
        let w = |r: f64| 0.25 / (r * r);
        let outer = AnnulusProblem::assemble(3, &zero, &w, lo, hi, 600).unwrap();
        let inner = AnnulusProblem::assemble(3, &zero, &w, lo * shrink_lo, hi / shrink_hi, 600).unwrap();
        let (a, b) = (varify::principal_eigenvalue(&outer).unwrap().lambda0, varify::principal_eigenvalue(&inner).unwrap().lambda0);
        prop_assert!(b >= a * (1.0 - 1e-6), "inner {b} < outer {a}");
    }

    #[test]
    fn lambda0_below_rayleigh_quotients(bump in 1.0f64..3.0, tilt in -1.0f64..1.0) {
        let zero = |_: f64| 0.0;
        let w = |r: f64| 0.25 / (r * r);
        let (lo, hi) = (0.1f64, 10.0f64);
        let p = AnnulusProblem::assemble(3, &zero, &w, lo, hi, 2000).unwrap();
        let lam = varify::principal_eigenvalue(&p).unwrap().lambda0;
        let l = (hi / lo).ln();
        let phi = RadialTestFunction::new(
            move |r: f64| {
                let t = (r / lo).ln() / l;
                (std::f64::consts::PI * t).sin().powf(bump) * (1.0 + tilt * t) / r.sqrt()
            },
            move |r: f64| {
                let t = (r / lo).ln() / l;
                let (s, c) = ((std::f64::consts::PI * t).sin(), (std::f64::consts::PI * t).cos());
                let f = s.powf(bump) * (1.0 + tilt * t);
                let df = (bump * s.powf(bump - 1.0) * c * std::f64::consts::PI * (1.0 + tilt * t) + s.powf(bump) * tilt) / l;
                (df - 0.5 * f) / r.powf(1.5)
            },
        );
        let q = varify::rayleigh_quotient(&phi, 3, &zero, &w, (lo, hi)).unwrap();
        prop_assert!(lam <= q * (1.0 + 1e-6), "λ₀ {lam} > quotient {q}");
    }
}

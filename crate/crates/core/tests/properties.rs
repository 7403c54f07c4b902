use frailfit::baseline::{gw_cum_hazard, gw_hazard, gw_survival, GwParams};
use frailfit::frailty::{Frailty, FrailtyLaw, GlFrailty, IgFrailty};
use frailfit::io::{read_csv_from, CsvSchema, Dataset};
use frailfit::models::{unconditional_density, unconditional_survival, ModelKind, ModelParams, SurvivalRecord};
use frailfit::modelsel::info_criteria;
use frailfit::simulate::invert_lifetime;
use proptest::prelude::*;

fn baseline() -> impl Strategy<Value = GwParams> {
    (0.1f64..8.0, 0.05f64..5.0, 0.2f64..4.0).prop_map(|(z, d, x)| GwParams::new(z, d, x).unwrap())
}

fn frailty() -> impl Strategy<Value = Frailty> {
    prop_oneof![
        (0.01f64..30.0).prop_map(|e| IgFrailty::new(e).unwrap().into()),
        (0.01f64..30.0, 0.01f64..30.0).prop_map(|(e, x)| GlFrailty::new(e, x).unwrap().into()),
    ]
}

fn model() -> impl Strategy<Value = ModelParams> {
    (baseline(), frailty(), -1.5f64..1.5).prop_map(|(baseline, frailty, b)| ModelParams {
        baseline,
        frailty,
        beta: vec![b],
    })
}

proptest! {
    #[test]
    fn baseline_survival_is_a_survival_function(p in baseline(), z1 in 0.0f64..6.0, dz in 0.0f64..3.0) {
        let (s1, s2) = (gw_survival(z1, &p).unwrap(), gw_survival(z1 + dz, &p).unwrap());
        // survival may underflow; the cumulative hazard stays finite
        prop_assert!((0.0..=1.0).contains(&s1));
        prop_assert!(gw_cum_hazard(z1, &p).unwrap().is_finite());
        prop_assert!(s2 <= s1);
        prop_assert!(gw_cum_hazard(z1 + dz, &p).unwrap() >= gw_cum_hazard(z1, &p).unwrap());
        if z1 > 0.0 {
            let h = gw_hazard(z1, &p).unwrap();
            prop_assert!(h > 0.0 && h.is_finite());
        }
    }

    #[test]
    fn laplace_transform_is_decreasing_in_unit_interval(f in frailty(), s in 0.0f64..1e4, ds in 0.0f64..10.0) {
        let (l1, l2) = (f.laplace(s).unwrap(), f.laplace(s + ds).unwrap());
        prop_assert!(l1 > 0.0 && l1 <= 1.0);
        prop_assert!(l2 <= l1);
        // -L' is E[W e^{-sW}], at most E[W] = 1 and decreasing
        let d1 = f.log_neg_laplace_deriv(s);
        prop_assert!(d1 <= 1e-12);
        prop_assert!(f.log_neg_laplace_deriv(s + ds) <= d1 + 1e-12);
    }

    #[test]
    fn inversion_recovers_the_uniform(p in baseline(), v in 0.01f64..0.99, w in 0.05f64..5.0, rho in 0.2f64..5.0) {
        let z = invert_lifetime(v, w, rho, &p).unwrap();
        let back = (-w * gw_cum_hazard(z, &p).unwrap() * rho).exp();
        prop_assert!((back - v).abs() < 1e-9, "{} vs {}", back, v);
    }

    #[test]
    fn marginal_survival_and_density_are_consistent(p in model(), z in 0.01f64..4.0) {
        let kind = p.kind();
        let s = unconditional_survival(kind, z, &p, 1.3).unwrap();
        let f = unconditional_density(kind, z, &p, 1.3).unwrap();
        prop_assert!((0.0..=1.0).contains(&s));
        prop_assert!(f >= 0.0 && f.is_finite());
        prop_assert!(unconditional_survival(kind, z * 1.1, &p, 1.3).unwrap() <= s);
        // Jensen: E[exp(-sW)] >= exp(-s E[W])
        prop_assert!(s >= gw_survival(z, &p.baseline).unwrap().powf(1.3) - 1e-12);
    }

    #[test]
    fn params_vector_round_trip(p in model()) {
        let back = ModelParams::from_slice(p.kind(), &p.to_vec()).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn criteria_identities(ll in -5000.0f64..0.0, k in 1usize..15, extra in 2usize..500) {
        let n = k + extra;
        let c = info_criteria(ll, k, n).unwrap();
        let kf = k as f64;
        prop_assert!((c.aicc.unwrap() - c.aic - 2.0 * kf * (kf + 1.0) / (n as f64 - kf - 1.0)).abs() < 1e-9);
        prop_assert!((c.bic - c.aic - kf * ((n as f64).ln() - 2.0)).abs() < 1e-9);
        prop_assert!((c.hqic - c.aic - kf * (2.0 * (n as f64).ln().ln() - 2.0)).abs() < 1e-9);
    }

    #[test]
    fn dataset_csv_round_trip(rows in prop::collection::vec((1e-6f64..1e6, any::<bool>(), -1e3f64..1e3), 1..40)) {
        let records: Vec<SurvivalRecord> =
            rows.iter().map(|&(t, e, k)| SurvivalRecord::new(t, e, vec![k]).unwrap()).collect();
        let ds = Dataset::new(records, vec!["age".into()], "prop").unwrap();
        let mut buf = Vec::new();
        ds.write_csv(&mut buf).unwrap();
        let schema = CsvSchema { covariates: vec!["age".into()], ..CsvSchema::default() };
        let (back, report) = read_csv_from(buf.as_slice(), &schema, "prop").unwrap();
        prop_assert_eq!(back.records, ds.records);
        prop_assert_eq!(report.rows_kept, rows.len());
    }
}

#[test]
fn kinds_are_checked() {
    let p = ModelParams {
        baseline: GwParams::new(1.0, 1.0, 1.0).unwrap(),
        frailty: IgFrailty::new(1.0).unwrap().into(),
        beta: vec![],
    };
    assert!(unconditional_survival(ModelKind::GlGw, 1.0, &p, 1.0).is_err());
    assert!(unconditional_survival(ModelKind::IgGw, 1.0, &p, 0.0).is_err());
}

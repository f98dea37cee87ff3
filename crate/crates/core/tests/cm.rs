mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use siegel_core::cm::{class_number, cm_point, reduced_forms, QuadraticForm};
use siegel_core::domain::in_fundamental_domain;
use siegel_core::reduction::{siegel_reduce, ReduceConfig};

fn discriminant() -> impl Strategy<Value = i64> {
    (1i64..2500).prop_map(|k| -k).prop_filter("discriminant", |d| matches!(d.rem_euclid(4), 0 | 1) && *d <= -3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn class_numbers_match_oracles(d in discriminant()) {
        let h = class_number(d).unwrap();
        prop_assert_eq!(h, common::exhaustive_class_number(d));
        prop_assert_eq!(h as i64, common::analytic_class_number(d));
    }

    #[test]
    fn cm_points_are_distinct_reduced_and_in_domain(d in discriminant()) {
        let forms = reduced_forms(d).unwrap();
        let mut seen = BTreeSet::new();
        for f in &forms {
            prop_assert!(f.is_reduced() && f.is_primitive() && f.discriminant() == d);
            let p = cm_point(f).unwrap();
            prop_assert!(in_fundamental_domain(&p, 1e-9).in_domain);
            let key = ((p.x()[(0, 0)] * 1e9).round() as i64, (p.y()[(0, 0)] * 1e9).round() as i64);
            prop_assert!(seen.insert(key), "repeated point for {:?}", f);
            // the point is already reduced
            let r = siegel_reduce(&p, &ReduceConfig::default()).unwrap();
            prop_assert!((r.reduced_point.z()[(0, 0)] - p.z()[(0, 0)]).norm() < 1e-9);
        }
    }

    #[test]
    fn reducing_a_transformed_form_lands_on_its_reduced_form(
        d in discriminant(), pick in any::<prop::sample::Index>(), q in -5i64..=5, r in -5i64..=5,
    ) {
        let forms = reduced_forms(d).unwrap();
        let f = forms[pick.index(forms.len())];
        // [[1, q], [0, 1]] then [[1, 0], [r, 1]] stays in SL_2(Z)
        let moved = f.transform([[1, q], [0, 1]]).transform([[1, 0], [r, 1]]);
        prop_assert_eq!(moved.reduce().unwrap(), f);
        prop_assert!(forms.contains(&moved.reduce().unwrap()));
    }
}

#[test]
fn non_reduced_forms_are_rejected() {
    assert!(cm_point(&QuadraticForm::new(3, 1, 2)).is_err());
    assert!(reduced_forms(-7).unwrap().len() == 1);
}

use proptest::prelude::*;

use consensus_kinetics::evaluation::{error_summary_values, relative_error_series};
use consensus_kinetics::kinetic::*;
use consensus_kinetics::timeseries::{trading_days, TimeSeries};

fn series(values: Vec<f64>) -> TimeSeries {
    let start = chrono::NaiveDate::from_ymd_opt(2020, 1, 2).unwrap();
    TimeSeries::new(trading_days(start, values.len()), values, "v").unwrap()
}

proptest! {
    #[test]
    fn relative_error_is_scale_free(
        pairs in prop::collection::vec((1.0f64..1e4, 1.0f64..1e4), 1..40),
        scale in 1e-3f64..1e3,
    ) {
        let (f, m): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let base = relative_error_series(&series(f.clone()), &series(m.clone())).unwrap();
        let scaled = relative_error_series(
            &series(f.iter().map(|v| v * scale).collect()),
            &series(m.iter().map(|v| v * scale).collect()),
        )
        .unwrap();
        for (a, b) in base.values().iter().zip(scaled.values()) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn summary_ignores_order(mut v in prop::collection::vec(-1.0f64..1.0, 2..60), rot in 0usize..60) {
        let a = error_summary_values(&v).unwrap();
        let len = v.len();
        v.rotate_left(rot % len);
        v.reverse();
        let b = error_summary_values(&v).unwrap();
        prop_assert_eq!(a.median, b.median);
        prop_assert_eq!(a.max_abs, b.max_abs);
        prop_assert!((a.mean - b.mean).abs() < 1e-12);
        prop_assert!((a.std_error - b.std_error).abs() < 1e-12);
    }

    #[test]
    fn sentiment_stays_between_start_and_target(
        s0 in 100.0f64..5000.0,
        x in 100.0f64..5000.0,
        q in 0.05f64..0.95,
        beta in 0.1f64..20.0,
        delta in -0.4f64..0.9,
    ) {
        let p = KineticParams::new(q, beta, delta, 0.0).unwrap();
        let f = ForcingPath::constant(x, 3.0).unwrap();
        let path = sentiment_closed_form(&p, &f, s0, &uniform_grid(3.0, 30)).unwrap();
        let target = p.target(x);
        let (lo, hi) = (s0.min(target), s0.max(target));
        let mut prev_gap = (s0 - target).abs();
        for s in &path.s_values {
            prop_assert!(*s >= lo * (1.0 - 1e-12) && *s <= hi * (1.0 + 1e-12));
            let gap = (s - target).abs();
            prop_assert!(gap <= prev_gap * (1.0 + 1e-12) + 1e-9);
            prev_gap = gap;
        }
    }

    #[test]
    fn corrected_variance_is_nonnegative(
        s0 in 500.0f64..4000.0,
        q in 0.05f64..0.95,
        beta in 0.1f64..20.0,
        alpha in 0.0f64..5.0,
        v0 in 0.0f64..1e5,
    ) {
        let p = KineticParams::new(q, beta, 0.1, alpha).unwrap();
        let f = ForcingPath::new(vec![2000.0, 2300.0, 1700.0, 2100.0], 0.5, Interpolation::Linear).unwrap();
        let grid = uniform_grid(1.5, 300);
        let s = sentiment_closed_form(&p, &f, s0, &grid).unwrap();
        let v = variance_solve(&p, &s, &f, v0, VarianceVariant::Corrected, VarianceMethod::ClosedForm).unwrap();
        prop_assert!(v.v_values.iter().all(|x| *x >= 0.0));
    }
}

//! Randomized invariants of the fitting, estimation and interval engines.

use grouped_ineq::fit_gld;
use grouped_ineq::measures::SampleQuantiles;
use grouped_ineq::quadrature::{integrate, QuadOptions};
use grouped_ineq::{
    atkinson_hat, fit, fit_li, gini_hat, group_sample, parse_grouped, qri_hat, theil_hat, wald_qri_ci, Family,
    FitMethod, GldParams, GroupedData, GroupingScheme, InputFormat, ParseOptions, RefDistribution,
};
use proptest::prelude::*;

/// Valid open-ended grouped data with bin means strictly inside each bin.
fn grouped_with_means() -> impl Strategy<Value = GroupedData<f64>> {
    (2usize..9)
        .prop_flat_map(|bins| {
            (
                0.0f64..5.0,
                prop::collection::vec(0.2f64..10.0, bins - 1),
                prop::collection::vec(1u64..2000, bins),
                prop::collection::vec(0.05f64..0.95, bins - 1),
                0.1f64..20.0,
            )
        })
        .prop_map(|(start, widths, counts, fracs, tail_excess)| {
            let mut b = vec![start];
            for w in &widths {
                b.push(b.last().unwrap() + w);
            }
            let mut means: Vec<f64> = fracs.iter().enumerate().map(|(j, f)| b[j] + f * widths[j]).collect();
            means.push(b.last().unwrap() + tail_excess);
            b.push(f64::INFINITY);
            GroupedData::new(b, counts, Some(means), "").unwrap()
        })
}

fn bisect(cdf: impl Fn(f64) -> f64, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn li_cdf_inverts_quantile(g in grouped_with_means(), p in 0.001f64..0.999) {
        let li = fit_li(&g).unwrap();
        let x = li.quantile(p).unwrap();
        prop_assert!((li.cdf(x) - p).abs() <= 1e-9, "p = {p}, x = {x}, F(x) = {}", li.cdf(x));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn li_density_integrates_to_one(g in grouped_with_means()) {
        let li = fit_li(&g).unwrap();
        let b = li.boundaries();
        let opts = QuadOptions { rel_tol: 1e-14, abs_tol: 1e-16, max_intervals: 200 };
        let mut total = li.tail().unwrap().eta;
        for j in 0..b.len() - 2 {
            total += integrate(|x| li.density(x), b[j], b[j + 1], &opts).unwrap().value;
        }
        prop_assert!((total - 1.0).abs() <= 1e-12, "total {total}");
        let analytic: f64 = (0..b.len() - 1).map(|j| li.bin_mass(j)).sum();
        prop_assert!((analytic - 1.0).abs() <= 1e-12, "analytic {analytic}");
    }

    #[test]
    fn li_closed_form_quantile_matches_bisection(g in grouped_with_means(), p in 0.001f64..0.999) {
        let li = fit_li(&g).unwrap();
        let b = li.boundaries();
        let cum = li.cumulative();
        let j = cum.partition_point(|&c| c <= p).clamp(1, b.len() - 1) - 1;
        prop_assume!(j + 2 < b.len());
        let x = bisect(|x| li.cdf(x), p, b[j], b[j + 1]);
        let q = li.quantile(p).unwrap();
        prop_assert!((q - x).abs() <= 1e-10 * x.abs().max(1.0), "closed form {q}, bisection {x}");
    }

    #[test]
    fn fitted_quantiles_are_monotone(g in grouped_with_means()) {
        for method in [FitMethod::Li, FitMethod::Gld] {
            let Ok(f) = fit(&g, method) else { continue };
            let mut prev = f64::NEG_INFINITY;
            for i in 1..10_000 {
                let q = f.dist.quantile(i as f64 / 10_000.0).unwrap();
                prop_assert!(q >= prev, "{method:?} decreases at {i}: {prev} then {q}");
                prev = q;
            }
        }
    }

    #[test]
    fn estimators_are_scale_invariant(
        x in prop::collection::vec(0.01f64..1000.0, 2..200),
        c in prop::sample::select(vec![1e-3, 1.0, 1e6]),
    ) {
        let y: Vec<f64> = x.iter().map(|v| v * c).collect();
        let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(f64::MIN_POSITIVE);
        prop_assert!(rel(gini_hat(&x).unwrap(), gini_hat(&y).unwrap()) <= 1e-12);
        prop_assert!(rel(theil_hat(&x).unwrap(), theil_hat(&y).unwrap()) <= 1e-12);
        prop_assert!(rel(atkinson_hat(&x, 0.5).unwrap(), atkinson_hat(&y, 0.5).unwrap()) <= 1e-12);
        let (qx, qy) = (SampleQuantiles::new(&x), SampleQuantiles::new(&y));
        let ix: f64 = qri_hat(|p| Ok(qx.quantile(p)), 100).unwrap();
        let iy: f64 = qri_hat(|p| Ok(qy.quantile(p)), 100).unwrap();
        prop_assert!(rel(ix, iy) <= 1e-12, "{ix} vs {iy}");
    }

    #[test]
    fn estimators_ignore_order(x in prop::collection::vec(0.01f64..1000.0, 2..100), seed in any::<u64>()) {
        let mut y = x.clone();
        let k = (seed as usize) % y.len();
        y.rotate_left(k);
        y.reverse();
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-13 * a.abs().max(1.0);
        prop_assert!(close(gini_hat(&x).unwrap(), gini_hat(&y).unwrap()));
        prop_assert!(close(theil_hat(&x).unwrap(), theil_hat(&y).unwrap()));
        prop_assert!(close(atkinson_hat(&x, 0.5).unwrap(), atkinson_hat(&y, 0.5).unwrap()));
    }

    #[test]
    fn regressive_transfer_never_lowers_inequality(
        x in prop::collection::vec(1.0f64..100.0, 10),
        share in 0.0f64..1.0,
    ) {
        let mut y = x.clone();
        let (lo, hi) = (
            (0..10).min_by(|&a, &b| x[a].total_cmp(&x[b])).unwrap(),
            (0..10).max_by(|&a, &b| x[a].total_cmp(&x[b])).unwrap(),
        );
        prop_assume!(lo != hi);
        let t = share * (x[lo] - 0.5);
        y[lo] -= t;
        y[hi] += t;
        prop_assert!(gini_hat(&y).unwrap() >= gini_hat(&x).unwrap() - 1e-12);
        prop_assert!(theil_hat(&y).unwrap() >= theil_hat(&x).unwrap() - 1e-12);
    }

    #[test]
    fn grouping_keeps_every_observation(x in prop::collection::vec(0.01f64..1e4, 10..400)) {
        for scheme in [GroupingScheme::Quintiles, GroupingScheme::Deciles] {
            let Ok(g) = group_sample(&x, scheme, true) else { continue };
            prop_assert_eq!(g.total(), x.len() as u64);
            let mut distinct = x.clone();
            distinct.sort_by(f64::total_cmp);
            distinct.dedup();
            if distinct.len() == x.len() {
                let target = x.len() as f64 / scheme.bins() as f64;
                for &c in g.counts() {
                    prop_assert!((c as f64 - target).abs() <= 1.0, "{:?}", g.counts());
                }
            }
        }
    }

    #[test]
    fn grouped_csv_round_trips(g in grouped_with_means()) {
        let text = g.to_bins_csv();
        let back: GroupedData<f64> = parse_grouped(&text, InputFormat::BinsCsv, &ParseOptions::default()).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn wald_interval_is_exactly_symmetric(g in grouped_with_means(), n in 50usize..10_000) {
        let li = fit(&g, FitMethod::Li).unwrap().dist;
        let Ok(w) = wald_qri_ci(&li, n, 0.95, 100) else { return Ok(()) };
        prop_assert_eq!(w.upper - w.point, w.point - w.lower);
    }
}

#[test]
fn qri_grid_of_100_is_adequate() {
    for d in grouped_ineq::distributions::study_distributions::<f64>() {
        let coarse = qri_hat(|p| d.quantile(p), 100).unwrap();
        let fine = qri_hat(|p| d.quantile(p), 100_000).unwrap();
        assert!((coarse - fine).abs() < 1e-3, "{d}: {coarse} vs {fine}");
    }
}

#[test]
fn gld_recovers_its_own_boundaries() {
    for (lambda, eta, alpha, beta) in [(0.0, 1.0, 0.2, 0.2), (5.0, 0.5, 0.1, 0.4), (10.0, 2.0, 0.6, 0.05)] {
        let truth = GldParams::new(lambda, eta, alpha, beta).unwrap();
        let (lo, hi) = truth.support();
        let mut b = vec![lo];
        b.extend((1..10).map(|k| truth.quantile(k as f64 / 10.0).unwrap()));
        b.push(hi);
        let g = GroupedData::new(b.clone(), vec![100; 10], None, "").unwrap();
        let est = fit_gld(&g).unwrap().params;
        let spread = b[9] - b[1];
        for k in 1..10 {
            let (want, got) = (b[k], est.quantile(k as f64 / 10.0).unwrap());
            let scale = want.abs().max(1e-3 * spread);
            assert!((got - want).abs() <= 0.01 * scale, "k = {k}: {got} vs {want}");
        }
    }
}

#[test]
fn gld_on_exponential_deciles_finds_the_median() {
    let d = RefDistribution::exponential(1.0).unwrap();
    let mut b = vec![0.0];
    b.extend((1..10).map(|k| d.quantile(k as f64 / 10.0).unwrap()));
    b.push(f64::INFINITY);
    let g = GroupedData::new(b, vec![100; 10], None, "").unwrap();
    let est = fit_gld(&g).unwrap().params;
    let median = est.quantile(0.5).unwrap();
    assert!((median / 2f64.ln() - 1.0).abs() < 0.05, "median {median}");
}

#[test]
fn li_rarely_fails_on_study_distributions() {
    use grouped_ineq::sim::draw_sample;
    use grouped_ineq::{plug_in, rng::derive_seed};
    let reps = 300;
    for family in Family::ALL.into_iter().filter(|&f| f != Family::ChiSquare) {
        let d = RefDistribution::<f64>::with_defaults(family);
        let failures = (0..reps)
            .filter(|&r| {
                let x = draw_sample(&d, 100, derive_seed(77, r)).unwrap();
                let ok = group_sample(&x, GroupingScheme::Quintiles, true)
                    .and_then(|g| fit(&g, FitMethod::Li))
                    .and_then(|f| plug_in(&f.dist, 0.5, 100, 2000).and(wald_qri_ci(&f.dist, 100, 0.95, 100)));
                ok.is_err()
            })
            .count();
        assert!(failures * 100 < reps as usize, "{family:?}: {failures} failures in {reps}");
    }
}

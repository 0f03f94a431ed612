use lapconv::arith::{seq_perfect_powers, sieve_von_mangoldt};
use lapconv::explicit::{derivative_moment, extra_terms_zeta0, general_weight_terms, hl_corollary_eval};
use lapconv::identity::weighted_sum_2;
use lapconv::quadrature::Integrator;
use lapconv::weight::Weight;
use lapconv::zeros::ZeroTable;

fn lambda_grid() -> Vec<f64> {
    (1..=16).map(|i| 200.0 * i as f64).collect()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[test]
fn weighted_residual_is_bounded_by_second_moment() {
    let zeros = ZeroTable::bundled().truncated(100);
    let q = Integrator::default();
    let lam = sieve_von_mangoldt(3200).unwrap();
    for k in [2.0, 3.0] {
        let f = Weight::cesaro(k).unwrap();
        let moment = derivative_moment(&f, 2, 2.0.into(), 0.0, 1.0, &q).unwrap().re.abs();
        let cs: Vec<f64> = lambda_grid()
            .into_iter()
            .map(|l| {
                let lhs = weighted_sum_2(&lam, &lam, &f, l, 0.0, 1.0).unwrap();
                let t = general_weight_terms(&f, l, (0.0, 1.0), &zeros, &q).unwrap();
                (lhs - t.explicit().re).abs() / (l * moment)
            })
            .collect();
        let hi = cs.iter().copied().fold(0.0, f64::max);
        let lo = cs.iter().copied().fold(f64::MAX, f64::min);
        // The constant settles near (ζ′/ζ)(0) = log 2π.
        assert!(hi < 2.0 && lo > 1.5, "k={k}: C in [{lo}, {hi}]");
        assert!(hi / lo < 1.1, "k={k}: C in [{lo}, {hi}]");
    }
}

#[test]
fn zeta0_terms_sharpen_the_expansion() {
    let zeros = ZeroTable::bundled().truncated(100);
    let q = Integrator::default();
    let lam = sieve_von_mangoldt(3200).unwrap();
    let f = Weight::cesaro(2.0).unwrap();
    let (mut without, mut with) = (Vec::new(), Vec::new());
    for l in lambda_grid() {
        let lhs = weighted_sum_2(&lam, &lam, &f, l, 0.0, 1.0).unwrap();
        let t = general_weight_terms(&f, l, (0.0, 1.0), &zeros, &q).unwrap();
        without.push((lhs - t.explicit().re).abs());
        let extra = extra_terms_zeta0(l, &f, (0.0, 1.0), &zeros, &q).unwrap();
        with.push((lhs - t.with_extra(extra).explicit().re).abs());
    }
    assert!(median(with.clone()) <= median(without.clone()), "{with:?} {without:?}");
}

#[test]
fn weighted_squares_main_term_dominates() {
    let zeros = ZeroTable::bundled();
    let q = Integrator::default();
    let f = Weight::cesaro(3.0).unwrap();
    let lambda = 100.0;
    let lam = sieve_von_mangoldt(100).unwrap();
    let r2 = seq_perfect_powers(100, 2).unwrap();
    let lhs = weighted_sum_2(&lam, &r2, &f, lambda, 0.0, 1.0).unwrap();
    let t = hl_corollary_eval(&f, lambda, 1.0, 2, &zeros, 100, Some(lhs), &q).unwrap();
    let main = t.m0.re;
    let residual = t.residual_value().unwrap().re;
    assert!(residual.abs() <= 0.1 * main.abs(), "residual {residual} main {main}");
    assert!(t.max_imag_ratio() <= 1e-9);
}

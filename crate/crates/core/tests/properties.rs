//! Property tests for the structural invariants: parser round trips,
//! operator algebra, characteristic-exponent laws, distributional additivity
//! and the Plancherel identity.

use levyfield::fft::NdFft;
use levyfield::grid::{GridData, GridSpec};
use levyfield::kernel::kernel_fft;
use levyfield::levy::{simulate_cells, LevyMeasureSpec, LevyTriplet};
use levyfield::operator::apply_operator;
use levyfield::poly::MultiPolynomial;
use proptest::prelude::*;

fn arb_poly(dim: usize, max_terms: usize) -> impl Strategy<Value = MultiPolynomial<f64>> {
    let term = (
        proptest::collection::vec(0u32..4, dim),
        (-100i32..100).prop_map(|c| c as f64 / 8.0),
    );
    proptest::collection::vec(term, 1..=max_terms)
        .prop_map(move |terms| MultiPolynomial::new(dim, terms).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn poly_print_parse_round_trip(p in arb_poly(3, 6)) {
        let q = MultiPolynomial::<f64>::parse(&p.to_string(), 3).unwrap();
        prop_assert_eq!(p, q);
    }

    #[test]
    fn adjoint_is_involution_and_matches_reflection(p in arb_poly(2, 6), x in -3.0f64..3.0, y in -3.0f64..3.0) {
        prop_assert_eq!(p.adjoint().adjoint(), p.clone());
        // adjoint(p)(i xi) == p(-i xi)
        let a = p.adjoint().symbol(&[x, y], false);
        let b = p.symbol(&[x, y], true);
        prop_assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
    }

    #[test]
    fn symbol_multiplicativity_on_grid(pa in arb_poly(1, 3), pb in arb_poly(1, 3)) {
        let n = 256;
        let h = 0.1;
        let spec = GridSpec::new(vec![n], vec![h], vec![-(n as f64) * h / 2.0]).unwrap();
        let f = GridData::new(
            spec.clone(),
            (0..n)
                .map(|j| {
                    let t = -(n as f64) * h / 2.0 + j as f64 * h;
                    (-t * t / 2.0).exp()
                })
                .collect(),
        )
        .unwrap();
        let mut fft = NdFft::new();
        let ab = pa.mul(&pb);
        let direct = apply_operator(&ab, &f, false, &mut fft).unwrap();
        let chained = apply_operator(
            &pa,
            &apply_operator(&pb, &f, false, &mut fft).unwrap(),
            false,
            &mut fft,
        )
        .unwrap();
        let scale = direct.max_abs().max(1.0);
        for (a, b) in direct.values.iter().zip(&chained.values) {
            prop_assert!((a - b).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn char_exponent_laws(
        a in 0.0f64..2.0,
        gamma in -1.0f64..1.0,
        theta in 0.5f64..4.0,
        z in 0.01f64..5.0,
    ) {
        let nu = LevyMeasureSpec::two_sided_pareto(theta, 1.0, 0.6, 0.4).unwrap();
        let t = LevyTriplet::new(a, gamma, nu).unwrap();
        let zero = t.char_exponent(0.0).unwrap();
        prop_assert!(zero.norm() < 1e-12);
        let plus = t.char_exponent(z).unwrap();
        let minus = t.char_exponent(-z).unwrap();
        prop_assert!((minus - plus.conj()).norm() <= 1e-7 * (1.0 + plus.norm()));
        prop_assert!(plus.re <= 1e-10);
    }
}

/// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
fn ks_two_sample(mut a: Vec<f64>, mut b: Vec<f64>) -> (f64, f64) {
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (n1, n2) = (a.len(), b.len());
    let mut i = 0;
    let mut j = 0;
    let mut d: f64 = 0.0;
    while i < n1 && j < n2 {
        let x = a[i].min(b[j]);
        while i < n1 && a[i] <= x {
            i += 1;
        }
        while j < n2 && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n1 as f64 - j as f64 / n2 as f64).abs());
    }
    let ne = (n1 as f64 * n2 as f64) / (n1 as f64 + n2 as f64);
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    let mut p = 0.0;
    for k in 1..101 {
        let term = 2.0 * (-1.0f64).powi(k - 1) * (-2.0 * (k as f64) * (k as f64) * lambda * lambda).exp();
        p += term;
        if term.abs() < 1e-12 {
            break;
        }
    }
    (d, p.clamp(0.0, 1.0))
}

#[test]
fn additivity_in_law_of_disjoint_grids() {
    // cells from two disjoint grids vs cells from the union grid: same law
    let t = LevyTriplet::new(
        0.3,
        0.1,
        LevyMeasureSpec::atoms(vec![(1.5, 0.8), (-0.7, 0.5)]).unwrap(),
    )
    .unwrap();
    let half = GridSpec::new(vec![4000], vec![0.05], vec![0.0]).unwrap();
    let half2 = GridSpec::new(vec![4000], vec![0.05], vec![200.0]).unwrap();
    let union = GridSpec::new(vec![8000], vec![0.05], vec![0.0]).unwrap();
    let mut concat = simulate_cells(&t, &half, 0.25, 11, 0).unwrap().values;
    concat.extend(simulate_cells(&t, &half2, 0.25, 11, 1).unwrap().values);
    let joint = simulate_cells(&t, &union, 0.25, 12, 0).unwrap().values;
    let (d, p) = ks_two_sample(concat, joint);
    assert!(p > 0.01, "KS statistic {d}, p = {p}");
}

#[test]
fn empirical_cf_of_cells_matches_exponent() {
    // sup_z |emp CF - exp(v psi(z))| <= 4/sqrt(N) + eps(delta) on z in [-5,5]
    let delta = 0.1f64;
    let nu = LevyMeasureSpec::GammaSubordinator { shape: 1.0, rate: 1.0 };
    let t = LevyTriplet::new(0.2, 0.0, nu).unwrap();
    let n_cells = 100_000usize;
    let v = 0.05f64;
    let spec = GridSpec::new(vec![n_cells], vec![v], vec![0.0]).unwrap();
    let noise = simulate_cells(&t, &spec, delta, 5, 0).unwrap();
    // Asmussen-Rosinski-style third-cumulant bound for the small-jump swap
    let m3 = {
        // int_{|r|<=delta} |r|^3 nu(dr) for the gamma subordinator
        let lam = 1.0f64;
        // int_0^delta r^2 e^{-lam r} dr
        let d2 = delta * delta;
        (2.0 - (-lam * delta).exp() * (d2 + 2.0 * delta + 2.0)) / 1.0
    };
    let n = n_cells as f64;
    for z in [-5.0f64, -2.0, -0.5, 0.5, 1.0, 3.0, 5.0] {
        let mut emp_re = 0.0;
        let mut emp_im = 0.0;
        for &x in &noise.values {
            emp_re += (z * x).cos();
            emp_im += (z * x).sin();
        }
        emp_re /= n;
        emp_im /= n;
        let psi = t.char_exponent(z).unwrap();
        let theo = (psi * v).exp();
        let eps_delta = v * z.abs().powi(3) * m3 / 6.0;
        let bound = 4.0 / n.sqrt() + eps_delta;
        let dev = ((emp_re - theo.re).powi(2) + (emp_im - theo.im).powi(2)).sqrt();
        assert!(dev <= bound, "z = {z}: deviation {dev} vs bound {bound}");
    }
}

#[test]
fn plancherel_for_synthesized_kernel() {
    // cellvol * sum G^2 == (2 pi)^{-1} int |q/p|^2 within 1%
    let p = MultiPolynomial::<f64>::parse("1 + x1", 1).unwrap();
    let q = MultiPolynomial::constant(1, 1.0);
    let spec = GridSpec::centered(1, 1 << 13, 80.0 / (1 << 13) as f64).unwrap();
    let mut fft = NdFft::new();
    let k = kernel_fft(&p, &q, &spec, &mut fft).unwrap();
    let lhs: f64 = k.values.iter().map(|v| v * v).sum::<f64>() * spec.cell_volume();
    // (1/2pi) int dxi/(1+xi^2) = 1/2
    assert!((lhs - 0.5).abs() / 0.5 < 0.01, "Plancherel lhs {lhs}");
}

#[test]
fn f32_instantiation_smoke() {
    // the numerical core is generic; run a coarse pass at f32
    let p = MultiPolynomial::<f32>::parse("1 + x1", 1).unwrap();
    let q = MultiPolynomial::<f32>::constant(1, 1.0);
    let spec = GridSpec::<f32>::centered(1, 1024, 40.0 / 1024.0).unwrap();
    let mut fft = NdFft::<f32>::new();
    let k = kernel_fft(&p, &q, &spec, &mut fft).unwrap();
    let mut sup = 0.0f32;
    for j in 0..1024 {
        let t = spec.wrap_coord(0, j);
        if (0.0..=5.0).contains(&t) {
            sup = sup.max((k.values[j] - (-t).exp()).abs());
        }
    }
    assert!(sup <= 1e-3, "f32 sup error {sup:e}");
    let t = LevyTriplet::<f32>::new(1.0, 0.0, LevyMeasureSpec::none()).unwrap();
    let n = simulate_cells(&t, &spec, 0.5, 1, 0).unwrap();
    assert_eq!(n.values.len(), 1024);
}

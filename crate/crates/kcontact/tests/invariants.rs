use exprcore::{equivalent_on_domain, simplify, Expr, SampleDomain, VectorField};
use kcontact::{
    dissipation_law_residual, euler_lagrange_expressions, hdw_family, inverse_problem_lagrangian,
    jet2, k_contact_forms, k_legendre, symmetry_dissipation_map, Axis, DiscreteSection, KContactHamiltonian,
    KContactLagrangian,
};
use proptest::prelude::*;

fn smooth(vars: &'static [&'static str]) -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0..vars.len()).prop_map(move |i| Expr::var(vars[i])),
        (-4i32..=4).prop_map(|k| Expr::constant(k as f64 / 2.0)),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            inner.clone().prop_map(|a| a.sin()),
            inner.prop_map(|a| a.powi(2)),
        ]
    })
}

fn half(k: i32) -> Expr {
    Expr::constant(k as f64 / 2.0)
}

fn polynomial(u: &'static str) -> impl Strategy<Value = Expr> {
    prop::collection::vec(-4i32..=4, 1..4).prop_map(move |c| {
        simplify(&c.iter().enumerate().fold(Expr::zero(), |acc, (n, k)| acc + half(*k) * Expr::var(u).powi(n as i32)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn forms_carry_the_negated_momenta(l in smooth(&["u", "ut", "ux", "st", "sx"])) {
        let lag = KContactLagrangian::new(&["u"], &[&["ut", "ux"]], &["st", "sx"], &[], l, SampleDomain::default()).unwrap();
        let p = k_legendre(&lag);
        for (a, eta) in k_contact_forms(&lag).iter().enumerate() {
            prop_assert!(equivalent_on_domain(&eta.component("u"), &-&p[0][a], lag.domain()).unwrap());
        }
    }

    #[test]
    fn one_parameter_family_is_the_contact_field(
        kin in 1..=4i32,
        v in smooth(&["q", "s"]),
        b in smooth(&["q", "s"]),
    ) {
        let h = simplify(&(half(kin) * Expr::var("p").powi(2) + b * Expr::var("p") + v));
        let sys = KContactHamiltonian::darboux(&["q"], &[&["p"]], &["s"], &[], h.clone(), SampleDomain::default()).unwrap();
        let x = hdw_family(&sys).unwrap().single_field().unwrap();
        let c1 = contact1::ContactHamiltonian::new(&["q"], &["p"], "s", &[], h, SampleDomain::default()).unwrap();
        let y = contact1::hamiltonian_field(&c1);
        for k in ["q", "p", "s"] {
            prop_assert!(equivalent_on_domain(&x.component(k), &y.component(k), sys.domain()).unwrap());
        }
    }

    #[test]
    fn inverse_problem_reproduces_the_equation(
        diag in prop::collection::vec(prop_oneof![1..=4i32, -4..=-1i32], 2),
        off in -1..=1i32,
        d in prop::collection::vec(-4..=4i32, 2),
        g in polynomial("u"),
    ) {
        let a = vec![vec![half(diag[0] * 2), half(off)], vec![half(off), half(diag[1] * 2)]];
        let dv: Vec<Expr> = d.iter().map(|k| half(*k)).collect();
        let lag = inverse_problem_lagrangian("u", &["t", "x"], &a, &dv, &g, None, &[], SampleDomain::default()).unwrap();
        let el = euler_lagrange_expressions(&lag, &["t", "x"]).unwrap();
        let indep = ["t", "x"];
        let mut want = g.clone();
        for al in 0..2 {
            want = want + &dv[al] * Expr::var(&format!("u_{}", indep[al]));
            for be in 0..2 {
                want = want + &a[al][be] * Expr::var(&jet2("u", &indep, al, be));
            }
        }
        prop_assert!(equivalent_on_domain(&el.fields[0], &want, lag.domain()).unwrap());
    }

    #[test]
    fn damped_modes_converge_at_second_order(
        gamma in 0.0..0.8f64,
        wave in 1.0..3.0f64,
        tau in 0.5..2.0f64,
    ) {
        let h = simplify(&exprcore::expr("pt^2/2 - px^2/(2*tau) + gamma*st"));
        let sys = KContactHamiltonian::darboux(&["u"], &[&["pt", "px"]], &["st", "sx"], &["tau", "gamma"], h, SampleDomain::default()).unwrap();
        let omega = (tau * wave * wave - gamma * gamma / 4.0).sqrt();
        let section = |n: usize| {
            let axes = vec![Axis::new("t", 0.0, 1.0 / (n - 1) as f64, n), Axis::new("x", 0.0, 1.0 / (n - 1) as f64, n)];
            DiscreteSection::from_fn(axes, &["u", "pt", "px"], |p| {
                let e = (-gamma * p[0] / 2.0).exp();
                let tt = e * (omega * p[0]).cos();
                let dt = e * (-gamma / 2.0 * (omega * p[0]).cos() - omega * (omega * p[0]).sin());
                vec![tt * (wave * p[1]).sin(), dt * (wave * p[1]).sin(), -tau * tt * wave * (wave * p[1]).cos()]
            })
            .unwrap()
            .with_params(&[("tau", tau), ("gamma", gamma)])
        };
        let f = vec![Expr::var("pt"), Expr::var("px")];
        let (a, b) = (section(21), section(41));
        let (ra, rb) = (dissipation_law_residual(&sys, &f, &a).unwrap(), dissipation_law_residual(&sys, &f, &b).unwrap());
        prop_assert!(ra.max_abs / rb.max_abs > 3.0, "{} {}", ra.max_abs, rb.max_abs);
    }
}

#[test]
fn trivial_cases() {
    let d = SampleDomain::default();
    let lag = KContactLagrangian::new(&["u"], &[&["ut", "ux"]], &["st", "sx"], &[], exprcore::expr("u^2 + st"), d.clone())
        .unwrap();
    assert!(k_legendre(&lag).iter().flatten().all(Expr::is_zero));
    assert!(symmetry_dissipation_map(&lag, &VectorField::new()).iter().all(|f| f.is_zero()));

    let h = exprcore::expr("0.5*(pt^2 - px^2) + u^2");
    let sys = KContactHamiltonian::darboux(&["u"], &[&["pt", "px"]], &["st", "sx"], &[], h, d.clone()).unwrap();
    let fam = hdw_family(&sys).unwrap();
    assert!(equivalent_on_domain(&fam.traces[0].value, &exprcore::expr("-2*u"), &d).unwrap());

    let axes = vec![Axis::new("t", 0.0, 0.1, 4), Axis::new("x", 0.0, 0.1, 4)];
    let sec = DiscreteSection::from_fn(axes, &["u", "pt", "px", "st", "sx"], |p| vec![p[0], 1.0, 0.0, 0.0, 0.0]).unwrap();
    let r = dissipation_law_residual(&sys, &[Expr::constant(2.0), Expr::constant(-1.0)], &sec).unwrap();
    assert_eq!(r.max_abs, 0.0);

    let free = inverse_problem_lagrangian(
        "u",
        &["t", "x"],
        &[vec![Expr::one(), Expr::zero()], vec![Expr::zero(), Expr::constant(-1.0)]],
        &[Expr::zero(), Expr::zero()],
        &Expr::zero(),
        None,
        &[],
        d,
    )
    .unwrap();
    assert!(!free.lagrangian().contains_var("st") && !free.lagrangian().contains_var("sx"));
}

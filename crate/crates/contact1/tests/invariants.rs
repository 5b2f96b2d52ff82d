use contact1::{
    check_defining_equations, check_legendre_pushforward, check_quantity, euler_lagrange_field, hamiltonian_field,
    legendre_map, ContactHamiltonian, ContactLagrangian, ContactSystem, QuantityKind,
};
use exprcore::{simplify, Expr, SampleDomain};
use proptest::prelude::*;

/// Smooth expressions over the given variables.
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
            inner.clone().prop_map(|a| a.cos()),
            inner.prop_map(|a| a.powi(2)),
        ]
    })
}

fn hamiltonian(h: Expr) -> ContactHamiltonian {
    ContactHamiltonian::new(&["q"], &["p"], "s", &[], simplify(&h), SampleDomain::default()).unwrap()
}

fn lagrangian(l: Expr) -> ContactLagrangian {
    ContactLagrangian::new(&["q"], &["v"], "s", &[], simplify(&l), SampleDomain::default()).unwrap()
}

/// `½ a v² + b(q, s) v + U(q, s)` with `a > 0`: hyperregular and affine in `p`.
fn regular_lagrangian() -> impl Strategy<Value = ContactLagrangian> {
    (1..=4i32, smooth(&["q", "s"]), smooth(&["q", "s"]))
        .prop_map(|(a, b, u)| lagrangian(Expr::constant(a as f64 / 2.0) * Expr::var("v").powi(2) + b * Expr::var("v") + u))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn defining_equations_hold(h in smooth(&["q", "p", "s"])) {
        let sys = hamiltonian(h);
        prop_assert!(check_defining_equations(&sys, &hamiltonian_field(&sys)).unwrap());
    }

    #[test]
    fn energy_is_dissipated(h in smooth(&["q", "p", "s"])) {
        let sys = hamiltonian(h);
        let v = check_quantity(&sys, sys.hamiltonian(), QuantityKind::Dissipated).unwrap();
        prop_assert!(v.holds, "residual {}", v.residual);
    }

    #[test]
    fn euler_lagrange_field_is_second_order(lag in regular_lagrangian()) {
        let x = euler_lagrange_field(&lag).unwrap();
        prop_assert_eq!(x.component("q"), Expr::var("v"));
    }

    #[test]
    fn legendre_pushforward_matches(lag in regular_lagrangian()) {
        prop_assert!(check_legendre_pushforward(&lag).unwrap());
    }

    #[test]
    fn cyclic_momentum_is_dissipated(a in 1..=4i32, b in smooth(&["s"]), u in smooth(&["s"])) {
        let lag = lagrangian(Expr::constant(a as f64) * Expr::var("v").powi(2) + b * Expr::var("v") + u);
        let p = &legendre_map(&lag)[0];
        prop_assert!(check_quantity(&lag, p, QuantityKind::Dissipated).unwrap().holds);
    }

    #[test]
    fn ratio_and_product_laws(h in smooth(&["p", "s"])) {
        // q is cyclic, so both p and H are dissipated
        let h = simplify(&(h + Expr::var("p").powi(2)));
        let domain = SampleDomain::default().with_interval("p", 0.5, 2.0).unwrap();
        let sys = ContactHamiltonian::new(&["q"], &["p"], "s", &[], h, domain).unwrap();
        let f1 = sys.hamiltonian().clone();
        let f2 = Expr::var("p");
        prop_assert!(check_quantity(&sys, &f1, QuantityKind::Dissipated).unwrap().holds);
        prop_assert!(check_quantity(&sys, &f2, QuantityKind::Dissipated).unwrap().holds);
        let g = &f1 / &f2;
        prop_assert!(check_quantity(&sys, &g, QuantityKind::Conserved).unwrap().holds);
        prop_assert!(check_quantity(&sys, &(&f1 * &g), QuantityKind::Dissipated).unwrap().holds);
        prop_assert!(sys.dissipation_rate() == exprcore::differentiate(sys.hamiltonian(), "s"));
    }
}

use std::f64::consts::{LN_2, PI};

use pnpcns_core::diagnostics::{
    dissipation_d1, dissipation_d1_parts, dissipation_d2_parts, energy_e1, entropy_e2, record, residuals,
    velocity_exponents, velocity_norm_w1q,
};
use pnpcns_core::eos::relative_entropy;
use pnpcns_core::{Backend, Error, Grid, Model, PhysParams, RegParams, ScalarField, State, VectorField};

fn model(grid: Grid, backend: Backend, phys: PhysParams) -> Model {
    Model::new(grid, backend, phys, RegParams::default()).unwrap()
}

fn unit_model(dim: usize, n: usize) -> Model {
    model(Grid::unit(dim, n).unwrap(), Backend::Centered2, PhysParams::default())
}

fn uniform(grid: Grid, rho: f64, u: [f64; 2], c: f64) -> State {
    let comps = (0..grid.dim()).map(|a| ScalarField::constant(grid, u[a])).collect();
    State::from_fields(
        0.0,
        ScalarField::constant(grid, rho),
        VectorField::from_components(comps).unwrap(),
        ScalarField::constant(grid, c),
        ScalarField::constant(grid, c),
    )
    .unwrap()
}

fn sigma2() -> f64 {
    2.0 * LN_2 - 1.0
}

/// Composite midpoint rule on `[0, 1)`, fine enough to serve as ground truth.
fn quad(f: impl Fn(f64) -> f64) -> f64 {
    let n = 1 << 20;
    let h = 1.0 / n as f64;
    (0..n).map(|i| f((i as f64 + 0.5) * h)).sum::<f64>() * h
}

#[test]
fn energy_examples() {
    for dim in [1, 2] {
        let m = unit_model(dim, 16);
        let g = *m.grid();
        assert_eq!(energy_e1(&m, &State::rest(g)).unwrap(), 0.0);

        let moving = uniform(g, 1.0, [0.3, -0.4], 1.0);
        let speed2 = if dim == 1 { 0.09 } else { 0.25 };
        assert!((energy_e1(&m, &moving).unwrap() - speed2 / 2.0).abs() < 1e-14);

        let salty = uniform(g, 1.0, [0.0, 0.0], 2.0);
        assert!((energy_e1(&m, &salty).unwrap() - 2.0 * sigma2()).abs() < 1e-14);
        assert!((2.0 * sigma2() - 0.772589).abs() < 1e-6);
    }
}

#[test]
fn entropy_examples() {
    let phys = PhysParams { mu: 0.7, a_plus: 2.0, a_minus: 0.5, ..PhysParams::default() };
    let g = Grid::unit(1, 32).unwrap();
    let m = model(g, Backend::Centered2, phys);
    assert_eq!(entropy_e2(&m, &State::rest(g)).unwrap(), 0.0);

    let salty = uniform(g, 1.0, [0.0, 0.0], 2.0);
    let expected = (2.0 + 2.0 * 0.7 * (1.0 / 2.0 + 1.0 / 0.5)) * sigma2();
    assert!((entropy_e2(&m, &salty).unwrap() - expected).abs() < 1e-13);
}

#[test]
fn entropy_with_vanishing_effective_velocity() {
    // u = -2 mu grad(ln rho) with the discrete gradient, so only the
    // internal energy and the relative entropies of the uniform ions remain.
    let phys = PhysParams { mu: 0.3, ..PhysParams::default() };
    for backend in [Backend::Centered2, Backend::Spectral] {
        let g = Grid::unit(1, 64).unwrap();
        let m = model(g, backend, phys);
        let rho = ScalarField::from_fn(g, |x| 1.0 + 0.2 * (2.0 * PI * x[0]).sin());
        let drho = m.ops().grad(&rho).unwrap();
        let u = drho.map_comps(|d| d.zip_map(&rho, |a, r| -2.0 * phys.mu * a / r));
        let one = ScalarField::constant(g, 1.0);
        let state = State::from_fields(0.0, rho.clone(), u, one.clone(), one).unwrap();
        let h = g.h();
        let oracle: f64 = rho
            .values()
            .iter()
            .map(|&r| {
                r * m.law.internal_energy(r).unwrap()
                    + 2.0 * phys.mu * relative_entropy(r, 1.0).unwrap() * (1.0 / phys.a_plus + 1.0 / phys.a_minus)
            })
            .sum::<f64>()
            * h;
        let e2 = entropy_e2(&m, &state).unwrap();
        assert!((e2 - oracle).abs() < 1e-14, "{backend:?}: {e2} vs {oracle}");
    }
}

#[test]
fn rest_dissipations_vanish() {
    for dim in [1, 2] {
        let m = unit_model(dim, 8);
        let rest = State::rest(*m.grid());
        assert_eq!(dissipation_d1(&m, &rest).unwrap(), 0.0);
        assert_eq!(dissipation_d2_parts(&m, &rest).unwrap().total(), 0.0);
    }
}

#[test]
fn boltzmann_profiles_have_no_ion_dissipation() {
    let phys = PhysParams { e_charge: 1.3, ..PhysParams::default() };
    let ion_d1 = |backend, n| {
        let g = Grid::unit(1, n).unwrap();
        let m = model(g, backend, phys);
        let psi = ScalarField::from_fn(g, |x| 0.4 * (2.0 * PI * x[0]).cos() + 0.1 * (4.0 * PI * x[0]).sin());
        let cp = psi.map(|p| (-phys.e_charge * p).exp());
        let cm = psi.map(|p| (phys.e_charge * p).exp());
        let mut s = State::from_fields(0.0, ScalarField::constant(g, 1.0), VectorField::zeros(g), cp, cm).unwrap();
        s.psi = psi;
        let parts = dissipation_d1_parts(&m, &s).unwrap();
        assert_eq!(parts.viscous, 0.0);
        parts.ion_plus + parts.ion_minus
    };
    assert!(ion_d1(Backend::Spectral, 32) < 1e-20);
    let (coarse, fine) = (ion_d1(Backend::Centered2, 64), ion_d1(Backend::Centered2, 128));
    assert!(fine < 1e-3);
    assert!((coarse / fine).log2() > 3.5, "{coarse} {fine}");
}

#[test]
fn shear_mode_dissipation() {
    // u = (0, a sin 2 pi x): 2 int |D(u)|^2 = 2 pi^2 a^2.
    let a = 0.3;
    let exact = 2.0 * PI * PI * a * a;
    for (backend, n, tol) in [(Backend::Spectral, 16, 1e-12), (Backend::Centered2, 256, 1e-3)] {
        let g = Grid::unit(2, n).unwrap();
        let m = model(g, backend, PhysParams::default());
        let u = VectorField::from_components(vec![
            ScalarField::zeros(g),
            ScalarField::from_fn(g, |x| a * (2.0 * PI * x[0]).sin()),
        ])
        .unwrap();
        let one = ScalarField::constant(g, 1.0);
        let s = State::from_fields(0.0, one.clone(), u, one.clone(), one).unwrap();
        let d1 = dissipation_d1(&m, &s).unwrap();
        assert!((d1 - exact).abs() < tol * exact, "{backend:?}: {d1} vs {exact}");
    }
}

#[test]
fn one_dimensional_antisymmetric_dissipation_is_zero() {
    let g = Grid::unit(1, 32).unwrap();
    let m = unit_model(1, 32);
    let u = VectorField::from_components(vec![ScalarField::from_fn(g, |x| (2.0 * PI * x[0]).sin() + 0.2)]).unwrap();
    let rho = ScalarField::from_fn(g, |x| 1.0 + 0.3 * (2.0 * PI * x[0]).cos());
    let c = ScalarField::from_fn(g, |x| 1.0 + 0.5 * (4.0 * PI * x[0]).cos());
    let s = State::from_fields(0.0, rho, u, c.clone(), c).unwrap();
    let parts = dissipation_d2_parts(&m, &s).unwrap();
    assert_eq!(parts.antisym, 0.0);
    assert_eq!(record(&m, &s, None).unwrap().d2_antisym, 0.0);
}

#[test]
fn bd_dissipation_of_neutral_ion_mode() {
    // c+ = c- = 1 + sin(2 pi x)/2: D2 = (4 mu + A+ + A-) int |c'|^2 / c.
    let phys = PhysParams { mu: 0.5, a_plus: 1.5, a_minus: 0.75, ..PhysParams::default() };
    let weight = 4.0 * phys.mu + phys.a_plus + phys.a_minus;
    let exact = weight
        * quad(|x| {
            let c = 1.0 + 0.5 * (2.0 * PI * x).sin();
            let dc = PI * (2.0 * PI * x).cos();
            dc * dc / c
        });
    let d2 = |n| {
        let g = Grid::unit(1, n).unwrap();
        let m = model(g, Backend::Centered2, phys);
        let c = ScalarField::from_fn(g, |x| 1.0 + 0.5 * (2.0 * PI * x[0]).sin());
        let s = State::from_fields(0.0, ScalarField::constant(g, 1.0), VectorField::zeros(g), c.clone(), c)
            .unwrap()
            .with_potential(m.ops(), &m.phys, &m.reg, false)
            .unwrap();
        let parts = dissipation_d2_parts(&m, &s).unwrap();
        assert_eq!(parts.field, 0.0);
        assert_eq!(parts.pressure, 0.0);
        parts.total()
    };
    let (e64, e128) = ((d2(64) - exact).abs(), (d2(128) - exact).abs());
    assert!(e128 < 1e-3 * exact, "{e128}");
    assert!((e64 / e128).log2() > 1.9, "{e64} {e128}");
}

#[test]
fn velocity_norm_examples() {
    let (p, q) = velocity_exponents(1.0_f64);
    assert!((q - 24.0 / 13.0).abs() < 1e-15);
    assert!((p - 8.0 / 5.0).abs() < 1e-15);

    let m = unit_model(2, 8);
    let g = *m.grid();
    assert_eq!(velocity_norm_w1q(&m, &State::rest(g)).unwrap(), 0.0);
    let s = uniform(g, 1.0, [0.6, 0.8], 1.0);
    assert!((velocity_norm_w1q(&m, &s).unwrap() - 1.0).abs() < 1e-14);

    // Single mode u = a sin(2 pi x) against quadrature of the analytic integrand.
    let a = 0.4;
    let exact = quad(|x| (a * (2.0 * PI * x).sin()).abs().powf(q) + (2.0 * PI * a * (2.0 * PI * x).cos()).abs().powf(q))
        .powf(1.0 / q);
    for (backend, n, tol) in [(Backend::Centered2, 512, 1e-4), (Backend::Spectral, 512, 1e-5)] {
        let g = Grid::unit(1, n).unwrap();
        let m = model(g, backend, PhysParams::default());
        let u = VectorField::from_components(vec![ScalarField::from_fn(g, |x| a * (2.0 * PI * x[0]).sin())]).unwrap();
        let one = ScalarField::constant(g, 1.0);
        let s = State::from_fields(0.0, one.clone(), u, one.clone(), one).unwrap();
        let w = velocity_norm_w1q(&m, &s).unwrap();
        assert!((w - exact).abs() < tol * exact, "{backend:?}: {w} vs {exact}");
    }
}

#[test]
fn conservation_sums_in_record() {
    let g = Grid::new(1, 32, 2.0).unwrap();
    let m = model(g, Backend::Centered2, PhysParams { e_charge: 2.0, ..PhysParams::default() });
    let cp = ScalarField::from_fn(g, |x| 1.0 + 0.5 * (PI * x[0]).cos());
    let s = State::from_fields(0.0, ScalarField::constant(g, 1.5), VectorField::zeros(g), cp, ScalarField::constant(g, 1.0))
        .unwrap()
        .with_potential(m.ops(), &m.phys, &m.reg, false)
        .unwrap();
    let r = record(&m, &s, None).unwrap();
    assert!((r.mass - 3.0).abs() < 1e-14);
    assert!((r.ion_plus - 2.0).abs() < 1e-14);
    assert!((r.ion_minus - 2.0).abs() < 1e-14);
    assert!(r.net_charge.abs() < 1e-14);
    assert_eq!((r.min_rho, r.max_rho), (1.5, 1.5));
    assert_eq!((r.r1, r.r2), (0.0, 0.0));
}

#[test]
fn residual_series_errors() {
    let m = unit_model(1, 8);
    let a = State::rest(*m.grid());
    assert!(matches!(residuals(&m, &[a.clone()]), Err(Error::MismatchedSeries(_))));
    assert!(matches!(residuals(&m, &[a.clone(), a.clone()]), Err(Error::MismatchedSeries(_))));
    let other = State::rest(Grid::unit(1, 16).unwrap());
    let mut later = other.clone();
    later.t = 1.0;
    assert!(matches!(residuals(&m, &[a.clone(), later]), Err(Error::MismatchedSeries(_))));

    let mut b = a.clone();
    b.t = 0.1;
    let (r1, r2) = residuals(&m, &[a, b]).unwrap();
    assert_eq!((r1, r2), (vec![0.0], vec![0.0]));
}

#[test]
fn entropy_rejects_vacuum() {
    let m = unit_model(1, 8);
    let mut s = State::rest(*m.grid());
    s.rho.values_mut()[3] = 0.0;
    assert!(matches!(entropy_e2(&m, &s), Err(Error::NonPositiveDensity { cell: 3, .. })));
}

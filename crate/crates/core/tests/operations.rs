//! Worked examples for each operation, checked against hand values and
//! direct quadrature.

mod common;

use std::f64::consts::{E, PI};

use common::{interval_demo, physical, shifted_nonlinearity, spectral, tag};
use nonlocal_fixpoint::verify::oracle_convolution;
use nonlocal_fixpoint::{
    brute_force_oracle, check_admissibility, kernel_spectrum, multiplier_norms, parse_expr, residual, resonance_ratio,
    Geometry, GeometryConfig, GeometryKind, GridField, KernelTransform, NonlinearitySpec, RegimeCase, ResonanceOptions,
    Saturation, SolveOptions, SpectralField, StateVector, System, SystemSpec, Verdict,
};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::SeedableRng;

const I: GeometryKind = GeometryKind::Interval;
const W: GeometryKind = GeometryKind::WholeSpace;

fn interval(modes: usize) -> Geometry {
    Geometry::new(GeometryConfig::interval(modes)).unwrap()
}

/// `int_0^{2pi} f(x) e^{-inx} dx / sqrt(2pi)` by a fine midpoint rule.
fn fourier_coefficient(f: impl Fn(f64) -> f64, n: i64) -> Complex64 {
    let m = 4096;
    let h = 2.0 * PI / m as f64;
    let sum: Complex64 = (0..m)
        .map(|j| {
            let x = (j as f64 + 0.5) * h;
            f(x) * Complex64::from_polar(1.0, -(n as f64) * x)
        })
        .sum();
    sum * h / (2.0 * PI).sqrt()
}

fn coefficient(geometry: &Geometry, field: &SpectralField, modes: &[i64]) -> Complex64 {
    field.coefficients[geometry.lattice().index_of_modes(modes).unwrap()]
}

fn single_component(geometry: Geometry, kernel: &str, regime_case: RegimeCase, a: f64, forcing: &str) -> System {
    let kind = geometry.kind();
    System::new(SystemSpec {
        geometry,
        n_plus: 1,
        kernels: vec![
            physical(0, kernel, tag(kind, regime_case, a)),
            physical(1, "0", tag(kind, RegimeCase::IV, 1.0)),
        ],
        nonlinearity: NonlinearitySpec::pure_forcing(vec![parse_expr(forcing).unwrap(), parse_expr("0").unwrap()])
            .unwrap(),
    })
    .unwrap()
}

#[test]
fn geometry_construction() {
    let g = interval(8);
    let modes: Vec<i64> = (0..8).map(|i| g.lattice().modes(i)[0]).collect();
    assert_eq!(modes, vec![-4, -3, -2, -1, 0, 1, 2, 3]);

    let w = Geometry::new(GeometryConfig::whole_space(1, PI, 8)).unwrap();
    assert!((w.continuous_frequency_step() - 1.0).abs() < 1e-15);

    let l = Geometry::new(GeometryConfig::layer(1, 4, 3.0, 8)).unwrap();
    assert_eq!(l.shape(), &[4, 8]);
    assert_eq!(l.lattice().len(), 32);

    assert!(Geometry::new(GeometryConfig::whole_space(4, 1.0, 8)).is_err());
    assert!(Geometry::new(GeometryConfig::layer(3, 4, 1.0, 8)).is_err());
    assert!(Geometry::new(GeometryConfig::whole_space(1, 1.0, 7)).is_err());
    assert!(Geometry::new(GeometryConfig::whole_space(1, 0.0, 8)).is_err());
    assert!(Geometry::new(GeometryConfig::whole_space(1, -1.0, 8)).is_err());
}

#[test]
fn forward_transform_examples() {
    let g = interval(16);
    for (f, mode, expected) in [
        (Box::new(|_: f64| 1.0) as Box<dyn Fn(f64) -> f64>, 0, (2.0 * PI).sqrt()),
        (Box::new(|x: f64| (2.0 * x).cos()), 2, (PI / 2.0).sqrt()),
        (Box::new(|x: f64| (2.0 * x).cos()), -2, (PI / 2.0).sqrt()),
    ] {
        let samples: Vec<f64> = (0..16).map(|j| f(g.grid_point(j)[0])).collect();
        let field = g.forward(&samples).unwrap();
        let oracle = fourier_coefficient(&f, mode);
        let c = coefficient(&g, &field, &[mode]);
        assert!((c - oracle).norm() < 1e-12);
        assert!((c.re - expected).abs() < 1e-12);
        for i in 0..field.len() {
            if g.lattice().modes(i)[0].abs() != mode.abs() {
                assert!(field.coefficients[i].norm() < 1e-12);
            }
        }
    }
}

#[test]
fn inverse_transform_examples() {
    let g = interval(16);
    let zero = g.inverse(&SpectralField::zeros(&g)).unwrap();
    assert!(zero.iter().all(|&v| v == 0.0));

    let mut field = SpectralField::zeros(&g);
    for m in [2, -2] {
        field.coefficients[g.lattice().index_of_modes(&[m]).unwrap()] = Complex64::new((PI / 2.0).sqrt(), 0.0);
    }
    let samples = g.inverse(&field).unwrap();
    for (j, v) in samples.iter().enumerate() {
        assert!((v - (2.0 * g.grid_point(j)[0]).cos()).abs() < 1e-12);
    }

    field.coefficients[g.lattice().index_of_modes(&[3]).unwrap()] = Complex64::new(1.0, 0.0);
    assert!(g.inverse(&field).is_err());
}

#[test]
fn h2_norm_examples() {
    let g = interval(16);
    let samples: Vec<f64> = (0..16).map(|j| g.grid_point(j)[0].sin()).collect();
    let state = StateVector::new(vec![g.forward(&samples).unwrap()]).unwrap();
    assert!((g.h2_norm(&state).unwrap() - (2.0 * PI).sqrt()).abs() < 1e-12);

    // grid quadrature: int sin^2 + int (sin'')^2
    let h = 2.0 * PI / 16.0;
    let quad: f64 = samples.iter().map(|s| 2.0 * s * s * h).sum();
    assert!((g.h2_norm(&state).unwrap().powi(2) - quad).abs() < 1e-12);

    let mut single = SpectralField::zeros(&g);
    single.coefficients[g.lattice().index_of_modes(&[3]).unwrap()] = Complex64::new(1.0, 0.0);
    let state = StateVector::new(vec![single]).unwrap();
    assert!((g.h2_norm(&state).unwrap().powi(2) - 82.0).abs() < 1e-12);
    assert_eq!(g.h2_norm(&StateVector::zeros(&g, 2)).unwrap(), 0.0);
}

#[test]
fn projection_examples() {
    let g = interval(16);
    let mut field = SpectralField::zeros(&g);
    for m in [2, -2, 0, 5] {
        field.coefficients[g.lattice().index_of_modes(&[m]).unwrap()] = Complex64::new(1.0, 0.0);
    }
    let state = StateVector::new(vec![field.clone(), field]).unwrap();
    let regimes = [tag(I, RegimeCase::II, 2.0), tag(I, RegimeCase::III, 0.0)];
    let p = g.project_constrained(&state, &regimes).unwrap();
    assert_eq!(coefficient(&g, &p.components[0], &[2]).norm(), 0.0);
    assert_eq!(coefficient(&g, &p.components[0], &[-2]).norm(), 0.0);
    assert_eq!(coefficient(&g, &p.components[0], &[0]).norm(), 1.0);
    assert_eq!(coefficient(&g, &p.components[1], &[0]).norm(), 0.0);
    assert_eq!(coefficient(&g, &p.components[1], &[2]).norm(), 1.0);
    assert_eq!(g.project_constrained(&p, &regimes).unwrap(), p);

    let w = Geometry::new(GeometryConfig::whole_space(1, 5.0, 16)).unwrap();
    assert!(w
        .project_constrained(&StateVector::zeros(&w, 1), &[tag(W, RegimeCase::II, 0.0)])
        .is_err());
}

#[test]
fn kernel_spectrum_examples() {
    let g = interval(32);
    let s = kernel_spectrum(&physical(0, "cos(2*x)", tag(I, RegimeCase::III, 0.0)), &g).unwrap();
    for m in -16..16i64 {
        let expected = if m.abs() == 2 { (PI / 2.0).sqrt() } else { 0.0 };
        let c = coefficient(&g, &s, &[m]);
        assert!((c.re - expected).abs() < 1e-12 && c.im.abs() < 1e-12, "mode {m}: {c}");
        assert!((c - fourier_coefficient(|x| (2.0 * x).cos(), m)).norm() < 1e-12);
    }
    let zero = kernel_spectrum(&physical(0, "0", tag(I, RegimeCase::III, 0.0)), &g).unwrap();
    assert!(zero.coefficients.iter().all(|c| c.norm() == 0.0));

    let w = Geometry::new(GeometryConfig::whole_space(1, 10.0, 128)).unwrap();
    let t = KernelTransform::new(&physical(0, "exp(-x^2)", tag(W, RegimeCase::IV, 1.0)), &w).unwrap();
    let at0 = t.value_at(&[0.0]).unwrap();
    // int e^{-x^2} dx / sqrt(2 pi) = sqrt(pi) / sqrt(2 pi)
    assert!((at0.re - 0.5f64.sqrt()).abs() < 1e-10);
    let lattice = w.lattice();
    for i in 0..lattice.len() {
        let p = lattice.frequency(i)[0];
        let expected = (-p * p / 4.0).exp() / 2.0f64.sqrt();
        assert!((t.spectrum().coefficients[i] - expected).norm() < 1e-10);
    }
}

#[test]
fn admissibility_examples() {
    let g = interval(32);
    let r = check_admissibility(&physical(0, "cos(2*x)", tag(I, RegimeCase::III, 0.0)), &g, 1e-8).unwrap();
    assert!(r.passed);
    assert!(r.condition("or5").unwrap().defect < 1e-14);

    let r = check_admissibility(&physical(0, "cos(2*x)", tag(I, RegimeCase::II, 2.0)), &g, 1e-8).unwrap();
    assert!(!r.passed);
    assert!((r.condition("or4").unwrap().defect - (PI / 2.0).sqrt()).abs() < 1e-12);

    let w = Geometry::new(GeometryConfig::whole_space(1, 10.0, 128)).unwrap();
    let r = check_admissibility(&physical(0, "x*exp(-x^2)", tag(W, RegimeCase::II, 0.0)), &w, 1e-8).unwrap();
    assert!(r.passed, "{}", r.to_key_value());
    assert!(r.to_key_value().contains("or3.verdict=pass"));

    assert!(check_admissibility(&physical(0, "1", tag(I, RegimeCase::III, 0.0)), &g, 0.0).is_err());
    assert!(check_admissibility(&physical(0, "1", tag(W, RegimeCase::II, 0.0)), &g, 1e-8).is_err());
}

#[test]
fn resonance_ratio_examples() {
    let opts = ResonanceOptions::default();
    let w = Geometry::new(GeometryConfig::whole_space(1, 8.0 * PI, 256)).unwrap();
    let k = spectral(0, "(p^2 - 1)*exp(-p^2)", tag(W, RegimeCase::I, 1.0), 1);
    let t = KernelTransform::new(&k, &w).unwrap();
    let at = |p: f64| resonance_ratio(&t, &[p], &opts).unwrap();
    assert!((at(1.0).re - 2.0 / E).abs() < 1e-6);
    assert!((at(-1.0).re - 2.0 / E).abs() < 1e-6);
    // off-resonance values approach the same limit
    let limit = [1e-2, 1e-3, 1e-4].map(|d| at(1.0 + d).re);
    let extrapolated = (10.0 * limit[2] - limit[1]) / 9.0;
    assert!((extrapolated - 2.0 / E).abs() < 1e-6, "{extrapolated}");
    assert!((limit[0] - 2.0 / E).abs() > 1e-4);

    let minus = KernelTransform::new(&physical(0, "exp(-x^2)", tag(W, RegimeCase::IV, 1.0)), &w).unwrap();
    let r = resonance_ratio(&minus, &[0.0], &opts).unwrap();
    assert!((r - minus.value_at(&[0.0]).unwrap()).norm() < 1e-15);

    let g = interval(16);
    let admissible = KernelTransform::new(&physical(0, "cos(3*x)", tag(I, RegimeCase::II, 2.0)), &g).unwrap();
    for n in [2.0, -2.0] {
        assert_eq!(
            resonance_ratio(&admissible, &[n], &opts).unwrap(),
            Complex64::new(0.0, 0.0)
        );
    }
    let bad = KernelTransform::new(&physical(0, "cos(2*x)", tag(I, RegimeCase::II, 2.0)), &g).unwrap();
    assert!(resonance_ratio(&bad, &[2.0], &opts).is_err());
}

#[test]
fn multiplier_examples() {
    let g = interval(64);
    let opts = ResonanceOptions::default();
    let constant = |src: &str, case, a| {
        let t = KernelTransform::new(&physical(0, src, tag(I, case, a)), &g).unwrap();
        multiplier_norms(&[t], &opts).unwrap().system_constant
    };
    let c = (PI / 2.0).sqrt();
    // enumerate |n| <= N directly: only n = +-2 contribute
    let direct = |den: fn(f64) -> f64| (c / den(2.0)).max(4.0 * c / den(2.0));
    assert!((constant("cos(2*x)", RegimeCase::II, 1.0) - direct(|n| n - 1.0)).abs() < 1e-12);
    assert!((constant("cos(2*x)", RegimeCase::IV, 3.0) - direct(|n| n + 3.0)).abs() < 1e-12);
    assert!((constant("cos(2*x)", RegimeCase::IV, 3.0) - 1.00265).abs() < 1e-5);
    assert!((constant("cos(2*x)", RegimeCase::I, 1.5) - 4.0 * c / 0.5).abs() < 1e-12);
    assert_eq!(constant("0", RegimeCase::III, 0.0), 0.0);
    // a = 0: max{|G/n|, |n G|}
    assert!((constant("cos(2*x)", RegimeCase::III, 0.0) - 2.0 * c).abs() < 1e-12);
}

#[test]
fn linear_solve_examples() {
    let system = single_component(interval(16), "0", RegimeCase::I, 0.5, "0");
    let g = system.geometry();
    let minus = System::new(SystemSpec {
        geometry: g.clone(),
        n_plus: 1,
        kernels: vec![
            physical(0, "0", tag(I, RegimeCase::I, 0.5)),
            // G_0 = 1 only
            physical(1, &format!("1/{}", (2.0 * PI).sqrt()), tag(I, RegimeCase::IV, 1.0)),
        ],
        nonlinearity: NonlinearitySpec::pure_forcing(vec![parse_expr("0").unwrap(), parse_expr("0").unwrap()]).unwrap(),
    })
    .unwrap();
    let mut rhs = StateVector::zeros(g, 2);
    rhs.components[1].coefficients[g.lattice().index_of_modes(&[0]).unwrap()] = Complex64::new(2.0, 0.0);
    let u = minus.linear_solve(&rhs).unwrap();
    let u0 = coefficient(g, &u.components[1], &[0]);
    assert!((u0.re - 2.0 * (2.0 * PI).sqrt()).abs() < 1e-12);
    assert!(u.components[1].coefficients.iter().filter(|c| c.norm() > 0.0).count() == 1);

    assert_eq!(
        system.linear_solve(&StateVector::zeros(g, 2)).unwrap(),
        StateVector::zeros(g, 2)
    );

    let constrained = single_component(interval(16), "cos(x) + cos(3*x)", RegimeCase::II, 2.0, "0");
    let mut rng = StdRng::seed_from_u64(5);
    let rhs = constrained.random_state(&mut rng, 3.0).unwrap();
    let u = constrained.linear_solve(&rhs).unwrap();
    for m in [2, -2] {
        assert_eq!(coefficient(g, &u.components[0], &[m]), Complex64::new(0.0, 0.0));
    }
}

#[test]
fn apply_map_examples() {
    let pure = single_component(interval(16), "cos(x) + 0.5", RegimeCase::I, 0.5, "sin(x) + 2");
    let mut rng = StdRng::seed_from_u64(9);
    let expected = pure
        .linear_solve(
            &pure
                .geometry()
                .forward_transform(&pure.spec().nonlinearity.forcing_samples(pure.geometry()).unwrap())
                .unwrap(),
        )
        .unwrap();
    for _ in 0..5 {
        let v = pure.random_state(&mut rng, 4.0).unwrap();
        assert_eq!(pure.apply_map(&v).unwrap(), expected);
    }
    assert_eq!(pure.certificate().q, 0.0);
    assert!(pure.certificate().certified);

    let mut spec = interval_demo(0.05, 16);
    spec.nonlinearity = shifted_nonlinearity(0.05, Saturation::Tanh, &["0", "0", "0"]);
    let silent = System::new(spec).unwrap();
    let g = silent.geometry();
    let zero = StateVector::zeros(g, 3);
    assert!(silent
        .apply_map(&zero)
        .unwrap()
        .components
        .iter()
        .all(|c| c.coefficients.iter().all(|z| z.norm() == 0.0)));
    let solution = silent.solve_fixed_point(None, &SolveOptions::default()).unwrap();
    assert_eq!(g.h2_norm(&solution.state).unwrap(), 0.0);
    assert_eq!(solution.nontriviality.verdict, Verdict::Inconclusive);
}

#[test]
fn pure_forcing_converges_in_one_step() {
    let pure = single_component(interval(16), "cos(2*x)", RegimeCase::III, 0.0, "cos(2*x) + 1");
    let s = pure.solve_fixed_point(None, &SolveOptions::default()).unwrap();
    assert!(s.trace.increments[0] > 0.0);
    assert_eq!(s.trace.increments[1], 0.0);
    assert_eq!(s.trace.iterations(), 2);
    assert_eq!(s.residual, 0.0);
}

#[test]
fn nontriviality_examples() {
    let w = Geometry::new(GeometryConfig::whole_space(1, 10.0, 64)).unwrap();
    let gaussian = System::new(SystemSpec {
        geometry: w,
        n_plus: 1,
        kernels: vec![
            physical(0, "0", tag(W, RegimeCase::II, 0.0)),
            physical(1, "exp(-x^2)", tag(W, RegimeCase::IV, 1.0)),
        ],
        nonlinearity: NonlinearitySpec::pure_forcing(vec![parse_expr("0").unwrap(), parse_expr("exp(-x^2)").unwrap()])
            .unwrap(),
    })
    .unwrap();
    assert_eq!(
        gaussian.check_nontriviality().unwrap().verdict,
        Verdict::GuaranteedNontrivial
    );

    let disjoint = single_component(interval(16), "cos(2*x)", RegimeCase::I, 0.5, "3");
    assert_eq!(disjoint.check_nontriviality().unwrap().verdict, Verdict::Inconclusive);
    let overlap = single_component(interval(16), "cos(2*x)", RegimeCase::I, 0.5, "3 + sin(2*x)");
    let verdict = overlap.check_nontriviality().unwrap();
    assert_eq!(verdict.verdict, Verdict::GuaranteedNontrivial);
    assert_eq!(verdict.witness.unwrap().frequency[0].abs(), 2.0);
}

#[test]
fn oracle_examples() {
    let g = interval(16);
    let system = single_component(g.clone(), "1.5", RegimeCase::I, 0.5, "exp(sin(x))");
    let grid = GridField::new(&g, vec![vec![0.0; 16], vec![0.0; 16]]).unwrap();
    let conv = oracle_convolution(&system, &grid).unwrap();
    let forcing = system.spec().nonlinearity.forcing_samples(&g).unwrap();
    let mean = forcing.components[0].iter().sum::<f64>() / 16.0;
    let g0 = coefficient(&g, system.kernels()[0].spectrum(), &[0]).re;
    assert!((g0 - 1.5 * (2.0 * PI).sqrt()).abs() < 1e-12);
    for v in &conv.components[0] {
        assert!((v - g0 * (2.0 * PI).sqrt() * mean).abs() < 1e-12);
    }

    let pure = single_component(
        interval(8),
        "cos(x) + 0.25*sin(2*x)",
        RegimeCase::I,
        0.5,
        "1 + cos(3*x)",
    );
    let v = GridField::new(pure.geometry(), vec![vec![0.3; 8], vec![-1.0; 8]]).unwrap();
    let spectral = pure.apply_map(&pure.geometry().forward_transform(&v).unwrap()).unwrap();
    let dense = brute_force_oracle(&pure, &v).unwrap();
    let diff = spectral
        .components
        .iter()
        .zip(&dense.components)
        .flat_map(|(a, b)| a.coefficients.iter().zip(&b.coefficients).map(|(x, y)| (x - y).norm()))
        .fold(0.0, f64::max);
    assert!(diff < 1e-12);

    let mut spec = interval_demo(0.05, 16);
    spec.nonlinearity = shifted_nonlinearity(0.05, Saturation::Tanh, &["0", "0", "0"]);
    let silent = System::new(spec).unwrap();
    let zero = GridField::new(silent.geometry(), vec![vec![0.0; 16]; 3]).unwrap();
    let out = brute_force_oracle(&silent, &zero).unwrap();
    assert!(out
        .components
        .iter()
        .all(|c| c.coefficients.iter().all(|z| z.norm() == 0.0)));

    assert!(brute_force_oracle(
        &System::new(interval_demo(0.05, 64)).unwrap(),
        &GridField::new(&interval(64), vec![vec![0.0; 64]; 3]).unwrap()
    )
    .is_err());
}

#[test]
fn residual_examples() {
    let mut spec = interval_demo(0.05, 16);
    spec.nonlinearity = shifted_nonlinearity(0.05, Saturation::Tanh, &["0", "0", "0"]);
    let silent = System::new(spec).unwrap();
    assert_eq!(
        residual(&silent, &StateVector::zeros(silent.geometry(), 3)).unwrap(),
        0.0
    );

    let system = System::new(interval_demo(0.05, 32)).unwrap();
    let opts = SolveOptions {
        tolerance: 1e-10,
        ..SolveOptions::default()
    };
    let solution = system.solve_fixed_point(None, &opts).unwrap();
    let base = residual(&system, &solution.state).unwrap();
    assert!(base <= 1e-9, "{base}");

    let g = system.geometry();
    let lattice = g.lattice();
    let min_d = (0..system.components())
        .flat_map(|k| {
            let regime = system.spec().kernels[k].regime.clone();
            (0..lattice.len()).map(move |i| regime.denominator(lattice.magnitude(i)).abs())
        })
        .filter(|d| *d > 0.0)
        .fold(f64::INFINITY, f64::min);
    let delta = 1e-3;
    let mut perturbed = solution.state.clone();
    // a real perturbation touches the mode and its conjugate
    for m in [5, -5] {
        let i = lattice.index_of_modes(&[m]).unwrap();
        perturbed.components[2].coefficients[i] += delta;
    }
    let r = residual(&system, &perturbed).unwrap();
    assert!(r >= delta * min_d / 2.0, "{r} < {}", delta * min_d / 2.0);
}

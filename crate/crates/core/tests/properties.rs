mod common;

use std::f64::consts::PI;

use common::{physical, random_interval_system, tag};
use nonlocal_fixpoint::nonlinearity::growth_bound_excess;
use nonlocal_fixpoint::solver::random_state;
use nonlocal_fixpoint::{
    brute_force_oracle, eval_nonlinearity, lipschitz_certificate, multiplier_norms, parse_expr, ComponentNonlinearity,
    Geometry, GeometryConfig, GeometryKind, GridField, KernelSpec, KernelTransform, NonlinearitySpec, RegimeCase,
    ResonanceOptions, Saturation, SolveOptions, StateVector,
};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn geometries() -> Vec<Geometry> {
    vec![
        Geometry::new(GeometryConfig::interval(16)).unwrap(),
        Geometry::new(GeometryConfig::whole_space(1, 6.0, 32)).unwrap(),
        Geometry::new(GeometryConfig::whole_space(2, 5.0, 16)).unwrap(),
        Geometry::new(GeometryConfig::layer(1, 8, 5.0, 16)).unwrap(),
    ]
}

fn max_diff(a: &StateVector, b: &StateVector) -> f64 {
    a.components
        .iter()
        .zip(&b.components)
        .flat_map(|(x, y)| x.coefficients.iter().zip(&y.coefficients).map(|(p, q)| (p - q).norm()))
        .fold(0.0, f64::max)
}

fn random_nonlinearity(rng: &mut StdRng, n: usize) -> NonlinearitySpec {
    NonlinearitySpec::new(
        (0..n)
            .map(|_| ComponentNonlinearity {
                saturation: if rng.gen_bool(0.5) {
                    Saturation::Tanh
                } else {
                    Saturation::Sin
                },
                epsilon: rng.gen_range(-2.0..2.0),
                coupling: (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect(),
                forcing: parse_expr(&format!("{} * cos(x) + exp(-x^2)", rng.gen_range(-1.0..1.0))).unwrap(),
            })
            .collect(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transforms_round_trip(seed in any::<u64>(), which in 0usize..4) {
        let geometry = &geometries()[which];
        let mut rng = StdRng::seed_from_u64(seed);
        let state = random_state(geometry, 2, &mut rng, 3.0).unwrap();
        let grid = geometry.inverse_transform(&state).unwrap();
        let back = geometry.forward_transform(&grid).unwrap();
        prop_assert!(max_diff(&state, &back) < 1e-12);
        let again = geometry.inverse_transform(&back).unwrap();
        for (a, b) in grid.components.iter().zip(&again.components) {
            for (x, y) in a.iter().zip(b) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn parseval(seed in any::<u64>(), which in 0usize..4) {
        let geometry = &geometries()[which];
        let mut rng = StdRng::seed_from_u64(seed);
        let state = random_state(geometry, 3, &mut rng, 5.0).unwrap();
        let grid = geometry.inverse_transform(&state).unwrap();
        let spectral = geometry.l2_norm(&state).unwrap();
        let physical = geometry.grid_l2_norm(&grid);
        prop_assert!((spectral - physical).abs() <= 1e-10 * spectral.max(1.0));
    }

    #[test]
    fn h2_norm_matches_grid_laplacian(seed in any::<u64>(), which in 0usize..4) {
        let geometry = &geometries()[which];
        let mut rng = StdRng::seed_from_u64(seed);
        let state = random_state(geometry, 2, &mut rng, 2.0).unwrap();
        let laplacian = StateVector::new(
            state.components.iter().map(|c| geometry.laplacian(c).unwrap()).collect(),
        ).unwrap();
        let l2 = geometry.grid_l2_norm(&geometry.inverse_transform(&state).unwrap());
        let lap = geometry.grid_l2_norm(&geometry.inverse_transform(&laplacian).unwrap());
        let h2 = geometry.h2_norm(&state).unwrap();
        prop_assert!((h2 * h2 - (l2 * l2 + lap * lap)).abs() <= 1e-10 * (h2 * h2).max(1.0));
    }

    #[test]
    fn projection_is_idempotent_and_shrinks(seed in any::<u64>(), nk in 1i64..5) {
        let geometry = Geometry::new(GeometryConfig::interval(16)).unwrap();
        let i = GeometryKind::Interval;
        let regimes = vec![
            tag(i, RegimeCase::II, nk as f64),
            tag(i, RegimeCase::III, 0.0),
            tag(i, RegimeCase::I, 0.5),
        ];
        let mut rng = StdRng::seed_from_u64(seed);
        let state = random_state(&geometry, 3, &mut rng, 1.0).unwrap();
        let once = geometry.project_constrained(&state, &regimes).unwrap();
        let twice = geometry.project_constrained(&once, &regimes).unwrap();
        prop_assert_eq!(&once, &twice);
        prop_assert!(geometry.h2_norm(&once).unwrap() <= geometry.h2_norm(&state).unwrap());
        let lattice = geometry.lattice();
        for m in [nk, -nk] {
            let idx = lattice.index_of_modes(&[m]).unwrap();
            prop_assert_eq!(once.components[0].coefficients[idx].norm(), 0.0);
        }
        let zero = lattice.index_of_modes(&[0]).unwrap();
        prop_assert_eq!(once.components[1].coefficients[zero].norm(), 0.0);
        prop_assert_eq!(&once.components[2], &state.components[2]);
    }

    #[test]
    fn kernel_spectrum_bounded_by_l1(seed in any::<u64>(), which in 0usize..4) {
        let geometry = &geometries()[which];
        let mut rng = StdRng::seed_from_u64(seed);
        let (c, s) = (rng.gen_range(0.2..2.0), rng.gen_range(-1.0..1.0));
        let src = match geometry.kind() {
            GeometryKind::Interval => format!("{c} * cos(x) + {s} * sin(3*x) + 0.3"),
            GeometryKind::WholeSpace if geometry.transverse_dim() == 2 => format!("{c} * exp(-(x1^2 + x2^2)) * (1 + {s} * x1)"),
            GeometryKind::WholeSpace => format!("{c} * exp(-x^2) * (1 + {s} * x)"),
            GeometryKind::Layer => format!("{c} * exp(-x2^2) * (1 + {s} * cos(x1))"),
        };
        let kernel = physical(0, &src, tag(geometry.kind(), RegimeCase::IV, 1.0));
        let t = KernelTransform::new(&kernel, geometry).unwrap();
        let dim = geometry.total_dim() as i32;
        let bound = t.l1_norm() / (2.0 * PI).powf(f64::from(dim) / 2.0);
        let sup = t.spectrum().coefficients.iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(sup <= bound + 1e-10, "sup {sup} bound {bound}");
    }

    #[test]
    fn sphere_defect_translation_invariant(shift in -2.0f64..2.0) {
        let geometry = Geometry::new(GeometryConfig::whole_space(1, 10.0, 128)).unwrap();
        let regime = tag(GeometryKind::WholeSpace, RegimeCase::I, 1.0);
        let report = |src: &str| {
            let t = KernelTransform::new(&physical(0, src, regime.clone()), &geometry).unwrap();
            t.admissibility(1e-8).unwrap().condition("or1").unwrap().defect
        };
        let base = report("exp(-x^2)");
        let moved = report(&format!("exp(-(x - ({shift}))^2)"));
        prop_assert!((base - moved).abs() < 1e-10, "{base} vs {moved}");
    }

    #[test]
    fn admissibility_matches_spectrum_for_resonant_modes(seed in any::<u64>(), nk in 1i64..4) {
        let geometry = Geometry::new(GeometryConfig::interval(16)).unwrap();
        let mut rng = StdRng::seed_from_u64(seed);
        let amp: f64 = if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(-1.0..1.0) };
        let src = format!("cos(4*x) + ({amp}) * cos({nk}*x)");
        let kernel = physical(0, &src, tag(GeometryKind::Interval, RegimeCase::II, nk as f64));
        let t = KernelTransform::new(&kernel, &geometry).unwrap();
        let idx = geometry.lattice().index_of_modes(&[nk]).unwrap();
        let coefficient = t.spectrum().coefficients[idx].norm();
        let report = t.admissibility(1e-8).unwrap();
        prop_assert_eq!(report.passed, coefficient <= 1e-8);
    }

    #[test]
    fn multiplier_constants_scale_linearly(seed in any::<u64>(), c in 0.01f64..20.0, case in 0usize..4) {
        let geometry = Geometry::new(GeometryConfig::interval(32)).unwrap();
        let i = GeometryKind::Interval;
        let mut rng = StdRng::seed_from_u64(seed);
        let (regime, src) = match case {
            0 => (tag(i, RegimeCase::I, 1.5), format!("cos(2*x) + {} * sin(x)", rng.gen_range(-1.0..1.0))),
            1 => (tag(i, RegimeCase::II, 2.0), format!("cos(3*x) + {} * sin(x)", rng.gen_range(-1.0..1.0))),
            2 => (tag(i, RegimeCase::III, 0.0), format!("cos(x) + {} * sin(4*x)", rng.gen_range(-1.0..1.0))),
            _ => (tag(i, RegimeCase::IV, 2.0), format!("exp(cos(x)) * {}", rng.gen_range(0.1..1.0))),
        };
        let base = physical(0, &src, regime);
        let scaled = KernelSpec { definition: base.definition.scaled(c), ..base.clone() };
        let opts = ResonanceOptions::default();
        let m1 = multiplier_norms(&[KernelTransform::new(&base, &geometry).unwrap()], &opts).unwrap();
        let m2 = multiplier_norms(&[KernelTransform::new(&scaled, &geometry).unwrap()], &opts).unwrap();
        prop_assert!((m2.system_constant - c * m1.system_constant).abs() <= 1e-12 * m2.system_constant.max(1.0));
    }

    #[test]
    fn minus_constant_non_increasing_in_rate(a in 0.1f64..5.0, da in 0.0f64..3.0) {
        let geometry = Geometry::new(GeometryConfig::interval(32)).unwrap();
        let constant = |rate: f64| {
            let k = physical(0, "exp(cos(x)) + sin(2*x)", tag(GeometryKind::Interval, RegimeCase::IV, rate));
            multiplier_norms(&[KernelTransform::new(&k, &geometry).unwrap()], &ResonanceOptions::default())
                .unwrap()
                .system_constant
        };
        prop_assert!(constant(a + da) <= constant(a) + 1e-15);
    }

    #[test]
    fn minus_constant_within_analytic_bound(a in 0.1f64..5.0, width in 0.3f64..3.0) {
        let geometry = Geometry::new(GeometryConfig::whole_space(1, 12.0, 128)).unwrap();
        let k = physical(0, &format!("exp(-x^2 / {width})"), tag(GeometryKind::WholeSpace, RegimeCase::IV, a));
        let t = KernelTransform::new(&k, &geometry).unwrap();
        let report = multiplier_norms(std::slice::from_ref(&t), &ResonanceOptions::default()).unwrap();
        let lattice = geometry.lattice();
        let sup_p = t.spectrum().coefficients.iter().enumerate()
            .map(|(i, z)| lattice.magnitude(i) * z.norm())
            .fold(0.0, f64::max);
        let bound = (t.l1_norm() / ((2.0 * PI).sqrt() * a)).max(2.0 * sup_p);
        prop_assert!(report.system_constant <= bound + 1e-12);
    }

    #[test]
    fn lipschitz_quotient_below_analytic(seed in any::<u64>(), n in 1usize..4) {
        let geometry = Geometry::new(GeometryConfig::whole_space(1, 5.0, 16)).unwrap();
        let mut rng = StdRng::seed_from_u64(seed);
        let spec = random_nonlinearity(&mut rng, n);
        let cert = lipschitz_certificate(&spec, &geometry, 10_000, seed).unwrap();
        prop_assert!(cert.passed);
        prop_assert!(cert.empirical <= cert.analytic + 1e-12);
    }

    #[test]
    fn growth_bound_holds(seed in any::<u64>(), n in 1usize..4) {
        let geometry = Geometry::new(GeometryConfig::whole_space(1, 5.0, 16)).unwrap();
        let mut rng = StdRng::seed_from_u64(seed);
        let spec = random_nonlinearity(&mut rng, n);
        prop_assert!(growth_bound_excess(&spec, &geometry, 2_000, seed).unwrap() <= 1e-12);
    }

    #[test]
    fn evaluation_is_pointwise(seed in any::<u64>()) {
        let geometry = Geometry::new(GeometryConfig::interval(16)).unwrap();
        let mut rng = StdRng::seed_from_u64(seed);
        let spec = random_nonlinearity(&mut rng, 2);
        let len = geometry.grid_len();
        let state: Vec<Vec<f64>> = (0..2).map(|_| (0..len).map(|_| rng.gen_range(-5.0..5.0)).collect()).collect();
        let forcing = spec.forcing_samples(&geometry).unwrap();
        let mut perm: Vec<usize> = (0..len).collect();
        for i in (1..len).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let permute = |f: &[Vec<f64>]| -> Vec<Vec<f64>> {
            f.iter().map(|c| perm.iter().map(|&j| c[j]).collect()).collect()
        };
        let direct = spec.eval_with_forcing(&GridField::new(&geometry, state.clone()).unwrap(), &forcing).unwrap();
        let permuted = spec
            .eval_with_forcing(
                &GridField::new(&geometry, permute(&state)).unwrap(),
                &GridField::new(&geometry, permute(&forcing.components)).unwrap(),
            )
            .unwrap();
        prop_assert_eq!(permute(&direct.components), permuted.components);
        let via_geometry = eval_nonlinearity(&spec, &GridField::new(&geometry, state).unwrap(), &geometry).unwrap();
        prop_assert_eq!(direct, via_geometry);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn linear_solve_is_linear(seed in any::<u64>(), alpha in -3.0f64..3.0, beta in -3.0f64..3.0) {
        let mut rng = StdRng::seed_from_u64(seed);
        let system = random_interval_system(&mut rng, 16);
        let f = system.random_state(&mut rng, 2.0).unwrap();
        let g = system.random_state(&mut rng, 2.0).unwrap();
        let combined = system.linear_solve(&f.scaled(alpha).add(&g.scaled(beta)).unwrap()).unwrap();
        let separate = system.linear_solve(&f).unwrap().scaled(alpha)
            .add(&system.linear_solve(&g).unwrap().scaled(beta)).unwrap();
        prop_assert!(max_diff(&combined, &separate) < 1e-12);
    }

    #[test]
    fn certified_maps_contract(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let system = random_interval_system(&mut rng, 16);
        let cert = system.certificate();
        prop_assume!(cert.certified);
        let ratio = system.contraction_probe(100, seed).unwrap();
        prop_assert!(ratio <= cert.q + 1e-9, "ratio {ratio} q {}", cert.q);
    }

    #[test]
    fn norm_bound_holds(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let system = random_interval_system(&mut rng, 16);
        prop_assert!(system.norm_bound_probe(20, seed).unwrap() <= 1.0 + 1e-9);
    }

    #[test]
    fn oracle_agrees_with_spectral_map(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let system = random_interval_system(&mut rng, 16);
        let v = system.random_state(&mut rng, 3.0).unwrap();
        let grid = system.geometry().inverse_transform(&v).unwrap();
        let fast = system.apply_map(&v).unwrap();
        let slow = brute_force_oracle(&system, &grid).unwrap();
        prop_assert!(max_diff(&fast, &slow) < 1e-12);
    }

    #[test]
    fn solutions_independent_of_start(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let system = random_interval_system(&mut rng, 16);
        prop_assume!(system.certificate().q < 0.9);
        let opts = SolveOptions { tolerance: 1e-10, ..SolveOptions::default() };
        let a = system.random_state(&mut rng, 5.0).unwrap();
        let b = system.random_state(&mut rng, 5.0).unwrap();
        let sa = system.solve_fixed_point(Some(&a), &opts).unwrap();
        let sb = system.solve_fixed_point(Some(&b), &opts).unwrap();
        let gap = system.geometry().h2_norm(&sa.state.sub(&sb.state).unwrap()).unwrap();
        prop_assert!(gap <= 10.0 * opts.tolerance, "gap {gap}");
        prop_assert!(sa.residual <= opts.tolerance);
    }

    #[test]
    fn iterates_stay_in_constrained_space(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let system = random_interval_system(&mut rng, 16);
        prop_assume!(system.certificate().certified);
        let start = system.random_state(&mut rng, 1.0).unwrap();
        let opts = SolveOptions { tolerance: 1e-9, ..SolveOptions::default() };
        let mut violations = 0usize;
        system
            .solve_fixed_point_observed(Some(&start), &opts, |_, v| {
                for k in 0..v.len() {
                    for &i in system.constrained_entries(k) {
                        let c = v.components[k].coefficients[i];
                        if c.re != 0.0 || c.im != 0.0 {
                            violations += 1;
                        }
                    }
                }
            })
            .unwrap();
        prop_assert_eq!(violations, 0);
    }
}

#[test]
fn nonlinearity_stays_within_epsilon_of_forcing() {
    let geometry = Geometry::new(GeometryConfig::interval(32)).unwrap();
    let mut rng = StdRng::seed_from_u64(17);
    let spec = random_nonlinearity(&mut rng, 3);
    let forcing = spec.forcing_samples(&geometry).unwrap();
    for _ in 0..100 {
        let state = random_state(&geometry, 3, &mut rng, 10.0).unwrap();
        let grid = geometry.inverse_transform(&state).unwrap();
        let f = eval_nonlinearity(&spec, &grid, &geometry).unwrap();
        for (k, c) in spec.components().iter().enumerate() {
            for (fv, gv) in f.components[k].iter().zip(&forcing.components[k]) {
                assert!((fv - gv).abs() <= c.epsilon.abs() + 1e-15);
            }
        }
    }
}

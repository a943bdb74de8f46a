#![allow(dead_code)]

use nonlocal_fixpoint::{
    parse_expr, ComponentNonlinearity, Geometry, GeometryConfig, GeometryKind, KernelDefinition, KernelSpec,
    NonlinearitySpec, RegimeCase, RegimeTag, Saturation, System, SystemSpec,
};
use rand::rngs::StdRng;
use rand::Rng;

pub fn tag(kind: GeometryKind, case: RegimeCase, a: f64) -> RegimeTag {
    RegimeTag::new(kind, case, a, None).unwrap()
}

pub fn physical(component: usize, src: &str, regime: RegimeTag) -> KernelSpec {
    KernelSpec {
        component,
        definition: KernelDefinition::physical(src).unwrap(),
        regime,
    }
}

pub fn spectral(component: usize, src: &str, regime: RegimeTag, dim: usize) -> KernelSpec {
    KernelSpec {
        component,
        definition: KernelDefinition::spectral(src, regime.geometry, dim).unwrap(),
        regime,
    }
}

/// `eps * sigma(u_{perm(k)}) + g_k(x)` with `perm` a cyclic shift, so `L = |eps|`.
pub fn shifted_nonlinearity(eps: f64, saturation: Saturation, forcings: &[&str]) -> NonlinearitySpec {
    let n = forcings.len();
    NonlinearitySpec::new(
        forcings
            .iter()
            .enumerate()
            .map(|(k, g)| ComponentNonlinearity {
                saturation,
                epsilon: eps,
                coupling: (0..n).map(|j| if j == (k + 1) % n { 1.0 } else { 0.0 }).collect(),
                forcing: parse_expr(g).unwrap(),
            })
            .collect(),
    )
    .unwrap()
}

/// Three-component interval system with `cos(2x)` kernels:
/// INT-II (a = 1), INT-III and INT-IV (a = 3).
pub fn interval_demo(eps: f64, modes: usize) -> SystemSpec {
    let i = GeometryKind::Interval;
    SystemSpec {
        geometry: Geometry::new(GeometryConfig::interval(modes)).unwrap(),
        n_plus: 2,
        kernels: vec![
            physical(0, "cos(2*x)", tag(i, RegimeCase::II, 1.0)),
            physical(1, "cos(2*x)", tag(i, RegimeCase::III, 0.0)),
            physical(2, "cos(2*x)", tag(i, RegimeCase::IV, 3.0)),
        ],
        nonlinearity: shifted_nonlinearity(eps, Saturation::Tanh, &["cos(2*x)", "1 + sin(2*x)", "cos(x)^2"]),
    }
}

/// Interval system with an INT-II (n = 2) and an INT-III component whose
/// forcings excite the constrained modes.
pub fn constrained_demo(modes: usize) -> SystemSpec {
    let i = GeometryKind::Interval;
    SystemSpec {
        geometry: Geometry::new(GeometryConfig::interval(modes)).unwrap(),
        n_plus: 2,
        kernels: vec![
            physical(0, "cos(x) + 0.5*cos(3*x)", tag(i, RegimeCase::II, 2.0)),
            physical(1, "cos(x) + cos(2*x)", tag(i, RegimeCase::III, 0.0)),
            physical(2, "exp(cos(x))", tag(i, RegimeCase::IV, 1.0)),
        ],
        nonlinearity: shifted_nonlinearity(
            0.02,
            Saturation::Sin,
            &["1 + cos(2*x) + sin(x)", "1 + cos(x) + sin(2*x)", "2 + cos(2*x)"],
        ),
    }
}

pub fn whole_space_demo() -> SystemSpec {
    let w = GeometryKind::WholeSpace;
    SystemSpec {
        geometry: Geometry::new(GeometryConfig::whole_space(1, 8.0 * std::f64::consts::PI, 256)).unwrap(),
        n_plus: 2,
        kernels: vec![
            spectral(0, "(p^2 - 1)*exp(-p^2)", tag(w, RegimeCase::I, 1.0), 1),
            physical(1, "x*exp(-x^2)", tag(w, RegimeCase::II, 0.0)),
            physical(2, "exp(-x^2)", tag(w, RegimeCase::IV, 1.0)),
        ],
        nonlinearity: shifted_nonlinearity(0.05, Saturation::Tanh, &["exp(-x^2)", "x*exp(-x^2)", "1/(1 + x^2)"]),
    }
}

pub fn layer_demo() -> SystemSpec {
    let l = GeometryKind::Layer;
    SystemSpec {
        geometry: Geometry::new(GeometryConfig::layer(1, 16, 8.0, 64)).unwrap(),
        n_plus: 3,
        kernels: vec![
            spectral(0, "(n^2 + p^2 - 2.25)*exp(-(n^2 + p^2))", tag(l, RegimeCase::I, 1.5), 1),
            spectral(1, "(n^2 + p^2 - 1)*exp(-(n^2 + p^2))", tag(l, RegimeCase::II, 1.0), 1),
            spectral(2, "(n^2 + p^2)*exp(-(n^2 + p^2))", tag(l, RegimeCase::III, 0.0), 1),
            spectral(3, "exp(-(n^2 + p^2))", tag(l, RegimeCase::IV, 1.0), 1),
        ],
        nonlinearity: shifted_nonlinearity(
            0.05,
            Saturation::Sin,
            &[
                "cos(x1)*exp(-x2^2)",
                "exp(-x2^2)",
                "sin(2*x1)/(1 + x2^2)",
                "exp(-x2^2)*cos(x1)^2",
            ],
        ),
    }
}

fn trig_poly(rng: &mut StdRng, skip: &[u32]) -> String {
    let mut terms = Vec::new();
    for m in 0..=3u32 {
        if skip.contains(&m) {
            continue;
        }
        let c: f64 = rng.gen_range(-1.0..1.0);
        let s: f64 = rng.gen_range(-1.0..1.0);
        if m == 0 {
            terms.push(format!("({c})"));
        } else {
            terms.push(format!("({c})*cos({m}*x) + ({s})*sin({m}*x)"));
        }
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

/// Random admissible interval system with 2 to 4 components.
pub fn random_interval_system(rng: &mut StdRng, modes: usize) -> System {
    let i = GeometryKind::Interval;
    let n = rng.gen_range(2..=4usize);
    let n_plus = rng.gen_range(1..n);
    let mut kernels = Vec::new();
    for k in 0..n {
        let (regime, skip) = if k >= n_plus {
            (tag(i, RegimeCase::IV, rng.gen_range(0.1..4.0)), vec![])
        } else {
            match rng.gen_range(0..3) {
                0 => {
                    let a = rng.gen_range(0..4) as f64 + rng.gen_range(0.1..0.9);
                    (tag(i, RegimeCase::I, a), vec![])
                }
                1 => {
                    let nk = rng.gen_range(1..=3u32);
                    (tag(i, RegimeCase::II, f64::from(nk)), vec![nk])
                }
                _ => (tag(i, RegimeCase::III, 0.0), vec![0]),
            }
        };
        kernels.push(physical(k, &trig_poly(rng, &skip), regime));
    }
    let nonlinearity = NonlinearitySpec::new(
        (0..n)
            .map(|_| ComponentNonlinearity {
                saturation: if rng.gen_bool(0.5) {
                    Saturation::Tanh
                } else {
                    Saturation::Sin
                },
                epsilon: rng.gen_range(-0.5..0.5),
                coupling: (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                forcing: parse_expr(&trig_poly(rng, &[])).unwrap(),
            })
            .collect(),
    )
    .unwrap();
    System::new(SystemSpec {
        geometry: Geometry::new(GeometryConfig::interval(modes)).unwrap(),
        n_plus,
        kernels,
        nonlinearity,
    })
    .unwrap()
}

#![allow(dead_code)]

use hyperac::ac::{ContinuationConfig, DoubleWell, SolverConfig};
use hyperac::boundary::BoundarySpec;
use hyperac::dirichlet::DirichletProblem;
use hyperac::group::{Backend, GroupSpec};

pub fn problem(backend: Backend, words: &[&str], rho_scale: f64, radii: Vec<usize>) -> DirichletProblem {
    let g = GroupSpec::new(backend).unwrap();
    let v = DoubleWell::default();
    let cfg = ContinuationConfig::new(&v, g.num_generators(), 0.5).unwrap();
    let b = BoundarySpec::parse(&g, words).unwrap();
    DirichletProblem::new(g, b, v, cfg.rho1 * rho_scale, radii, cfg, SolverConfig::default()).unwrap()
}

pub fn f2(words: &[&str], rho_scale: f64, radii: Vec<usize>) -> DirichletProblem {
    problem(Backend::Free { rank: 2 }, words, rho_scale, radii)
}

/// Ten boundary problems over four groups, all at `ρ ≤ ρ1`.
pub fn corpus() -> Vec<DirichletProblem> {
    let f3 = Backend::Free { rank: 3 };
    let psl = Backend::FreeProduct { orders: vec![2, 3] };
    let z33 = Backend::FreeProduct { orders: vec![3, 3] };
    vec![
        f2(&["a"], 1.0, vec![3, 4, 5]),
        f2(&["a"], 0.1, vec![3, 4, 5, 6]),
        f2(&["aa", "bb"], 1.0, vec![4, 5]),
        f2(&["a", "b"], 0.5, vec![3, 4, 5]),
        f2(&["ab", "Ba"], 1.0, vec![4, 5]),
        f2(&["aB", "A"], 0.01, vec![4, 5]),
        problem(f3.clone(), &["a"], 1.0, vec![3, 4]),
        problem(f3, &["a", "bC"], 0.1, vec![3, 4]),
        problem(psl, &["a"], 1.0, vec![4, 6, 8]),
        problem(z33, &["a", "b2"], 1.0, vec![3, 4, 5]),
    ]
}

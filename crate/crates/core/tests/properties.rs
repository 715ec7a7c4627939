use hyperac::ac::{minmax_check, DoubleWell};
use hyperac::group::{boundary_out, outer_set, CayleyBall, GroupSpec, RimPolicy, SubsetHandle};
use hyperac::plateau::{
    action_bridge, edge_cut, plateau_certify, random_connected_window, CertMode, CertifyConfig, CutWindow,
    PlateauPartition,
};
use hyperac::runner::ExperimentConfig;
use hyperac::Execution;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

fn f2_ball() -> &'static CayleyBall {
    static BALL: OnceLock<CayleyBall> = OnceLock::new();
    BALL.get_or_init(|| CayleyBall::build(&GroupSpec::free(2).unwrap(), 5).unwrap())
}

fn subset(ball: &CayleyBall, radius: usize, bits: &[bool]) -> SubsetHandle {
    let k = ball.ball_size(radius);
    SubsetHandle::from_indices(ball.len(), (0..k).filter(|&g| bits[g % bits.len()]))
}

fn partition(bits: &[bool]) -> PlateauPartition {
    let ball = f2_ball();
    PlateauPartition::from_d0(ball.clone(), subset(ball, ball.radius(), bits))
}

fn window(seed: u64, size: usize) -> CutWindow {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let omega = random_connected_window(f2_ball(), 3, size, &mut rng);
    CutWindow::new(f2_ball(), omega, format!("random:{seed}")).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn boundary_of_intersection_is_contained(a in prop::collection::vec(any::<bool>(), 161), d in prop::collection::vec(any::<bool>(), 97)) {
        let ball = f2_ball();
        let a = subset(ball, 4, &a);
        let d = subset(ball, 4, &d);
        let out = |s: &SubsetHandle| outer_set(ball, s, RimPolicy::Strict).unwrap();
        let bout = |s: &SubsetHandle| boundary_out(ball, s, RimPolicy::Strict).unwrap();
        let lhs = bout(&a.intersection(&d));
        let rhs = bout(&a).intersection(&out(&d)).union(&out(&a).intersection(&bout(&d)));
        prop_assert!(lhs.is_subset(&rhs));
    }

    #[test]
    fn cut_is_symmetric_in_phases(bits in prop::collection::vec(any::<bool>(), 1..200), seed in any::<u64>(), size in 4usize..40) {
        let p = partition(&bits);
        let w = window(seed, size);
        let ball = f2_ball();
        prop_assert_eq!(edge_cut(ball, &p.d0, &w), edge_cut(ball, &p.d1, &w));
    }

    #[test]
    fn exhaustive_matches_oracle(bits in prop::collection::vec(any::<bool>(), 1..200), seed in any::<u64>(), size in 4usize..22) {
        let p = partition(&bits);
        let w = window(seed, size);
        prop_assume!(w.free_sites().count() <= 14);
        let cfg = CertifyConfig { mode: CertMode::Both, cap: 14, exec: Execution::Sequential };
        let c = plateau_certify(&p, &w, &cfg).unwrap();
        prop_assert_eq!(c.exhaustive, c.oracle);
        prop_assert_eq!(c.oracle, c.oracle_d1);
        prop_assert_eq!(c.b_omega, c.b_omega_d1);
        prop_assert!(c.min <= c.b_omega);
        prop_assert_eq!(c.is_minimal(), c.min == c.b_omega);
    }

    #[test]
    fn action_bridge_is_exact(bits in prop::collection::vec(any::<bool>(), 1..200), seed in any::<u64>(), size in 4usize..60, rho in 1e-4f64..1.0) {
        let p = partition(&bits);
        let w = window(seed, size);
        let (got, predicted) = action_bridge(&p, &w, &DoubleWell::default(), rho);
        prop_assert!((got - predicted).abs() <= 1e-12 * predicted.max(1.0));
    }

    #[test]
    fn minmax_slack_is_nonnegative(x in prop::collection::vec(-1.5f64..1.5, 161), y in prop::collection::vec(-1.5f64..1.5, 161), rho in 1e-3f64..2.0) {
        let ball = f2_ball();
        let pad = |v: &[f64]| (0..ball.len()).map(|g| v[g % v.len()]).collect::<Vec<_>>();
        let region = SubsetHandle::ball(ball, 3);
        let slack = minmax_check(ball, &DoubleWell::default(), &pad(&x), &pad(&y), rho, &region).unwrap();
        prop_assert!(slack >= -1e-12);
    }

    #[test]
    fn config_round_trips(radii in prop::collection::btree_set(2usize..9, 1..5), k in 0.05f64..0.95, scale in 1e-3f64..1.0, seed in any::<u64>(), gs in any::<bool>()) {
        let sweep = if gs { "gauss_seidel" } else { "jacobi" };
        let radii: Vec<String> = radii.iter().map(|r| r.to_string()).collect();
        let text = format!(
            "name = \"p\"\ngroup = {{ backend = \"free\", rank = 2 }}\nboundary = {{ d0 = [\"a\"] }}\n\
             [solve]\nradii = [{}]\nk = {k}\nsweep = \"{sweep}\"\nmax_sweeps = 1000\n\
             [rho]\nrule = \"ladder\"\nscale = {scale}\nfactor = 4.0\ndepth = 3\n\
             [seeds]\ncalibration = {seed}\nwindows = 1\nseparation = 2\nquasi = 3\n",
            radii.join(", ")
        );
        let cfg = ExperimentConfig::from_toml(&text).unwrap();
        let back = ExperimentConfig::from_toml(&cfg.to_toml()).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.hash(), cfg.hash());
    }
}

//! Values computed independently (high-order adaptive ODE integration and an
//! exact LP of the discretized game) and frozen here.

use minimax_bidding::dist::make_distribution;
use minimax_bidding::oracle::{build_game, solve_game, DEFAULT_MAX_ITERS};
use minimax_bidding::{minimax_regret, solve_qstar, ValueDistribution};

fn dist(spec: &str) -> ValueDistribution {
    make_distribution(&spec.parse().unwrap()).unwrap()
}

/// (spec, ∫Q*, Q*(0.5), Q*(1)) from an 8th-order adaptive integrator at
/// relative tolerance 1e-12.
const ODE_REFERENCE: [(&str, f64, f64, f64); 7] = [
    ("uniform 0 1", 0.14921802959611385, 0.11223541267381985, 0.4537069841264857),
    ("uniform 0.25 1", 0.19389688466016508, 0.17826532985632115, 0.46069922400391217),
    ("uniform 0.5 1", 0.25, 0.25, 0.5),
    ("uniform 0.75 1", 0.30893972058572466, 0.32173467014362944, 0.5660602794142753),
    ("beta 2 2", 0.1513817205733162, 0.13167457108746494, 0.3997196543364785),
    ("beta 2 1", 0.21167946922464445, 0.19692583747146533, 0.4955516383043071),
    ("point 1", 0.3678794411714468, 0.39346934028735425, 0.6321205588285532),
];

#[test]
fn solver_matches_reference_integrator() {
    for (spec, integral, mid, top) in ODE_REFERENCE {
        let q = solve_qstar(&dist(spec), 20_000).unwrap();
        // Tabulated betas carry their own ~1e-8 CDF error.
        let tol = if spec.starts_with("beta") { 1e-6 } else { 1e-8 };
        assert!((minimax_regret(&q) - integral).abs() <= tol, "{spec}: {}", minimax_regret(&q));
        assert!((q.value_at(0.5) - mid).abs() <= tol, "{spec}: Q(0.5) = {}", q.value_at(0.5));
        assert!((q.top_bid() - top).abs() <= tol, "{spec}: Q(1) = {}", q.top_bid());
    }
}

/// Exact values of the discretized game (`grid` values and bids) from a
/// linear program.
const GAME_REFERENCE: [(&str, usize, f64); 12] = [
    ("uniform 0 1", 50, 0.14398553003580689),
    ("uniform 0 1", 100, 0.14657256555183054),
    ("uniform 0 1", 200, 0.14788217282255947),
    ("point 1", 50, 0.3615051159672657),
    ("point 1", 100, 0.36468967546731657),
    ("point 1", 200, 0.36629205026287875),
    ("beta 2 2", 50, 0.1456244436485693),
    ("beta 2 2", 100, 0.14849782597525402),
    ("beta 2 2", 200, 0.14993624578443995),
    ("mix 0.5 point 0 + 0.5 point 1", 50, 0.1807525579836328),
    ("mix 0.5 point 0 + 0.5 point 1", 100, 0.1823448377336581),
    ("mix 0.5 point 0 + 0.5 point 1", 200, 0.1831460251314393),
];

#[test]
fn fictitious_play_brackets_exact_game_value() {
    for (spec, grid, exact) in GAME_REFERENCE {
        let game = build_game(&dist(spec), grid, grid).unwrap();
        let s = solve_game(&game, DEFAULT_MAX_ITERS, 1e-3).unwrap();
        assert!(s.converged, "{spec} at {grid}");
        assert!(s.lower - 1e-7 <= exact && exact <= s.upper + 1e-7, "{spec} at {grid}: [{}, {}] vs {exact}", s.lower, s.upper);
        assert!((s.value - exact).abs() <= 1e-3);
    }
}

#[test]
fn two_action_games_by_enumeration() {
    // Bids {0, 1} on a sure value of 1: bidding 1 earns nothing, so the buyer
    // bids 0 and nature's h = 0 leaves no regret.
    let p = ValueDistribution::point(1.0).unwrap();
    let s = solve_game(&build_game(&p, 2, 2).unwrap(), 100, 1e-9).unwrap();
    assert_eq!(s.value, 0.0);
    assert_eq!(s.buyer_policy[0], vec![1.0, 0.0]);
}

mod common;

use std::time::{Duration, Instant};

use common::{example_hitchcock, example_shortest_path, ints};
use riov::inverse::{self, Outcome, SolveResult};
use riov::numeric::{int, ratio, Ext, Rational};
use riov::subproblem::eval_psi;

fn optimal(r: SolveResult) -> Box<inverse::InverseSolution> {
    match r {
        SolveResult::Optimal(s) => s,
        SolveResult::Infeasible(e) => panic!("unexpected infeasible: {e}"),
    }
}

#[test]
fn shortest_path_example() {
    let inst = example_shortest_path();
    let start = Instant::now();
    let sol = optimal(inverse::solve(&inst));
    assert!(start.elapsed() < Duration::from_secs(1), "took {:?}", start.elapsed());
    assert_eq!(sol.breaks.z_left, Ext::Finite(int(-1)));
    assert_eq!(sol.breaks.z_right, Ext::Finite(int(12)));
    assert_eq!(sol.delta, int(1));
    assert_eq!(sol.big_delta, ratio(1, 36));
    assert_eq!(sol.z_star, int(6));
    assert_eq!(sol.c_star, ints(&[2, 3, 7, 8, 5, 5, 4, 9, 11, 10]));
    assert_eq!(sol.objective, int(71));
    assert_eq!((sol.k_left.clone(), sol.k_right.clone()), (Some(int(11)), Some(int(0))));
    inverse::certify(&inst, &sol).unwrap();
}

#[test]
fn shortest_path_example_values() {
    let inst = example_shortest_path();
    let support: Vec<usize> = inst.support().iter().map(|j| j + 1).collect();
    assert_eq!(support, vec![2, 6, 10]);
    assert_eq!(eval_psi(&inst, &ratio(769, 128)).psi(), Some(&int(77)));
    assert_eq!(eval_psi(&inst, &ratio(3063, 512)).psi(), Some(&ratio(39325, 512)));
    let breaks = inverse::break_points(&inst);
    assert_eq!(inverse::slope_at(&inst, &breaks, &int(12)), int(-13));
    assert_eq!(inverse::slope_at(&inst, &breaks, &int(7)), int(0));
    assert_eq!(inverse::slope_at(&inst, &breaks, &int(2)), int(11));
}

#[test]
fn hitchcock_example() {
    let inst = example_hitchcock();
    assert_eq!(inst.cost_of_x0(), int(44));
    let start = Instant::now();
    let sol = optimal(inverse::solve(&inst));
    assert!(start.elapsed() < Duration::from_secs(1), "took {:?}", start.elapsed());
    assert_eq!(sol.breaks.z_left, Ext::Finite(ratio(-5, 11)));
    assert_eq!(sol.breaks.z_right, Ext::Finite(ratio(5, 11)));
    assert_eq!(sol.big_delta, ratio(1, 9216));
    assert_eq!(sol.delta, int(-6));
    assert_eq!(sol.z_star, int(0));
    assert_eq!((sol.k_left.clone(), sol.k_right.clone()), (Some(int(-4)), Some(int(-8))));
    let c_star: Vec<Rational> = vec![int(5), ratio(7, 2), int(1), int(5), ratio(7, 2), int(1)];
    assert_eq!(sol.c_star, c_star);
    let cx: Rational = sol.c_star.iter().zip(inst.x0()).map(|(c, x)| c * x).sum();
    assert_eq!(cx, int(50));
    assert_eq!(sol.outcome, Outcome::TurningMidpoint);
    inverse::certify(&inst, &sol).unwrap();
}

#[test]
fn hitchcock_example_break_slopes() {
    let inst = example_hitchcock();
    let breaks = inverse::break_points(&inst);
    assert_eq!(inverse::slope_at(&inst, &breaks, &ratio(-5, 11)), int(18));
    assert_eq!(inverse::slope_at(&inst, &breaks, &ratio(5, 11)), int(-8));
}

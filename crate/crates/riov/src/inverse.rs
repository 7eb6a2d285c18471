//! Critical-value search and cost recovery.

use std::fmt;

use log::{debug, warn};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::mcf::{self, FlowNetwork, McfOutcome};
use crate::numeric::{int, midpoint, simplest_in_half_open, Ext, Rational};
use crate::subproblem::{check_point, segment_extent, DualSolution, InverseInstance, PsiPoint, Subproblem, TurningTest};

pub use crate::subproblem::big_delta;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BreakPoints {
    pub z_left: Ext,
    pub z_right: Ext,
}

impl BreakPoints {
    pub fn contains(&self, z: &Rational) -> bool {
        let z = Ext::Finite(z.clone());
        self.z_left <= z && z <= self.z_right
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Bracket of the binary search: the critical value stays in
/// `[tau_low, tau_high]` while the loop runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchState {
    pub tau_low: Rational,
    pub tau_high: Rational,
    pub iteration: u32,
}

/// How the critical value was pinned down.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// `k⁺` at the left break point is already `≤ δ`.
    LeftBreakPoint,
    /// `k⁻` at the right break point is already `≥ δ`.
    RightBreakPoint,
    /// A probed midpoint was a turning coordinate with `k⁺ < δ ≤ k⁻`.
    TurningMidpoint,
    /// The bracket shrank below `Δ`; `z*` is where the two boundary lines meet.
    LineIntersection,
    /// ψ has slope exactly `δ` out to the edge of the search window.
    SearchBoundary,
}

impl Outcome {
    pub const ALL: [Outcome; 5] = [
        Outcome::LeftBreakPoint,
        Outcome::RightBreakPoint,
        Outcome::TurningMidpoint,
        Outcome::LineIntersection,
        Outcome::SearchBoundary,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Outcome::LeftBreakPoint => "left-break-point",
            Outcome::RightBreakPoint => "right-break-point",
            Outcome::TurningMidpoint => "turning-midpoint",
            Outcome::LineIntersection => "line-intersection",
            Outcome::SearchBoundary => "search-boundary",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|o| o.label() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Stats {
    pub iterations: u32,
    pub iteration_bound: u32,
    pub max_solves_per_iteration: usize,
    pub total_solves: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InverseSolution {
    pub z_star: Rational,
    pub c_star: Vec<Rational>,
    /// `Σ d_j |c*_j − c_j|`.
    pub objective: Rational,
    pub alpha: Vec<Rational>,
    pub beta: Vec<Rational>,
    pub pi: Vec<Rational>,
    /// Optimal `y` of the sub-problem at `z*`.
    pub certificate: Vec<Rational>,
    pub psi_star: Rational,
    /// One-sided slopes of ψ at `z*`; `None` on the side of a break point.
    pub k_left: Option<Rational>,
    pub k_right: Option<Rational>,
    pub breaks: BreakPoints,
    pub delta: Rational,
    pub big_delta: Rational,
    pub outcome: Outcome,
    pub stats: Stats,
}

/// No cost vector makes `x0` optimal with value `K`: ψ keeps a slope on
/// the wrong side of `δ` all the way out on `side`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfeasibleInverse {
    pub side: Side,
    pub breaks: BreakPoints,
    pub slope: Rational,
    pub delta: Rational,
    pub big_delta: Rational,
}

impl InfeasibleInverse {
    pub fn label(&self) -> &'static str {
        match self.side {
            Side::Left => "infeasible-left",
            Side::Right => "infeasible-right",
        }
    }
}

impl fmt::Display for InfeasibleInverse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (cmp, side) = match self.side {
            Side::Left => ("<", "left"),
            Side::Right => (">", "right"),
        };
        write!(f, "slope {} {cmp} delta {} beyond the {side} end of the search window", self.slope, self.delta)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum SolveResult {
    Optimal(Box<InverseSolution>),
    Infeasible(InfeasibleInverse),
}

/// `c_J̄ · x0_J̄ − K`.
pub fn delta(inst: &InverseInstance) -> Rational {
    inst.cost_of_x0() - inst.target()
}

/// `⌈2 log₂(2|J̄| x0_max) + log₂(2(n + |J̄|) d_max + 2)⌉`.
pub fn iteration_bound(inst: &InverseInstance) -> u32 {
    let d = inst.denominator_bound();
    let width = (inst.search_radius() * int(2)).to_integer();
    let target: BigInt = &d * &d * width;
    let mut n = 0u32;
    let mut p = BigInt::one();
    while p < target {
        p <<= 1;
        n += 1;
    }
    n
}

pub fn lbp(inst: &InverseInstance) -> Ext {
    break_point(&Subproblem::new(inst), Side::Left)
}

pub fn rbp(inst: &InverseInstance) -> Ext {
    break_point(&Subproblem::new(inst), Side::Right)
}

pub fn break_points(inst: &InverseInstance) -> BreakPoints {
    let sp = Subproblem::new(inst);
    BreakPoints { z_left: break_point(&sp, Side::Left), z_right: break_point(&sp, Side::Right) }
}

fn break_point(sp: &Subproblem, side: Side) -> Ext {
    let inst = sp.instance();
    let sign = match side {
        Side::Left => int(-1),
        Side::Right => int(1),
    };
    let far = inst.search_radius() * &sign;
    if sp.feasible(&far) {
        return match side {
            Side::Left => Ext::NegInf,
            Side::Right => Ext::PosInf,
        };
    }
    let half = sp.big_delta() / int(2);
    let mut inner = Rational::zero();
    let mut outer = far;
    while (&inner - &outer).abs() >= half {
        let mid = midpoint(&inner, &outer);
        if sp.feasible(&mid) {
            inner = mid;
        } else {
            outer = mid;
        }
    }
    let z1 = &inner - &half * &sign;
    let y0 = sp.solve(&inner).point;
    let y1 = sp.solve(&z1).point;
    let (l, r) = segment_extent(inst, &inner, &z1, y0.y().expect("feasible"), y1.y().expect("feasible"))
        .expect("distinct points");
    let snapped = match side {
        Side::Left => l,
        Side::Right => r,
    };
    // Only one rational with denominator ≤ 2|J̄|x0_max fits in a bracket
    // narrower than Δ/2, and the break point is one of them.
    let simplest = match side {
        Side::Left => simplest_in_half_open(&outer, &inner),
        Side::Right => -simplest_in_half_open(&-&outer, &-&inner),
    };
    if snapped != Ext::Finite(simplest.clone()) {
        warn!("segment extent gave {snapped} for the {side:?} break point; using {simplest}");
    }
    assert!(simplest.denom() <= &inst.denominator_bound(), "break point {simplest} has a large denominator");
    assert!(sp.feasible(&simplest), "break point {simplest} is infeasible");
    debug!("{side:?} break point {simplest}");
    Ext::Finite(simplest)
}

/// Slope of ψ at `z`; the right slope at `z_left`, the left slope at
/// `z_right`.
pub fn slope_at(inst: &InverseInstance, breaks: &BreakPoints, z: &Rational) -> Rational {
    slope_with(&Subproblem::new(inst), breaks, z)
}

fn slope_with(sp: &Subproblem, breaks: &BreakPoints, z: &Rational) -> Rational {
    let half = sp.big_delta() / int(2);
    let at = if breaks.z_left.finite() == Some(z) {
        z + &half
    } else if breaks.z_right.finite() == Some(z) {
        z - &half
    } else {
        z.clone()
    };
    let (_, duals) = sp.duals(&at).unwrap_or_else(|e| panic!("slope query outside the feasible range: {e}"));
    duals.slope
}

pub fn solve(inst: &InverseInstance) -> SolveResult {
    let sp = Subproblem::new(inst);
    let delta = delta(inst);
    let bd = sp.big_delta().clone();
    let breaks = BreakPoints { z_left: break_point(&sp, Side::Left), z_right: break_point(&sp, Side::Right) };
    let radius = inst.search_radius();
    let infeasible = |side, slope| {
        SolveResult::Infeasible(InfeasibleInverse {
            side,
            breaks: breaks.clone(),
            slope,
            delta: delta.clone(),
            big_delta: bd.clone(),
        })
    };

    let mut found: Option<(Rational, Outcome)> = None;
    let (mut tau_low, mut k_low) = match &breaks.z_left {
        Ext::Finite(z) => {
            let k = slope_with(&sp, &breaks, z);
            if k <= delta {
                found = Some((z.clone(), Outcome::LeftBreakPoint));
            }
            (z.clone(), k)
        }
        _ => {
            let t = -&radius;
            let k = slope_with(&sp, &breaks, &t);
            if k < delta {
                return infeasible(Side::Left, k);
            }
            if k == delta {
                found = Some((t.clone(), Outcome::SearchBoundary));
            }
            (t, k)
        }
    };
    let (mut tau_high, mut k_high) = match &breaks.z_right {
        Ext::Finite(z) => {
            let k = slope_with(&sp, &breaks, z);
            if k >= delta {
                found = Some((z.clone(), Outcome::RightBreakPoint));
            }
            (z.clone(), k)
        }
        _ => {
            let t = radius.clone();
            let k = slope_with(&sp, &breaks, &t);
            if k > delta {
                return infeasible(Side::Right, k);
            }
            if k == delta && found.is_none() {
                found = Some((t.clone(), Outcome::SearchBoundary));
            }
            (t, k)
        }
    };

    let mut stats = Stats { iteration_bound: iteration_bound(inst), ..Stats::default() };
    let mut psi_low: Option<Rational> = None;
    let mut psi_high: Option<Rational> = None;
    while found.is_none() && &tau_high - &tau_low >= bd {
        let before = sp.solves();
        let z = midpoint(&tau_low, &tau_high);
        let fp = sp.five_point(&z).unwrap_or_else(|e| panic!("probe inside the bracket failed: {e}"));
        match fp.test() {
            TurningTest::Turning { k_left, k_right } => {
                if k_right >= delta {
                    tau_low = fp.zs[4].clone();
                    k_low = k_right;
                    psi_low = Some(fp.psi[4].clone());
                } else if k_left < delta {
                    tau_high = fp.zs[0].clone();
                    k_high = k_left;
                    psi_high = Some(fp.psi[0].clone());
                } else {
                    found = Some((z.clone(), Outcome::TurningMidpoint));
                }
            }
            TurningTest::NotTurning { .. } => {
                let k = fp.center.duals(inst).expect("centre is feasible").slope;
                if k >= delta {
                    tau_low = z;
                    k_low = k;
                    psi_low = Some(fp.psi[2].clone());
                } else {
                    tau_high = z;
                    k_high = k;
                    psi_high = Some(fp.psi[2].clone());
                }
            }
        }
        stats.iterations += 1;
        let used = sp.solves() - before;
        stats.max_solves_per_iteration = stats.max_solves_per_iteration.max(used);
        assert!(used <= 5, "iteration used {used} sub-problem solves");
        if found.is_none() {
            assert!(k_low >= delta && delta > k_high, "bracket lost: k_low {k_low}, k_high {k_high}, delta {delta}");
        }
        debug!("iteration {}: [{tau_low}, {tau_high}]", stats.iterations);
    }

    let (z_star, outcome) = match found {
        Some(f) => f,
        None => {
            let psi_at = |cached: Option<Rational>, t: &Rational| {
                cached.unwrap_or_else(|| sp.solve(t).psi().expect("bracket end is feasible").clone())
            };
            let pl = psi_at(psi_low, &tau_low);
            let ph = psi_at(psi_high, &tau_high);
            assert_ne!(k_low, k_high, "boundary lines are parallel");
            let z = (&ph - &pl - &k_high * &tau_high + &k_low * &tau_low) / (&k_low - &k_high);
            (z, Outcome::LineIntersection)
        }
    };
    debug!("critical value {z_star} ({})", outcome.label());

    let rec = recover_cost(inst, &breaks, &z_star);
    let star = sp.solve(&z_star);
    let certificate = star.point.y().expect("critical value is feasible").to_vec();
    let psi_star = star.psi().expect("critical value is feasible").clone();
    let objective: Rational =
        (0..inst.num_vars()).map(|j| &inst.weights()[j] * (&rec.c_star[j] - &inst.costs()[j]).abs()).sum();
    stats.total_solves = sp.solves();
    let sol = InverseSolution {
        z_star,
        c_star: rec.c_star,
        objective,
        alpha: rec.alpha,
        beta: rec.beta,
        pi: rec.pi,
        certificate,
        psi_star,
        k_left: rec.k_left,
        k_right: rec.k_right,
        breaks,
        delta,
        big_delta: bd,
        outcome,
        stats,
    };
    if let Err(e) = certify(inst, &sol) {
        panic!("solution failed certification: {e}");
    }
    SolveResult::Optimal(Box::new(sol))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostRecovery {
    pub c_star: Vec<Rational>,
    pub alpha: Vec<Rational>,
    pub beta: Vec<Rational>,
    pub pi: Vec<Rational>,
    pub k_left: Option<Rational>,
    pub k_right: Option<Rational>,
}

/// Dual solution at `z_star` whose slope is exactly `δ`.
///
/// Inside the feasible range the duals just left and right of `z_star` are
/// both optimal at `z_star`; mixing their potentials with
/// `λ = (δ − k⁺)/(k⁻ − k⁺)` hits slope `δ` and stays optimal since the
/// dual objective is convex in `π` and bounded below by ψ. At a break
/// point one side is missing, so the potentials are pushed along the cut
/// that separates the infeasible side instead; that cut is tight at the
/// break point, which keeps the dual value fixed.
pub fn recover_cost(inst: &InverseInstance, breaks: &BreakPoints, z_star: &Rational) -> CostRecovery {
    let sp = Subproblem::new(inst);
    let delta = delta(inst);
    let half = sp.big_delta() / int(2);
    let at_left = breaks.z_left.finite() == Some(z_star);
    let at_right = breaks.z_right.finite() == Some(z_star);
    let side_duals = |z: Rational| sp.duals(&z).unwrap_or_else(|e| panic!("side dual: {e}")).1;
    let left = (!at_left).then(|| side_duals(z_star - &half));
    let right = (!at_right).then(|| side_duals(z_star + &half));

    let pi = match (&left, &right) {
        (Some(l), Some(r)) => {
            if l.slope == r.slope {
                assert_eq!(l.slope, delta, "flat critical value must match delta");
                r.pi.clone()
            } else {
                let lambda = (&delta - &r.slope) / (&l.slope - &r.slope);
                assert!(!lambda.is_negative() && lambda <= Rational::one(), "lambda {lambda} outside [0, 1]");
                debug!("mixing side duals with lambda {lambda}");
                let mu = Rational::one() - &lambda;
                l.pi.iter().zip(&r.pi).map(|(a, b)| &lambda * a + &mu * b).collect()
            }
        }
        (None, Some(base)) | (Some(base), None) => {
            if base.slope == delta {
                base.pi.clone()
            } else {
                let outside = if at_left { z_star - &half } else { z_star + &half };
                let ev = sp.solve(&outside);
                let cut = ev.cut.expect("outside the break point the sub-problem is infeasible");
                let b_s: Rational =
                    (0..inst.node_count()).filter(|&i| cut.source_side[i]).map(|i| inst.supplies()[i].clone()).sum();
                assert!(!b_s.is_zero(), "cut carries no net supply");
                let t = (&delta - &base.slope) / -b_s;
                assert!(t.is_positive(), "cut shift {t} must be positive");
                debug!("shifting potentials on the cut by {t}");
                base.pi
                    .iter()
                    .enumerate()
                    .map(|(i, p)| if cut.source_side[i] { p + &t } else { p.clone() })
                    .collect()
            }
        }
        (None, None) => panic!("both break points equal the critical value"),
    };
    let duals = DualSolution::from_potentials(inst, pi);
    assert_eq!(duals.slope, delta, "recovered slope");
    CostRecovery {
        c_star: duals.adjusted_costs(inst),
        alpha: duals.alpha,
        beta: duals.beta,
        pi: duals.pi,
        k_left: left.map(|d| d.slope),
        k_right: right.map(|d| d.slope),
    }
}

/// Independent checks on a claimed optimum:
/// `c*·x0 = K`, the forward problem under `c*` has value `K`, the weighted
/// distance matches the multipliers, and the dual pair `(y*, z*)` closes
/// the duality gap.
pub fn certify(inst: &InverseInstance, sol: &InverseSolution) -> Result<(), String> {
    let n = inst.num_vars();
    let cx: Rational = sol.c_star.iter().zip(inst.x0()).map(|(c, x)| c * x).sum();
    if &cx != inst.target() {
        return Err(format!("c*·x0 = {cx}, expected {}", inst.target()));
    }
    let forward = forward_value(inst, &sol.c_star)?;
    if &forward != inst.target() {
        return Err(format!("forward optimum under c* is {forward}, expected {}", inst.target()));
    }
    let mut weight = Rational::zero();
    for j in 0..n {
        if sol.alpha[j].is_negative() || sol.beta[j].is_negative() {
            return Err(format!("negative multiplier at {}", j + 1));
        }
        if !sol.alpha[j].is_zero() && !sol.beta[j].is_zero() {
            return Err(format!("alpha and beta both positive at {}", j + 1));
        }
        if sol.c_star[j] != &inst.costs()[j] + &sol.alpha[j] - &sol.beta[j] {
            return Err(format!("c*_{} != c + alpha - beta", j + 1));
        }
        weight += &inst.weights()[j] * (&sol.alpha[j] + &sol.beta[j]);
    }
    if weight != sol.objective {
        return Err(format!("objective {} != weighted multipliers {weight}", sol.objective));
    }
    let point = PsiPoint {
        z: sol.z_star.clone(),
        status: crate::subproblem::PsiStatus::Feasible { psi: sol.psi_star.clone(), y: sol.certificate.clone() },
    };
    check_point(inst, &point)?;
    let dual_value = &sol.psi_star - &sol.delta * &sol.z_star;
    if dual_value != sol.objective {
        return Err(format!("duality gap: objective {} vs dual value {dual_value}", sol.objective));
    }
    Ok(())
}

/// Optimal value of `min c·x, A x = b, x ≥ 0`. Capacities equal to the
/// total supply do not cut off any vertex, and a negative cycle under `c`
/// shows up as a value below `c·x0`.
pub fn forward_value(inst: &InverseInstance, c: &[Rational]) -> Result<Rational, String> {
    let cap: Rational = inst.supplies().iter().filter(|b| b.is_positive()).sum::<Rational>() + Rational::one();
    let mut net = FlowNetwork::new(inst.supplies().to_vec());
    for (j, &(t, h)) in inst.arcs().iter().enumerate() {
        net.add_arc(t, h, c[j].clone(), cap.clone());
    }
    match mcf::solve(&net).map_err(|e| e.to_string())? {
        McfOutcome::Optimal(r) => Ok(r.objective),
        McfOutcome::Infeasible(_) => Err("forward problem infeasible".to_string()),
    }
}

//! The parametric sub-problem and its dual.
//!
//! For a multiplier `z`, `(D^z)` is `max c·y` s.t. `A y = 0`,
//! `−d_j ≤ y_j ≤ 0` on `J` and `x0_j z − d_j ≤ y_j ≤ x0_j z + d_j` on `J̄`.
//! Substituting `y = x0 − y̆` turns it into a bounded flow problem in `y̆`
//! with supplies `b`, which is what [`build_breve_dz`] constructs. Every
//! consumer outside this module sees `(D^z)`-space values only.

mod instance;

use std::cell::Cell;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::mcf::{self, Cut, FlowNetwork, McfOutcome, McfResult};
use crate::numeric::{int, Ext, Rational};

pub use instance::{InverseInstance, Issue, Structure, ValidationError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PsiStatus {
    Feasible { psi: Rational, y: Vec<Rational> },
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsiPoint {
    pub z: Rational,
    pub status: PsiStatus,
}

impl PsiPoint {
    pub fn psi(&self) -> Option<&Rational> {
        match &self.status {
            PsiStatus::Feasible { psi, .. } => Some(psi),
            PsiStatus::Infeasible => None,
        }
    }

    pub fn y(&self) -> Option<&[Rational]> {
        match &self.status {
            PsiStatus::Feasible { y, .. } => Some(y),
            PsiStatus::Infeasible => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self.status, PsiStatus::Feasible { .. })
    }
}

/// Multipliers of the dual sub-problem. `alpha` pairs with the lower
/// bounds of `y`, `beta` with the `J̄` upper bounds. The multiplier of
/// `y_j ≤ 0` on `J` is the slack of the `J` inequality and is not stored,
/// so `beta_j = 0` on `J`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualSolution {
    pub pi: Vec<Rational>,
    pub alpha: Vec<Rational>,
    pub beta: Vec<Rational>,
    pub slope: Rational,
}

impl DualSolution {
    /// `Σ d_j (α_j + β_j)`.
    pub fn weight(&self, inst: &InverseInstance) -> Rational {
        let d = inst.weights();
        (0..d.len()).map(|j| &d[j] * (&self.alpha[j] + &self.beta[j])).sum()
    }

    /// Dual objective at `z`; equals `ψ(z)` for an optimal dual.
    pub fn objective_at(&self, inst: &InverseInstance, z: &Rational) -> Rational {
        self.weight(inst) + z * &self.slope
    }

    /// Builds the cheapest `(α, β)` for the given potentials.
    pub fn from_potentials(inst: &InverseInstance, pi: Vec<Rational>) -> Self {
        let n = inst.num_vars();
        let mut alpha = vec![Rational::zero(); n];
        let mut beta = vec![Rational::zero(); n];
        let mut slope = Rational::zero();
        for j in 0..n {
            let r = &inst.costs()[j] - inst.column_dot(j, &pi);
            if r.is_negative() {
                alpha[j] = -&r;
            } else if inst.in_support(j) {
                beta[j] = r.clone();
            }
            if inst.in_support(j) {
                slope += &r * &inst.x0()[j];
            }
        }
        DualSolution { pi, alpha, beta, slope }
    }

    /// Adjusted costs `c + α − β`.
    pub fn adjusted_costs(&self, inst: &InverseInstance) -> Vec<Rational> {
        (0..inst.num_vars()).map(|j| &inst.costs()[j] + &self.alpha[j] - &self.beta[j]).collect()
    }
}

/// The shifted flow network for `(D̆^z)`. Variable `j` carries
/// `x'_j = y̆_j − lower_j` with capacity `d_j` on `J` and `2 d_j` on `J̄`.
#[derive(Debug, Clone)]
pub struct BreveDz {
    pub network: FlowNetwork,
    pub lower: Vec<Rational>,
    /// `c·x0 − c·lower`, so that `ψ(z) = offset − (flow optimum)`.
    pub offset: Rational,
    /// Set when a Hitchcock supply or demand went negative.
    pub certified_infeasible: Option<Cut>,
}

pub fn build_breve_dz(inst: &InverseInstance, z: &Rational) -> BreveDz {
    let n = inst.num_vars();
    let one_minus_z = int(1) - z;
    let mut lower = Vec::with_capacity(n);
    let mut supplies = inst.supplies().to_vec();
    let mut network_arcs = Vec::with_capacity(n);
    for j in 0..n {
        let d = &inst.weights()[j];
        let (l, cap) = if inst.in_support(j) {
            (&one_minus_z * &inst.x0()[j] - d, d * int(2))
        } else {
            (Rational::zero(), d.clone())
        };
        let (t, h) = inst.arcs()[j];
        supplies[t] -= &l;
        supplies[h] += &l;
        network_arcs.push((t, h, inst.costs()[j].clone(), cap));
        lower.push(l);
    }
    let mut network = FlowNetwork::new(supplies);
    for (t, h, c, u) in network_arcs {
        network.add_arc(t, h, c, u);
    }
    let cl: Rational = inst.costs().iter().zip(&lower).map(|(c, l)| c * l).sum();
    let offset = inst.cost_of_x0() - cl;

    let mut certified_infeasible = None;
    if let Structure::Hitchcock { supplies: a, .. } = inst.structure() {
        let m = a.len();
        let bad = (0..network.node_count).find(|&i| {
            let s = &network.supplies[i];
            if i < m {
                s.is_negative()
            } else {
                s.is_positive()
            }
        });
        if let Some(i) = bad {
            // A source has only outgoing arcs, a terminal only incoming ones.
            let source_side = (0..network.node_count).map(|v| if i < m { v != i } else { v == i }).collect();
            let cut = Cut { source_side };
            debug_assert!(cut.violation(&network).is_positive());
            certified_infeasible = Some(cut);
        }
    }
    BreveDz { network, lower, offset, certified_infeasible }
}

/// One sub-problem solve: the `(D^z)` point plus the flow certificate.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub point: PsiPoint,
    pub mcf: Option<McfResult>,
    pub cut: Option<Cut>,
}

impl Evaluation {
    pub fn psi(&self) -> Option<&Rational> {
        self.point.psi()
    }

    pub fn duals(&self, inst: &InverseInstance) -> Option<DualSolution> {
        let mcf = self.mcf.as_ref()?;
        Some(recover_duals(inst, &self.point.z, &self.point, mcf))
    }
}

pub fn solve_dz(inst: &InverseInstance, z: &Rational) -> Evaluation {
    let breve = build_breve_dz(inst, z);
    if let Some(cut) = breve.certified_infeasible {
        return Evaluation { point: PsiPoint { z: z.clone(), status: PsiStatus::Infeasible }, mcf: None, cut: Some(cut) };
    }
    let outcome = mcf::solve(&breve.network).expect("sub-problem network is balanced by construction");
    match outcome {
        McfOutcome::Infeasible(cut) => {
            Evaluation { point: PsiPoint { z: z.clone(), status: PsiStatus::Infeasible }, mcf: None, cut: Some(cut) }
        }
        McfOutcome::Optimal(res) => {
            let y: Vec<Rational> = (0..inst.num_vars())
                .map(|j| &inst.x0()[j] - &res.flow[j] - &breve.lower[j])
                .collect();
            let psi: Rational = inst.costs().iter().zip(&y).map(|(c, y)| c * y).sum();
            assert_eq!(psi, &breve.offset - &res.objective, "substitution bookkeeping");
            let point = PsiPoint { z: z.clone(), status: PsiStatus::Feasible { psi, y } };
            debug_assert!(check_point(inst, &point).is_ok());
            Evaluation { point, mcf: Some(res), cut: None }
        }
    }
}

pub fn eval_psi(inst: &InverseInstance, z: &Rational) -> PsiPoint {
    solve_dz(inst, z).point
}

/// Checks `A y = 0`, the bounds of `(D^z)` and `ψ = c·y`.
pub fn check_point(inst: &InverseInstance, point: &PsiPoint) -> Result<(), String> {
    let PsiStatus::Feasible { psi, y } = &point.status else { return Ok(()) };
    let mut bal = vec![Rational::zero(); inst.node_count()];
    for (j, &(t, h)) in inst.arcs().iter().enumerate() {
        bal[t] += &y[j];
        bal[h] -= &y[j];
        let (lo, hi) = y_bounds(inst, j, &point.z);
        if y[j] < lo || y[j] > hi {
            return Err(format!("y_{} = {} outside [{lo}, {hi}]", j + 1, y[j]));
        }
    }
    if let Some(i) = bal.iter().position(|v| !v.is_zero()) {
        return Err(format!("A y != 0 at node {i}"));
    }
    let cy: Rational = inst.costs().iter().zip(y).map(|(c, y)| c * y).sum();
    if &cy != psi {
        return Err(format!("psi {psi} != c·y {cy}"));
    }
    Ok(())
}

fn y_bounds(inst: &InverseInstance, j: usize, z: &Rational) -> (Rational, Rational) {
    let d = &inst.weights()[j];
    if inst.in_support(j) {
        let mid = &inst.x0()[j] * z;
        (&mid - d, mid + d)
    } else {
        (-d, Rational::zero())
    }
}

/// Dual multipliers from the flow potentials. The potentials carry over
/// unchanged; `(α, β)` are read off the reduced costs `r = c − π A`.
/// Panics if the result fails complementary slackness or strong duality,
/// which would mean the flow certificate was wrong.
pub fn recover_duals(inst: &InverseInstance, z: &Rational, point: &PsiPoint, mcf: &McfResult) -> DualSolution {
    let PsiStatus::Feasible { psi, y } = &point.status else {
        panic!("recover_duals needs a feasible point");
    };
    let duals = DualSolution::from_potentials(inst, mcf.potentials.clone());
    for (j, yj) in y.iter().enumerate() {
        let (lo, hi) = y_bounds(inst, j, z);
        if duals.alpha[j].is_positive() {
            assert_eq!(yj, &lo, "alpha_{} > 0 but y off its lower bound", j + 1);
        }
        if duals.beta[j].is_positive() {
            assert_eq!(yj, &hi, "beta_{} > 0 but y off its upper bound", j + 1);
        }
        if !inst.in_support(j) && duals.alpha[j].is_zero() {
            let r = &inst.costs()[j] - inst.column_dot(j, &duals.pi);
            if r.is_positive() {
                assert!(yj.is_zero(), "slack of column {} positive but y != 0", j + 1);
            }
        }
    }
    let dual_value = duals.objective_at(inst, z);
    assert_eq!(&dual_value, psi, "strong duality at z = {z}");
    duals
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubproblemError {
    #[error("sub-problem infeasible at offset point {0}")]
    InfeasibleOffset(Rational),
    #[error("sub-problem infeasible at {0}")]
    Infeasible(Rational),
    #[error("segment_extent needs two distinct points")]
    SamePoint,
}

/// Range `[z0ˡ, z0ʳ]` on which the line through `(z0, y0)` and `(z1, y1)`
/// stays feasible for `(D^z)`.
pub fn segment_extent(
    inst: &InverseInstance,
    z0: &Rational,
    z1: &Rational,
    y0: &[Rational],
    y1: &[Rational],
) -> Result<(Ext, Ext), SubproblemError> {
    if z0 == z1 {
        return Err(SubproblemError::SamePoint);
    }
    let dz = z0 - z1;
    let mut lows = Vec::new();
    let mut highs = Vec::new();
    for j in 0..inst.num_vars() {
        let k = (&y0[j] - &y1[j]) / &dz;
        let d = &inst.weights()[j];
        let kz = &k * z0;
        if inst.in_support(j) {
            let x = &inst.x0()[j];
            let slope = &k - x;
            if slope.is_zero() {
                continue;
            }
            let a = (&kz - d - &y0[j]) / &slope;
            let b = (&kz + d - &y0[j]) / &slope;
            if slope.is_positive() {
                lows.push(a);
                highs.push(b);
            } else {
                lows.push(b);
                highs.push(a);
            }
        } else {
            if k.is_zero() {
                continue;
            }
            let a = (&kz - d - &y0[j]) / &k;
            let b = (&kz - &y0[j]) / &k;
            if k.is_positive() {
                lows.push(a);
                highs.push(b);
            } else {
                lows.push(b);
                highs.push(a);
            }
        }
    }
    let left = lows.into_iter().max().map_or(Ext::NegInf, Ext::Finite);
    let right = highs.into_iter().min().map_or(Ext::PosInf, Ext::Finite);
    Ok((left, right))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TurningTest {
    Turning { k_left: Rational, k_right: Rational },
    NotTurning { k: Rational },
}

/// ψ at `z − Δ/2, z − Δ/4, z, z + Δ/4, z + Δ/2` and the four chord slopes
/// from the centre, in that order.
#[derive(Debug, Clone)]
pub struct FivePoint {
    pub zs: [Rational; 5],
    pub psi: [Rational; 5],
    pub k: [Rational; 4],
    pub center: Evaluation,
}

impl FivePoint {
    pub fn test(&self) -> TurningTest {
        let [k1, k2, k3, k4] = &self.k;
        if k1 == k2 && k3 == k4 && k2 != k3 {
            TurningTest::Turning { k_left: k1.clone(), k_right: k4.clone() }
        } else {
            TurningTest::NotTurning { k: k2.clone() }
        }
    }
}

/// `1 / (2 |J̄| x0_max)²`.
pub fn big_delta(inst: &InverseInstance) -> Rational {
    let d = Rational::from_integer(inst.denominator_bound());
    (&d * &d).recip()
}

/// Sub-problem solver bound to an instance, counting solves.
pub struct Subproblem<'a> {
    inst: &'a InverseInstance,
    big_delta: Rational,
    solves: Cell<usize>,
}

impl<'a> Subproblem<'a> {
    pub fn new(inst: &'a InverseInstance) -> Self {
        Subproblem { inst, big_delta: big_delta(inst), solves: Cell::new(0) }
    }

    pub fn instance(&self) -> &'a InverseInstance {
        self.inst
    }

    pub fn big_delta(&self) -> &Rational {
        &self.big_delta
    }

    pub fn solves(&self) -> usize {
        self.solves.get()
    }

    pub fn solve(&self, z: &Rational) -> Evaluation {
        self.solves.set(self.solves.get() + 1);
        solve_dz(self.inst, z)
    }

    pub fn feasible(&self, z: &Rational) -> bool {
        self.solves.set(self.solves.get() + 1);
        let breve = build_breve_dz(self.inst, z);
        if breve.certified_infeasible.is_some() {
            return false;
        }
        let f = mcf::feasibility_check(&breve.network).expect("balanced by construction");
        matches!(f, mcf::Feasibility::Feasible)
    }

    /// Duals at `z`; errors if `(D^z)` is infeasible.
    pub fn duals(&self, z: &Rational) -> Result<(Evaluation, DualSolution), SubproblemError> {
        let ev = self.solve(z);
        match ev.duals(self.inst) {
            Some(d) => Ok((ev, d)),
            None => Err(SubproblemError::Infeasible(z.clone())),
        }
    }

    pub fn five_point(&self, z: &Rational) -> Result<FivePoint, SubproblemError> {
        let half = &self.big_delta / int(2);
        let quarter = &self.big_delta / int(4);
        let zs = [z - &half, z - &quarter, z.clone(), z + &quarter, z + &half];
        let mut psi: Vec<Rational> = Vec::with_capacity(5);
        let mut center = None;
        for (i, zi) in zs.iter().enumerate() {
            let ev = self.solve(zi);
            let Some(p) = ev.psi() else {
                return Err(SubproblemError::InfeasibleOffset(zi.clone()));
            };
            psi.push(p.clone());
            if i == 2 {
                center = Some(ev);
            }
        }
        let chord = |i: usize| (&psi[2] - &psi[i]) / (z - &zs[i]);
        let k = [chord(0), chord(1), chord(3), chord(4)];
        let psi: [Rational; 5] = psi.try_into().expect("five values");
        Ok(FivePoint { zs, psi, k, center: center.expect("centre evaluated") })
    }

    pub fn is_turning_coordinate(&self, z: &Rational) -> Result<TurningTest, SubproblemError> {
        Ok(self.five_point(z)?.test())
    }
}

pub fn is_turning_coordinate(inst: &InverseInstance, z: &Rational) -> Result<TurningTest, SubproblemError> {
    Subproblem::new(inst).is_turning_coordinate(z)
}

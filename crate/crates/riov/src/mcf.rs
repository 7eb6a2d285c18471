//! Bounded minimum-cost flow with exact rational data.
//!
//! Successive shortest paths on reduced costs. Arcs with negative cost are
//! saturated up front, so every residual arc starts with a nonnegative cost
//! and zero potentials are valid. Infeasibility is decided by a max-flow
//! pass first, which also yields a violated cut as a certificate.

use std::collections::VecDeque;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::numeric::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
    pub cost: Rational,
    pub capacity: Rational,
}

/// `min Σ c x` s.t. outflow(i) − inflow(i) = b(i), `0 ≤ x ≤ u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowNetwork {
    pub node_count: usize,
    pub supplies: Vec<Rational>,
    pub arcs: Vec<Arc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum McfError {
    #[error("supplies sum to {0}, not 0")]
    Unbalanced(Rational),
    #[error("arc {0} has negative capacity")]
    NegativeCapacity(usize),
    #[error("arc {0} is a self-loop")]
    SelfLoop(usize),
    #[error("arc {arc} references node {node} outside 0..{count}")]
    BadNode { arc: usize, node: usize, count: usize },
    #[error("expected {expected} supplies, got {got}")]
    SupplyCount { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct McfResult {
    pub flow: Vec<Rational>,
    pub objective: Rational,
    /// Node potentials; the reduced cost of arc (i, j) is `c − π(i) + π(j)`.
    pub potentials: Vec<Rational>,
}

/// Nodes on the source side of a cut with `b(S) > u(out of S)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cut {
    pub source_side: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum McfOutcome {
    Optimal(McfResult),
    Infeasible(Cut),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Feasible,
    Infeasible(Cut),
}

impl FlowNetwork {
    pub fn new(supplies: Vec<Rational>) -> Self {
        FlowNetwork { node_count: supplies.len(), supplies, arcs: Vec::new() }
    }

    pub fn add_arc(&mut self, tail: usize, head: usize, cost: Rational, capacity: Rational) -> usize {
        self.arcs.push(Arc { tail, head, cost, capacity });
        self.arcs.len() - 1
    }

    pub fn validate(&self) -> Result<(), McfError> {
        if self.supplies.len() != self.node_count {
            return Err(McfError::SupplyCount { expected: self.node_count, got: self.supplies.len() });
        }
        for (k, a) in self.arcs.iter().enumerate() {
            for node in [a.tail, a.head] {
                if node >= self.node_count {
                    return Err(McfError::BadNode { arc: k, node, count: self.node_count });
                }
            }
            if a.tail == a.head {
                return Err(McfError::SelfLoop(k));
            }
            if a.capacity.is_negative() {
                return Err(McfError::NegativeCapacity(k));
            }
        }
        let total: Rational = self.supplies.iter().sum();
        if !total.is_zero() {
            return Err(McfError::Unbalanced(total));
        }
        Ok(())
    }

    pub fn reduced_cost(&self, arc: usize, potentials: &[Rational]) -> Rational {
        let a = &self.arcs[arc];
        &a.cost - &potentials[a.tail] + &potentials[a.head]
    }
}

impl Cut {
    /// Net supply inside the cut minus the capacity leaving it; positive
    /// means no feasible flow exists.
    pub fn violation(&self, net: &FlowNetwork) -> Rational {
        let mut v: Rational = (0..net.node_count)
            .filter(|&i| self.source_side[i])
            .map(|i| net.supplies[i].clone())
            .sum();
        for a in &net.arcs {
            if self.source_side[a.tail] && !self.source_side[a.head] {
                v -= &a.capacity;
            }
        }
        v
    }
}

struct Residual {
    to: Vec<usize>,
    cap: Vec<Rational>,
    cost: Vec<Rational>,
    adj: Vec<Vec<usize>>,
}

impl Residual {
    fn new(nodes: usize) -> Self {
        Residual { to: Vec::new(), cap: Vec::new(), cost: Vec::new(), adj: vec![Vec::new(); nodes] }
    }

    fn add(&mut self, u: usize, v: usize, cap: Rational, cost: Rational) -> usize {
        let e = self.to.len();
        self.to.push(v);
        self.cap.push(cap);
        self.cost.push(cost.clone());
        self.adj[u].push(e);
        self.to.push(u);
        self.cap.push(Rational::zero());
        self.cost.push(-cost);
        self.adj[v].push(e + 1);
        e
    }

    fn push(&mut self, e: usize, amount: &Rational) {
        self.cap[e] -= amount;
        self.cap[e ^ 1] += amount;
    }

    fn from(&self, e: usize) -> usize {
        self.to[e ^ 1]
    }

    fn reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let v = self.to[e];
                if !seen[v] && self.cap[e].is_positive() {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }
}

/// Attaches a super source (index `n`) and super sink (`n + 1`) to the
/// residual graph for the given excesses; returns the total excess.
fn attach_terminals(res: &mut Residual, excess: &[Rational]) -> Rational {
    let n = excess.len();
    let mut total = Rational::zero();
    for (i, e) in excess.iter().enumerate() {
        if e.is_positive() {
            res.add(n, i, e.clone(), Rational::zero());
            total += e;
        } else if e.is_negative() {
            res.add(i, n + 1, -e, Rational::zero());
        }
    }
    total
}

fn cut_from(res: &Residual, n: usize) -> Cut {
    let seen = res.reachable(n);
    Cut { source_side: seen[..n].to_vec() }
}

/// Edmonds–Karp; returns the flow value pushed from `s` to `t`.
fn max_flow(res: &mut Residual, s: usize, t: usize) -> Rational {
    let mut value = Rational::zero();
    loop {
        let mut pred: Vec<Option<usize>> = vec![None; res.adj.len()];
        let mut seen = vec![false; res.adj.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            if u == t {
                break;
            }
            for &e in &res.adj[u] {
                let v = res.to[e];
                if !seen[v] && res.cap[e].is_positive() {
                    seen[v] = true;
                    pred[v] = Some(e);
                    queue.push_back(v);
                }
            }
        }
        if !seen[t] {
            return value;
        }
        let path = trace(res, &pred, s, t);
        let amount = path.iter().map(|&e| &res.cap[e]).min().expect("nonempty path").clone();
        for &e in &path {
            res.push(e, &amount);
        }
        value += amount;
    }
}

fn trace(res: &Residual, pred: &[Option<usize>], s: usize, t: usize) -> Vec<usize> {
    let mut path = Vec::new();
    let mut v = t;
    while v != s {
        let e = pred[v].expect("path predecessor");
        path.push(e);
        v = res.from(e);
    }
    path.reverse();
    path
}

pub fn feasibility_check(net: &FlowNetwork) -> Result<Feasibility, McfError> {
    net.validate()?;
    let n = net.node_count;
    let mut res = Residual::new(n + 2);
    for a in &net.arcs {
        res.add(a.tail, a.head, a.capacity.clone(), Rational::zero());
    }
    let total = attach_terminals(&mut res, &net.supplies);
    let value = max_flow(&mut res, n, n + 1);
    if value == total {
        Ok(Feasibility::Feasible)
    } else {
        let cut = cut_from(&res, n);
        debug_assert!(cut.violation(net).is_positive());
        Ok(Feasibility::Infeasible(cut))
    }
}

pub fn solve(net: &FlowNetwork) -> Result<McfOutcome, McfError> {
    if let Feasibility::Infeasible(cut) = feasibility_check(net)? {
        return Ok(McfOutcome::Infeasible(cut));
    }
    let n = net.node_count;
    let (s, t) = (n, n + 1);
    let mut res = Residual::new(n + 2);
    let mut excess = net.supplies.clone();
    let mut edge_of = Vec::with_capacity(net.arcs.len());
    for a in &net.arcs {
        let e = res.add(a.tail, a.head, a.capacity.clone(), a.cost.clone());
        if a.cost.is_negative() {
            res.push(e, &a.capacity);
            excess[a.tail] -= &a.capacity;
            excess[a.head] += &a.capacity;
        }
        edge_of.push(e);
    }
    attach_terminals(&mut res, &excess);

    let nodes = n + 2;
    let mut pot = vec![Rational::zero(); nodes];
    loop {
        let (dist, pred) = dijkstra(&res, &pot, s);
        let Some(dt) = dist[t].clone() else { break };
        for v in 0..nodes {
            match &dist[v] {
                Some(dv) if dv < &dt => pot[v] += dv,
                _ => pot[v] += &dt,
            }
        }
        let path = trace(&res, &pred, s, t);
        let amount = path.iter().map(|&e| &res.cap[e]).min().expect("nonempty path").clone();
        for &e in &path {
            res.push(e, &amount);
        }
    }
    // forward edges out of the super source are the supply arcs
    let unrouted = res.adj[s].iter().any(|&e| e % 2 == 0 && !res.cap[e].is_zero());
    assert!(!unrouted, "feasible network left supply unrouted");

    let flow: Vec<Rational> = edge_of.iter().map(|&e| res.cap[e ^ 1].clone()).collect();
    let objective: Rational = net.arcs.iter().zip(&flow).map(|(a, x)| &a.cost * x).sum();
    let potentials: Vec<Rational> = pot[..n].iter().map(|p| -p).collect();
    let result = McfResult { flow, objective, potentials };
    if let Err(msg) = result.check(net) {
        panic!("min-cost flow certificate failed: {msg}");
    }
    Ok(McfOutcome::Optimal(result))
}

/// Dense O(V²) Dijkstra on reduced costs. Ties go to the lowest node
/// index, then to the first edge in arc order.
fn dijkstra(res: &Residual, pot: &[Rational], s: usize) -> (Vec<Option<Rational>>, Vec<Option<usize>>) {
    let nodes = res.adj.len();
    let mut dist: Vec<Option<Rational>> = vec![None; nodes];
    let mut pred = vec![None; nodes];
    let mut done = vec![false; nodes];
    dist[s] = Some(Rational::zero());
    loop {
        let mut best: Option<usize> = None;
        for v in 0..nodes {
            if done[v] {
                continue;
            }
            if let Some(dv) = &dist[v] {
                if best.is_none_or(|b| dv < dist[b].as_ref().unwrap()) {
                    best = Some(v);
                }
            }
        }
        let Some(u) = best else { break };
        done[u] = true;
        let du = dist[u].clone().unwrap();
        for &e in &res.adj[u] {
            if !res.cap[e].is_positive() {
                continue;
            }
            let v = res.to[e];
            if done[v] {
                continue;
            }
            let rc = &res.cost[e] + &pot[u] - &pot[v];
            debug_assert!(!rc.is_negative(), "negative reduced cost on residual edge {e}");
            let cand = &du + rc;
            if dist[v].as_ref().is_none_or(|dv| &cand < dv) {
                dist[v] = Some(cand);
                pred[v] = Some(e);
            }
        }
    }
    (dist, pred)
}

impl McfResult {
    /// Conservation, bounds, complementary slackness and strong duality.
    pub fn check(&self, net: &FlowNetwork) -> Result<(), String> {
        let mut net_out = vec![Rational::zero(); net.node_count];
        for (k, (a, x)) in net.arcs.iter().zip(&self.flow).enumerate() {
            if x.is_negative() || x > &a.capacity {
                return Err(format!("arc {k}: flow {x} outside [0, {}]", a.capacity));
            }
            net_out[a.tail] += x;
            net_out[a.head] -= x;
            let r = net.reduced_cost(k, &self.potentials);
            if r.is_positive() && !x.is_zero() {
                return Err(format!("arc {k}: reduced cost {r} > 0 with flow {x}"));
            }
            if r.is_negative() && x != &a.capacity {
                return Err(format!("arc {k}: reduced cost {r} < 0 with flow {x} below capacity"));
            }
        }
        for (i, (out, b)) in net_out.iter().zip(&net.supplies).enumerate() {
            if out != b {
                return Err(format!("node {i}: net outflow {out} != supply {b}"));
            }
        }
        let mut dual: Rational = self.potentials.iter().zip(&net.supplies).map(|(p, b)| p * b).sum();
        for k in 0..net.arcs.len() {
            let r = net.reduced_cost(k, &self.potentials);
            if r.is_negative() {
                dual += r * &net.arcs[k].capacity;
            }
        }
        if dual != self.objective {
            return Err(format!("dual value {dual} != primal value {}", self.objective));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{int, ratio};
    use num_traits::ToPrimitive;
    use proptest::prelude::*;

    fn two_node(cap: Rational) -> FlowNetwork {
        let mut net = FlowNetwork::new(vec![int(1), int(-1)]);
        net.add_arc(0, 1, int(5), cap);
        net
    }

    #[test]
    fn forced_flow() {
        let McfOutcome::Optimal(r) = solve(&two_node(int(2))).unwrap() else { panic!() };
        assert_eq!(r.flow, vec![int(1)]);
        assert_eq!(r.objective, int(5));
    }

    #[test]
    fn capacity_short_of_demand() {
        let net = two_node(ratio(1, 2));
        let McfOutcome::Infeasible(cut) = solve(&net).unwrap() else { panic!() };
        assert_eq!(cut.source_side, vec![true, false]);
        assert_eq!(cut.violation(&net), ratio(1, 2));
        assert!(matches!(feasibility_check(&net).unwrap(), Feasibility::Infeasible(_)));
    }

    #[test]
    fn input_errors() {
        let mut net = FlowNetwork::new(vec![int(1), int(0)]);
        net.add_arc(0, 1, int(1), int(1));
        assert!(matches!(solve(&net), Err(McfError::Unbalanced(_))));
        let net = two_node(int(-1));
        assert_eq!(solve(&net), Err(McfError::NegativeCapacity(0)));
        let mut net = FlowNetwork::new(vec![int(0), int(0)]);
        net.add_arc(1, 1, int(1), int(1));
        assert_eq!(solve(&net), Err(McfError::SelfLoop(0)));
        let mut net = FlowNetwork::new(vec![int(0), int(0)]);
        net.add_arc(0, 2, int(1), int(1));
        assert!(matches!(solve(&net), Err(McfError::BadNode { .. })));
    }

    #[test]
    fn negative_cycle_is_saturated() {
        let mut net = FlowNetwork::new(vec![int(0); 3]);
        net.add_arc(0, 1, int(-2), int(3));
        net.add_arc(1, 2, int(1), int(2));
        net.add_arc(2, 0, int(0), int(5));
        let McfOutcome::Optimal(r) = solve(&net).unwrap() else { panic!() };
        assert_eq!(r.flow, vec![int(2), int(2), int(2)]);
        assert_eq!(r.objective, int(-2));
    }

    #[test]
    fn ample_transportation_is_feasible() {
        let mut net = FlowNetwork::new(vec![int(3), int(2), int(-4), int(-1)]);
        for i in 0..2 {
            for j in 2..4 {
                net.add_arc(i, j, int(1), int(10));
            }
        }
        assert_eq!(feasibility_check(&net).unwrap(), Feasibility::Feasible);
    }

    #[test]
    fn rational_supplies() {
        let mut net = FlowNetwork::new(vec![ratio(7, 3), int(0), ratio(-7, 3)]);
        net.add_arc(0, 1, int(1), ratio(1, 2));
        net.add_arc(1, 2, int(1), int(5));
        net.add_arc(0, 2, int(4), int(5));
        let McfOutcome::Optimal(r) = solve(&net).unwrap() else { panic!() };
        assert_eq!(r.flow, vec![ratio(1, 2), ratio(1, 2), ratio(11, 6)]);
        assert_eq!(r.objective, int(1) + ratio(22, 3));
    }

    /// Every integral flow within bounds; vertices of the flow polytope are
    /// integral for integral data, so this covers them all.
    fn brute_force(net: &FlowNetwork) -> Option<Rational> {
        let caps: Vec<i64> = net.arcs.iter().map(|a| a.capacity.to_integer().to_i64().unwrap()).collect();
        let mut x = vec![0i64; caps.len()];
        let mut best: Option<Rational> = None;
        loop {
            let mut bal = vec![int(0); net.node_count];
            for (k, a) in net.arcs.iter().enumerate() {
                bal[a.tail] += int(x[k]);
                bal[a.head] -= int(x[k]);
            }
            if bal == net.supplies {
                let v: Rational = net.arcs.iter().zip(&x).map(|(a, &f)| &a.cost * int(f)).sum();
                if best.as_ref().is_none_or(|b| &v < b) {
                    best = Some(v);
                }
            }
            let mut k = 0;
            loop {
                if k == x.len() {
                    return best;
                }
                if x[k] < caps[k] {
                    x[k] += 1;
                    break;
                }
                x[k] = 0;
                k += 1;
            }
        }
    }

    fn arb_network() -> impl Strategy<Value = FlowNetwork> {
        let arcs = prop::collection::vec((0usize..5, 0usize..5, -4i64..8, 0i64..4), 1..7);
        let supplies = prop::collection::vec(-3i64..4, 4);
        (arcs, supplies).prop_map(|(arcs, sup)| {
            let mut b: Vec<Rational> = sup.iter().map(|&s| int(s)).collect();
            b.push(-int(sup.iter().sum()));
            let mut net = FlowNetwork::new(b);
            for (t, h, c, u) in arcs {
                if t != h {
                    net.add_arc(t, h, int(c), int(u));
                }
            }
            net
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]
        #[test]
        fn matches_exhaustive_enumeration(net in arb_network()) {
            let expected = brute_force(&net);
            match solve(&net).unwrap() {
                McfOutcome::Optimal(r) => {
                    prop_assert_eq!(Some(r.objective.clone()), expected);
                    prop_assert!(r.flow.iter().all(crate::numeric::is_integer));
                    prop_assert!(r.check(&net).is_ok());
                }
                McfOutcome::Infeasible(cut) => {
                    prop_assert_eq!(expected, None);
                    prop_assert!(cut.violation(&net).is_positive());
                }
            }
        }

        #[test]
        fn deterministic(net in arb_network()) {
            prop_assert_eq!(solve(&net).unwrap(), solve(&net).unwrap());
        }
    }
}

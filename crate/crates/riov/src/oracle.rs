//! Brute-force reference solvers for differential testing.
//!
//! Everything here enumerates bases of a dense LP, which is exponential
//! and only meant for small instances. The size caps default to 12 LP
//! variables and 8 inverse-problem variables; set `RIOV_ORACLE_MAX_VARS`
//! and `RIOV_ORACLE_MAX_INVERSE_VARS` to raise them for slow runs.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::numeric::Rational;
use crate::subproblem::{InverseInstance, PsiPoint, PsiStatus};

pub const DEFAULT_MAX_VARS: usize = 12;
pub const DEFAULT_MAX_INVERSE_VARS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub lp_vars: usize,
    pub inverse_vars: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { lp_vars: DEFAULT_MAX_VARS, inverse_vars: DEFAULT_MAX_INVERSE_VARS }
    }
}

impl Caps {
    pub fn from_env() -> Self {
        let read = |key: &str, default: usize| {
            std::env::var(key).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(default)
        };
        Caps {
            lp_vars: read("RIOV_ORACLE_MAX_VARS", DEFAULT_MAX_VARS),
            inverse_vars: read("RIOV_ORACLE_MAX_INVERSE_VARS", DEFAULT_MAX_INVERSE_VARS),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{n} variables exceeds the oracle cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("free variables have dependent columns; the feasible set has no vertex")]
    Lineality,
    #[error("inconsistent dimensions: {0}")]
    Shape(String),
}

/// `min c·x` s.t. `A x = b`, `lower ≤ x ≤ upper`; `None` is an infinite
/// bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseLp {
    pub a: Vec<Vec<Rational>>,
    pub b: Vec<Rational>,
    pub c: Vec<Rational>,
    pub lower: Vec<Option<Rational>>,
    pub upper: Vec<Option<Rational>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rational, point: Vec<Rational> },
    Infeasible,
    Unbounded,
}

impl DenseLp {
    pub fn num_vars(&self) -> usize {
        self.c.len()
    }

    fn check_shape(&self) -> Result<(), OracleError> {
        let n = self.num_vars();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(OracleError::Shape("bounds".into()));
        }
        if self.a.len() != self.b.len() || self.a.iter().any(|row| row.len() != n) {
            return Err(OracleError::Shape("constraint matrix".into()));
        }
        Ok(())
    }
}

pub fn enumerate_vertices_solve(lp: &DenseLp) -> Result<LpOutcome, OracleError> {
    enumerate_vertices_solve_capped(lp, Caps::from_env().lp_vars)
}

pub fn enumerate_vertices_solve_capped(lp: &DenseLp, cap: usize) -> Result<LpOutcome, OracleError> {
    if lp.num_vars() > cap {
        return Err(OracleError::TooLarge { n: lp.num_vars(), cap });
    }
    solve_dense(lp)
}

/// Exact inverse of a square matrix, `None` if singular.
fn invert(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let k = m.len();
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let mut inv: Vec<Vec<Rational>> =
        (0..k).map(|i| (0..k).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()).collect();
    for col in 0..k {
        let p = (col..k).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, p);
        inv.swap(col, p);
        let f = a[col][col].recip();
        for v in a[col].iter_mut().chain(inv[col].iter_mut()) {
            *v *= &f;
        }
        for r in 0..k {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..k {
                    let t = &f * &a[col][c];
                    a[r][c] -= t;
                    let t = &f * &inv[col][c];
                    inv[r][c] -= t;
                }
            }
        }
    }
    Some(inv)
}

fn solve_dense(lp: &DenseLp) -> Result<LpOutcome, OracleError> {
    lp.check_shape()?;
    let n = lp.num_vars();
    let is_free = |j: usize| lp.lower[j].is_none() && lp.upper[j].is_none();

    // Row-reduce [A | b], pivoting on free columns first so they can be
    // eliminated and solved for afterwards.
    let mut m: Vec<Vec<Rational>> =
        lp.a.iter().zip(&lp.b).map(|(row, rhs)| row.iter().cloned().chain([rhs.clone()]).collect()).collect();
    let order: Vec<usize> = (0..n).filter(|&j| is_free(j)).chain((0..n).filter(|&j| !is_free(j))).collect();
    let mut pivots: Vec<usize> = Vec::new();
    for &col in &order {
        let r = pivots.len();
        let Some(p) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(r, p);
        let f = m[r][col].recip();
        for v in m[r].iter_mut() {
            *v *= &f;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let f = row[col].clone();
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(col);
    }
    let rank = pivots.len();
    if m[rank..].iter().any(|row| !row[n].is_zero()) {
        return Ok(LpOutcome::Infeasible);
    }
    let free_count = (0..n).filter(|&j| is_free(j)).count();
    if pivots[..free_count.min(rank)].iter().filter(|&&c| is_free(c)).count() != free_count {
        return Err(OracleError::Lineality);
    }

    let bounded: Vec<usize> = (0..n).filter(|&j| !is_free(j)).collect();
    let rows: Vec<usize> = (free_count..rank).collect();
    let k = rows.len();
    // objective with free variables substituted out
    let mut cost: Vec<Rational> = lp.c.clone();
    let mut constant = Rational::zero();
    for i in 0..free_count {
        let cf = lp.c[pivots[i]].clone();
        if cf.is_zero() {
            continue;
        }
        constant += &cf * &m[i][n];
        for &j in &bounded {
            let t = &cf * &m[i][j];
            cost[j] -= t;
        }
    }
    let trivially_bounded = bounded.iter().all(|&j| {
        (!cost[j].is_positive() || lp.lower[j].is_some()) && (!cost[j].is_negative() || lp.upper[j].is_some())
    });

    let mut best: Option<(Rational, Vec<Rational>)> = None;
    let mut improving_ray = false;
    let mut combo: Vec<usize> = (0..k).collect();
    if k > bounded.len() {
        return Ok(LpOutcome::Infeasible);
    }
    loop {
        let basis: Vec<usize> = combo.iter().map(|&i| bounded[i]).collect();
        let sub: Vec<Vec<Rational>> = rows.iter().map(|&r| basis.iter().map(|&j| m[r][j].clone()).collect()).collect();
        if let Some(inv) = invert(&sub) {
            let nonbasic: Vec<usize> = bounded.iter().copied().filter(|j| !basis.contains(j)).collect();
            let choices: Vec<Vec<Rational>> = nonbasic
                .iter()
                .map(|&j| {
                    let mut v: Vec<Rational> = lp.lower[j].iter().chain(lp.upper[j].iter()).cloned().collect();
                    v.dedup();
                    v
                })
                .collect();
            let mut pick = vec![0usize; nonbasic.len()];
            'assign: loop {
                let mut x = vec![Rational::zero(); n];
                for (t, &j) in nonbasic.iter().enumerate() {
                    x[j] = choices[t][pick[t]].clone();
                }
                let rhs: Vec<Rational> = rows
                    .iter()
                    .map(|&r| {
                        let mut v = m[r][n].clone();
                        for &j in &nonbasic {
                            if !x[j].is_zero() && !m[r][j].is_zero() {
                                v -= &m[r][j] * &x[j];
                            }
                        }
                        v
                    })
                    .collect();
                let mut ok = true;
                for (bi, &j) in basis.iter().enumerate() {
                    let v: Rational = (0..k).map(|t| &inv[bi][t] * &rhs[t]).sum();
                    if lp.lower[j].as_ref().is_some_and(|l| &v < l) || lp.upper[j].as_ref().is_some_and(|u| &v > u) {
                        ok = false;
                        break;
                    }
                    x[j] = v;
                }
                if ok {
                    let value: Rational = &constant + bounded.iter().map(|&j| &cost[j] * &x[j]).sum::<Rational>();
                    if best.as_ref().is_none_or(|(b, _)| &value < b) {
                        for i in 0..free_count {
                            let mut v = m[i][n].clone();
                            for &j in &bounded {
                                v -= &m[i][j] * &x[j];
                            }
                            x[pivots[i]] = v;
                        }
                        best = Some((value, x));
                    }
                }
                // odometer over bound choices
                let mut t = 0;
                loop {
                    if t == pick.len() {
                        break 'assign;
                    }
                    pick[t] += 1;
                    if pick[t] < choices[t].len() {
                        break;
                    }
                    pick[t] = 0;
                    t += 1;
                }
            }
            if !trivially_bounded && !improving_ray {
                improving_ray = has_improving_ray(lp, &m, &rows, &basis, &nonbasic, &inv, &cost);
            }
        }
        if !next_combination(&mut combo, bounded.len()) {
            break;
        }
    }
    Ok(match best {
        None => LpOutcome::Infeasible,
        Some(_) if improving_ray => LpOutcome::Unbounded,
        Some((value, point)) => LpOutcome::Optimal { value, point },
    })
}

/// Edge directions out of the basis that stay feasible forever and lower
/// the objective. Every extreme ray of the recession cone is one of these.
fn has_improving_ray(
    lp: &DenseLp,
    m: &[Vec<Rational>],
    rows: &[usize],
    basis: &[usize],
    nonbasic: &[usize],
    inv: &[Vec<Rational>],
    cost: &[Rational],
) -> bool {
    for &j in nonbasic {
        let col: Vec<Rational> = rows.iter().map(|&r| m[r][j].clone()).collect();
        let w: Vec<Rational> = inv.iter().map(|row| row.iter().zip(&col).map(|(a, b)| a * b).sum()).collect();
        for dir in [1i64, -1] {
            let open = if dir > 0 { lp.upper[j].is_none() } else { lp.lower[j].is_none() };
            if !open {
                continue;
            }
            let sign = Rational::from_integer(dir.into());
            let mut gain = &cost[j] * &sign;
            let mut valid = true;
            for (bi, &b) in basis.iter().enumerate() {
                let d = -(&w[bi] * &sign);
                if (d.is_positive() && lp.upper[b].is_some()) || (d.is_negative() && lp.lower[b].is_some()) {
                    valid = false;
                    break;
                }
                gain += &cost[b] * d;
            }
            if valid && gain.is_negative() {
                return true;
            }
        }
    }
    false
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for t in i + 1..k {
                c[t] = c[t - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleInverse {
    Optimal { objective: Rational, c_star: Vec<Rational> },
    Infeasible,
}

pub fn oracle_inverse(inst: &InverseInstance) -> Result<OracleInverse, OracleError> {
    oracle_inverse_capped(inst, Caps::from_env().inverse_vars)
}

/// Solves the inverse problem as one LP in `(π, α, β)`:
/// `min Σ d(α + β)` s.t. `π A_j ≤ c_j + α_j − β_j` on `J`, equality on
/// `J̄`, and `Σ_J̄ (c_j + α_j − β_j) x0_j = K`. One potential per connected
/// component is pinned to 0 so the potentials have no lineality.
pub fn oracle_inverse_capped(inst: &InverseInstance, cap: usize) -> Result<OracleInverse, OracleError> {
    let n = inst.num_vars();
    if n > cap {
        return Err(OracleError::TooLarge { n, cap });
    }
    let nodes = inst.node_count();
    let mut parent: Vec<usize> = (0..nodes).collect();
    fn find(p: &mut [usize], mut v: usize) -> usize {
        while p[v] != v {
            p[v] = p[p[v]];
            v = p[v];
        }
        v
    }
    for &(t, h) in inst.arcs() {
        let (a, b) = (find(&mut parent, t), find(&mut parent, h));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut pi_var = vec![None; nodes];
    let mut p = 0;
    for (v, slot) in pi_var.iter_mut().enumerate() {
        if find(&mut parent, v) != v {
            *slot = Some(p);
            p += 1;
        }
    }
    let zero_set = inst.zero_set();
    let alpha0 = p;
    let beta0 = p + n;
    let slack0 = p + 2 * n;
    let vars = slack0 + zero_set.len();

    let zero = Rational::zero();
    let mut a = Vec::with_capacity(n + 1);
    let mut b = Vec::with_capacity(n + 1);
    for j in 0..n {
        let mut row = vec![zero.clone(); vars];
        let (t, h) = inst.arcs()[j];
        if let Some(i) = pi_var[t] {
            row[i] += Rational::one();
        }
        if let Some(i) = pi_var[h] {
            row[i] -= Rational::one();
        }
        row[alpha0 + j] = -Rational::one();
        row[beta0 + j] = Rational::one();
        if let Some(s) = zero_set.iter().position(|&q| q == j) {
            row[slack0 + s] = Rational::one();
        }
        a.push(row);
        b.push(inst.costs()[j].clone());
    }
    let mut row = vec![zero.clone(); vars];
    for j in inst.support() {
        row[alpha0 + j] = inst.x0()[j].clone();
        row[beta0 + j] = -inst.x0()[j].clone();
    }
    a.push(row);
    b.push(inst.target() - inst.cost_of_x0());

    let mut c = vec![zero.clone(); vars];
    c[alpha0..alpha0 + n].clone_from_slice(inst.weights());
    c[beta0..beta0 + n].clone_from_slice(inst.weights());
    let lower = (0..vars).map(|v| if v < p { None } else { Some(zero.clone()) }).collect();
    let upper = vec![None; vars];
    let lp = DenseLp { a, b, c, lower, upper };
    match solve_dense(&lp)? {
        LpOutcome::Optimal { value, point } => {
            let c_star = (0..n).map(|j| &inst.costs()[j] + &point[alpha0 + j] - &point[beta0 + j]).collect();
            Ok(OracleInverse::Optimal { objective: value, c_star })
        }
        LpOutcome::Infeasible => Ok(OracleInverse::Infeasible),
        LpOutcome::Unbounded => unreachable!("weighted l1 objective is bounded below by 0"),
    }
}

/// `(D^z)` as a dense LP in `y` (minimizing `−c·y`).
pub fn dz_lp(inst: &InverseInstance, z: &Rational) -> DenseLp {
    let n = inst.num_vars();
    let mut a = vec![vec![Rational::zero(); n]; inst.node_count()];
    for (j, &(t, h)) in inst.arcs().iter().enumerate() {
        a[t][j] = Rational::one();
        a[h][j] = -Rational::one();
    }
    let b = vec![Rational::zero(); inst.node_count()];
    let c = inst.costs().iter().map(|c| -c).collect();
    let mut lower = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    for j in 0..n {
        let d = &inst.weights()[j];
        if inst.in_support(j) {
            let mid = &inst.x0()[j] * z;
            lower.push(Some(&mid - d));
            upper.push(Some(mid + d));
        } else {
            lower.push(Some(-d));
            upper.push(Some(Rational::zero()));
        }
    }
    DenseLp { a, b, c, lower, upper }
}

/// ψ at each `z` by basis enumeration, independent of the flow solver.
pub fn psi_sweep(inst: &InverseInstance, z_values: &[Rational]) -> Result<Vec<PsiPoint>, OracleError> {
    let cap = Caps::from_env().lp_vars;
    z_values
        .iter()
        .map(|z| {
            let status = match enumerate_vertices_solve_capped(&dz_lp(inst, z), cap)? {
                LpOutcome::Optimal { value, point } => PsiStatus::Feasible { psi: -value, y: point },
                LpOutcome::Infeasible => PsiStatus::Infeasible,
                LpOutcome::Unbounded => unreachable!("(D^z) has box bounds"),
            };
            Ok(PsiPoint { z: z.clone(), status })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{int, ratio};

    fn lp(a: Vec<Vec<i64>>, b: Vec<i64>, c: Vec<i64>, bounds: Vec<(Option<i64>, Option<i64>)>) -> DenseLp {
        let r = |v: Vec<i64>| v.into_iter().map(int).collect::<Vec<_>>();
        DenseLp {
            a: a.into_iter().map(r).collect(),
            b: r(b),
            c: r(c),
            lower: bounds.iter().map(|(l, _)| l.map(int)).collect(),
            upper: bounds.iter().map(|(_, u)| u.map(int)).collect(),
        }
    }

    #[test]
    fn one_row_box() {
        // max x1 s.t. x1 + x2 = 1 on the unit box
        let p = lp(vec![vec![1, 1]], vec![1], vec![-1, 0], vec![(Some(0), Some(1)); 2]);
        assert_eq!(
            enumerate_vertices_solve(&p).unwrap(),
            LpOutcome::Optimal { value: int(-1), point: vec![int(1), int(0)] }
        );
    }

    #[test]
    fn contradictory_bounds() {
        let p = lp(vec![vec![1, 1]], vec![5], vec![1, 1], vec![(Some(0), Some(1)); 2]);
        assert_eq!(enumerate_vertices_solve(&p).unwrap(), LpOutcome::Infeasible);
        let p = lp(vec![vec![1, 1], vec![2, 2]], vec![1, 3], vec![0, 0], vec![(None, None); 2]);
        assert_eq!(enumerate_vertices_solve(&p).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn rays() {
        // min −x1 with x1 − x2 = 0, x ≥ 0: unbounded
        let p = lp(vec![vec![1, -1]], vec![0], vec![-1, 0], vec![(Some(0), None); 2]);
        assert_eq!(enumerate_vertices_solve(&p).unwrap(), LpOutcome::Unbounded);
        // free variable carried along: min x2, x1 − x2 = 3, x2 ≥ 1
        let p = lp(vec![vec![1, -1]], vec![3], vec![0, 1], vec![(None, None), (Some(1), None)]);
        assert_eq!(
            enumerate_vertices_solve(&p).unwrap(),
            LpOutcome::Optimal { value: int(1), point: vec![int(4), int(1)] }
        );
        let p = lp(vec![vec![1, 1]], vec![0], vec![0, 0], vec![(None, None); 2]);
        assert_eq!(enumerate_vertices_solve(&p), Err(OracleError::Lineality));
    }

    #[test]
    fn cap_is_enforced() {
        let p = lp(vec![vec![1; 13]], vec![1], vec![0; 13], vec![(Some(0), Some(1)); 13]);
        assert_eq!(enumerate_vertices_solve_capped(&p, 12), Err(OracleError::TooLarge { n: 13, cap: 12 }));
    }

    #[test]
    fn inverse_of_optimal_point_is_free() {
        let ints = |xs: &[i64]| xs.iter().map(|&x| int(x)).collect::<Vec<_>>();
        let arcs = vec![(0, 1, int(1)), (1, 3, int(1)), (0, 2, int(2)), (2, 3, int(2))];
        let inst = InverseInstance::shortest_path(4, arcs, 0, 3, vec![0, 1], ints(&[1, 1, 1, 1]), int(2)).unwrap();
        let OracleInverse::Optimal { objective, .. } = oracle_inverse(&inst).unwrap() else { panic!() };
        assert_eq!(objective, int(0));
        let moved = inst.with_target(ratio(5, 2));
        let OracleInverse::Optimal { objective, c_star } = oracle_inverse(&moved).unwrap() else { panic!() };
        assert_eq!(objective, ratio(1, 2));
        let cx: Rational = c_star.iter().zip(moved.x0()).map(|(c, x)| c * x).sum();
        assert_eq!(cx, ratio(5, 2));
    }

    #[test]
    fn next_combination_walks_lexicographically() {
        let mut c = vec![0, 1];
        let mut seen = vec![c.clone()];
        while next_combination(&mut c, 4) {
            seen.push(c.clone());
        }
        assert_eq!(seen, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        let mut e: Vec<usize> = vec![];
        assert!(!next_combination(&mut e, 3));
    }
}

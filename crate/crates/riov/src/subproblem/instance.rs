use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::numeric::{int, is_integer, Rational};

/// How the constraint matrix was described. All three share the node-arc
/// incidence form internally; the variant only matters for I/O and for the
/// Hitchcock shortcut in the sub-problem builder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Structure {
    /// Sources are nodes `0..m`, terminals `m..m+n`; variables row-major.
    Hitchcock { supplies: Vec<Rational>, demands: Vec<Rational> },
    /// `path` holds arc indices (0-based) in order from source to sink.
    ShortestPath { source: usize, sink: usize, path: Vec<usize> },
    General,
}

/// Inverse problem data: incidence structure, costs `c`, weights `d`,
/// feasible solution `x0` and target value `K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InverseInstance {
    structure: Structure,
    node_count: usize,
    arcs: Vec<(usize, usize)>,
    supplies: Vec<Rational>,
    c: Vec<Rational>,
    d: Vec<Rational>,
    x0: Vec<Rational>,
    target: Rational,
    support: Vec<bool>,
}

/// One violated assumption. Variable and arc positions are 1-based in
/// messages, node ids are printed as given.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Issue {
    Length { field: &'static str, expected: usize, got: usize },
    NodeOutOfRange { arc: usize, node: usize },
    SelfLoop { arc: usize },
    TerminalOutOfRange { node: usize },
    WeightNotPositive { var: usize },
    WeightNotIntegral { var: usize, value: Rational },
    SolutionNegative { var: usize, value: Rational },
    SolutionNotIntegral { var: usize, value: Rational },
    Imbalance { node: usize, outflow: Rational, supply: Rational },
    EmptySupport,
    NotPositive { field: &'static str, index: usize },
    SourceIsSink,
    PathArcOutOfRange { position: usize, arc: usize },
    PathBroken { position: usize },
    PathEndpoint { expected: usize, got: usize },
    PathRepeatsNode { node: usize },
    EmptyPath,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::Length { field, expected, got } => {
                write!(f, "{field}: expected {expected} entries, got {got}")
            }
            Issue::NodeOutOfRange { arc, node } => write!(f, "arc {}: node {node} out of range", arc + 1),
            Issue::SelfLoop { arc } => write!(f, "arc {}: self-loop", arc + 1),
            Issue::TerminalOutOfRange { node } => write!(f, "source/sink node {node} out of range"),
            Issue::WeightNotPositive { var } => write!(f, "variable {}: weights must be positive", var + 1),
            Issue::WeightNotIntegral { var, value } => {
                write!(f, "variable {}: weight {value} is not integral", var + 1)
            }
            Issue::SolutionNegative { var, value } => {
                write!(f, "variable {}: solution value {value} is negative", var + 1)
            }
            Issue::SolutionNotIntegral { var, value } => {
                write!(f, "variable {}: solution value {value} is not integral", var + 1)
            }
            Issue::Imbalance { node, outflow, supply } => {
                write!(f, "node {node}: solution has net outflow {outflow} but supply is {supply}")
            }
            Issue::EmptySupport => f.write_str("solution has no positive entry"),
            Issue::NotPositive { field, index } => write!(f, "{field} {}: must be positive", index + 1),
            Issue::SourceIsSink => f.write_str("source and sink coincide"),
            Issue::PathArcOutOfRange { position, arc } => {
                write!(f, "path entry {}: arc {} does not exist", position + 1, arc + 1)
            }
            Issue::PathBroken { position } => {
                write!(f, "path entry {}: arc does not start where the previous one ended", position + 1)
            }
            Issue::PathEndpoint { expected, got } => {
                write!(f, "path ends at node {got}, expected {expected}")
            }
            Issue::PathRepeatsNode { node } => write!(f, "path visits node {node} twice"),
            Issue::EmptyPath => f.write_str("path is empty"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ValidationError(pub Vec<Issue>);

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        f.write_str(&parts.join("; "))
    }
}

impl InverseInstance {
    pub fn general(
        supplies: Vec<Rational>,
        arcs: Vec<(usize, usize, Rational)>,
        weights: Vec<Rational>,
        x0: Vec<Rational>,
        target: Rational,
    ) -> Result<Self, ValidationError> {
        let node_count = supplies.len();
        let (ends, c) = arcs.into_iter().map(|(t, h, c)| ((t, h), c)).unzip();
        Self::build(Structure::General, node_count, ends, supplies, c, weights, x0, target, Vec::new())
    }

    /// `costs`, `weights` and `x0` are row-major `m × n`.
    pub fn hitchcock(
        supplies: Vec<Rational>,
        demands: Vec<Rational>,
        costs: Vec<Rational>,
        weights: Vec<Rational>,
        x0: Vec<Rational>,
        target: Rational,
    ) -> Result<Self, ValidationError> {
        let (m, n) = (supplies.len(), demands.len());
        let mut issues = Vec::new();
        for (i, a) in supplies.iter().enumerate() {
            if !a.is_positive() {
                issues.push(Issue::NotPositive { field: "supply", index: i });
            }
        }
        for (j, b) in demands.iter().enumerate() {
            if !b.is_positive() {
                issues.push(Issue::NotPositive { field: "demand", index: j });
            }
        }
        let mut ends = Vec::with_capacity(m * n);
        for i in 0..m {
            for j in 0..n {
                ends.push((i, m + j));
            }
        }
        let mut b: Vec<Rational> = supplies.clone();
        b.extend(demands.iter().map(|x| -x));
        let structure = Structure::Hitchcock { supplies, demands };
        Self::build(structure, m + n, ends, b, costs, weights, x0, target, issues)
    }

    /// `path` lists arc indices (0-based) from `source` to `sink`.
    pub fn shortest_path(
        node_count: usize,
        arcs: Vec<(usize, usize, Rational)>,
        source: usize,
        sink: usize,
        path: Vec<usize>,
        weights: Vec<Rational>,
        target: Rational,
    ) -> Result<Self, ValidationError> {
        let mut issues = Vec::new();
        let mut b = vec![Rational::zero(); node_count];
        if source >= node_count || sink >= node_count {
            let node = if source >= node_count { source } else { sink };
            issues.push(Issue::TerminalOutOfRange { node });
        } else if source == sink {
            issues.push(Issue::SourceIsSink);
        } else {
            b[source] = int(1);
            b[sink] = int(-1);
        }
        let mut x0 = vec![Rational::zero(); arcs.len()];
        if path.is_empty() {
            issues.push(Issue::EmptyPath);
        }
        let mut at = source;
        let mut visited = vec![source];
        for (pos, &a) in path.iter().enumerate() {
            let Some((t, h, _)) = arcs.get(a) else {
                issues.push(Issue::PathArcOutOfRange { position: pos, arc: a });
                break;
            };
            if *t != at {
                issues.push(Issue::PathBroken { position: pos });
                break;
            }
            if visited.contains(h) {
                issues.push(Issue::PathRepeatsNode { node: *h });
                break;
            }
            visited.push(*h);
            x0[a] = int(1);
            at = *h;
        }
        if issues.is_empty() && at != sink {
            issues.push(Issue::PathEndpoint { expected: sink, got: at });
        }
        let (ends, c) = arcs.into_iter().map(|(t, h, c)| ((t, h), c)).unzip();
        let structure = Structure::ShortestPath { source, sink, path };
        Self::build(structure, node_count, ends, b, c, weights, x0, target, issues)
    }

    #[allow(clippy::too_many_arguments)]
    fn build(
        structure: Structure,
        node_count: usize,
        arcs: Vec<(usize, usize)>,
        supplies: Vec<Rational>,
        c: Vec<Rational>,
        d: Vec<Rational>,
        x0: Vec<Rational>,
        target: Rational,
        mut issues: Vec<Issue>,
    ) -> Result<Self, ValidationError> {
        let n = arcs.len();
        // problems already found mean x0 or b were not derived cleanly
        let upstream = !issues.is_empty();
        for (field, got) in [("costs", c.len()), ("weights", d.len()), ("solution", x0.len())] {
            if got != n {
                issues.push(Issue::Length { field, expected: n, got });
            }
        }
        if supplies.len() != node_count {
            issues.push(Issue::Length { field: "supplies", expected: node_count, got: supplies.len() });
        }
        for (k, &(t, h)) in arcs.iter().enumerate() {
            for node in [t, h] {
                if node >= node_count {
                    issues.push(Issue::NodeOutOfRange { arc: k, node });
                }
            }
            if t == h {
                issues.push(Issue::SelfLoop { arc: k });
            }
        }
        for (j, w) in d.iter().enumerate() {
            if !w.is_positive() {
                issues.push(Issue::WeightNotPositive { var: j });
            } else if !is_integer(w) {
                issues.push(Issue::WeightNotIntegral { var: j, value: w.clone() });
            }
        }
        for (j, x) in x0.iter().enumerate() {
            if x.is_negative() {
                issues.push(Issue::SolutionNegative { var: j, value: x.clone() });
            } else if !is_integer(x) {
                issues.push(Issue::SolutionNotIntegral { var: j, value: x.clone() });
            }
        }
        if !upstream && !issues.iter().any(|i| matches!(i, Issue::Length { .. } | Issue::NodeOutOfRange { .. })) {
            let mut out = vec![Rational::zero(); node_count];
            for (&(t, h), x) in arcs.iter().zip(&x0) {
                out[t] += x;
                out[h] -= x;
            }
            for (i, (o, b)) in out.into_iter().zip(&supplies).enumerate() {
                if &o != b {
                    issues.push(Issue::Imbalance { node: i, outflow: o, supply: b.clone() });
                }
            }
        }
        let support: Vec<bool> = x0.iter().map(|x| x.is_positive()).collect();
        if !upstream && x0.len() == n && !support.iter().any(|&s| s) {
            issues.push(Issue::EmptySupport);
        }
        if !issues.is_empty() {
            return Err(ValidationError(issues));
        }
        Ok(InverseInstance { structure, node_count, arcs, supplies, c, d, x0, target, support })
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn num_vars(&self) -> usize {
        self.arcs.len()
    }

    /// `(tail, head)` of each variable's column: `+1` at tail, `−1` at head.
    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn supplies(&self) -> &[Rational] {
        &self.supplies
    }

    pub fn costs(&self) -> &[Rational] {
        &self.c
    }

    pub fn weights(&self) -> &[Rational] {
        &self.d
    }

    pub fn x0(&self) -> &[Rational] {
        &self.x0
    }

    pub fn target(&self) -> &Rational {
        &self.target
    }

    /// True for indices with `x0_j > 0`.
    pub fn in_support(&self, j: usize) -> bool {
        self.support[j]
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.num_vars()).filter(|&j| self.support[j]).collect()
    }

    pub fn zero_set(&self) -> Vec<usize> {
        (0..self.num_vars()).filter(|&j| !self.support[j]).collect()
    }

    pub fn support_size(&self) -> usize {
        self.support.iter().filter(|&&s| s).count()
    }

    pub fn x0_max(&self) -> Rational {
        self.x0.iter().max().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn d_max(&self) -> Rational {
        self.d.iter().max().cloned().unwrap_or_else(Rational::zero)
    }

    /// `2 |J̄| x0_max`: every turning coordinate and break point has a
    /// denominator at most this large.
    pub fn denominator_bound(&self) -> BigInt {
        BigInt::from(2 * self.support_size()) * self.x0_max().to_integer()
    }

    /// `(n + |J̄|) d_max + 1`, the half-width of the initial search window.
    pub fn search_radius(&self) -> Rational {
        int((self.num_vars() + self.support_size()) as i64) * self.d_max() + Rational::one()
    }

    pub fn cost_of_x0(&self) -> Rational {
        self.c.iter().zip(&self.x0).map(|(c, x)| c * x).sum()
    }

    /// `A_j · π = π(tail) − π(head)`.
    pub fn column_dot(&self, j: usize, pi: &[Rational]) -> Rational {
        let (t, h) = self.arcs[j];
        &pi[t] - &pi[h]
    }

    pub fn with_costs(&self, c: Vec<Rational>) -> Self {
        assert_eq!(c.len(), self.num_vars());
        InverseInstance { c, ..self.clone() }
    }

    pub fn with_target(&self, target: Rational) -> Self {
        InverseInstance { target, ..self.clone() }
    }
}

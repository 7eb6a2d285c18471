//! Solution reports written by `solve`.

use std::fmt::Write as _;

use crate::inverse::SolveResult;
use crate::numeric::{Ext, Rational};

use super::document::{Document, ParseError, Writer};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
}

impl Status {
    pub fn name(&self) -> &'static str {
        match self {
            Status::Optimal => "optimal",
            Status::Infeasible => "infeasible",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Status::Optimal => 0,
            Status::Infeasible => 2,
        }
    }
}

/// Machine-readable outcome of one solve. Optional scalars are omitted
/// from the text when absent; the vector sections are empty for
/// infeasible results.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionReport {
    pub status: Status,
    /// Outcome label, e.g. `turning-midpoint` or `infeasible-left`.
    pub case: String,
    pub z_left: Ext,
    pub z_right: Ext,
    pub delta: Rational,
    pub big_delta: Rational,
    pub z_star: Option<Rational>,
    pub objective: Option<Rational>,
    pub k_left: Option<Rational>,
    pub k_right: Option<Rational>,
    /// Offending slope when infeasible.
    pub slope: Option<Rational>,
    pub iterations: Option<u32>,
    pub solves: Option<usize>,
    pub c_star: Vec<Rational>,
    pub alpha: Vec<Rational>,
    pub beta: Vec<Rational>,
}

impl SolutionReport {
    pub fn from_result(result: &SolveResult) -> Self {
        match result {
            SolveResult::Optimal(s) => SolutionReport {
                status: Status::Optimal,
                case: s.outcome.label().to_string(),
                z_left: s.breaks.z_left.clone(),
                z_right: s.breaks.z_right.clone(),
                delta: s.delta.clone(),
                big_delta: s.big_delta.clone(),
                z_star: Some(s.z_star.clone()),
                objective: Some(s.objective.clone()),
                k_left: s.k_left.clone(),
                k_right: s.k_right.clone(),
                slope: None,
                iterations: Some(s.stats.iterations),
                solves: Some(s.stats.total_solves),
                c_star: s.c_star.clone(),
                alpha: s.alpha.clone(),
                beta: s.beta.clone(),
            },
            SolveResult::Infeasible(e) => SolutionReport {
                status: Status::Infeasible,
                case: e.label().to_string(),
                z_left: e.breaks.z_left.clone(),
                z_right: e.breaks.z_right.clone(),
                delta: e.delta.clone(),
                big_delta: e.big_delta.clone(),
                z_star: None,
                objective: None,
                k_left: None,
                k_right: None,
                slope: Some(e.slope.clone()),
                iterations: None,
                solves: None,
                c_star: Vec::new(),
                alpha: Vec::new(),
                beta: Vec::new(),
            },
        }
    }

    pub fn to_text(&self) -> String {
        let mut w = Writer::default();
        w.scalar("status", self.status.name());
        w.scalar("case", &self.case);
        w.scalar("z_left", &self.z_left);
        w.scalar("z_right", &self.z_right);
        w.scalar("delta", &self.delta);
        w.scalar("big_delta", &self.big_delta);
        let optional = [
            ("z_star", &self.z_star),
            ("objective", &self.objective),
            ("k_left", &self.k_left),
            ("k_right", &self.k_right),
            ("slope", &self.slope),
        ];
        for (key, v) in optional {
            if let Some(v) = v {
                w.scalar(key, v);
            }
        }
        if let Some(i) = self.iterations {
            w.scalar("iterations", i);
        }
        if let Some(s) = self.solves {
            w.scalar("solves", s);
        }
        if self.status == Status::Optimal {
            w.section("c_star", &self.c_star);
            w.section("alpha", &self.alpha);
            w.section("beta", &self.beta);
        }
        w.finish()
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut doc = Document::parse(text)?;
        let (line, status) = doc.required("status")?;
        let status = match status.as_str() {
            "optimal" => Status::Optimal,
            "infeasible" => Status::Infeasible,
            other => return Err(ParseError::at(line, format!("unknown status `{other}`"))),
        };
        let count = |doc: &mut Document, key: &str| -> Result<Option<usize>, ParseError> { doc.index(key) };
        let vectors = |doc: &mut Document, name: &str| -> Result<Vec<Rational>, ParseError> {
            match status {
                Status::Optimal => doc.rationals(name),
                Status::Infeasible => Ok(Vec::new()),
            }
        };
        let report = SolutionReport {
            status,
            case: doc.required("case")?.1,
            z_left: doc.required_ext("z_left")?,
            z_right: doc.required_ext("z_right")?,
            delta: doc.required_rational("delta")?,
            big_delta: doc.required_rational("big_delta")?,
            z_star: doc.rational("z_star")?,
            objective: doc.rational("objective")?,
            k_left: doc.rational("k_left")?,
            k_right: doc.rational("k_right")?,
            slope: doc.rational("slope")?,
            iterations: count(&mut doc, "iterations")?.map(|v| v as u32),
            solves: count(&mut doc, "solves")?,
            c_star: vectors(&mut doc, "c_star")?,
            alpha: vectors(&mut doc, "alpha")?,
            beta: vectors(&mut doc, "beta")?,
        };
        doc.finish()?;
        Ok(report)
    }

    /// Short human-readable account; `costs` are the original costs.
    pub fn summary(&self, costs: &[Rational]) -> String {
        let mut s = String::new();
        match self.status {
            Status::Optimal => {
                let z = self.z_star.as_ref().expect("optimal report has z*");
                let obj = self.objective.as_ref().expect("optimal report has an objective");
                let _ = writeln!(s, "optimal: z* = {z} ({}), objective {obj}", self.case);
            }
            Status::Infeasible => {
                let _ = writeln!(s, "infeasible ({}): no cost vector reaches the target", self.case);
            }
        }
        let _ = writeln!(
            s,
            "break points [{}, {}], delta {}, Delta {}",
            self.z_left, self.z_right, self.delta, self.big_delta
        );
        let changed: Vec<String> = costs
            .iter()
            .zip(&self.c_star)
            .enumerate()
            .filter(|(_, (c, n))| c != n)
            .map(|(j, (c, n))| format!("c{} {c} -> {n}", j + 1))
            .collect();
        if !changed.is_empty() {
            let _ = writeln!(s, "changed costs: {}", changed.join(", "));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{int, ratio};

    fn optimal() -> SolutionReport {
        SolutionReport {
            status: Status::Optimal,
            case: "line-intersection".into(),
            z_left: Ext::NegInf,
            z_right: Ext::Finite(ratio(5, 11)),
            delta: int(-6),
            big_delta: ratio(1, 9216),
            z_star: Some(int(0)),
            objective: Some(ratio(7, 2)),
            k_left: Some(int(-4)),
            k_right: None,
            slope: None,
            iterations: Some(3),
            solves: Some(19),
            c_star: vec![int(1), ratio(1, 2)],
            alpha: vec![int(0), int(0)],
            beta: vec![int(0), ratio(1, 2)],
        }
    }

    #[test]
    fn round_trips() {
        let r = optimal();
        let text = r.to_text();
        assert!(text.contains("z_left -inf\n"));
        assert!(!text.contains("k_right"));
        assert_eq!(SolutionReport::parse(&text).unwrap(), r);
        assert_eq!(SolutionReport::parse(&text).unwrap().to_text(), text);
    }

    #[test]
    fn infeasible_round_trips() {
        let r = SolutionReport {
            status: Status::Infeasible,
            case: "infeasible-right".into(),
            z_left: Ext::Finite(int(-1)),
            z_right: Ext::PosInf,
            delta: int(2),
            big_delta: ratio(1, 4),
            z_star: None,
            objective: None,
            k_left: None,
            k_right: None,
            slope: Some(int(3)),
            iterations: None,
            solves: None,
            c_star: vec![],
            alpha: vec![],
            beta: vec![],
        };
        assert_eq!(SolutionReport::parse(&r.to_text()).unwrap(), r);
        assert_eq!(r.status.exit_code(), 2);
    }

    #[test]
    fn summary_lists_changes() {
        let s = optimal().summary(&[int(1), int(1)]);
        assert!(s.starts_with("optimal: z* = 0 (line-intersection), objective 7/2\n"), "{s}");
        assert!(s.contains("changed costs: c2 1 -> 1/2"));
    }
}

//! Instance files.
//!
//! ```text
//! kind shortest_path
//! nodes 4
//! source 0
//! sink 3
//! target 5/2
//!
//! [arcs]
//! 0 1 1
//! 1 3 1
//!
//! [weights]
//! 1
//! 1
//!
//! [path]
//! 1
//! 2
//! ```
//!
//! Node ids are 0-based. Variables, arcs and path entries are 1-based,
//! matching the messages printed by validation. Hitchcock cost, weight and
//! solution sections list the `m × n` cells row by row.

use std::fmt;

use crate::numeric::Rational;
use crate::subproblem::{InverseInstance, Structure, ValidationError};

use super::document::{parse_index, parse_rational, Document, Entry, ParseError, Writer};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Hitchcock,
    ShortestPath,
    GeneralNetwork,
}

impl Kind {
    pub fn name(&self) -> &'static str {
        match self {
            Kind::Hitchcock => "hitchcock",
            Kind::ShortestPath => "shortest_path",
            Kind::GeneralNetwork => "general_network",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub type ArcSpec = (usize, usize, Rational);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InstanceFile {
    Hitchcock {
        supplies: Vec<Rational>,
        demands: Vec<Rational>,
        costs: Vec<Rational>,
        weights: Vec<Rational>,
        solution: Vec<Rational>,
        target: Rational,
    },
    ShortestPath {
        nodes: usize,
        source: usize,
        sink: usize,
        arcs: Vec<ArcSpec>,
        weights: Vec<Rational>,
        /// 0-based arc indices.
        path: Vec<usize>,
        target: Rational,
    },
    GeneralNetwork {
        supplies: Vec<Rational>,
        arcs: Vec<ArcSpec>,
        weights: Vec<Rational>,
        solution: Vec<Rational>,
        target: Rational,
    },
}

fn parse_arcs(entries: &[Entry]) -> Result<Vec<ArcSpec>, ParseError> {
    entries
        .iter()
        .map(|e| {
            let parts: Vec<&str> = e.text.split_whitespace().collect();
            let [t, h, c] = parts[..] else {
                return Err(ParseError::at(e.line, format!("expected `tail head cost`, found `{}`", e.text)));
            };
            Ok((parse_index(e.line, t)?, parse_index(e.line, h)?, parse_rational(e.line, c)?))
        })
        .collect()
}

fn parse_path(entries: &[Entry]) -> Result<Vec<usize>, ParseError> {
    entries
        .iter()
        .map(|e| match parse_index(e.line, &e.text)? {
            0 => Err(ParseError::at(e.line, "path entries are 1-based arc numbers")),
            k => Ok(k - 1),
        })
        .collect()
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut doc = Document::parse(text)?;
        let (line, kind) = doc.required("kind")?;
        let file = match kind.as_str() {
            "hitchcock" => InstanceFile::Hitchcock {
                target: doc.required_rational("target")?,
                supplies: doc.rationals("supplies")?,
                demands: doc.rationals("demands")?,
                costs: doc.rationals("costs")?,
                weights: doc.rationals("weights")?,
                solution: doc.rationals("solution")?,
            },
            "shortest_path" => {
                let need = |doc: &mut Document, key: &str| {
                    doc.index(key)?.ok_or_else(|| ParseError::whole(format!("missing `{key}` line")))
                };
                InstanceFile::ShortestPath {
                    nodes: need(&mut doc, "nodes")?,
                    source: need(&mut doc, "source")?,
                    sink: need(&mut doc, "sink")?,
                    target: doc.required_rational("target")?,
                    arcs: parse_arcs(&doc.required_section("arcs")?)?,
                    weights: doc.rationals("weights")?,
                    path: parse_path(&doc.required_section("path")?)?,
                }
            }
            "general_network" => InstanceFile::GeneralNetwork {
                target: doc.required_rational("target")?,
                supplies: doc.rationals("supplies")?,
                arcs: parse_arcs(&doc.required_section("arcs")?)?,
                weights: doc.rationals("weights")?,
                solution: doc.rationals("solution")?,
            },
            other => {
                return Err(ParseError::at(
                    line,
                    format!("unknown kind `{other}` (expected hitchcock, shortest_path or general_network)"),
                ))
            }
        };
        doc.finish()?;
        Ok(file)
    }

    pub fn kind(&self) -> Kind {
        match self {
            InstanceFile::Hitchcock { .. } => Kind::Hitchcock,
            InstanceFile::ShortestPath { .. } => Kind::ShortestPath,
            InstanceFile::GeneralNetwork { .. } => Kind::GeneralNetwork,
        }
    }

    /// Canonical text form; `parse` followed by `to_text` reproduces a
    /// canonical file byte for byte.
    pub fn to_text(&self) -> String {
        let mut w = Writer::default();
        w.scalar("kind", self.kind());
        let arc_line = |(t, h, c): &ArcSpec| format!("{t} {h} {c}");
        match self {
            InstanceFile::Hitchcock { supplies, demands, costs, weights, solution, target } => {
                w.scalar("target", target);
                w.section("supplies", supplies);
                w.section("demands", demands);
                w.section("costs", costs);
                w.section("weights", weights);
                w.section("solution", solution);
            }
            InstanceFile::ShortestPath { nodes, source, sink, arcs, weights, path, target } => {
                w.scalar("nodes", nodes);
                w.scalar("source", source);
                w.scalar("sink", sink);
                w.scalar("target", target);
                w.section("arcs", arcs.iter().map(arc_line));
                w.section("weights", weights);
                w.section("path", path.iter().map(|k| k + 1));
            }
            InstanceFile::GeneralNetwork { supplies, arcs, weights, solution, target } => {
                w.scalar("target", target);
                w.section("supplies", supplies);
                w.section("arcs", arcs.iter().map(arc_line));
                w.section("weights", weights);
                w.section("solution", solution);
            }
        }
        w.finish()
    }

    pub fn build(&self) -> Result<InverseInstance, ValidationError> {
        match self.clone() {
            InstanceFile::Hitchcock { supplies, demands, costs, weights, solution, target } => {
                InverseInstance::hitchcock(supplies, demands, costs, weights, solution, target)
            }
            InstanceFile::ShortestPath { nodes, source, sink, arcs, weights, path, target } => {
                InverseInstance::shortest_path(nodes, arcs, source, sink, path, weights, target)
            }
            InstanceFile::GeneralNetwork { supplies, arcs, weights, solution, target } => {
                InverseInstance::general(supplies, arcs, weights, solution, target)
            }
        }
    }

    pub fn from_instance(inst: &InverseInstance) -> Self {
        let arcs = || -> Vec<ArcSpec> {
            inst.arcs().iter().zip(inst.costs()).map(|(&(t, h), c)| (t, h, c.clone())).collect()
        };
        match inst.structure() {
            Structure::Hitchcock { supplies, demands } => InstanceFile::Hitchcock {
                supplies: supplies.clone(),
                demands: demands.clone(),
                costs: inst.costs().to_vec(),
                weights: inst.weights().to_vec(),
                solution: inst.x0().to_vec(),
                target: inst.target().clone(),
            },
            Structure::ShortestPath { source, sink, path } => InstanceFile::ShortestPath {
                nodes: inst.node_count(),
                source: *source,
                sink: *sink,
                arcs: arcs(),
                weights: inst.weights().to_vec(),
                path: path.clone(),
                target: inst.target().clone(),
            },
            Structure::General => InstanceFile::GeneralNetwork {
                supplies: inst.supplies().to_vec(),
                arcs: arcs(),
                weights: inst.weights().to_vec(),
                solution: inst.x0().to_vec(),
                target: inst.target().clone(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PATH: &str = "kind shortest_path
nodes 4
source 0
sink 3
target 5/2

[arcs]
0 1 1
1 3 1
0 2 2
2 3 2

[weights]
1
1
1
1

[path]
1
2
";

    #[test]
    fn round_trip_is_byte_identical() {
        let file = InstanceFile::parse(PATH).unwrap();
        assert_eq!(file.to_text(), PATH);
        let inst = file.build().unwrap();
        assert_eq!(InstanceFile::from_instance(&inst), file);
    }

    #[test]
    fn hitchcock_and_general_round_trip() {
        let h = "kind hitchcock\ntarget 3\n\n[supplies]\n1\n\n[demands]\n1\n\n[costs]\n3\n\n[weights]\n1\n\n[solution]\n1\n";
        let file = InstanceFile::parse(h).unwrap();
        assert_eq!(file.to_text(), h);
        assert_eq!(file.build().unwrap().num_vars(), 1);
        let g = "kind general_network\ntarget 0\n\n[supplies]\n0\n0\n\n[arcs]\n0 1 1\n1 0 -1\n\n[weights]\n2\n3\n\n[solution]\n1\n1\n";
        let file = InstanceFile::parse(g).unwrap();
        assert_eq!(file.to_text(), g);
        assert_eq!(InstanceFile::from_instance(&file.build().unwrap()), file);
    }

    #[test]
    fn diagnostics_carry_positions() {
        let bad = PATH.replace("1 3 1", "1 3");
        assert_eq!(InstanceFile::parse(&bad).unwrap_err().to_string(), "line 9: expected `tail head cost`, found `1 3`");
        let bad = PATH.replace("kind shortest_path", "kind lp");
        assert_eq!(InstanceFile::parse(&bad).unwrap_err().line, Some(1));
        let bad = PATH.replace("[path]\n1", "[path]\n0");
        assert_eq!(InstanceFile::parse(&bad).unwrap_err().line, Some(20));
        let bad = PATH.replace("nodes 4\n", "");
        assert_eq!(InstanceFile::parse(&bad).unwrap_err().to_string(), "missing `nodes` line");
        let bad = format!("{PATH}\n[extra]\n1\n");
        assert!(InstanceFile::parse(&bad).unwrap_err().to_string().contains("unknown section [extra]"));
    }

    #[test]
    fn zero_weight_fails_validation() {
        let file = InstanceFile::parse(&PATH.replace("[weights]\n1", "[weights]\n0")).unwrap();
        let err = file.build().unwrap_err();
        assert!(err.to_string().contains("weights must be positive"));
    }
}

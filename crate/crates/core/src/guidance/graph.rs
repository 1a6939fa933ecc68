//! Decision graph for placing a design concern on an impact level.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::diag::{Code, Diagnostic};
use crate::model::ImpactLevel;

pub const DEFAULT_DECISION_GRAPH: &str = include_str!("../../config/decision_graph.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    Yes,
    No,
}

impl Answer {
    pub const ALL: [Answer; 2] = [Answer::Yes, Answer::No];
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Answer::Yes => "yes",
            Answer::No => "no",
        })
    }
}

impl FromStr for Answer {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "y" | "yes" => Ok(Answer::Yes),
            "n" | "no" => Ok(Answer::No),
            other => Err(format!("answer `{other}` is not one of y, yes, n, no")),
        }
    }
}

/// Parses a comma separated answer list such as `y,n,yes`.
pub fn parse_answers(s: &str) -> Result<Vec<Answer>, String> {
    s.split(',').filter(|a| !a.trim().is_empty()).map(str::parse).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    question: String,
    yes: Option<String>,
    no: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGraph {
    root: String,
    #[serde(default)]
    leaves: Option<Vec<ImpactLevel>>,
    #[serde(default)]
    nodes: BTreeMap<String, RawNode>,
}

/// Where an edge leads.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Node(String),
    Leaf(ImpactLevel),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphNode {
    pub question: String,
    pub yes: Target,
    pub no: Target,
}

impl GraphNode {
    pub fn next(&self, answer: Answer) -> &Target {
        match answer {
            Answer::Yes => &self.yes,
            Answer::No => &self.no,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("invalid decision graph file: {0}")]
    Syntax(String),
    #[error("root `{0}` is not a declared node")]
    UnknownRoot(String),
    #[error("node `{node}` has no {answer}-edge")]
    MissingEdge { node: String, answer: Answer },
    #[error("node `{node}` points at `{target}`, which is neither a node nor an impact level")]
    UnknownTarget { node: String, target: String },
    #[error("node id `{0}` collides with an impact level name")]
    LeafNameClash(String),
    #[error("the graph has a cycle through node `{0}`")]
    Cycle(String),
    #[error("node `{0}` is unreachable from the root")]
    UnreachableNode(String),
    #[error("leaf `{0}` is declared but no path reaches it")]
    UnreachableLeaf(ImpactLevel),
    #[error("leaf `{0}` is reached but not declared in `leaves`")]
    UndeclaredLeaf(ImpactLevel),
}

/// A validated rooted DAG of binary questions whose leaves are impact
/// levels. Every path from the root ends in a leaf.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionGraphSpec {
    pub root: String,
    pub leaves: BTreeSet<ImpactLevel>,
    pub nodes: BTreeMap<String, GraphNode>,
}

impl DecisionGraphSpec {
    pub fn default_graph() -> Self {
        Self::from_toml(DEFAULT_DECISION_GRAPH).expect("shipped decision graph is valid")
    }

    pub fn from_toml(text: &str) -> Result<Self, GraphError> {
        let raw: RawGraph = toml::from_str(text).map_err(|e| GraphError::Syntax(e.to_string()))?;
        Self::from_raw(raw)
    }

    fn from_raw(raw: RawGraph) -> Result<Self, GraphError> {
        let mut nodes = BTreeMap::new();
        for (id, node) in &raw.nodes {
            if id.parse::<ImpactLevel>().is_ok() {
                return Err(GraphError::LeafNameClash(id.clone()));
            }
            let target = |edge: &Option<String>, answer| match edge {
                None => Err(GraphError::MissingEdge {
                    node: id.clone(),
                    answer,
                }),
                Some(t) if raw.nodes.contains_key(t) => Ok(Target::Node(t.clone())),
                Some(t) => t.parse::<ImpactLevel>().map(Target::Leaf).map_err(|_| GraphError::UnknownTarget {
                    node: id.clone(),
                    target: t.clone(),
                }),
            };
            let yes = target(&node.yes, Answer::Yes)?;
            let no = target(&node.no, Answer::No)?;
            nodes.insert(
                id.clone(),
                GraphNode {
                    question: node.question.clone(),
                    yes,
                    no,
                },
            );
        }
        if !nodes.contains_key(&raw.root) {
            return Err(GraphError::UnknownRoot(raw.root));
        }

        // Depth-first walk with colors: grey nodes are on the current path.
        #[derive(Clone, Copy, PartialEq)]
        enum Color {
            Grey,
            Black,
        }
        let mut color: BTreeMap<&str, Color> = BTreeMap::new();
        let mut reached = BTreeSet::new();
        let mut stack: Vec<(&str, usize)> = vec![(raw.root.as_str(), 0)];
        color.insert(raw.root.as_str(), Color::Grey);
        while let Some((id, edge)) = stack.pop() {
            let node = &nodes[id];
            if edge == 2 {
                color.insert(id, Color::Black);
                continue;
            }
            stack.push((id, edge + 1));
            match node.next(Answer::ALL[edge]) {
                Target::Leaf(level) => {
                    reached.insert(*level);
                }
                Target::Node(next) => match color.get(next.as_str()) {
                    Some(Color::Grey) => return Err(GraphError::Cycle(next.clone())),
                    Some(Color::Black) => {}
                    None => {
                        color.insert(next.as_str(), Color::Grey);
                        stack.push((next.as_str(), 0));
                    }
                },
            }
        }
        if let Some(id) = nodes.keys().find(|id| !color.contains_key(id.as_str())) {
            return Err(GraphError::UnreachableNode(id.clone()));
        }
        let leaves: BTreeSet<ImpactLevel> = match raw.leaves {
            Some(list) => list.into_iter().collect(),
            None => ImpactLevel::ALL.iter().copied().collect(),
        };
        if let Some(level) = leaves.iter().find(|l| !reached.contains(l)) {
            return Err(GraphError::UnreachableLeaf(*level));
        }
        if let Some(level) = reached.iter().find(|l| !leaves.contains(l)) {
            return Err(GraphError::UndeclaredLeaf(*level));
        }
        Ok(Self {
            root: raw.root,
            leaves,
            nodes,
        })
    }

    /// Length of the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        fn go(g: &DecisionGraphSpec, id: &str) -> usize {
            let n = &g.nodes[id];
            1 + Answer::ALL
                .iter()
                .map(|a| match n.next(*a) {
                    Target::Leaf(_) => 0,
                    Target::Node(next) => go(g, next),
                })
                .max()
                .unwrap_or(0)
        }
        go(self, &self.root)
    }

    pub fn question(&self, node: &str) -> Option<&str> {
        self.nodes.get(node).map(|n| n.question.as_str())
    }
}

/// Outcome of stepping through the graph with a list of answers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Classification {
    /// A leaf was reached; `path` lists the visited nodes.
    Leaf { level: ImpactLevel, path: Vec<String> },
    /// Answers ran out before a leaf.
    NeedMore { node: String, question: String, path: Vec<String> },
}

impl Classification {
    pub fn level(&self) -> Option<ImpactLevel> {
        match self {
            Classification::Leaf { level, .. } => Some(*level),
            Classification::NeedMore { .. } => None,
        }
    }
}

/// Follows `answers` from the root. Extra answers after a leaf are E300.
pub fn classify_impact(graph: &DecisionGraphSpec, answers: &[Answer]) -> Result<Classification, Diagnostic> {
    let mut node = graph.root.as_str();
    let mut path = vec![node.to_string()];
    for (i, answer) in answers.iter().enumerate() {
        match graph.nodes[node].next(*answer) {
            Target::Leaf(level) => {
                if i + 1 < answers.len() {
                    return Err(Diagnostic::new(
                        Code::E300,
                        format!(
                            "reached leaf `{level}` after {} answer(s) but {} were given",
                            i + 1,
                            answers.len()
                        ),
                    )
                    .with_related(path));
                }
                return Ok(Classification::Leaf { level: *level, path });
            }
            Target::Node(next) => {
                node = next;
                path.push(node.to_string());
            }
        }
    }
    Ok(Classification::NeedMore {
        node: node.to_string(),
        question: graph.nodes[node].question.clone(),
        path,
    })
}

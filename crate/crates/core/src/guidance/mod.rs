//! Creation instruments: the decision graph, the checklist and
//! matrix-driven effect suggestions.

mod checklist;
mod graph;
mod suggest;

pub use checklist::{
    checklist_report, CheckRule, ChecklistEntry, ChecklistError, ChecklistItem, ChecklistSpec, ItemStatus,
    DEFAULT_CHECKLIST,
};
pub use graph::{
    classify_impact, parse_answers, Answer, Classification, DecisionGraphSpec, GraphError, GraphNode, Target,
    DEFAULT_DECISION_GRAPH,
};
pub use suggest::{suggest_effects, Suggestion};

//! KPI model: goals, critical success factors, KPIs with fitness expressions
//! and targets, and their evaluation against ingested measures.

mod eval;
mod expr;
mod model;

pub use eval::{detect_transitions, evaluate, evaluate_all, Transition};

pub use expr::{
    format_number, Aggregator, BinaryOp, Expr, ExprError, FitnessExpression, MalformedDuration, TimeUnit, Window,
};
pub use model::{
    canonicalize_kpi, rfc3339, status_json, statuses_json, ActionSpec, Comparator, CriticalSuccessFactor, KpiDocument,
    KpiSpec, KpiState, KpiStatus, OrganizationalGoal, Target,
};

//! A minimal architecture description (elements, design decisions and the
//! features representing them) and the traceability queries over it.

mod model;
mod trace;

pub use model::{canonicalize_arch, ArchitectureDescription, ArchitectureElement, DesignDecision, ElementKind};
pub use trace::{impacts_of_element, trace_kpi, ElementImpact, TraceEdge, TraceResult};

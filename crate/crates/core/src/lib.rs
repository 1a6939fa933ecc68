//! Sustainability Assessment Framework toolkit: decision maps, SQ models,
//! dependency matrices, guidance instruments, validation, KPI evaluation,
//! measure ingestion, architecture traceability and rendering.

pub mod archtrace;
pub mod config;
pub mod diag;
pub mod dsl;
pub mod guidance;
pub mod ingest;
pub mod kpi;
pub mod model;
pub mod render;
pub mod validation;

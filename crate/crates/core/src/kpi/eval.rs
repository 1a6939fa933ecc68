use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::expr::{Aggregator, BinaryOp, Expr};
use super::model::{KpiSpec, KpiState, KpiStatus};
use crate::ingest::MeasureStore;
use crate::model::{Identifier, Workspace};

enum Failure {
    NoData(Identifier),
    DivisionByZero,
}

struct Evaluator<'a> {
    store: &'a MeasureStore,
    as_of: DateTime<Utc>,
    used: BTreeSet<usize>,
}

impl Evaluator<'_> {
    fn eval(&mut self, expr: &Expr) -> Result<f64, Failure> {
        match expr {
            Expr::Number(n) => Ok(*n),
            Expr::Neg(inner) => Ok(-self.eval(inner)?),
            Expr::Binary { op, lhs, rhs } => {
                let l = self.eval(lhs)?;
                let r = self.eval(rhs)?;
                match op {
                    BinaryOp::Add => Ok(l + r),
                    BinaryOp::Sub => Ok(l - r),
                    BinaryOp::Mul => Ok(l * r),
                    BinaryOp::Div if r == 0.0 => Err(Failure::DivisionByZero),
                    BinaryOp::Div => Ok(l / r),
                }
            }
            Expr::Aggregate { agg, metric, window } => {
                let positions = self.store.window_positions(metric.as_str(), *window, self.as_of);
                self.used.extend(positions.iter().copied());
                let values: Vec<f64> = positions.iter().map(|&p| self.store.record(p).value).collect();
                match agg.apply(&values) {
                    Some(v) => Ok(v),
                    None => {
                        debug_assert!(*agg != Aggregator::Count);
                        Err(Failure::NoData(metric.clone()))
                    }
                }
            }
        }
    }
}

/// Evaluates one KPI against the measures with timestamp at or before
/// `as_of`. Never fails: missing data, division by zero and non-finite
/// results all yield `unknown` with a note.
pub fn evaluate(kpi: &KpiSpec, store: &MeasureStore, as_of: DateTime<Utc>) -> KpiStatus {
    let mut ev = Evaluator {
        store,
        as_of,
        used: BTreeSet::new(),
    };
    let result = ev.eval(&kpi.expression.root);
    let (value, note) = match result {
        Ok(v) if v.is_finite() => (Some(v), None),
        Ok(v) => (None, Some(format!("fitness expression evaluated to {v}"))),
        Err(Failure::NoData(metric)) => (None, Some(format!("no measures of `{metric}` in the window"))),
        Err(Failure::DivisionByZero) => (None, Some("E403: division by zero during evaluation".to_string())),
    };
    let state = match value {
        None => KpiState::Unknown,
        Some(v) if kpi.target.comparator.holds(v, kpi.target.threshold) => KpiState::Met,
        Some(_) => KpiState::Missed,
    };
    KpiStatus {
        kpi_id: kpi.id.clone(),
        value,
        state,
        as_of,
        inputs_used: ev.used.len(),
        note,
    }
}

/// Every KPI of the workspace, ordered by id.
pub fn evaluate_all(ws: &Workspace, store: &MeasureStore, as_of: DateTime<Utc>) -> Vec<KpiStatus> {
    ws.kpis().map(|k| evaluate(k, store, as_of)).collect()
}

/// A KPI that moved into `missed`, with the actions it fires.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    pub kpi_id: Identifier,
    pub from: KpiState,
    pub to: KpiState,
    pub fired: Vec<Identifier>,
}

/// Edge-triggered actions: a KPI fires its `on_miss` actions exactly when it
/// enters `missed` from `met` or `unknown`. A KPI absent from `previous`
/// counts as `unknown`.
pub fn detect_transitions<'a>(
    previous: &[KpiStatus],
    current: &[KpiStatus],
    kpis: impl IntoIterator<Item = &'a KpiSpec>,
) -> Vec<Transition> {
    let actions: BTreeMap<&Identifier, &Vec<Identifier>> = kpis.into_iter().map(|k| (&k.id, &k.action_refs)).collect();
    let before: BTreeMap<&Identifier, KpiState> = previous.iter().map(|s| (&s.kpi_id, s.state)).collect();
    let mut out: Vec<Transition> = current
        .iter()
        .filter_map(|s| {
            let from = before.get(&s.kpi_id).copied().unwrap_or(KpiState::Unknown);
            (s.state == KpiState::Missed && from != KpiState::Missed).then(|| Transition {
                kpi_id: s.kpi_id.clone(),
                from,
                to: s.state,
                fired: actions.get(&s.kpi_id).map(|a| (*a).clone()).unwrap_or_default(),
            })
        })
        .collect();
    out.sort_by(|a, b| a.kpi_id.cmp(&b.kpi_id));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::MeasureRecord;
    use crate::kpi::{rfc3339, Comparator, FitnessExpression, Target};
    use crate::diag::Origin;
    use rand::{Rng, SeedableRng};

    fn kpi(expr: &str, cmp: Comparator, threshold: f64) -> KpiSpec {
        KpiSpec {
            id: Identifier::new("k").unwrap(),
            name: "K".into(),
            csf_ref: Identifier::new("c").unwrap(),
            expression: FitnessExpression::parse(expr).unwrap(),
            target: Target {
                comparator: cmp,
                threshold,
                unit: String::new(),
            },
            concern_refs: vec![Identifier::new("q").unwrap()],
            action_refs: vec![Identifier::new("act").unwrap()],
            origin: Origin::default(),
        }
    }

    fn at(s: &str) -> DateTime<Utc> {
        rfc3339::parse(s).unwrap()
    }

    fn store_with(metric: &str, points: &[(&str, f64)]) -> MeasureStore {
        let mut store = MeasureStore::new();
        for (i, (t, v)) in points.iter().enumerate() {
            store.insert(MeasureRecord {
                run_id: format!("r{i}"),
                timestamp: at(t),
                metric: Identifier::new(metric).unwrap(),
                value: *v,
                unit: String::new(),
                subject: None,
            });
        }
        store
    }

    #[test]
    fn mean_within_window_meets_target() {
        let store = store_with("et_s", &[("2024-05-06T00:00:00Z", 1.2), ("2024-05-07T00:00:00Z", 1.8)]);
        let s = evaluate(&kpi("avg(et_s, 7d)", Comparator::Le, 2.0), &store, at("2024-05-08T00:00:00Z"));
        let naive = (1.2 + 1.8) / 2.0;
        assert_eq!(s.value, Some(naive));
        assert_eq!(s.state, KpiState::Met);
        assert_eq!(s.inputs_used, 2);
    }

    #[test]
    fn empty_store_is_unknown() {
        let s = evaluate(&kpi("last(ee_j, all)", Comparator::Le, 900.0), &MeasureStore::new(), at("2024-05-08T00:00:00Z"));
        assert_eq!(s.state, KpiState::Unknown);
        assert_eq!(s.value, None);
        assert!(s.note.is_some());
    }

    #[test]
    fn count_of_nothing_is_zero() {
        let s = evaluate(&kpi("count(x, 1h)", Comparator::Ge, 0.0), &MeasureStore::new(), at("2024-05-08T00:00:00Z"));
        assert_eq!(s.value, Some(0.0));
        assert_eq!(s.state, KpiState::Met);
    }

    #[test]
    fn division_by_zero_is_unknown_with_note() {
        let store = store_with("m", &[("2024-05-06T00:00:00Z", 0.0)]);
        let s = evaluate(&kpi("1 / last(m, all)", Comparator::Le, 2.0), &store, at("2024-05-08T00:00:00Z"));
        assert_eq!(s.state, KpiState::Unknown);
        assert!(s.note.unwrap().contains("E403"));
    }

    #[test]
    fn future_measures_never_leak_into_the_past() {
        let store = store_with("m", &[("2024-05-06T00:00:00Z", 1.0), ("2024-05-09T00:00:00Z", 100.0)]);
        let s = evaluate(&kpi("max(m, all)", Comparator::Le, 2.0), &store, at("2024-05-08T00:00:00Z"));
        assert_eq!(s.value, Some(1.0));
    }

    #[test]
    fn sum_over_count_is_average_on_random_series() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        let as_of = at("2024-05-08T00:00:00Z");
        for _ in 0..50 {
            let n = rng.gen_range(1..40);
            let mut store = MeasureStore::new();
            for i in 0..n {
                store.insert(MeasureRecord {
                    run_id: format!("r{i}"),
                    timestamp: as_of - chrono::Duration::minutes(rng.gen_range(0..2000)),
                    metric: Identifier::new("et_s").unwrap(),
                    value: rng.gen_range(0.0..10.0),
                    unit: String::new(),
                    subject: None,
                });
            }
            let ratio = evaluate(&kpi("sum(et_s, 24h) / count(et_s, 24h)", Comparator::Le, 0.0), &store, as_of);
            let avg = evaluate(&kpi("avg(et_s, 24h)", Comparator::Le, 0.0), &store, as_of);
            match (ratio.value, avg.value) {
                (Some(a), Some(b)) => assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0)),
                (None, None) => {}
                other => panic!("mismatch {other:?}"),
            }
        }
    }

    fn status(state: KpiState) -> KpiStatus {
        KpiStatus {
            kpi_id: Identifier::new("k").unwrap(),
            value: None,
            state,
            as_of: at("2024-05-08T00:00:00Z"),
            inputs_used: 0,
            note: None,
        }
    }

    #[test]
    fn fires_only_on_entry_into_missed() {
        let k = kpi("last(m, all)", Comparator::Le, 1.0);
        let t = detect_transitions(&[status(KpiState::Met)], &[status(KpiState::Missed)], [&k]);
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].fired, k.action_refs);
        assert!(detect_transitions(&[status(KpiState::Missed)], &[status(KpiState::Missed)], [&k]).is_empty());
        assert_eq!(detect_transitions(&[], &[status(KpiState::Missed)], [&k]).len(), 1);
        assert!(detect_transitions(&[status(KpiState::Missed)], &[status(KpiState::Met)], [&k]).is_empty());
    }
}

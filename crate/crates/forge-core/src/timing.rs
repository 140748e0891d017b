//! (max,+) timing semantics of activities: activity matrices, sequence
//! makespan, and Gantt schedules.
//!
//! An activity's matrix M maps resource availability before the activity to
//! availability after it: entry (r, c) is the longest-path delay through the
//! activity DAG from the claim of c to the release of r. Resources the
//! activity does not touch pass through as the identity, which is what makes
//! sequences pipeline.

use crate::maxplus::{MaxPlusMatrix, ResourceVector, NEG_INF};
use crate::model::graph::{move_sources, ActivityGraph, GNode};
use crate::model::{ActionKind, ActivityModel, ActivitySpec};
use crate::motion::{move_duration, MotionProfile};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TimingError {
    #[error("unknown activity `{0}`")]
    UnknownActivity(String),
    #[error("activity `{activity}`: {message}")]
    InvalidModel { activity: String, message: String },
    #[error("empty activity sequence")]
    EmptySequence,
}

/// Stable, sorted resource index shared by all matrices of one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceUniverse {
    names: Vec<String>,
}

impl ResourceUniverse {
    pub fn of(model: &ActivityModel) -> Self {
        let mut names = model.resource_names();
        names.sort();
        names.dedup();
        ResourceUniverse { names }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.binary_search_by(|n| n.as_str().cmp(name)).ok()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

/// Durations for every graph node of an activity, resolved against the
/// settings (actions) and motion profiles (moves). Claims, releases and sync
/// points take zero time.
pub fn node_durations(
    model: &ActivityModel,
    act: &ActivitySpec,
    graph: &ActivityGraph,
) -> Result<Vec<f64>, TimingError> {
    let invalid = |message: String| TimingError::InvalidModel { activity: act.name.clone(), message };
    let sources = move_sources(act, graph);
    let mut durations = vec![0.0; graph.nodes.len()];
    for (g, node) in graph.nodes.iter().enumerate() {
        let GNode::Action(i) = node else { continue };
        durations[g] = match &act.nodes[*i].kind {
            ActionKind::Claim { .. } | ActionKind::Release { .. } => 0.0,
            ActionKind::PeripheralAction { resource, peripheral, action } => model
                .action_timing(resource, peripheral, action)
                .ok_or_else(|| invalid(format!("no timing for `{resource}.{peripheral}.{action}`")))?,
            ActionKind::Move { resource, peripheral, target, profile } => {
                let source = sources
                    .get(i)
                    .cloned()
                    .flatten()
                    .ok_or_else(|| invalid(format!("move `{}` has no start position", act.nodes[*i].alias)))?;
                move_time(model, resource, peripheral, &source, target, profile)
                    .ok_or_else(|| invalid(format!("unresolvable move `{}`", act.nodes[*i].alias)))?
            }
        };
    }
    Ok(durations)
}

fn move_time(
    model: &ActivityModel,
    resource: &str,
    peripheral: &str,
    source: &str,
    target: &str,
    profile: &str,
) -> Option<f64> {
    let res = model.machine.resources.iter().find(|r| r.name == resource)?;
    let inst = res.peripherals.iter().find(|p| p.name == peripheral)?;
    let block = model.settings_block(resource, peripheral)?;
    let from = crate::model::validate::position_coordinate(inst, block, source)?;
    let to = crate::model::validate::position_coordinate(inst, block, target)?;
    let decl = block.axes.iter().find_map(|ax| ax.profiles.iter().find(|p| p.name == profile))?;
    let prof = MotionProfile::new(decl.velocity, decl.acceleration, decl.jerk).ok()?;
    move_duration(to - from, &prof).ok()
}

/// The activity's max-plus matrix over the model's resource universe.
pub fn activity_matrix(
    model: &ActivityModel,
    universe: &ResourceUniverse,
    activity: &str,
) -> Result<MaxPlusMatrix, TimingError> {
    let act = model
        .activity(activity)
        .ok_or_else(|| TimingError::UnknownActivity(activity.to_string()))?;
    let graph = ActivityGraph::build(act);
    let Some(topo) = graph.topo.clone() else {
        return Err(TimingError::InvalidModel {
            activity: act.name.clone(),
            message: "action flow is cyclic".to_string(),
        });
    };
    let durations = node_durations(model, act, &graph)?;

    let mut claims: BTreeMap<usize, usize> = BTreeMap::new(); // resource idx -> graph node
    let mut releases: BTreeMap<usize, usize> = BTreeMap::new();
    for (g, node) in graph.nodes.iter().enumerate() {
        let GNode::Action(i) = node else { continue };
        let kind = &act.nodes[*i].kind;
        let Some(r) = universe.index(kind.resource()) else {
            return Err(TimingError::InvalidModel {
                activity: act.name.clone(),
                message: format!("resource `{}` not in the model", kind.resource()),
            });
        };
        match kind {
            ActionKind::Claim { .. } => {
                claims.insert(r, g);
            }
            ActionKind::Release { .. } => {
                releases.insert(r, g);
            }
            _ => {}
        }
    }

    let n = universe.len();
    let mut m = MaxPlusMatrix::zeroed(n);
    for i in 0..n {
        if !claims.contains_key(&i) && !releases.contains_key(&i) {
            m.set(i, i, 0.0);
        }
    }
    // longest path from each claim to each release
    for (&c_res, &c_node) in &claims {
        let mut lp = vec![NEG_INF; graph.nodes.len()];
        lp[c_node] = durations[c_node];
        for &g in &topo {
            if lp[g] == NEG_INF {
                continue;
            }
            for &s in &graph.succs[g] {
                let cand = lp[g] + durations[s];
                if cand > lp[s] {
                    lp[s] = cand;
                }
            }
        }
        for (&r_res, &r_node) in &releases {
            if lp[r_node] > NEG_INF {
                m.set(r_res, c_res, lp[r_node]);
            }
        }
    }
    Ok(m)
}

/// All activity matrices of a model, keyed by activity name.
pub fn all_matrices(
    model: &ActivityModel,
    universe: &ResourceUniverse,
) -> Result<BTreeMap<String, MaxPlusMatrix>, TimingError> {
    model
        .activities
        .iter()
        .map(|a| Ok((a.name.clone(), activity_matrix(model, universe, &a.name)?)))
        .collect()
}

/// Completion time of the last action when the sequence starts on an idle
/// system: max entry of `M_n ⊗ … ⊗ M_1 ⊗ 0`.
pub fn makespan(model: &ActivityModel, sequence: &[String]) -> Result<f64, TimingError> {
    if sequence.is_empty() {
        return Err(TimingError::EmptySequence);
    }
    let universe = ResourceUniverse::of(model);
    let mut x = ResourceVector::zero(universe.len());
    for name in sequence {
        let m = activity_matrix(model, &universe, name)?;
        x = m.apply(&x);
    }
    Ok(x.max_entry().max(0.0))
}

// ---------------------------------------------------------------------------
// Gantt schedules

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GanttEntry {
    pub activity: String,
    /// Position of the activity instance in the dispatched sequence.
    pub instance: usize,
    pub resource: String,
    pub peripheral: String,
    pub action: String,
    pub start: f64,
    pub end: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GanttChart {
    pub entries: Vec<GanttEntry>,
    /// Indices into `entries`: start(to) >= end(from).
    pub dependencies: Vec<(usize, usize)>,
    pub makespan: f64,
}

/// As-soon-as-possible schedule of a sequence under pipelined resource
/// claiming; per-action start/end times consistent with the DAGs and the
/// availability recurrence used by `makespan`.
pub fn gantt(model: &ActivityModel, sequence: &[String]) -> Result<GanttChart, TimingError> {
    let universe = ResourceUniverse::of(model);
    let mut avail = vec![0.0f64; universe.len()];
    let mut chart = GanttChart::default();

    for (instance, name) in sequence.iter().enumerate() {
        let act = model
            .activity(name)
            .ok_or_else(|| TimingError::UnknownActivity(name.clone()))?;
        let graph = ActivityGraph::build(act);
        let Some(topo) = graph.topo.clone() else {
            return Err(TimingError::InvalidModel {
                activity: act.name.clone(),
                message: "action flow is cyclic".to_string(),
            });
        };
        let durations = node_durations(model, act, &graph)?;

        let mut end = vec![0.0f64; graph.nodes.len()];
        // graph node -> chart entry index, for dependency edges
        let mut charted: BTreeMap<usize, usize> = BTreeMap::new();
        for &g in &topo {
            let mut start = graph.preds[g].iter().map(|&p| end[p]).fold(0.0, f64::max);
            if let GNode::Action(i) = &graph.nodes[g] {
                let kind = &act.nodes[*i].kind;
                if matches!(kind, ActionKind::Claim { .. }) {
                    let r = universe.index(kind.resource()).ok_or_else(|| {
                        TimingError::InvalidModel {
                            activity: act.name.clone(),
                            message: format!("resource `{}` not in the model", kind.resource()),
                        }
                    })?;
                    start = start.max(avail[r]);
                }
                end[g] = start + durations[g];
                if let Some((res, per)) = kind.peripheral() {
                    let alias = &act.nodes[*i].alias;
                    charted.insert(g, chart.entries.len());
                    chart.entries.push(GanttEntry {
                        activity: act.name.clone(),
                        instance,
                        resource: res.to_string(),
                        peripheral: per.to_string(),
                        action: alias.clone(),
                        start,
                        end: end[g],
                    });
                }
            } else {
                end[g] = start;
            }
        }
        // dependencies between charted entries: nearest charted ancestors
        for (&g, &to_entry) in &charted {
            let mut stack: Vec<usize> = graph.preds[g].clone();
            let mut seen = vec![false; graph.nodes.len()];
            while let Some(p) = stack.pop() {
                if seen[p] {
                    continue;
                }
                seen[p] = true;
                if let Some(&from_entry) = charted.get(&p) {
                    chart.dependencies.push((from_entry, to_entry));
                } else {
                    stack.extend(graph.preds[p].iter().copied());
                }
            }
        }
        // releases update availability
        for (g, node) in graph.nodes.iter().enumerate() {
            if let GNode::Action(i) = node {
                if let ActionKind::Release { resource } = &act.nodes[*i].kind {
                    let r = universe.index(resource).unwrap();
                    avail[r] = end[g];
                }
            }
        }
    }
    chart.makespan = avail.iter().copied().fold(0.0, f64::max);
    chart.dependencies.sort();
    chart.dependencies.dedup();
    Ok(chart)
}

/// Check the chart's structural invariants; returns violations as strings.
pub fn gantt_violations(chart: &GanttChart) -> Vec<String> {
    let mut out = Vec::new();
    let mut by_periph: BTreeMap<(&str, &str), Vec<&GanttEntry>> = BTreeMap::new();
    for e in &chart.entries {
        by_periph.entry((e.resource.as_str(), e.peripheral.as_str())).or_default().push(e);
    }
    for ((r, p), mut es) in by_periph {
        es.sort_by(|a, b| a.start.partial_cmp(&b.start).unwrap());
        for w in es.windows(2) {
            if w[1].start < w[0].end - 1e-9 {
                out.push(format!(
                    "overlap on {r}.{p}: {}#{} [{}, {}] vs {}#{} [{}, {}]",
                    w[0].action, w[0].instance, w[0].start, w[0].end,
                    w[1].action, w[1].instance, w[1].start, w[1].end
                ));
            }
        }
    }
    for &(from, to) in &chart.dependencies {
        let (f, t) = (&chart.entries[from], &chart.entries[to]);
        if t.start < f.end - 1e-9 {
            out.push(format!("dependency violated: {} ends {} after {} starts {}", f.action, f.end, t.action, t.start));
        }
    }
    let max_end = chart.entries.iter().map(|e| e.end).fold(0.0, f64::max);
    if max_end > chart.makespan + 1e-9 {
        out.push(format!("entry ends at {max_end} beyond makespan {}", chart.makespan));
    }
    out
}

/// One row per peripheral, alphabetical; time axis left to right.
pub fn gantt_svg(chart: &GanttChart) -> String {
    let mut rows: Vec<String> = chart
        .entries
        .iter()
        .map(|e| format!("{}.{}", e.resource, e.peripheral))
        .collect();
    rows.sort();
    rows.dedup();
    let row_of = |e: &GanttEntry| {
        let key = format!("{}.{}", e.resource, e.peripheral);
        rows.iter().position(|r| *r == key).unwrap()
    };
    let scale = 640.0 / chart.makespan.max(1e-9);
    let row_h = 28.0;
    let label_w = 170.0;
    let width = label_w + 660.0;
    let height = row_h * rows.len() as f64 + 30.0;
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" font-family=\"sans-serif\" font-size=\"11\">\n"
    );
    for (i, r) in rows.iter().enumerate() {
        let y = 10.0 + i as f64 * row_h;
        s.push_str(&format!("  <text x=\"4\" y=\"{:.1}\">{r}</text>\n", y + 16.0));
        s.push_str(&format!(
            "  <line x1=\"{label_w}\" y1=\"{:.1}\" x2=\"{width}\" y2=\"{:.1}\" stroke=\"#ddd\"/>\n",
            y + row_h - 4.0,
            y + row_h - 4.0
        ));
    }
    let palette = ["#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#b07aa1", "#76b7b2", "#edc948"];
    for e in &chart.entries {
        let y = 10.0 + row_of(e) as f64 * row_h;
        let x = label_w + e.start * scale;
        let w = ((e.end - e.start) * scale).max(1.0);
        let color = palette[e.instance % palette.len()];
        s.push_str(&format!(
            "  <rect x=\"{x:.2}\" y=\"{:.1}\" width=\"{w:.2}\" height=\"16\" fill=\"{color}\"><title>{}#{} {} [{:.3}, {:.3}]</title></rect>\n",
            y + 4.0, e.activity, e.instance, e.action, e.start, e.end
        ));
    }
    s.push_str(&format!(
        "  <text x=\"{label_w}\" y=\"{:.1}\">makespan {:.3} s</text>\n",
        height - 8.0,
        chart.makespan
    ));
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{parse_activities, parse_machine, parse_settings};

    fn tiny_model(activities: &str) -> ActivityModel {
        let machine = parse_machine(
            "machine",
            "PeripheralType p { Actions { a b } }
             Resource R { p : p }
             Resource S { p : p }",
        )
        .unwrap();
        let settings = parse_settings(
            "settings",
            "R.p { Timings { a = 0.05 b = 0.1 } } S.p { Timings { a = 0.2 b = 0.3 } }",
        )
        .unwrap();
        let activities = parse_activities("activities", activities).unwrap();
        ActivityModel { machine, settings, activities }
    }

    #[test]
    fn single_action_matrix() {
        let model = tiny_model(
            "activity One { actions { C : claim R A : R.p.a E : release R } action flow { C->A->E } }",
        );
        let u = ResourceUniverse::of(&model);
        let m = activity_matrix(&model, &u, "One").unwrap();
        let r = u.index("R").unwrap();
        let s = u.index("S").unwrap();
        assert_eq!(m.get(r, r), 0.05);
        assert_eq!(m.get(s, s), 0.0);
        assert_eq!(m.get(r, s), NEG_INF);
        assert_eq!(m.get(s, r), NEG_INF);
    }

    #[test]
    fn independent_resources_are_block_diagonal() {
        let model = tiny_model(
            "activity Two {
               actions { CR : claim R AR : R.p.a ER : release R
                         CS : claim S AS : S.p.b ES : release S }
               action flow { CR->AR->ER CS->AS->ES } }",
        );
        let u = ResourceUniverse::of(&model);
        let m = activity_matrix(&model, &u, "Two").unwrap();
        let r = u.index("R").unwrap();
        let s = u.index("S").unwrap();
        assert_eq!(m.get(r, r), 0.05);
        assert_eq!(m.get(s, s), 0.3);
        assert_eq!(m.get(r, s), NEG_INF);
        assert_eq!(m.get(s, r), NEG_INF);
    }

    #[test]
    fn sequence_serializes_on_shared_resource() {
        let model = tiny_model(
            "activity One { actions { C : claim R A : R.p.a E : release R } action flow { C->A->E } }",
        );
        let seq = vec!["One".to_string(), "One".to_string()];
        let ms = makespan(&model, &seq).unwrap();
        assert!((ms - 0.1).abs() < 1e-12);
    }

    #[test]
    fn disjoint_activities_pipeline() {
        let model = tiny_model(
            "activity OnR { actions { C : claim R A : R.p.a E : release R } action flow { C->A->E } }
             activity OnS { actions { C : claim S A : S.p.b E : release S } action flow { C->A->E } }",
        );
        let both = makespan(&model, &["OnR".into(), "OnS".into()]).unwrap();
        let r = makespan(&model, &["OnR".into()]).unwrap();
        let s = makespan(&model, &["OnS".into()]).unwrap();
        assert!((both - r.max(s)).abs() < 1e-12);
    }

    #[test]
    fn empty_sequence_chart() {
        let model = tiny_model(
            "activity One { actions { C : claim R A : R.p.a E : release R } action flow { C->A->E } }",
        );
        let chart = gantt(&model, &[]).unwrap();
        assert!(chart.entries.is_empty());
        assert_eq!(chart.makespan, 0.0);
    }

    #[test]
    fn chart_agrees_with_makespan_and_invariants() {
        let model = tiny_model(
            "activity OnR { actions { C : claim R A : R.p.a B : R.p.b E : release R } action flow { C->A->B->E } }
             activity Both {
               actions { CR : claim R AR : R.p.a ER : release R
                         CS : claim S AS : S.p.b ES : release S }
               action flow { CR->AR->ER CS->AS->ES AR->AS } }",
        );
        let seq = vec!["OnR".to_string(), "Both".to_string(), "OnR".to_string()];
        let chart = gantt(&model, &seq).unwrap();
        let ms = makespan(&model, &seq).unwrap();
        assert!((chart.makespan - ms).abs() < 1e-9);
        assert!(gantt_violations(&chart).is_empty(), "{:?}", gantt_violations(&chart));
    }

    #[test]
    fn listing_activity_schedule() {
        let model = crate::testutil::turner_demo_model();
        let chart = gantt(&model, &["TurnerTurnTop".into()]).unwrap();
        let grab = chart.entries.iter().find(|e| e.action == "Grab").unwrap();
        assert_eq!(grab.start, 0.0);
        let up = chart.entries.iter().find(|e| e.action == "Up").unwrap();
        assert!((up.start - 0.05).abs() < 1e-12);
        assert!(gantt_violations(&chart).is_empty());
    }
}

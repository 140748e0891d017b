//! Cross-spec validation of a complete activity model.
//!
//! The parsers already enforce in-file well-formedness; this pass checks
//! everything that spans files: timing coverage, position resolution, the
//! claim/release discipline, move paths, and acyclic flows. Diagnostics are
//! sorted by location so the verdict and its presentation are deterministic.

use super::ast::*;
use super::graph::{move_sources, ActivityGraph, GNode};
use crate::diag::{sort_diagnostics, Diagnostic};
use std::collections::{BTreeMap, BTreeSet};

const MACHINE: &str = "machine";
const SETTINGS: &str = "settings";
const ACTIVITIES: &str = "activities";

pub fn validate(model: &ActivityModel) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    validate_settings_against_machine(model, &mut diags);
    for act in &model.activities {
        validate_activity(model, act, &mut diags);
    }
    sort_diagnostics(&mut diags);
    diags
}

fn find_peripheral<'a>(
    model: &'a ActivityModel,
    resource: &str,
    peripheral: &str,
) -> Option<(&'a Resource, &'a PeripheralInstance, &'a PeripheralType)> {
    let res = model.machine.resources.iter().find(|r| r.name == resource)?;
    let inst = res.peripherals.iter().find(|p| p.name == peripheral)?;
    let ty = model.machine.peripheral_types.iter().find(|t| t.name == inst.type_name)?;
    Some((res, inst, ty))
}

fn validate_settings_against_machine(model: &ActivityModel, diags: &mut Vec<Diagnostic>) {
    for b in &model.settings.blocks {
        let Some((_, inst, ty)) = find_peripheral(model, &b.resource, &b.peripheral) else {
            diags.push(Diagnostic::error(
                SETTINGS,
                b.span,
                "E-REF",
                format!("settings block `{}.{}` does not match any machine peripheral", b.resource, b.peripheral),
            ));
            continue;
        };
        for t in &b.timings {
            if !ty.actions.iter().any(|a| a.name == t.action) {
                diags.push(Diagnostic::warning(
                    SETTINGS,
                    t.span,
                    "W-REF",
                    format!("timing for `{}` which type `{}` does not declare", t.action, ty.name),
                ));
            }
        }
        for ax in &b.axes {
            if !ty.axes.iter().any(|a| a.name == ax.axis) {
                diags.push(Diagnostic::error(
                    SETTINGS,
                    ax.span,
                    "E-REF",
                    format!("axis `{}` not declared by type `{}`", ax.axis, ty.name),
                ));
                continue;
            }
            let declared: BTreeSet<&str> = inst
                .axis_positions
                .iter()
                .filter(|ap| ap.axis == ax.axis)
                .flat_map(|ap| ap.positions.iter().map(|s| s.as_str()))
                .collect();
            for p in &ax.positions {
                if !declared.contains(p.name.as_str()) {
                    diags.push(Diagnostic::warning(
                        SETTINGS,
                        p.span,
                        "W-REF",
                        format!(
                            "coordinate for `{}` which `{}.{}` does not declare on axis `{}`",
                            p.name, b.resource, b.peripheral, ax.axis
                        ),
                    ));
                }
            }
        }
    }
}

fn validate_activity(model: &ActivityModel, act: &ActivitySpec, diags: &mut Vec<Diagnostic>) {
    // prerequisites must name real symbolic positions
    for p in &act.prerequisites {
        match find_peripheral(model, &p.resource, &p.peripheral) {
            None => diags.push(Diagnostic::error(
                ACTIVITIES,
                p.span,
                "E-REF",
                format!("prerequisite names unknown peripheral `{}.{}`", p.resource, p.peripheral),
            )),
            Some((_, inst, _)) => {
                if !inst.symbolic_positions.iter().any(|s| s.name == p.position) {
                    diags.push(Diagnostic::error(
                        ACTIVITIES,
                        p.span,
                        "E-REF",
                        format!(
                            "prerequisite position `{}` is not a symbolic position of `{}.{}`",
                            p.position, p.resource, p.peripheral
                        ),
                    ));
                }
            }
        }
    }

    // node references into the machine and settings
    for n in &act.nodes {
        match &n.kind {
            ActionKind::Claim { resource } | ActionKind::Release { resource } => {
                if !model.machine.resources.iter().any(|r| &r.name == resource) {
                    diags.push(Diagnostic::error(
                        ACTIVITIES,
                        n.span,
                        "E-REF",
                        format!("unknown resource `{resource}`"),
                    ));
                }
            }
            ActionKind::PeripheralAction { resource, peripheral, action } => {
                match find_peripheral(model, resource, peripheral) {
                    None => diags.push(Diagnostic::error(
                        ACTIVITIES,
                        n.span,
                        "E-REF",
                        format!("unknown peripheral `{resource}.{peripheral}`"),
                    )),
                    Some((_, _, ty)) => {
                        if !ty.actions.iter().any(|a| &a.name == action) {
                            diags.push(Diagnostic::error(
                                ACTIVITIES,
                                n.span,
                                "E-REF",
                                format!("peripheral type `{}` has no action `{action}`", ty.name),
                            ));
                        } else if model.action_timing(resource, peripheral, action).is_none() {
                            diags.push(Diagnostic::error(
                                ACTIVITIES,
                                n.span,
                                "E-TIMING",
                                format!("no timing for action `{resource}.{peripheral}.{action}`"),
                            ));
                        }
                    }
                }
            }
            ActionKind::Move { resource, peripheral, target, profile } => {
                match find_peripheral(model, resource, peripheral) {
                    None => diags.push(Diagnostic::error(
                        ACTIVITIES,
                        n.span,
                        "E-REF",
                        format!("unknown peripheral `{resource}.{peripheral}`"),
                    )),
                    Some((_, inst, ty)) => {
                        if ty.axes.len() != 1 {
                            diags.push(Diagnostic::error(
                                ACTIVITIES,
                                n.span,
                                "E-MOVE",
                                format!(
                                    "move on `{resource}.{peripheral}` requires exactly one axis, type `{}` has {}",
                                    ty.name,
                                    ty.axes.len()
                                ),
                            ));
                        }
                        if !inst.symbolic_positions.iter().any(|s| &s.name == target) {
                            diags.push(Diagnostic::error(
                                ACTIVITIES,
                                n.span,
                                "E-REF",
                                format!("move target `{target}` is not a symbolic position of `{resource}.{peripheral}`"),
                            ));
                        }
                        if !inst.profiles.contains(profile) {
                            diags.push(Diagnostic::error(
                                ACTIVITIES,
                                n.span,
                                "E-REF",
                                format!("profile `{profile}` not declared for `{resource}.{peripheral}`"),
                            ));
                        }
                    }
                }
            }
        }
    }

    let graph = ActivityGraph::build(act);
    if graph.topo.is_none() {
        diags.push(Diagnostic::error(
            ACTIVITIES,
            act.span,
            "E-CYCLE",
            format!("action flow of activity `{}` is cyclic", act.name),
        ));
        return; // ordering checks below assume a DAG
    }

    // a dangling sync point would anchor timing at dispatch instead of at a
    // claim, which the max-plus semantics has no row for
    for (g, node) in graph.nodes.iter().enumerate() {
        if let GNode::Sync(name) = node {
            if graph.preds[g].is_empty() || graph.succs[g].is_empty() {
                diags.push(Diagnostic::error(
                    ACTIVITIES,
                    act.span,
                    "E-FLOW",
                    format!("sync point |{name} needs both incoming and outgoing edges"),
                ));
            }
        }
    }

    claim_release_discipline(act, &graph, diags);
    peripheral_total_order(act, &graph, diags);
    move_paths(model, act, &graph, diags);
}

fn claim_release_discipline(act: &ActivitySpec, graph: &ActivityGraph, diags: &mut Vec<Diagnostic>) {
    let mut by_resource: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, n) in act.nodes.iter().enumerate() {
        by_resource.entry(n.kind.resource()).or_default().push(i);
    }
    let gindex: BTreeMap<usize, usize> = graph
        .nodes
        .iter()
        .enumerate()
        .filter_map(|(g, n)| match n {
            GNode::Action(i) => Some((*i, g)),
            GNode::Sync(_) => None,
        })
        .collect();
    let reach = graph.reachability();

    for (resource, nodes) in by_resource {
        let claims: Vec<usize> = nodes
            .iter()
            .copied()
            .filter(|&i| matches!(act.nodes[i].kind, ActionKind::Claim { .. }))
            .collect();
        let releases: Vec<usize> = nodes
            .iter()
            .copied()
            .filter(|&i| matches!(act.nodes[i].kind, ActionKind::Release { .. }))
            .collect();
        let actions: Vec<usize> = nodes
            .iter()
            .copied()
            .filter(|&i| !claims.contains(&i) && !releases.contains(&i))
            .collect();

        if claims.len() > 1 {
            diags.push(Diagnostic::error(
                ACTIVITIES,
                act.nodes[claims[1]].span,
                "E-CLAIM",
                format!("resource {resource} claimed more than once in activity `{}`", act.name),
            ));
        }
        if releases.len() > 1 {
            diags.push(Diagnostic::error(
                ACTIVITIES,
                act.nodes[releases[1]].span,
                "E-CLAIM",
                format!("resource {resource} released more than once in activity `{}`", act.name),
            ));
        }
        if claims.is_empty() {
            for &i in &actions {
                diags.push(Diagnostic::error(
                    ACTIVITIES,
                    act.nodes[i].span,
                    "E-CLAIM",
                    format!("action {} on unclaimed resource {resource}", act.nodes[i].alias),
                ));
            }
            if actions.is_empty() && !releases.is_empty() {
                diags.push(Diagnostic::error(
                    ACTIVITIES,
                    act.nodes[releases[0]].span,
                    "E-CLAIM",
                    format!("release of resource {resource} without a claim"),
                ));
            }
            continue;
        }
        if releases.is_empty() {
            diags.push(Diagnostic::error(
                ACTIVITIES,
                act.nodes[claims[0]].span,
                "E-CLAIM",
                format!("resource {resource} claimed but never released in activity `{}`", act.name),
            ));
            continue;
        }
        let (claim, release) = (gindex[&claims[0]], gindex[&releases[0]]);
        for &i in &actions {
            let g = gindex[&i];
            if !reach[claim][g] {
                diags.push(Diagnostic::error(
                    ACTIVITIES,
                    act.nodes[i].span,
                    "E-CLAIM",
                    format!("action {} on unclaimed resource {resource}", act.nodes[i].alias),
                ));
            }
            if !reach[g][release] {
                diags.push(Diagnostic::error(
                    ACTIVITIES,
                    act.nodes[i].span,
                    "E-CLAIM",
                    format!(
                        "action {} not followed by release of resource {resource}",
                        act.nodes[i].alias
                    ),
                ));
            }
        }
        if !reach[claim][release] {
            diags.push(Diagnostic::error(
                ACTIVITIES,
                act.nodes[claims[0]].span,
                "E-CLAIM",
                format!("claim of resource {resource} does not precede its release"),
            ));
        }
    }
}

/// Two actions on the same peripheral must be ordered by the flow, otherwise
/// an as-soon-as-possible schedule would overlap them on one actuator.
fn peripheral_total_order(act: &ActivitySpec, graph: &ActivityGraph, diags: &mut Vec<Diagnostic>) {
    let reach = graph.reachability();
    let mut by_periph: BTreeMap<(String, String), Vec<usize>> = BTreeMap::new();
    for (g, node) in graph.nodes.iter().enumerate() {
        if let GNode::Action(i) = node {
            if let Some((r, p)) = act.nodes[*i].kind.peripheral() {
                by_periph.entry((r.to_string(), p.to_string())).or_default().push(g);
            }
        }
    }
    for ((r, p), gs) in by_periph {
        for (ai, &a) in gs.iter().enumerate() {
            for &b in &gs[ai + 1..] {
                if !reach[a][b] && !reach[b][a] {
                    let (ia, ib) = (graph.action_of(a).unwrap(), graph.action_of(b).unwrap());
                    diags.push(Diagnostic::error(
                        ACTIVITIES,
                        act.nodes[ib].span,
                        "E-ORDER",
                        format!(
                            "actions {} and {} on peripheral {r}.{p} are unordered in the flow",
                            act.nodes[ia].alias, act.nodes[ib].alias
                        ),
                    ));
                }
            }
        }
    }
}

fn move_paths(model: &ActivityModel, act: &ActivitySpec, graph: &ActivityGraph, diags: &mut Vec<Diagnostic>) {
    let sources = move_sources(act, graph);
    for (&i, source) in &sources {
        let ActionKind::Move { resource, peripheral, target, profile } = &act.nodes[i].kind else {
            continue;
        };
        let Some((_, inst, _)) = find_peripheral(model, resource, peripheral) else {
            continue; // reported above
        };
        let Some(source) = source else {
            diags.push(Diagnostic::error(
                ACTIVITIES,
                act.nodes[i].span,
                "E-MOVE",
                format!(
                    "move {} has no start position: no prerequisite for `{resource}.{peripheral}`",
                    act.nodes[i].alias
                ),
            ));
            continue;
        };
        if source == target {
            continue; // null move, no path needed
        }
        let found = inst.paths.iter().any(|p| {
            p.profile == *profile
                && ((p.from == *source && p.to == *target)
                    || (p.bidirectional && p.from == *target && p.to == *source))
        });
        if !found {
            diags.push(Diagnostic::error(
                ACTIVITIES,
                act.nodes[i].span,
                "E-MOVE",
                format!("no path {source}<->{target} with profile {profile}"),
            ));
            continue;
        }
        // both endpoints need coordinates on the (single) axis
        let Some(block) = model.settings_block(resource, peripheral) else {
            diags.push(Diagnostic::error(
                ACTIVITIES,
                act.nodes[i].span,
                "E-TIMING",
                format!("no settings block for `{resource}.{peripheral}`"),
            ));
            continue;
        };
        for pos_name in [source, target] {
            if position_coordinate(inst, block, pos_name).is_none() {
                diags.push(Diagnostic::error(
                    ACTIVITIES,
                    act.nodes[i].span,
                    "E-TIMING",
                    format!("no coordinate for position `{pos_name}` of `{resource}.{peripheral}`"),
                ));
            }
        }
        if !block.axes.iter().any(|ax| ax.profiles.iter().any(|p| p.name == *profile)) {
            diags.push(Diagnostic::error(
                ACTIVITIES,
                act.nodes[i].span,
                "E-TIMING",
                format!("no motion profile settings for `{profile}` on `{resource}.{peripheral}`"),
            ));
        }
    }
}

/// Coordinate of a symbolic position on the peripheral's single axis.
pub fn position_coordinate(
    inst: &PeripheralInstance,
    block: &SettingsBlock,
    position: &str,
) -> Option<f64> {
    let sym = inst.symbolic_positions.iter().find(|s| s.name == position)?;
    let (axis, axis_pos) = sym.refs.first()?;
    block
        .axes
        .iter()
        .find(|a| &a.axis == axis)?
        .positions
        .iter()
        .find(|p| &p.name == axis_pos)
        .map(|p| p.coordinate)
}

//! Recursive-descent parsers for the machine, settings and activity dialects.
//!
//! The grammar lives in `docs/grammar.md`. Section keywords are contextual
//! identifiers, so `claim`, `Actions` and friends remain legal names
//! elsewhere. Parsing also performs the in-file static checks: duplicate
//! identifiers, dangling in-file references and alias resolution in action
//! flows.

use super::ast::*;
use crate::diag::{Diagnostic, Span};
use crate::text::{Cursor, Tok};
use std::collections::{BTreeMap, BTreeSet};

pub fn parse(kind: SpecKind, file: &str, text: &str) -> Result<Spec, Vec<Diagnostic>> {
    match kind {
        SpecKind::Machine => parse_machine(file, text).map(Spec::Machine),
        SpecKind::Settings => parse_settings(file, text).map(Spec::Settings),
        SpecKind::Activity => parse_activities(file, text).map(Spec::Activities),
    }
}

fn one(d: Diagnostic) -> Vec<Diagnostic> {
    vec![d]
}

// ---------------------------------------------------------------------------
// machine

pub fn parse_machine(file: &str, text: &str) -> Result<MachineSpec, Vec<Diagnostic>> {
    let mut cur = Cursor::new(file, text, false).map_err(one)?;
    let mut spec = MachineSpec::default();

    if cur.at_eof() {
        return Err(one(cur.err("expected at least one declaration")));
    }
    while !cur.at_eof() {
        if cur.at_kw("PeripheralType") {
            spec.peripheral_types.push(peripheral_type(&mut cur).map_err(one)?);
        } else if cur.at_kw("Resource") {
            spec.resources.push(resource(&mut cur).map_err(one)?);
        } else {
            return Err(one(cur.err(format!(
                "expected `PeripheralType` or `Resource`, found {}",
                cur.peek().describe()
            ))));
        }
    }

    check_machine(file, &spec)?;
    Ok(spec)
}

fn peripheral_type(cur: &mut Cursor) -> Result<PeripheralType, Diagnostic> {
    let start = cur.expect_kw("PeripheralType")?;
    let (name, _) = cur.expect_ident()?;
    cur.expect(&Tok::LBrace)?;
    let mut pt = PeripheralType { name, span: start, ..Default::default() };
    while !cur.eat(&Tok::RBrace) {
        if cur.eat_kw("Actions") {
            cur.expect(&Tok::LBrace)?;
            while !cur.eat(&Tok::RBrace) {
                let (a, sp) = cur.expect_ident()?;
                pt.actions.push(ActionName { name: a, span: sp });
            }
        } else if cur.eat_kw("SetPoints") {
            cur.expect(&Tok::LBrace)?;
            while !cur.eat(&Tok::RBrace) {
                let (n, sp) = cur.expect_ident()?;
                let unit = opt_unit(cur)?;
                pt.setpoints.push(SetPoint { name: n, unit, span: sp });
            }
        } else if cur.eat_kw("Axes") {
            cur.expect(&Tok::LBrace)?;
            while !cur.eat(&Tok::RBrace) {
                let (n, sp) = cur.expect_ident()?;
                let unit = opt_unit(cur)?;
                cur.expect_kw("moves")?;
                let (moves, _) = cur.expect_ident()?;
                pt.axes.push(Axis { name: n, unit, moves, span: sp });
            }
        } else {
            return Err(cur.err(format!(
                "expected `Actions`, `SetPoints` or `Axes`, found {}",
                cur.peek().describe()
            )));
        }
    }
    Ok(pt)
}

fn opt_unit(cur: &mut Cursor) -> Result<Option<String>, Diagnostic> {
    if cur.eat(&Tok::LBracket) {
        let (u, _) = cur.expect_ident()?;
        cur.expect(&Tok::RBracket)?;
        Ok(Some(u))
    } else {
        Ok(None)
    }
}

fn resource(cur: &mut Cursor) -> Result<Resource, Diagnostic> {
    let start = cur.expect_kw("Resource")?;
    let (name, _) = cur.expect_ident()?;
    cur.expect(&Tok::LBrace)?;
    let mut res = Resource { name, span: start, ..Default::default() };
    while !cur.eat(&Tok::RBrace) {
        let (pname, psp) = cur.expect_ident()?;
        cur.expect(&Tok::Colon)?;
        let (tname, _) = cur.expect_ident()?;
        let mut inst =
            PeripheralInstance { name: pname, type_name: tname, span: psp, ..Default::default() };
        if cur.eat(&Tok::LBrace) {
            while !cur.eat(&Tok::RBrace) {
                if cur.eat_kw("AxisPositions") {
                    cur.expect(&Tok::LBrace)?;
                    while !cur.eat(&Tok::RBrace) {
                        let (axis, sp) = cur.expect_ident()?;
                        cur.expect(&Tok::LParen)?;
                        let mut positions = Vec::new();
                        loop {
                            let (p, _) = cur.expect_ident()?;
                            positions.push(p);
                            if !cur.eat(&Tok::Comma) {
                                break;
                            }
                        }
                        cur.expect(&Tok::RParen)?;
                        inst.axis_positions.push(AxisPositions { axis, positions, span: sp });
                    }
                } else if cur.eat_kw("SymbolicPositions") {
                    cur.expect(&Tok::LBrace)?;
                    while !cur.eat(&Tok::RBrace) {
                        let (n, sp) = cur.expect_ident()?;
                        cur.expect(&Tok::LParen)?;
                        let mut refs = Vec::new();
                        loop {
                            let (axis, _) = cur.expect_ident()?;
                            cur.expect(&Tok::Dot)?;
                            let (pos, _) = cur.expect_ident()?;
                            refs.push((axis, pos));
                            if !cur.eat(&Tok::Comma) {
                                break;
                            }
                        }
                        cur.expect(&Tok::RParen)?;
                        inst.symbolic_positions.push(SymbolicPosition { name: n, refs, span: sp });
                    }
                } else if cur.eat_kw("Profiles") {
                    cur.expect(&Tok::LParen)?;
                    loop {
                        let (p, _) = cur.expect_ident()?;
                        inst.profiles.push(p);
                        if !cur.eat(&Tok::Comma) {
                            break;
                        }
                    }
                    cur.expect(&Tok::RParen)?;
                } else if cur.eat_kw("Paths") {
                    cur.expect(&Tok::LBrace)?;
                    while !cur.eat(&Tok::RBrace) {
                        let (from, sp) = cur.expect_ident()?;
                        let bidirectional = if cur.eat(&Tok::BiArrow) {
                            true
                        } else if cur.eat(&Tok::Arrow) {
                            false
                        } else {
                            return Err(cur.err(format!(
                                "expected `<->` or `->` in path, found {}",
                                cur.peek().describe()
                            )));
                        };
                        let (to, _) = cur.expect_ident()?;
                        cur.expect_kw("profile")?;
                        let (profile, _) = cur.expect_ident()?;
                        inst.paths.push(PathDecl { from, to, bidirectional, profile, span: sp });
                    }
                } else {
                    return Err(cur.err(format!(
                        "expected `AxisPositions`, `SymbolicPositions`, `Profiles` or `Paths`, found {}",
                        cur.peek().describe()
                    )));
                }
            }
        }
        res.peripherals.push(inst);
    }
    Ok(res)
}

fn check_machine(file: &str, spec: &MachineSpec) -> Result<(), Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let mut type_names = BTreeSet::new();
    for pt in &spec.peripheral_types {
        if !type_names.insert(pt.name.clone()) {
            diags.push(Diagnostic::error(
                file,
                pt.span,
                "E-DUP",
                format!("duplicate peripheral type `{}`", pt.name),
            ));
        }
        if pt.actions.is_empty() && pt.axes.is_empty() {
            diags.push(Diagnostic::error(
                file,
                pt.span,
                "E-EMPTY-TYPE",
                format!("peripheral type `{}` declares neither actions nor axes", pt.name),
            ));
        }
        let mut actions = BTreeSet::new();
        for a in &pt.actions {
            if !actions.insert(a.name.clone()) {
                diags.push(Diagnostic::error(
                    file,
                    a.span,
                    "E-DUP",
                    format!("duplicate action `{}` in peripheral type `{}`", a.name, pt.name),
                ));
            }
        }
        for ax in &pt.axes {
            if !pt.setpoints.iter().any(|s| s.name == ax.moves) {
                diags.push(Diagnostic::error(
                    file,
                    ax.span,
                    "E-REF",
                    format!("axis `{}` moves undeclared set-point `{}`", ax.name, ax.moves),
                ));
            }
        }
    }
    let mut res_names = BTreeSet::new();
    for r in &spec.resources {
        if !res_names.insert(r.name.clone()) {
            diags.push(Diagnostic::error(
                file,
                r.span,
                "E-DUP",
                format!("duplicate resource `{}`", r.name),
            ));
        }
        let mut inst_names = BTreeSet::new();
        for p in &r.peripherals {
            if !inst_names.insert(p.name.clone()) {
                diags.push(Diagnostic::error(
                    file,
                    p.span,
                    "E-DUP",
                    format!("duplicate peripheral `{}` in resource `{}`", p.name, r.name),
                ));
            }
            let Some(pt) = spec.peripheral_types.iter().find(|t| t.name == p.type_name) else {
                diags.push(Diagnostic::error(
                    file,
                    p.span,
                    "E-REF",
                    format!("peripheral `{}.{}` references undeclared type `{}`", r.name, p.name, p.type_name),
                ));
                continue;
            };
            let mut declared_axis_positions: BTreeMap<&str, &AxisPositions> = BTreeMap::new();
            for ap in &p.axis_positions {
                if !pt.axes.iter().any(|a| a.name == ap.axis) {
                    diags.push(Diagnostic::error(
                        file,
                        ap.span,
                        "E-REF",
                        format!("axis `{}` not declared by type `{}`", ap.axis, pt.name),
                    ));
                }
                declared_axis_positions.insert(ap.axis.as_str(), ap);
            }
            let mut sym_names = BTreeSet::new();
            for sym in &p.symbolic_positions {
                if !sym_names.insert(sym.name.clone()) {
                    diags.push(Diagnostic::error(
                        file,
                        sym.span,
                        "E-DUP",
                        format!("duplicate symbolic position `{}`", sym.name),
                    ));
                }
                for (axis, pos) in &sym.refs {
                    match declared_axis_positions.get(axis.as_str()) {
                        Some(ap) if ap.positions.contains(pos) => {}
                        _ => diags.push(Diagnostic::error(
                            file,
                            sym.span,
                            "E-REF",
                            format!(
                                "symbolic position `{}` references undeclared axis position `{}.{}`",
                                sym.name, axis, pos
                            ),
                        )),
                    }
                }
            }
            for path in &p.paths {
                for end in [&path.from, &path.to] {
                    if !p.symbolic_positions.iter().any(|s| &s.name == end) {
                        diags.push(Diagnostic::error(
                            file,
                            path.span,
                            "E-REF",
                            format!("path endpoint `{end}` is not a symbolic position of `{}.{}`", r.name, p.name),
                        ));
                    }
                }
                if !p.profiles.contains(&path.profile) {
                    diags.push(Diagnostic::error(
                        file,
                        path.span,
                        "E-REF",
                        format!("path profile `{}` not listed in Profiles of `{}.{}`", path.profile, r.name, p.name),
                    ));
                }
            }
        }
    }
    if diags.is_empty() {
        Ok(())
    } else {
        crate::diag::sort_diagnostics(&mut diags);
        Err(diags)
    }
}

// ---------------------------------------------------------------------------
// settings

pub fn parse_settings(file: &str, text: &str) -> Result<SettingsSpec, Vec<Diagnostic>> {
    let mut cur = Cursor::new(file, text, false).map_err(one)?;
    let mut spec = SettingsSpec::default();
    if cur.at_eof() {
        return Err(one(cur.err("expected at least one declaration")));
    }
    while !cur.at_eof() {
        let (resource, rsp) = cur.expect_ident().map_err(one)?;
        cur.expect(&Tok::Dot).map_err(one)?;
        let (peripheral, _) = cur.expect_ident().map_err(one)?;
        cur.expect(&Tok::LBrace).map_err(one)?;
        let mut block =
            SettingsBlock { resource, peripheral, span: rsp, ..Default::default() };
        while !cur.eat(&Tok::RBrace) {
            if cur.eat_kw("Timings") {
                cur.expect(&Tok::LBrace).map_err(one)?;
                while !cur.eat(&Tok::RBrace) {
                    let (action, sp) = cur.expect_ident().map_err(one)?;
                    cur.expect(&Tok::Eq).map_err(one)?;
                    let (seconds, _) = cur.expect_number().map_err(one)?;
                    block.timings.push(TimingDecl { action, seconds, span: sp });
                }
            } else if cur.eat_kw("Axis") {
                let (axis, sp) = cur.expect_ident().map_err(one)?;
                cur.expect(&Tok::LBrace).map_err(one)?;
                let mut ax = AxisSettings { axis, span: sp, ..Default::default() };
                while !cur.eat(&Tok::RBrace) {
                    if cur.eat_kw("Profiles") {
                        cur.expect(&Tok::LBrace).map_err(one)?;
                        while !cur.eat(&Tok::RBrace) {
                            ax.profiles.push(profile_decl(&mut cur).map_err(one)?);
                        }
                    } else if cur.eat_kw("Positions") {
                        cur.expect(&Tok::LBrace).map_err(one)?;
                        while !cur.eat(&Tok::RBrace) {
                            let (name, psp) = cur.expect_ident().map_err(one)?;
                            cur.expect(&Tok::Eq).map_err(one)?;
                            let (coordinate, _) = cur.expect_number().map_err(one)?;
                            ax.positions.push(PositionDecl { name, coordinate, span: psp });
                        }
                    } else {
                        return Err(one(cur.err(format!(
                            "expected `Profiles` or `Positions`, found {}",
                            cur.peek().describe()
                        ))));
                    }
                }
                block.axes.push(ax);
            } else {
                return Err(one(cur.err(format!(
                    "expected `Timings` or `Axis`, found {}",
                    cur.peek().describe()
                ))));
            }
        }
        spec.blocks.push(block);
    }
    check_settings(file, &spec)?;
    Ok(spec)
}

fn profile_decl(cur: &mut Cursor) -> Result<ProfileDecl, Diagnostic> {
    let (name, sp) = cur.expect_ident()?;
    cur.expect(&Tok::LParen)?;
    let mut v = None;
    let mut a = None;
    let mut j = None;
    loop {
        let (key, ksp) = cur.expect_ident()?;
        cur.expect(&Tok::Eq)?;
        let (val, _) = cur.expect_number()?;
        match key.as_str() {
            "V" => v = Some(val),
            "A" => a = Some(val),
            "J" => j = Some(val),
            other => {
                return Err(Diagnostic::error(
                    cur.file,
                    ksp,
                    "E-PARSE",
                    format!("unknown profile parameter `{other}` (expected V, A or J)"),
                ))
            }
        }
        if !cur.eat(&Tok::Comma) {
            break;
        }
    }
    cur.expect(&Tok::RParen)?;
    let missing = [("V", &v), ("A", &a), ("J", &j)]
        .iter()
        .filter(|(_, o)| o.is_none())
        .map(|(k, _)| *k)
        .collect::<Vec<_>>();
    if !missing.is_empty() {
        return Err(Diagnostic::error(
            cur.file,
            sp,
            "E-PARSE",
            format!("profile `{name}` missing parameter(s) {}", missing.join(", ")),
        ));
    }
    Ok(ProfileDecl { name, velocity: v.unwrap(), acceleration: a.unwrap(), jerk: j.unwrap(), span: sp })
}

fn check_settings(file: &str, spec: &SettingsSpec) -> Result<(), Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let mut block_keys = BTreeSet::new();
    for b in &spec.blocks {
        if !block_keys.insert((b.resource.clone(), b.peripheral.clone())) {
            diags.push(Diagnostic::error(
                file,
                b.span,
                "E-DUP",
                format!("duplicate settings block `{}.{}`", b.resource, b.peripheral),
            ));
        }
        let mut timing_names = BTreeSet::new();
        for t in &b.timings {
            if !timing_names.insert(t.action.clone()) {
                diags.push(Diagnostic::error(
                    file,
                    t.span,
                    "E-DUP",
                    format!("duplicate timing for action `{}`", t.action),
                ));
            }
            if !(t.seconds >= 0.0 && t.seconds.is_finite()) {
                diags.push(Diagnostic::error(
                    file,
                    t.span,
                    "E-VALUE",
                    format!("timing for `{}` must be a nonnegative number", t.action),
                ));
            }
        }
        for ax in &b.axes {
            for p in &ax.profiles {
                for (label, val) in [("V", p.velocity), ("A", p.acceleration), ("J", p.jerk)] {
                    if !(val > 0.0 && val.is_finite()) {
                        diags.push(Diagnostic::error(
                            file,
                            p.span,
                            "E-VALUE",
                            format!("profile `{}`: {label} must be strictly positive", p.name),
                        ));
                    }
                }
            }
            let mut pos_names = BTreeSet::new();
            for p in &ax.positions {
                if !pos_names.insert(p.name.clone()) {
                    diags.push(Diagnostic::error(
                        file,
                        p.span,
                        "E-DUP",
                        format!("duplicate position `{}` on axis `{}`", p.name, ax.axis),
                    ));
                }
            }
        }
    }
    if diags.is_empty() {
        Ok(())
    } else {
        crate::diag::sort_diagnostics(&mut diags);
        Err(diags)
    }
}

// ---------------------------------------------------------------------------
// activities

pub fn parse_activities(file: &str, text: &str) -> Result<Vec<ActivitySpec>, Vec<Diagnostic>> {
    let mut cur = Cursor::new(file, text, false).map_err(one)?;
    let mut acts = Vec::new();
    if cur.at_eof() {
        return Err(one(cur.err("expected at least one declaration")));
    }
    while !cur.at_eof() {
        acts.push(activity(&mut cur).map_err(one)?);
    }
    check_activities(file, &acts)?;
    Ok(acts)
}

fn activity(cur: &mut Cursor) -> Result<ActivitySpec, Diagnostic> {
    let start = cur.expect_kw("activity")?;
    let (name, _) = cur.expect_ident()?;
    cur.expect(&Tok::LBrace)?;
    let mut act = ActivitySpec { name, span: start, ..Default::default() };

    if cur.eat_kw("prerequisites") {
        cur.expect(&Tok::LBrace)?;
        while !cur.eat(&Tok::RBrace) {
            let (resource, sp) = cur.expect_ident()?;
            cur.expect(&Tok::Dot)?;
            let (peripheral, _) = cur.expect_ident()?;
            cur.expect_kw("at")?;
            let (position, _) = cur.expect_ident()?;
            act.prerequisites.push(Prerequisite { resource, peripheral, position, span: sp });
        }
    }

    cur.expect_kw("actions")?;
    cur.expect(&Tok::LBrace)?;
    while !cur.eat(&Tok::RBrace) {
        let (alias, sp) = cur.expect_ident()?;
        cur.expect(&Tok::Colon)?;
        let kind = action_kind(cur)?;
        act.nodes.push(ActionNode { alias, kind, span: sp });
    }

    cur.expect_kw("action")?;
    cur.expect_kw("flow")?;
    cur.expect(&Tok::LBrace)?;
    while !cur.eat(&Tok::RBrace) {
        let mut prev = flow_node(cur)?;
        loop {
            let sp = cur.span();
            if cur.eat(&Tok::Arrow) {
                let next = flow_node(cur)?;
                act.flow.push(FlowEdge { from: prev.clone(), to: next.clone(), span: sp });
                prev = next;
            } else {
                break;
            }
        }
    }
    cur.expect(&Tok::RBrace)?;
    Ok(act)
}

fn action_kind(cur: &mut Cursor) -> Result<ActionKind, Diagnostic> {
    if cur.at_kw("claim") && matches!(cur.peek2(), Tok::Ident(_)) {
        cur.bump();
        let (resource, _) = cur.expect_ident()?;
        return Ok(ActionKind::Claim { resource });
    }
    if cur.at_kw("release") && matches!(cur.peek2(), Tok::Ident(_)) {
        cur.bump();
        let (resource, _) = cur.expect_ident()?;
        return Ok(ActionKind::Release { resource });
    }
    if cur.at_kw("move") && matches!(cur.peek2(), Tok::Ident(_)) {
        cur.bump();
        let (resource, _) = cur.expect_ident()?;
        cur.expect(&Tok::Dot)?;
        let (peripheral, _) = cur.expect_ident()?;
        cur.expect_kw("to")?;
        let (target, _) = cur.expect_ident()?;
        cur.expect_kw("with")?;
        cur.expect_kw("speed")?;
        cur.expect_kw("profile")?;
        let (profile, _) = cur.expect_ident()?;
        return Ok(ActionKind::Move { resource, peripheral, target, profile });
    }
    let (resource, _) = cur.expect_ident()?;
    cur.expect(&Tok::Dot)?;
    let (peripheral, _) = cur.expect_ident()?;
    cur.expect(&Tok::Dot)?;
    let (action, _) = cur.expect_ident()?;
    Ok(ActionKind::PeripheralAction { resource, peripheral, action })
}

fn flow_node(cur: &mut Cursor) -> Result<FlowNode, Diagnostic> {
    if cur.eat(&Tok::Pipe) {
        let (n, _) = cur.expect_ident()?;
        Ok(FlowNode::Sync(n))
    } else {
        let (n, _) = cur.expect_ident()?;
        Ok(FlowNode::Action(n))
    }
}

fn check_activities(file: &str, acts: &[ActivitySpec]) -> Result<(), Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let mut names = BTreeSet::new();
    for act in acts {
        if !names.insert(act.name.clone()) {
            diags.push(Diagnostic::error(
                file,
                act.span,
                "E-DUP",
                format!("duplicate activity `{}`", act.name),
            ));
        }
        let mut aliases = BTreeSet::new();
        for n in &act.nodes {
            if !aliases.insert(n.alias.clone()) {
                diags.push(Diagnostic::error(
                    file,
                    n.span,
                    "E-DUP",
                    format!("duplicate alias `{}` in activity `{}`", n.alias, act.name),
                ));
            }
        }
        let mut used: BTreeSet<&str> = BTreeSet::new();
        for e in &act.flow {
            for node in [&e.from, &e.to] {
                if let FlowNode::Action(a) = node {
                    if !aliases.contains(a) {
                        diags.push(Diagnostic::error(
                            file,
                            e.span,
                            "E-REF",
                            format!("undefined alias {a} in action flow"),
                        ));
                    }
                    used.insert(a);
                }
            }
        }
        for n in &act.nodes {
            if !used.contains(n.alias.as_str()) && !act.flow.is_empty() {
                diags.push(Diagnostic::error(
                    file,
                    n.span,
                    "E-FLOW",
                    format!("alias `{}` is never used in the action flow", n.alias),
                ));
            }
        }
    }
    if diags.is_empty() {
        Ok(())
    } else {
        crate::diag::sort_diagnostics(&mut diags);
        Err(diags)
    }
}

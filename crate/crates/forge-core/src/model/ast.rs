//! AST for the three-part activity DSL: machine structure, timing settings,
//! and activities over the machine's resources.
//!
//! Every node carries a `Span`; spans are excluded from equality so that a
//! printed-and-reparsed spec compares equal to the original.

use crate::diag::Span;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpecKind {
    Machine,
    Settings,
    Activity,
}

impl fmt::Display for SpecKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecKind::Machine => write!(f, "machine"),
            SpecKind::Settings => write!(f, "settings"),
            SpecKind::Activity => write!(f, "activity"),
        }
    }
}

/// A parsed file of any of the three kinds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Spec {
    Machine(MachineSpec),
    Settings(SettingsSpec),
    Activities(Vec<ActivitySpec>),
}

impl Spec {
    pub fn kind(&self) -> SpecKind {
        match self {
            Spec::Machine(_) => SpecKind::Machine,
            Spec::Settings(_) => SpecKind::Settings,
            Spec::Activities(_) => SpecKind::Activity,
        }
    }
}

// ---------------------------------------------------------------------------
// machine specification

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MachineSpec {
    pub peripheral_types: Vec<PeripheralType>,
    pub resources: Vec<Resource>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PeripheralType {
    pub name: String,
    pub actions: Vec<ActionName>,
    pub setpoints: Vec<SetPoint>,
    pub axes: Vec<Axis>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionName {
    pub name: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetPoint {
    pub name: String,
    pub unit: Option<String>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub unit: Option<String>,
    /// Name of the set-point this axis drives.
    pub moves: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Resource {
    pub name: String,
    pub peripherals: Vec<PeripheralInstance>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PeripheralInstance {
    pub name: String,
    pub type_name: String,
    pub axis_positions: Vec<AxisPositions>,
    pub symbolic_positions: Vec<SymbolicPosition>,
    pub profiles: Vec<String>,
    pub paths: Vec<PathDecl>,
    pub span: Span,
}

/// Named positions available on one axis: `Z (Above, At)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisPositions {
    pub axis: String,
    pub positions: Vec<String>,
    pub span: Span,
}

/// A peripheral-level position naming one axis position per axis:
/// `Above_Belt (Z.Above)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolicPosition {
    pub name: String,
    /// (axis, axis position) pairs.
    pub refs: Vec<(String, String)>,
    pub span: Span,
}

/// `Above_Belt <-> At_Belt profile normal`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathDecl {
    pub from: String,
    pub to: String,
    pub bidirectional: bool,
    pub profile: String,
    pub span: Span,
}

// ---------------------------------------------------------------------------
// settings specification

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SettingsSpec {
    pub blocks: Vec<SettingsBlock>,
}

/// Settings for one `Resource.peripheral`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SettingsBlock {
    pub resource: String,
    pub peripheral: String,
    pub timings: Vec<TimingDecl>,
    pub axes: Vec<AxisSettings>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingDecl {
    pub action: String,
    pub seconds: f64,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AxisSettings {
    pub axis: String,
    pub profiles: Vec<ProfileDecl>,
    pub positions: Vec<PositionDecl>,
    pub span: Span,
}

/// `normal (V = 5, A = 10, J = 10)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileDecl {
    pub name: String,
    pub velocity: f64,
    pub acceleration: f64,
    pub jerk: f64,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositionDecl {
    pub name: String,
    pub coordinate: f64,
    pub span: Span,
}

// ---------------------------------------------------------------------------
// activity specification

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ActivitySpec {
    pub name: String,
    pub prerequisites: Vec<Prerequisite>,
    pub nodes: Vec<ActionNode>,
    pub flow: Vec<FlowEdge>,
    pub span: Span,
}

/// `Turner.zMotor at At_Belt`: assumed initial position of a peripheral.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prerequisite {
    pub resource: String,
    pub peripheral: String,
    pub position: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionNode {
    pub alias: String,
    pub kind: ActionKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ActionKind {
    Claim { resource: String },
    Release { resource: String },
    PeripheralAction { resource: String, peripheral: String, action: String },
    Move { resource: String, peripheral: String, target: String, profile: String },
}

impl ActionKind {
    /// The resource this node synchronizes on.
    pub fn resource(&self) -> &str {
        match self {
            ActionKind::Claim { resource }
            | ActionKind::Release { resource }
            | ActionKind::PeripheralAction { resource, .. }
            | ActionKind::Move { resource, .. } => resource,
        }
    }

    /// `resource.peripheral` for nodes that occupy a peripheral.
    pub fn peripheral(&self) -> Option<(&str, &str)> {
        match self {
            ActionKind::PeripheralAction { resource, peripheral, .. }
            | ActionKind::Move { resource, peripheral, .. } => Some((resource, peripheral)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FlowNode {
    /// Reference to a declared action alias.
    Action(String),
    /// Synchronization point `|sN`.
    Sync(String),
}

impl fmt::Display for FlowNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlowNode::Action(a) => write!(f, "{a}"),
            FlowNode::Sync(s) => write!(f, "|{s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowEdge {
    pub from: FlowNode,
    pub to: FlowNode,
    pub span: Span,
}

// ---------------------------------------------------------------------------
// whole model

/// The complete model: one machine, one settings spec, any number of
/// activities. The single source of truth for structure and timing.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ActivityModel {
    pub machine: MachineSpec,
    pub settings: SettingsSpec,
    pub activities: Vec<ActivitySpec>,
}

impl ActivityModel {
    pub fn activity(&self, name: &str) -> Option<&ActivitySpec> {
        self.activities.iter().find(|a| a.name == name)
    }

    pub fn resource_names(&self) -> Vec<String> {
        self.machine.resources.iter().map(|r| r.name.clone()).collect()
    }

    pub fn settings_block(&self, resource: &str, peripheral: &str) -> Option<&SettingsBlock> {
        self.settings.blocks.iter().find(|b| b.resource == resource && b.peripheral == peripheral)
    }

    pub fn action_timing(&self, resource: &str, peripheral: &str, action: &str) -> Option<f64> {
        self.settings_block(resource, peripheral)?
            .timings
            .iter()
            .find(|t| t.action == action)
            .map(|t| t.seconds)
    }
}

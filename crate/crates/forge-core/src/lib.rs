//! Core library of the activity-model engineering toolchain: the activity
//! DSL and validator, jerk-limited motion timing, (max,+) activity semantics
//! and Gantt schedules, product-line variant derivation, supervisory control
//! synthesis, makespan-optimal dispatching, progress checking, model
//! translations, and a simulated activity execution engine.

pub mod diag;
pub mod maxplus;
pub mod model;
pub mod motion;
pub mod text;
pub mod timing;

#[doc(hidden)]
pub mod testutil;

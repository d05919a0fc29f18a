//! Approximation functions, epoch schedules and the target template.

mod psi;
mod schedule;
mod shape;

pub use psi::PsiFunction;
pub use schedule::{Constants, Epoch, Growth, LevelCase, Schedule, PREDICATES};
pub use shape::{build_template, slope_conditions, slope_conditions_sampled, Template};

//! Whole-file processing: lift and type every method with code, isolating
//! per-method failures so one bad method does not abort the file.

use crate::dex::DexFile;
use crate::ir::Body;
use crate::lift::{lift_method, LiftError};
use crate::passes::{run_pipeline, PassOptions, PipelineError};

#[derive(Debug, Clone, Copy)]
pub struct ProcessOptions {
    pub optimize: bool,
}

impl Default for ProcessOptions {
    fn default() -> Self {
        ProcessOptions { optimize: true }
    }
}

#[derive(Debug)]
pub enum MethodFailure {
    Lift(LiftError),
    Pipeline(PipelineError),
}

impl std::fmt::Display for MethodFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MethodFailure::Lift(e) => write!(f, "{e}"),
            MethodFailure::Pipeline(e) => write!(f, "{e}"),
        }
    }
}

impl MethodFailure {
    /// True when the failure came from an unsupported or unknown opcode.
    pub fn is_unsupported_opcode(&self) -> bool {
        matches!(
            self,
            MethodFailure::Lift(LiftError::Isa(
                crate::isa::IsaError::UnsupportedOpcode { .. }
                    | crate::isa::IsaError::UnknownOpcode { .. }
            ))
        )
    }
}

#[derive(Debug)]
pub struct MethodOutcome {
    pub method: crate::dex::MethodRef,
    pub result: Result<Body, MethodFailure>,
}

#[derive(Debug, Default)]
pub struct ProcessReport {
    pub outcomes: Vec<MethodOutcome>,
}

impl ProcessReport {
    pub fn bodies(&self) -> impl Iterator<Item = &Body> {
        self.outcomes.iter().filter_map(|o| o.result.as_ref().ok())
    }

    pub fn failures(&self) -> impl Iterator<Item = (&crate::dex::MethodRef, &MethodFailure)> {
        self.outcomes
            .iter()
            .filter_map(|o| o.result.as_ref().err().map(|e| (&o.method, e)))
    }
}

/// Lifts and types every concrete method in the file.
pub fn process_dex(dex: &DexFile, opts: &ProcessOptions) -> ProcessReport {
    let mut report = ProcessReport::default();
    for class in &dex.classes {
        for method in class.methods() {
            let Some(code) = &method.code else { continue };
            let result = lift_method(dex, method, code)
                .map_err(MethodFailure::Lift)
                .and_then(|mut body| {
                    run_pipeline(
                        &mut body,
                        &PassOptions {
                            optimize: opts.optimize,
                        },
                    )
                    .map_err(MethodFailure::Pipeline)?;
                    Ok(body)
                });
            report.outcomes.push(MethodOutcome {
                method: method.method.clone(),
                result,
            });
        }
    }
    report
}

//! The reduction between PCSP templates through an auxiliary instance over a
//! free template and the long code.

mod auxiliary;
mod longcode;
mod pipeline;

pub use auxiliary::{build_auxiliary, AuxLink, AuxiliaryInstance, CMode};
pub use longcode::{lift_strict_solution, longcode_reduce, Cloud, CloudLayout, CloudSource, LongCode};
pub use pipeline::{apply_to_rows, decode_relaxed_solution, pipeline_reduce, Pipeline, PipelineMetadata};

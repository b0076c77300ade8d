//! Model files, the end-to-end pipeline, report emission and the bundled
//! six-node network experiment.

mod model_file;
mod output;
mod pipeline;
mod section5;

pub use model_file::{
    load_model, load_schedule, parse_model, parse_schedule, section5_model, Edge, GenericSpec, ModelSpec, NetworkSpec, PerStage,
    SECTION5_JSON,
};
pub use output::{
    cdf_path, emit_report, random_histogram, report_from_json, report_to_json, write_cdf_csv,
    write_histogram, write_report, write_samples_csv, write_schedule_csv, write_theta_csv, HistogramOutput,
    ReportFormat,
};
pub use pipeline::{
    evaluate, run_pipeline, ExperimentReport, Metadata, MethodResult, PipelineConfig, PipelineOutput,
    RandomStats, RelaxedSummary, SolverStats, DEFAULT_SEED,
};
pub use section5::{
    restricted_tracking, run_section5, Comparison, Convention, Reference, Section5Config, Section5Report,
    ThetaDegeneracy, REFERENCE,
};

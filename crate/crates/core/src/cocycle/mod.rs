//! Holomorphic semicocycles `Γ_t(z)`: the evolution problem, axiom checks,
//! generator extraction and growth analysis.

mod checks;
mod evolve;
mod generator;
mod growth;

pub use checks::{
    check_axioms, extract_generator, extract_generator_auto, spatial_derivative_check, AxiomReport, AxiomSample,
    DEFAULT_EXTRACT_T0,
};
pub use evolve::{evolve, evolve_path, CocycleOracle, CocycleSource, Evolved, DEFAULT_EVOLVE_TOL};
pub use generator::{AnalyticGenerator, CocycleGenerator, Generator};
pub use growth::{
    boundedness_classify, growth_report, sampled_log_norm_sup, BoundednessFit, GrowthGrid, GrowthReport, GrowthSample,
    BOUNDARY_NODES, UNBOUNDED_ACCELERATION,
};

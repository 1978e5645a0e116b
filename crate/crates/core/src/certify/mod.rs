//! Pipelines that assemble the theorems' manifolds and certify their claims.

pub mod certificate;
pub mod ingredient;
pub mod pipelines;

pub use certificate::{
    emit_certificate, load_certificate, recheck_certificate, recheck_file, Certificate, Claim, RecheckReport, Relation,
    Status,
};
pub use ingredient::{round_ball_volume, IngredientMetric, IngredientShape, IngredientSource};
pub use pipelines::{
    main_b_stand_in, pipeline_cor_d, pipeline_cor_t, pipeline_cor_v, pipeline_main_a, product_floor,
    product_metric_radius, spheres_needed, surgery_certificate, tunnel_certificate, verify_main_b_budget,
    PipelineOptions, PipelineRun,
};

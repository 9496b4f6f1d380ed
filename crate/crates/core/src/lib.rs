pub mod audit;
pub mod classify;
pub mod curvature;
pub mod error;
pub mod hypersurface;
pub mod manifest;
pub mod structure;
pub mod tensor;

pub use audit::{
    audit_batch, audit_theorems, flatness_construction, audit_with_hypersurface, classify_instance, generate_instance, AuditEntry, BatchConfig,
    BatchReport, ClassificationReport, EntryKind, Finding, FittedConstant, InstanceKind, Tally, Verdict,
};
pub use classify::{
    check_constant_generalized, check_constant_gphihs, check_dependent_identity, check_phi_gs, classify_ricci,
    conharmonic_flat, constant_generalized_tensor, ghs_value, phi_gs_component_tuples, random_horizontal_vector, Check,
    ConstantFit, ConstantGeneralized, DependentIdentity, PhiGsMode, RicciClassification,
};
pub use curvature::{
    build_classical, build_generalized, build_riemann, complete_lowered, generalized_components_formula, metric_block,
    ricci_contraction, ricci_formula, ClassicalKind, CoefficientTriple, CurvatureBundle, Ricci, RicciMode, Riemann,
    SymmetryResiduals,
};
pub use error::{Error, Result};
pub use hypersurface::{
    cartan_coefficients, equate_tables, extract_sigma, product_complex_structure_check, product_j, sample_frame_change, transform_curvature, transport_check,
    CartanKind, CartanTerm, FrameChange, HypersurfaceData, ProductStructureResiduals, ProductVector, SigmaComponents,
    SigmaExtraction, TransportCheck, MATCHING_SYSTEM,
};
pub use manifest::{default_tolerance, Manifest, HypersurfaceSection, Options};
pub use structure::{AdmissibilityReport, Residual, StructureData};
pub use tensor::{
    antisymmetrize, apply, conjugate_complete, contract, hat, lower_index, make_metric, make_phi,
    raise_index, symmetrize, ComponentTensor, FrameIndex, Metric, Variance, C64, DEFAULT_TOLERANCE,
};

//! Ordered R-matrix products and the identities built from them.

pub mod lemmas;
pub mod plan;
pub mod products;
pub mod report;
pub mod scalar;
pub mod sets;
pub mod theorem;

pub use lemmas::{
    build_g, build_h, check_f_quasi_periodicity, check_lemma31, check_lemma32, plan_g, plan_h, Part, PartResiduals,
    QuasiResiduals,
};
pub use plan::{plan_r, plan_r_prime, plan_y, Coupling, Evaluator, Factor, FactorKind, Form, ProductPlan};
pub use products::{
    cal_r, cal_r_prime, cal_y, check_dual_forms, check_lemma_y, check_product_lemmas, DualFormResiduals,
    ProductLemmaResiduals,
};
pub use report::{CheckParams, IdentityReport, Residual, Verdict};
pub use scalar::{
    check_eta_substitution, check_ruijsenaars_commutativity, check_scalar_kernel, kernel_sums, ruijsenaars_sums,
    ScalarSums,
};
pub use sets::{IndexSubset, SiteAssignment};
pub use theorem::{
    build_f1, build_f2, check_f2_forms, check_spin_commutativity, check_theorem, eval_f1_on, eval_f2_on, expansion,
    f1_terms, f2_terms, spin_commutativity_sums, spin_commutativity_terms, EvaluatedSum, F2Form,
};

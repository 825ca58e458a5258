//! Contraction of the retraction map on U_R and the quality of its limit.

use serde::{Deserialize, Serialize};

use crate::bloch::BlochOperator;
use crate::constants::Constants;
use crate::error::Result;
use crate::model::Model;
use crate::retraction::{gamma_plus_defect, membership, theta_dense, Membership, RetractionOptions, RetractionTrace};
use crate::states::Norms;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionReport {
    pub trace: RetractionTrace,
    pub l: f64,
    pub max_ratio: f64,
    /// Every ratio after the first is below 1.
    pub contracting: bool,
    /// max ratio <= L (1 + 1e-3).
    pub within_l: bool,
    /// ||theta(theta gamma) - theta gamma||_{X_c cap Y_c}.
    pub idempotence: f64,
    /// ||P- theta P-||_X.
    pub gamma_plus_defect: f64,
    pub tol: f64,
    pub start_membership: Membership,
}

pub fn contraction_check(start: &BlochOperator, model: &Model, consts: &Constants) -> Result<ContractionReport> {
    let opts = RetractionOptions::from_model(model);
    let start_membership = membership(start, model, consts)?;
    let (limit, trace) = theta_dense(start, model, Some(consts), opts)?;
    let (again, _) = theta_dense(&limit, model, None, opts)?;
    let idempotence = Norms::new(model).xc_cap_yc(&again.sub(&limit));
    let defect = gamma_plus_defect(&limit, model)?;
    let max_ratio = trace.max_ratio_after_first();
    let l = consts.derived.l;
    Ok(ContractionReport {
        contracting: trace.steps.iter().skip(1).all(|s| !(s.ratio >= 1.0)),
        within_l: max_ratio <= l * (1.0 + 1.0e-3),
        max_ratio,
        l,
        idempotence,
        gamma_plus_defect: defect,
        tol: opts.tol,
        start_membership,
        trace,
    })
}

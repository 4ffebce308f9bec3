//! The two signalling protocols, their Monte Carlo drivers and the commutation
//! audit.
//!
//! Both protocols act on a single particle with an ordered pair of
//! measurements: the sender's first, the receiver's second. Every reported
//! probability has an exact counterpart computed over the measurement outcome
//! tree; the Monte Carlo counts are attached as confirmation only.

mod audit;
mod protocol1;
mod protocol2;
pub mod random;
pub mod two_level;

pub use audit::{
    commutation_audit, paper_audit, random_audits, receiver_marginal, AuditCase, PairFamily,
    CommutationAudit, PaperAudit,
};
pub use protocol1::{ensemble_success, run_protocol1, run_protocol1_with, Protocol1Params, Protocol1Report};
pub use protocol2::{
    lambda_scan, run_protocol2, run_protocol2_with, LambdaScanRow, Protocol2Params, Protocol2Report,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Width of every reported confidence band, in binomial standard deviations.
pub const CONFIDENCE_SIGMAS: f64 = 4.0;

/// Half-width of the 4σ band around a binomial rate `p` estimated from `n` trials.
pub fn binomial_halfwidth(p: f64, n: u64) -> f64 {
    CONFIDENCE_SIGMAS * (p * (1.0 - p) / n as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_index: u64,
    /// Protocol 1: whether the sender's |+⟩⟨+| fired (`None` when idle).
    pub intermediate_outcome: Option<bool>,
    /// Protocol 2: sampled momentum (`None` when idle).
    pub lambda: Option<f64>,
    pub receiver_detected: bool,
    /// Exact receiver probability for this trial's pre-detection state.
    pub receiver_probability: f64,
}

/// Result of either protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "protocol", rename_all = "lowercase")]
pub enum ProtocolReport {
    #[serde(rename = "protocol1")]
    One(Protocol1Report),
    #[serde(rename = "protocol2")]
    Two(Protocol2Report),
}

impl From<Protocol1Report> for ProtocolReport {
    fn from(r: Protocol1Report) -> Self {
        ProtocolReport::One(r)
    }
}

impl From<Protocol2Report> for ProtocolReport {
    fn from(r: Protocol2Report) -> Self {
        ProtocolReport::Two(r)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignallingReport {
    pub p_receiver_sender_acts: f64,
    pub p_receiver_sender_idle: f64,
    /// Exact difference of the two receiver marginals.
    pub gap: f64,
    pub empirical_gap: f64,
    /// 4σ band on `empirical_gap`.
    pub gap_confidence_halfwidth: f64,
    /// ‖[sender, receiver]‖_F; `None` for protocol 2, whose operators have no
    /// finite matrix form.
    pub commutator_frobenius_norm: Option<f64>,
}

/// Compares a sender-acts run against a sender-idle run of the same protocol.
pub fn signalling_gap(acts: &ProtocolReport, idle: &ProtocolReport) -> Result<SignallingReport> {
    let (pa, pi, ea, ei, na, ni, norm) = match (acts, idle) {
        (ProtocolReport::One(a), ProtocolReport::One(i)) => {
            if !a.params.same_setup(&i.params) {
                return Err(Error::MismatchedReports(
                    "protocol 1 runs differ in more than the sender action".into(),
                ));
            }
            (
                a.analytic_p_receiver,
                i.analytic_p_receiver,
                a.empirical_p_receiver,
                i.empirical_p_receiver,
                a.params.n_trials,
                i.params.n_trials,
                Some(two_level::paper_commutator()?.frobenius_norm()),
            )
        }
        (ProtocolReport::Two(a), ProtocolReport::Two(i)) => {
            if !a.params.same_setup(&i.params) {
                return Err(Error::MismatchedReports(
                    "protocol 2 runs differ in more than the sender action".into(),
                ));
            }
            (
                a.analytic_p_receiver,
                i.analytic_p_receiver,
                a.empirical_p_receiver,
                i.empirical_p_receiver,
                a.params.n_trials,
                i.params.n_trials,
                None,
            )
        }
        _ => return Err(Error::MismatchedReports("reports come from different protocols".into())),
    };
    let spread = pa * (1.0 - pa) / na as f64 + pi * (1.0 - pi) / ni as f64;
    Ok(SignallingReport {
        p_receiver_sender_acts: pa,
        p_receiver_sender_idle: pi,
        gap: pa - pi,
        empirical_gap: ea - ei,
        gap_confidence_halfwidth: CONFIDENCE_SIGMAS * spread.sqrt(),
        commutator_frobenius_norm: norm,
    })
}

use serde::{Deserialize, Serialize};

use super::random::{random_commuting_pair, random_generic_pair, random_state};
use super::two_level;
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::hilbert::{clamp_probability, commutator, Operator, StateVector};
use crate::rng::trial_stream;

/// Exact probability that `receiver` fires on `initial`, with or without a
/// prior (unread) `sender` measurement.
///
/// With a sender this sums over its two outcome branches Π ∈ {A, I − A}:
/// Σ ⟨Πψ|B|Πψ⟩, which equals Σ P(Π)·⟨ψ_Π|B|ψ_Π⟩ without dividing by branch norms.
pub fn receiver_marginal(initial: &StateVector, sender: Option<&Operator>, receiver: &Operator) -> Result<f64> {
    let psi = initial.amplitudes();
    let sandwich = |v: &[num_complex::Complex64]| -> f64 {
        let bv = receiver.apply(v);
        v.iter().zip(&bv).map(|(a, b)| (a.conj() * b).re).sum()
    };
    check_dims(initial.dim(), receiver)?;
    receiver.ensure_projector()?;
    let raw = match sender {
        None => sandwich(psi),
        Some(a) => {
            check_dims(initial.dim(), a)?;
            a.ensure_projector()?;
            let fired = a.apply(psi);
            let idle = a.complement().apply(psi);
            sandwich(&fired) + sandwich(&idle)
        }
    };
    clamp_probability(raw)
}

fn check_dims(dim: usize, op: &Operator) -> Result<()> {
    if op.dim() == dim {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected: dim, found: op.dim() })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutationAudit {
    pub commutator_norm: f64,
    /// ‖[A, B]‖_F < tol.
    pub premise_holds: bool,
    pub p_receiver_sender_measures: f64,
    pub p_receiver_sender_idle: f64,
    /// |P(B | A measured first) − P(B | A not measured)|.
    pub marginal_difference: f64,
}

pub fn commutation_audit(a: &Operator, b: &Operator, tol: f64, initial: &StateVector) -> Result<CommutationAudit> {
    a.ensure_projector()?;
    b.ensure_projector()?;
    let commutator_norm = commutator(a, b)?.frobenius_norm();
    let measured = receiver_marginal(initial, Some(a), b)?;
    let idle = receiver_marginal(initial, None, b)?;
    Ok(CommutationAudit {
        commutator_norm,
        premise_holds: commutator_norm < tol,
        p_receiver_sender_measures: measured,
        p_receiver_sender_idle: idle,
        marginal_difference: (measured - idle).abs(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaperAudit {
    pub commutator: Operator,
    pub expected: Operator,
    /// ‖computed − ½(|A⟩⟨B| − |B⟩⟨A|)‖_F
    pub distance: f64,
    pub audit: CommutationAudit,
}

/// Audit of the pair (|+⟩⟨+|, |B⟩⟨B|) starting from |A⟩.
pub fn paper_audit(tol: f64) -> Result<PaperAudit> {
    let commutator = two_level::paper_commutator()?;
    let expected = two_level::expected_commutator();
    let distance = commutator.frobenius_distance(&expected)?;
    let audit = commutation_audit(&two_level::projector_plus(), &two_level::projector_b(), tol, &two_level::ket_a())?;
    Ok(PaperAudit { commutator, expected, distance, audit })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairFamily {
    /// Both projectors diagonal in one random basis.
    Commuting,
    /// Each pair is shared-basis or independent-basis with equal odds.
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditCase {
    pub index: u64,
    pub dim: usize,
    pub shared_basis: bool,
    pub audit: CommutationAudit,
}

/// `count` random projector pairs in dimensions 2–4, each with a random initial
/// state, drawn from per-pair streams of `seed`.
pub fn random_audits(family: PairFamily, count: u64, seed: u64, tol: f64, exec: Execution) -> Result<Vec<AuditCase>> {
    if count == 0 {
        return Err(Error::invalid("count", "need at least one pair"));
    }
    map_indexed(count, exec, |i| {
        use rand::Rng;
        let mut rng = trial_stream(seed, i);
        let dim = rng.random_range(2..=4usize);
        let shared_basis = match family {
            PairFamily::Commuting => true,
            PairFamily::Mixed => rng.random_bool(0.5),
        };
        let (a, b) = if shared_basis {
            random_commuting_pair(dim, &mut rng)?
        } else {
            random_generic_pair(dim, &mut rng)?
        };
        let initial = random_state(dim, &mut rng)?;
        Ok(AuditCase { index: i, dim, shared_basis, audit: commutation_audit(&a, &b, tol, &initial)? })
    })
    .into_iter()
    .collect()
}

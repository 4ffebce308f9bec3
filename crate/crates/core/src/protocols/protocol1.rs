use serde::{Deserialize, Serialize};

use super::{audit::receiver_marginal, binomial_halfwidth, two_level, TrialRecord};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::hilbert::{born_probability, Projector, StateVector};
use crate::rng::{trial_stream, TrialRng};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Protocol1Params {
    pub n_trials: u64,
    /// Whether the sender measures |+⟩⟨+| before the receiver looks.
    pub sender_acts: bool,
    /// Particles per trial for the ensemble estimate.
    pub n_particles: u32,
    pub seed: u64,
}

impl Default for Protocol1Params {
    fn default() -> Self {
        Protocol1Params { n_trials: 100_000, sender_acts: true, n_particles: 1, seed: 42 }
    }
}

impl Protocol1Params {
    pub fn validate(&self) -> Result<()> {
        if self.n_trials == 0 {
            return Err(Error::invalid("trials", "need at least one trial"));
        }
        if self.n_particles == 0 {
            return Err(Error::invalid("particles", "need at least one particle per trial"));
        }
        Ok(())
    }

    pub(super) fn same_setup(&self, other: &Self) -> bool {
        self.n_trials == other.n_trials && self.n_particles == other.n_particles && self.seed == other.seed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Protocol1Report {
    pub params: Protocol1Params,
    /// Exact P(receiver finds |B⟩) from the outcome tree.
    pub analytic_p_receiver: f64,
    pub empirical_p_receiver: f64,
    pub detections: u64,
    pub confidence_halfwidth: f64,
    /// 1 − 2^(−n) for the configured particle count, or 0 when the sender is idle.
    pub ensemble_success_analytic: f64,
    /// Fraction of trials in which at least one particle reached B.
    pub ensemble_success_empirical: f64,
    pub commutator_frobenius_norm: f64,
    pub trials: Vec<TrialRecord>,
}

/// P(at least one of `n_particles` independent particles ends at B) when each
/// gets there with probability ½.
pub fn ensemble_success(n_particles: u32) -> f64 {
    1.0 - 0.5f64.powi(n_particles.min(i32::MAX as u32) as i32)
}

pub fn run_protocol1(params: &Protocol1Params) -> Result<Protocol1Report> {
    run_protocol1_with(params, Execution::default())
}

pub fn run_protocol1_with(params: &Protocol1Params, exec: Execution) -> Result<Protocol1Report> {
    params.validate()?;
    let start = two_level::ket_a();
    let sender = Projector::new(two_level::projector_plus())?;
    let receiver = Projector::new(two_level::projector_b())?;

    let analytic = receiver_marginal(
        &start,
        params.sender_acts.then_some(sender.operator()),
        receiver.operator(),
    )?;

    let outcomes = map_indexed(params.n_trials, exec, |i| {
        let mut rng = trial_stream(params.seed, i);
        let first = run_particle(&start, params.sender_acts.then_some(&sender), &receiver, &mut rng)?;
        let mut any = first.receiver_detected;
        for _ in 1..params.n_particles {
            any |= run_particle(&start, params.sender_acts.then_some(&sender), &receiver, &mut rng)?
                .receiver_detected;
        }
        Ok((TrialRecord { trial_index: i, ..first }, any))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let detections = outcomes.iter().filter(|(r, _)| r.receiver_detected).count() as u64;
    let ensemble_hits = outcomes.iter().filter(|(_, any)| *any).count() as u64;
    let n = params.n_trials as f64;

    Ok(Protocol1Report {
        analytic_p_receiver: analytic,
        empirical_p_receiver: detections as f64 / n,
        detections,
        confidence_halfwidth: binomial_halfwidth(analytic, params.n_trials),
        ensemble_success_analytic: if params.sender_acts { ensemble_success(params.n_particles) } else { 0.0 },
        ensemble_success_empirical: ensemble_hits as f64 / n,
        commutator_frobenius_norm: two_level::paper_commutator()?.frobenius_norm(),
        trials: outcomes.into_iter().map(|(r, _)| r).collect(),
        params: params.clone(),
    })
}

fn run_particle(
    start: &StateVector,
    sender: Option<&Projector>,
    receiver: &Projector,
    rng: &mut TrialRng,
) -> Result<TrialRecord> {
    let mut state = start.clone();
    let mut intermediate = None;
    if let Some(op) = sender {
        let m = op.measure(&state, rng)?;
        intermediate = Some(m.fired);
        state = m.post_state;
    }
    let receiver_probability = born_probability(receiver.operator(), &state)?;
    let detected = receiver.measure(&state, rng)?.fired;
    Ok(TrialRecord {
        trial_index: 0,
        intermediate_outcome: intermediate,
        lambda: None,
        receiver_detected: detected,
        receiver_probability,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(sender_acts: bool, n_trials: u64, seed: u64) -> Protocol1Params {
        Protocol1Params { n_trials, sender_acts, n_particles: 1, seed }
    }

    #[test]
    fn analytic_probability() {
        let r = run_protocol1(&params(true, 10, 1)).unwrap();
        assert!((r.analytic_p_receiver - 0.5).abs() < 1e-15);
        let r = run_protocol1(&params(false, 10, 1)).unwrap();
        assert_eq!(r.analytic_p_receiver, 0.0);
    }

    #[test]
    fn idle_sender_never_delivers() {
        let r = run_protocol1(&params(false, 50_000, 3)).unwrap();
        assert_eq!(r.detections, 0);
        assert!(r.trials.iter().all(|t| t.intermediate_outcome.is_none() && t.receiver_probability == 0.0));
    }

    #[test]
    fn empirical_rate_within_band() {
        let r = run_protocol1(&params(true, 100_000, 42)).unwrap();
        assert!((0.494..=0.506).contains(&r.empirical_p_receiver), "{}", r.empirical_p_receiver);
        assert!((r.empirical_p_receiver - 0.5).abs() <= r.confidence_halfwidth);
    }

    #[test]
    fn every_branch_leaves_receiver_at_one_half() {
        let r = run_protocol1(&params(true, 2_000, 5)).unwrap();
        assert!(r.trials.iter().all(|t| (t.receiver_probability - 0.5).abs() < 1e-12));
        let fired = r.trials.iter().filter(|t| t.intermediate_outcome == Some(true)).count();
        assert!(fired > 800 && fired < 1200);
    }

    #[test]
    fn validation() {
        assert!(run_protocol1(&params(true, 0, 1)).is_err());
        let mut p = params(true, 1, 1);
        p.n_particles = 0;
        assert!(run_protocol1(&p).is_err());
    }

    #[test]
    fn ensemble_closed_form() {
        assert_eq!(ensemble_success(1), 0.5);
        assert_eq!(ensemble_success(10), 0.9990234375);
        assert!((1.0 - ensemble_success(60)).abs() < 1e-15);
    }

    #[test]
    fn ensemble_empirical() {
        let r = run_protocol1(&Protocol1Params { n_trials: 20_000, sender_acts: true, n_particles: 3, seed: 8 }).unwrap();
        assert_eq!(r.ensemble_success_analytic, 0.875);
        let band = binomial_halfwidth(0.875, 20_000);
        assert!((r.ensemble_success_empirical - 0.875).abs() <= band);
    }

    #[test]
    fn deterministic_for_seed() {
        let a = run_protocol1(&params(true, 5_000, 77)).unwrap();
        let b = run_protocol1(&params(true, 5_000, 77)).unwrap();
        assert_eq!(a, b);
        let c = run_protocol1(&params(true, 5_000, 78)).unwrap();
        assert_ne!(a.trials, c.trials);
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn schedule_independent() {
        let p = params(true, 5_000, 13);
        assert_eq!(
            run_protocol1_with(&p, Execution::Sequential).unwrap(),
            run_protocol1_with(&p, Execution::Parallel).unwrap()
        );
    }
}

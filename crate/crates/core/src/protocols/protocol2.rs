use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{binomial_halfwidth, TrialRecord};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::rng::trial_stream;
use crate::wavepacket::{DetectionWindow, GaussianPacket};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Protocol2Params {
    /// Width of the sender's initial packet.
    pub sigma: f64,
    /// Position width after the momentum measurement.
    pub sigma_bar: f64,
    /// Receiver distance.
    pub d: f64,
    /// Receiver half-width.
    pub k: f64,
    pub n_trials: u64,
    pub seed: u64,
    /// Whether the sender performs the momentum measurement.
    pub sender_acts: bool,
}

impl Default for Protocol2Params {
    fn default() -> Self {
        Protocol2Params {
            sigma: 1.0,
            sigma_bar: 100.0,
            d: 100.0,
            k: 1.0,
            n_trials: 100_000,
            seed: 7,
            sender_acts: true,
        }
    }
}

impl Protocol2Params {
    pub fn validate(&self) -> Result<()> {
        self.initial_packet()?;
        self.window()?;
        if !(self.sigma_bar > 0.0) || !self.sigma_bar.is_finite() {
            return Err(Error::NonPositiveWidth { width: self.sigma_bar });
        }
        if self.sigma_bar <= self.sigma {
            return Err(Error::WidthNotIncreased { sigma: self.sigma, sigma_bar: self.sigma_bar });
        }
        if self.n_trials == 0 {
            return Err(Error::invalid("trials", "need at least one trial"));
        }
        Ok(())
    }

    pub fn initial_packet(&self) -> Result<GaussianPacket> {
        GaussianPacket::position(self.sigma, 0.0)
    }

    pub fn window(&self) -> Result<DetectionWindow> {
        DetectionWindow::new(self.d, self.k)
    }

    /// P(detect) for the untouched packet.
    pub fn p_before(&self) -> Result<f64> {
        self.initial_packet()?.detection_probability(&self.window()?)
    }

    /// P(detect) after a momentum measurement returning `lambda`.
    pub fn p_after(&self, lambda: f64) -> Result<f64> {
        self.initial_packet()?
            .momentum_collapse(lambda, self.sigma_bar)?
            .detection_probability(&self.window()?)
    }

    pub(super) fn same_setup(&self, other: &Self) -> bool {
        Self { sender_acts: other.sender_acts, ..self.clone() } == *other
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Protocol2Report {
    pub params: Protocol2Params,
    pub p_before: f64,
    /// P(detect) after collapse with λ = 0; every λ gives the same value.
    pub p_after: f64,
    /// `p_after` when the sender acts, `p_before` otherwise.
    pub analytic_p_receiver: f64,
    pub empirical_p_receiver: f64,
    pub detections: u64,
    pub confidence_halfwidth: f64,
    /// max over trials of |P_after(λ) − P_after(0)|.
    pub max_lambda_deviation: f64,
    pub trials: Vec<TrialRecord>,
}

pub fn run_protocol2(params: &Protocol2Params) -> Result<Protocol2Report> {
    run_protocol2_with(params, Execution::default())
}

pub fn run_protocol2_with(params: &Protocol2Params, exec: Execution) -> Result<Protocol2Report> {
    params.validate()?;
    let packet = params.initial_packet()?;
    let window = params.window()?;
    let p_before = packet.detection_probability(&window)?;
    let p_after = params.p_after(0.0)?;

    let trials = map_indexed(params.n_trials, exec, |i| {
        let mut rng = trial_stream(params.seed, i);
        let (lambda, p) = if params.sender_acts {
            let lambda = packet.sample_momentum(&mut rng);
            let collapsed = packet.momentum_collapse(lambda, params.sigma_bar)?;
            (Some(lambda), collapsed.detection_probability(&window)?)
        } else {
            (None, p_before)
        };
        let u: f64 = rng.random();
        Ok(TrialRecord {
            trial_index: i,
            intermediate_outcome: None,
            lambda,
            receiver_detected: u < p,
            receiver_probability: p,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let detections = trials.iter().filter(|t| t.receiver_detected).count() as u64;
    let analytic = if params.sender_acts { p_after } else { p_before };
    let max_lambda_deviation = trials
        .iter()
        .map(|t| (t.receiver_probability - analytic).abs())
        .fold(0.0, f64::max);

    Ok(Protocol2Report {
        params: params.clone(),
        p_before,
        p_after,
        analytic_p_receiver: analytic,
        empirical_p_receiver: detections as f64 / params.n_trials as f64,
        detections,
        confidence_halfwidth: binomial_halfwidth(analytic, params.n_trials),
        max_lambda_deviation,
        trials,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaScanRow {
    pub lambda: f64,
    pub p_after: f64,
    pub deviation: f64,
}

/// P_after at λ ∈ {−3, −1, 0, 1, 3}·(1/(σ√2)), with deviations from λ = 0.
pub fn lambda_scan(params: &Protocol2Params) -> Result<Vec<LambdaScanRow>> {
    params.validate()?;
    let unit = (params.sigma * std::f64::consts::SQRT_2).recip();
    let reference = params.p_after(0.0)?;
    [-3.0, -1.0, 0.0, 1.0, 3.0]
        .into_iter()
        .map(|m| {
            let lambda = m * unit;
            let p = params.p_after(lambda)?;
            Ok(LambdaScanRow { lambda, p_after: p, deviation: (p - reference).abs() })
        })
        .collect()
}

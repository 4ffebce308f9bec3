use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{DetectionWindow, GaussianPacket, Representation, MIN_EXTENT_WIDTHS};
use crate::error::{Error, Result};

pub const DEFAULT_GRID_POINTS: usize = 4096;
const MIN_GRID_POINTS: usize = 16;

/// Wavefunction sampled on `samples.len()` evenly spaced points spanning
/// `[x_min, x_max]` inclusive. The coordinate is x or p according to
/// `representation`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridWavefunction {
    samples: Vec<Complex64>,
    x_min: f64,
    x_max: f64,
    spacing: f64,
    representation: Representation,
}

impl GridWavefunction {
    pub(super) fn sample(packet: &GaussianPacket, x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        check_extent(x_min, x_max, n)?;
        let required = MIN_EXTENT_WIDTHS * packet.width();
        let slack = 1e-12 * required;
        let peak = packet.peak();
        if peak - x_min < required - slack || x_max - peak < required - slack {
            return Err(Error::ExtentTooSmall { x_min, x_max, required: MIN_EXTENT_WIDTHS });
        }
        let spacing = (x_max - x_min) / (n - 1) as f64;
        let samples = (0..n)
            .map(|j| packet.amplitude(x_min + j as f64 * spacing))
            .collect();
        let mut grid = GridWavefunction {
            samples,
            x_min,
            x_max,
            spacing,
            representation: packet.representation(),
        };
        grid.normalize()?;
        Ok(grid)
    }

    /// Wraps raw samples and renormalizes them.
    pub fn from_samples(
        samples: Vec<Complex64>,
        x_min: f64,
        x_max: f64,
        representation: Representation,
    ) -> Result<Self> {
        check_extent(x_min, x_max, samples.len())?;
        let spacing = (x_max - x_min) / (samples.len() - 1) as f64;
        let mut grid = GridWavefunction { samples, x_min, x_max, spacing, representation };
        grid.normalize()?;
        Ok(grid)
    }

    fn normalize(&mut self) -> Result<()> {
        let norm = self.discrete_norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::ZeroVector { norm });
        }
        let scale = norm.sqrt().recip();
        self.samples.iter_mut().for_each(|s| *s *= scale);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn coordinate(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.spacing
    }

    pub fn coordinates(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|j| self.coordinate(j))
    }

    /// Trapezoid-rule ∫|ψ|².
    pub fn discrete_norm(&self) -> f64 {
        let n = self.samples.len();
        let interior: f64 = self.samples[1..n - 1].iter().map(Complex64::norm_sqr).sum();
        let ends = 0.5 * (self.samples[0].norm_sqr() + self.samples[n - 1].norm_sqr());
        (interior + ends) * self.spacing
    }

    /// Rectangle-rule Σ|ψⱼ|²·Δ, the quantity the discrete transform preserves exactly.
    pub fn riemann_norm(&self) -> f64 {
        self.samples.iter().map(Complex64::norm_sqr).sum::<f64>() * self.spacing
    }

    /// Band-limited (Whittaker–Shannon) reconstruction of ψ at `x`.
    pub fn interpolate(&self, x: f64) -> Complex64 {
        let t = (x - self.x_min) / self.spacing;
        let nearest = t.round();
        if (t - nearest).abs() < 1e-12 && nearest >= 0.0 && (nearest as usize) < self.len() {
            return self.samples[nearest as usize];
        }
        // sin(π(t - j)) = ±sin(πt) alternates with j.
        let s = (PI * t).sin();
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, psi) in self.samples.iter().enumerate() {
            let u = t - j as f64;
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            acc += psi * (sign * s / (PI * u));
        }
        acc
    }

    pub fn density_at(&self, x: f64) -> f64 {
        self.interpolate(x).norm_sqr()
    }

    /// L² distance to a reference wavefunction on this grid (trapezoid rule).
    pub fn l2_distance<F: Fn(f64) -> Complex64>(&self, reference: F) -> f64 {
        let n = self.len();
        let sq: f64 = self
            .samples
            .iter()
            .enumerate()
            .map(|(j, psi)| {
                let w = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
                w * (psi - reference(self.coordinate(j))).norm_sqr()
            })
            .sum();
        (sq * self.spacing).sqrt()
    }

    /// Unitary transform to the conjugate variable.
    ///
    /// Uses ψ̂(pₘ) ≈ Δ/√(2π) · e^(-i pₘ x_min) · Σⱼ ψⱼ e^(-2πi jm/n) on the
    /// centered frequency grid pₘ = m·2π/(nΔ), m = -n/2 .. n/2 - 1.
    pub fn fourier(&self) -> Result<GridWavefunction> {
        let n = self.len();
        if !n.is_power_of_two() {
            return Err(Error::BadGrid(format!("transform needs a power-of-two length, got {n}")));
        }
        let mut buffer = self.samples.clone();
        FftPlanner::new().plan_fft_forward(n).process(&mut buffer);

        let dp = 2.0 * PI / (n as f64 * self.spacing);
        let half = n / 2;
        let scale = self.spacing / (2.0 * PI).sqrt();
        let samples = (0..n)
            .map(|i| {
                // output index i holds frequency m = i - n/2
                let m = i as f64 - half as f64;
                let p = m * dp;
                let bin = (i + half) % n;
                buffer[bin] * Complex64::from_polar(scale, -p * self.x_min)
            })
            .collect();
        Ok(GridWavefunction {
            samples,
            x_min: -(half as f64) * dp,
            x_max: (half as f64 - 1.0) * dp,
            spacing: dp,
            representation: self.representation.dual(),
        })
    }

    /// ∫|ψ|² over the window clipped to the grid, by composite trapezoid on the
    /// grid nodes plus interpolated end points.
    pub fn window_probability(&self, window: &DetectionWindow) -> Result<f64> {
        let lo = window.lo().max(self.x_min);
        let hi = window.hi().min(self.x_max);
        if lo > hi {
            return Err(Error::WindowOutsideGrid {
                lo: window.lo(),
                hi: window.hi(),
                x_min: self.x_min,
                x_max: self.x_max,
            });
        }
        let first = ((lo - self.x_min) / self.spacing).ceil() as usize;
        let last = (((hi - self.x_min) / self.spacing).floor() as usize).min(self.len() - 1);

        let mut points = Vec::with_capacity(last.saturating_sub(first) + 3);
        points.push((lo, self.density_at(lo)));
        for j in first..=last {
            let x = self.coordinate(j);
            if x > lo && x < hi {
                points.push((x, self.samples[j].norm_sqr()));
            }
        }
        points.push((hi, self.density_at(hi)));

        Ok(points
            .windows(2)
            .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
            .sum())
    }
}

fn check_extent(x_min: f64, x_max: f64, n: usize) -> Result<()> {
    if !x_min.is_finite() || !x_max.is_finite() || !(x_max > x_min) {
        return Err(Error::BadGrid(format!("need finite x_min < x_max, got [{x_min}, {x_max}]")));
    }
    if n < MIN_GRID_POINTS {
        return Err(Error::BadGrid(format!("need at least {MIN_GRID_POINTS} points, got {n}")));
    }
    Ok(())
}

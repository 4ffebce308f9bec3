//! Gaussian wavepackets on a line (ħ = 1).
//!
//! Fourier convention: ψ̂(p) = (2π)^(-1/2) ∫ ψ(x) e^(-ipx) dx. A position packet
//! of width σ centered at x₀ with mean momentum λ is
//!
//! ```text
//! ψ(x) = (πσ²)^(-1/4) exp(-(x - x₀)² / 2σ²) exp(iλx)
//! ```
//!
//! and its transform is a momentum packet of width 1/σ centered at λ.

mod grid;

pub use grid::{GridWavefunction, DEFAULT_GRID_POINTS};

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Grids must reach this many packet widths past the center on both sides.
pub const MIN_EXTENT_WIDTHS: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Position,
    Momentum,
}

impl Representation {
    pub fn name(self) -> &'static str {
        match self {
            Representation::Position => "position",
            Representation::Momentum => "momentum",
        }
    }

    pub fn dual(self) -> Self {
        match self {
            Representation::Position => Representation::Momentum,
            Representation::Momentum => Representation::Position,
        }
    }
}

/// Normalized Gaussian packet.
///
/// `width` is measured in the packet's own representation variable: σ for a
/// position packet, 1/σ for the momentum packet of the same state. `center`
/// (position x₀) and `momentum_center` (λ) describe the state and are kept in
/// both representations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPacket {
    width: f64,
    center: f64,
    momentum_center: f64,
    representation: Representation,
}

impl GaussianPacket {
    /// Position-space packet centered at the origin.
    pub fn position(sigma: f64, lambda: f64) -> Result<Self> {
        Self::new(sigma, 0.0, lambda, Representation::Position)
    }

    pub fn new(width: f64, center: f64, momentum_center: f64, representation: Representation) -> Result<Self> {
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::NonPositiveWidth { width });
        }
        if !center.is_finite() {
            return Err(Error::invalid("center", "must be finite"));
        }
        if !momentum_center.is_finite() {
            return Err(Error::invalid("momentum_center", "must be finite"));
        }
        Ok(GaussianPacket { width, center, momentum_center, representation })
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn momentum_center(&self) -> f64 {
        self.momentum_center
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    /// σ, the position-space width of the state.
    pub fn position_width(&self) -> f64 {
        match self.representation {
            Representation::Position => self.width,
            Representation::Momentum => self.width.recip(),
        }
    }

    /// Where the density peaks, in the packet's own variable.
    pub fn peak(&self) -> f64 {
        match self.representation {
            Representation::Position => self.center,
            Representation::Momentum => self.momentum_center,
        }
    }

    /// Wavefunction value at `v` (x or p depending on the representation).
    pub fn amplitude(&self, v: f64) -> Complex64 {
        let w = self.width;
        let prefactor = (PI * w * w).powf(-0.25);
        match self.representation {
            Representation::Position => {
                let u = v - self.center;
                let envelope = prefactor * (-u * u / (2.0 * w * w)).exp();
                Complex64::from_polar(envelope, self.momentum_center * v)
            }
            Representation::Momentum => {
                let q = v - self.momentum_center;
                let envelope = prefactor * (-q * q / (2.0 * w * w)).exp();
                Complex64::from_polar(envelope, -q * self.center)
            }
        }
    }

    /// |ψ|² at `v`: (πw²)^(-1/2) exp(-(v - peak)² / w²).
    pub fn density(&self, v: f64) -> f64 {
        let w = self.width;
        let u = v - self.peak();
        (-u * u / (w * w)).exp() / (PI.sqrt() * w)
    }

    /// Closed-form unitary Fourier transform.
    ///
    /// Position to momentum is the representation change. Transforming a
    /// momentum packet applies the same kernel again, which yields the
    /// parity-reflected position packet ψ(-x); for the centered, zero-momentum
    /// packets used by the protocols this is the original packet.
    pub fn fourier(&self) -> GaussianPacket {
        match self.representation {
            Representation::Position => GaussianPacket {
                width: self.width.recip(),
                representation: Representation::Momentum,
                ..*self
            },
            Representation::Momentum => GaussianPacket {
                width: self.width.recip(),
                center: -self.center,
                momentum_center: -self.momentum_center,
                representation: Representation::Position,
            },
        }
    }

    /// Var(x) = σ²/2.
    pub fn variance_position(&self) -> f64 {
        let s = self.position_width();
        0.5 * s * s
    }

    /// Var(p) = 1/(2σ²).
    pub fn variance_momentum(&self) -> f64 {
        let s = self.position_width();
        0.5 / (s * s)
    }

    /// 2·Δx·Δp, equal to ħ = 1 for every Gaussian.
    pub fn uncertainty_product(&self) -> f64 {
        2.0 * self.variance_position().sqrt() * self.variance_momentum().sqrt()
    }

    /// Probability of finding the particle in `window`.
    pub fn detection_probability(&self, window: &DetectionWindow) -> Result<f64> {
        self.require(Representation::Position)?;
        let lo = (window.lo() - self.center) / self.width;
        let hi = (window.hi() - self.center) / self.width;
        Ok(gaussian_mass(lo, hi))
    }

    /// Outcome of an ideal momentum measurement, distributed as |ψ̂(p)|²:
    /// normal with mean λ and standard deviation 1/(σ√2).
    pub fn sample_momentum<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let std_dev = (self.variance_momentum()).sqrt();
        Normal::new(self.momentum_center, std_dev)
            .expect("momentum spread is finite and positive")
            .sample(rng)
    }

    /// State after a momentum measurement of resolution 1/`sigma_bar` that
    /// returned `lambda`: a position packet of width `sigma_bar` carrying mean
    /// momentum `lambda`.
    pub fn momentum_collapse(&self, lambda: f64, sigma_bar: f64) -> Result<GaussianPacket> {
        if !(sigma_bar > 0.0) || !sigma_bar.is_finite() {
            return Err(Error::NonPositiveWidth { width: sigma_bar });
        }
        let sigma = self.position_width();
        if sigma_bar <= sigma {
            return Err(Error::WidthNotIncreased { sigma, sigma_bar });
        }
        GaussianPacket::new(sigma_bar, self.center, lambda, Representation::Position)
    }

    /// Samples the packet on `n` evenly spaced points of `[x_min, x_max]`.
    pub fn to_grid(&self, x_min: f64, x_max: f64, n: usize) -> Result<GridWavefunction> {
        GridWavefunction::sample(self, x_min, x_max, n)
    }

    /// Grid spanning ±8 widths around the peak with 4096 points.
    pub fn to_default_grid(&self) -> Result<GridWavefunction> {
        let half = MIN_EXTENT_WIDTHS * self.width;
        self.to_grid(self.peak() - half, self.peak() + half, DEFAULT_GRID_POINTS)
    }

    fn require(&self, representation: Representation) -> Result<()> {
        if self.representation == representation {
            Ok(())
        } else {
            Err(Error::WrongRepresentation { expected: representation.name() })
        }
    }
}

/// Receiver detector covering `[d - k, d + k]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionWindow {
    d: f64,
    k: f64,
}

impl DetectionWindow {
    pub fn new(d: f64, k: f64) -> Result<Self> {
        if !d.is_finite() {
            return Err(Error::invalid("d", "must be finite"));
        }
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::invalid("k", format!("half-width must be positive, got {k}")));
        }
        Ok(DetectionWindow { d, k })
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn lo(&self) -> f64 {
        self.d - self.k
    }

    pub fn hi(&self) -> f64 {
        self.d + self.k
    }
}

/// ∫ₐᵇ π^(-1/2) e^(-u²) du = ½[erf(b) − erf(a)], evaluated through erfc on
/// whichever side keeps the far tail free of cancellation.
pub fn gaussian_mass(a: f64, b: f64) -> f64 {
    debug_assert!(a <= b);
    let mass = if a >= 0.0 {
        0.5 * (libm::erfc(a) - libm::erfc(b))
    } else if b <= 0.0 {
        0.5 * (libm::erfc(-b) - libm::erfc(-a))
    } else {
        0.5 * (libm::erf(b) - libm::erf(a))
    };
    mass.clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    const INV_SQRT_PI: f64 = 0.564_189_583_547_756_3;

    /// Adaptive Simpson on the closed-form density, independent of erf.
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
        #[allow(clippy::too_many_arguments)]
        fn step<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let (flm, frm) = (f(lm), f(rm));
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                left + right + (left + right - whole) / 15.0
            } else {
                step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                    + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
            }
        }
        // fixed panels first so a flat start cannot end the recursion early
        const PANELS: usize = 64;
        let h = (b - a) / PANELS as f64;
        (0..PANELS)
            .map(|i| {
                let (lo, hi) = (a + i as f64 * h, a + (i + 1) as f64 * h);
                let m = 0.5 * (lo + hi);
                let (fa, fm, fb) = (f(lo), f(m), f(hi));
                let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
                step(f, lo, hi, fa, fm, fb, whole, tol / PANELS as f64, 50)
            })
            .sum()
    }

    #[test]
    fn position_density_closed_form() {
        let p = GaussianPacket::position(1.0, 0.0).unwrap();
        assert!((p.density(0.0) - INV_SQRT_PI).abs() < 1e-15);
        assert!((p.amplitude(0.0).norm_sqr() - INV_SQRT_PI).abs() < 1e-15);
        let total = simpson(&|x| p.density(x), -12.0, 12.0, 1e-14);
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn momentum_center_does_not_change_position_density() {
        let a = GaussianPacket::position(100.0, 0.0).unwrap();
        let b = GaussianPacket::position(100.0, 3.0).unwrap();
        for x in [-300.0, -17.5, 0.0, 42.0, 250.0] {
            assert_eq!(a.density(x), b.density(x));
            assert!((a.amplitude(x).norm_sqr() - b.amplitude(x).norm_sqr()).abs() < 1e-18);
        }
    }

    #[test]
    fn non_positive_width_rejected() {
        assert!(matches!(GaussianPacket::position(0.0, 0.0), Err(Error::NonPositiveWidth { .. })));
        assert!(matches!(GaussianPacket::position(-1.0, 0.0), Err(Error::NonPositiveWidth { .. })));
        assert!(GaussianPacket::position(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn fourier_of_unit_packet() {
        let m = GaussianPacket::position(1.0, 0.0).unwrap().fourier();
        assert_eq!(m.representation(), Representation::Momentum);
        assert!((m.density(0.0) - INV_SQRT_PI).abs() < 1e-15);
        // (σ²/π)^(1/4) e^(-σ²p²/2) at σ = 1
        for p in [-2.0f64, -0.3, 0.0, 1.1] {
            let expected = (1.0 / PI).powf(0.25) * (-p * p / 2.0).exp();
            assert!((m.amplitude(p) - Complex64::new(expected, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn fourier_twice_is_parity() {
        let p = GaussianPacket::position(1.7, 0.0).unwrap();
        assert_eq!(p.fourier().fourier(), p);
        let shifted = GaussianPacket::new(1.0, 2.0, 0.5, Representation::Position).unwrap();
        let back = shifted.fourier().fourier();
        assert_eq!(back.center(), -2.0);
        assert_eq!(back.momentum_center(), -0.5);
        for x in [-3.0, -1.0, 0.4, 2.0] {
            assert!((back.amplitude(x) - shifted.amplitude(-x)).norm() < 1e-15);
        }
    }

    #[test]
    fn fourier_width_inverts() {
        let m = GaussianPacket::position(2.0, 0.0).unwrap().fourier();
        assert_eq!(m.width(), 0.5);
    }

    #[test]
    fn detection_probability_examples() {
        let w = DetectionWindow::new(100.0, 1.0).unwrap();
        let narrow = GaussianPacket::position(1.0, 0.0).unwrap();
        assert!(narrow.detection_probability(&w).unwrap() < 1e-12);

        let wide = GaussianPacket::position(100.0, 0.0).unwrap();
        let p = wide.detection_probability(&w).unwrap();
        let oracle = simpson(&|x| wide.density(x), 99.0, 101.0, 1e-16);
        assert!((p - oracle).abs() < 1e-12, "{p} vs {oracle}");
        assert!((p - 0.004151).abs() < 1e-4);

        let moving = GaussianPacket::position(100.0, 7.0).unwrap();
        assert!((moving.detection_probability(&w).unwrap() - p).abs() < 1e-12);
    }

    #[test]
    fn detection_requires_position_packet() {
        let w = DetectionWindow::new(1.0, 1.0).unwrap();
        let m = GaussianPacket::position(1.0, 0.0).unwrap().fourier();
        assert!(matches!(m.detection_probability(&w), Err(Error::WrongRepresentation { .. })));
    }

    #[test]
    fn window_validation() {
        assert!(DetectionWindow::new(1.0, 0.0).is_err());
        assert!(DetectionWindow::new(f64::INFINITY, 1.0).is_err());
    }

    #[test]
    fn gaussian_mass_tails_keep_precision() {
        // Far tail: ½ erfc(5) − ½ erfc(6) is representable; erf difference is not.
        let tail = gaussian_mass(5.0, 6.0);
        let oracle = simpson(&|u: f64| (-u * u).exp() / PI.sqrt(), 5.0, 6.0, 1e-22);
        assert!((tail / oracle - 1.0).abs() < 1e-9);
        assert!((gaussian_mass(-6.0, -5.0) - tail).abs() < 1e-25);
        assert!((gaussian_mass(-1.0, 1.0) - libm::erf(1.0)).abs() < 1e-16);
    }

    #[test]
    fn momentum_sampling_statistics() {
        let p = GaussianPacket::position(1.0, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let n = 1_000_000;
        let draws: Vec<f64> = (0..n).map(|_| p.sample_momentum(&mut rng)).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() < 0.003, "mean {mean}");
        assert!((var.sqrt() - FRAC_1_SQRT_2).abs() < 0.002, "sd {}", var.sqrt());
    }

    #[test]
    fn momentum_sampling_collapses_for_wide_packets() {
        let p = GaussianPacket::position(1e6, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!((0..10_000).all(|_| p.sample_momentum(&mut rng).abs() < 1e-5));
    }

    #[test]
    fn momentum_collapse_examples() {
        let p = GaussianPacket::position(1.0, 0.0).unwrap();
        let a = p.momentum_collapse(0.0, 100.0).unwrap();
        for x in [-250.0f64, 0.0, 99.0, 101.0] {
            let expected = (-x * x / 1e4).exp() / (PI * 1e4).sqrt();
            assert!((a.density(x) - expected).abs() < 1e-18);
        }
        let b = p.momentum_collapse(5.0, 100.0).unwrap();
        for x in [-250.0f64, 0.0, 99.0, 101.0] {
            assert_eq!(a.density(x), b.density(x));
        }
        let m = b.fourier();
        assert_eq!(m.width(), 0.01);
        assert_eq!(m.momentum_center(), 5.0);
        assert!(matches!(p.momentum_collapse(0.0, 0.5), Err(Error::WidthNotIncreased { .. })));
        assert!(matches!(p.momentum_collapse(0.0, 1.0), Err(Error::WidthNotIncreased { .. })));
    }

    #[test]
    fn uncertainty_values() {
        let p = GaussianPacket::position(1.0, 0.0).unwrap();
        assert!((p.variance_position().sqrt() - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((p.variance_momentum().sqrt() - FRAC_1_SQRT_2).abs() < 1e-15);
        let wide = GaussianPacket::position(100.0, 0.0).unwrap();
        assert!((wide.variance_position().sqrt() - 100.0 * FRAC_1_SQRT_2).abs() < 1e-12);
        for s in [1e-3, 0.1, 1.0, 37.0, 1e4] {
            let g = GaussianPacket::position(s, 0.0).unwrap();
            assert!((g.uncertainty_product() - 1.0).abs() < 1e-10);
            assert!((g.fourier().uncertainty_product() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn variances_match_quadrature() {
        let p = GaussianPacket::position(1.3, 0.0).unwrap();
        let vx = simpson(&|x| x * x * p.density(x), -15.0, 15.0, 1e-14);
        assert!((vx - p.variance_position()).abs() < 1e-10);
        let m = p.fourier();
        let vp = simpson(&|q| q * q * m.density(q), -15.0, 15.0, 1e-14);
        assert!((vp - p.variance_momentum()).abs() < 1e-10);
    }
}

//! Finite-dimensional pure states, dense operators and projective measurement.
//!
//! States are always kept at unit norm. Measurements follow the Born rule and
//! replace the state by the normalized projection onto the realized branch.

use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Norm below which a vector is treated as zero.
pub const ZERO_NORM_TOL: f64 = 1e-12;
/// Tolerance for Hermiticity / idempotence checks (Frobenius norm).
pub const PROJECTOR_TOL: f64 = 1e-12;
/// Born values this far outside [0, 1] are clamped; beyond it they are errors.
pub const CLAMP_TOL: f64 = 1e-12;
/// Branches with probability below this are never sampled.
pub const NEGLIGIBLE_BRANCH: f64 = 1e-15;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
    labels: Arc<[String]>,
}

impl StateVector {
    /// Builds a normalized state. Relative phases are preserved.
    pub fn new<S: Into<String>>(
        amplitudes: Vec<Complex64>,
        labels: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if amplitudes.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: amplitudes.len(),
                found: labels.len(),
            });
        }
        if amplitudes.is_empty() {
            return Err(Error::ZeroVector { norm: 0.0 });
        }
        let norm = l2_norm(&amplitudes);
        if !(norm > ZERO_NORM_TOL) || !norm.is_finite() {
            return Err(Error::ZeroVector { norm });
        }
        Ok(Self::normalized(amplitudes, norm, labels.into()))
    }

    fn normalized(amplitudes: Vec<Complex64>, norm: f64, labels: Arc<[String]>) -> Self {
        let amplitudes = amplitudes.into_iter().map(|a| a / norm).collect();
        StateVector { amplitudes, labels }
    }

    /// Convenience constructor for real amplitudes.
    pub fn from_real<S: Into<String>>(
        amplitudes: &[f64],
        labels: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        Self::new(
            amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect(),
            labels,
        )
    }

    /// Unit vector `index` of a basis with the given labels.
    pub fn basis<S: Into<String>>(index: usize, labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if index >= labels.len() {
            return Err(Error::invalid(
                "index",
                format!("basis index {index} out of range for dimension {}", labels.len()),
            ));
        }
        let mut amplitudes = vec![ZERO; labels.len()];
        amplitudes[index] = ONE;
        Ok(StateVector { amplitudes, labels: labels.into() })
    }

    /// Basis labels `"0"`, `"1"`, ... for anonymous spaces.
    pub fn numbered_labels(dim: usize) -> Vec<String> {
        (0..dim).map(|i| i.to_string()).collect()
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.amplitudes)
    }

    /// ⟨self|other⟩, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        check_dim(self.dim(), other.dim())?;
        Ok(inner_raw(&self.amplitudes, &other.amplitudes))
    }

    /// Same basis, new (unnormalized) amplitudes.
    fn with_amplitudes(&self, amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = l2_norm(&amplitudes);
        if !(norm > ZERO_NORM_TOL) || !norm.is_finite() {
            return Err(Error::ZeroVector { norm });
        }
        Ok(Self::normalized(amplitudes, norm, Arc::clone(&self.labels)))
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (a, l) in self.amplitudes.iter().zip(self.labels.iter()) {
            if a.norm() == 0.0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:.6}{:+.6}i)|{l}⟩", a.re, a.im)?;
        }
        Ok(())
    }
}

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Operator {
    dim: usize,
    entries: Vec<Complex64>,
}

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        Operator { dim, entries: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zeros(dim);
        for i in 0..dim {
            op.entries[i * dim + i] = ONE;
        }
        op
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::invalid("rows", "operator dimension must be positive"));
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: row.len() });
            }
            entries.extend(row);
        }
        Ok(Operator { dim, entries })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    /// Outer product |s⟩⟨s|.
    pub fn projector_onto(s: &StateVector) -> Self {
        Self::outer(s.amplitudes(), s.amplitudes())
    }

    /// Outer product |u⟩⟨v|.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        debug_assert_eq!(u.len(), v.len());
        let dim = u.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for ui in u {
            for vj in v {
                entries.push(ui * vj.conj());
            }
        }
        Operator { dim, entries }
    }

    /// Projector onto the span of an orthonormal set.
    pub fn projector_onto_span(vectors: &[&StateVector], dim: usize) -> Result<Self> {
        let mut op = Self::zeros(dim);
        for v in vectors {
            check_dim(dim, v.dim())?;
            op = &op + &Self::projector_onto(v);
        }
        Ok(op)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        self.entries.chunks(self.dim).map(<[_]>::to_vec).collect()
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut entries = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.entries[i * n + j].conj();
            }
        }
        Operator { dim: n, entries }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Operator {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e * factor).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        l2_norm(&self.entries)
    }

    pub fn frobenius_distance(&self, other: &Operator) -> Result<f64> {
        check_dim(self.dim, other.dim)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    pub fn try_mul(&self, other: &Operator) -> Result<Operator> {
        check_dim(self.dim, other.dim)?;
        Ok(self * other)
    }

    /// Matrix-vector product on raw amplitudes.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.entries
            .chunks(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.entries[i * n + j] - self.entries[j * n + i].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn idempotence_defect(&self) -> f64 {
        (&(self * self) - self).frobenius_norm()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() < PROJECTOR_TOL
    }

    pub fn is_projector(&self) -> bool {
        self.is_hermitian() && self.idempotence_defect() < PROJECTOR_TOL
    }

    pub(crate) fn ensure_projector(&self) -> Result<()> {
        let hermiticity = self.hermiticity_defect();
        let idempotence = self.idempotence_defect();
        if hermiticity < PROJECTOR_TOL && idempotence < PROJECTOR_TOL {
            Ok(())
        } else {
            Err(Error::NotProjector { idempotence, hermiticity })
        }
    }

    /// I − self.
    pub fn complement(&self) -> Self {
        &Self::identity(self.dim) - self
    }

    /// ⟨s|self|s⟩ for a Hermitian operator. Does not clamp; see [`born_probability`].
    pub fn expectation(&self, s: &StateVector) -> Result<f64> {
        check_dim(self.dim, s.dim())?;
        let deviation = self.hermiticity_defect();
        if deviation >= PROJECTOR_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(inner_raw(s.amplitudes(), &self.apply(s.amplitudes())).re)
    }
}

impl Mul for &Operator {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        let n = self.dim;
        let mut entries = vec![ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    entries[i * n + j] += a * rhs.entries[k * n + j];
                }
            }
        }
        Operator { dim: n, entries }
    }
}

impl Add for &Operator {
    type Output = Operator;

    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        Operator {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;

    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        Operator {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.entries.chunks(self.dim).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, e) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                if e.im == 0.0 {
                    write!(f, "{}", e.re + 0.0)?;
                } else {
                    write!(f, "{}{:+}i", e.re + 0.0, e.im)?;
                }
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// XY − YX.
pub fn commutator(x: &Operator, y: &Operator) -> Result<Operator> {
    check_dim(x.dim, y.dim)?;
    Ok(&(x * y) - &(y * x))
}

/// Born probability ⟨s|P|s⟩ of a projector firing, clamped into [0, 1].
pub fn born_probability(p: &Operator, s: &StateVector) -> Result<f64> {
    clamp_probability(p.expectation(s)?)
}

pub(crate) fn clamp_probability(value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else if (-CLAMP_TOL..0.0).contains(&value) {
        Ok(0.0)
    } else if value > 1.0 && value <= 1.0 + CLAMP_TOL {
        Ok(1.0)
    } else {
        Err(Error::ProbabilityOutOfRange { value })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementResult {
    /// Whether the projector fired.
    pub fired: bool,
    /// Born probability of the realized branch.
    pub probability: f64,
    pub post_state: StateVector,
}

/// A validated projector together with its complement I − P.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    op: Operator,
    complement: Operator,
}

impl Projector {
    pub fn new(op: Operator) -> Result<Self> {
        op.ensure_projector()?;
        let complement = op.complement();
        Ok(Projector { op, complement })
    }

    pub fn onto(s: &StateVector) -> Self {
        Self::new(Operator::projector_onto(s)).expect("rank-one projector of a unit vector")
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }

    pub fn complement(&self) -> &Operator {
        &self.complement
    }

    /// Projective measurement with collapse.
    ///
    /// Randomness is consumed (one uniform draw) unless the firing probability
    /// is exactly 0 or 1 after clamping.
    pub fn measure<R: Rng + ?Sized>(&self, s: &StateVector, rng: &mut R) -> Result<MeasurementResult> {
        check_dim(self.op.dim(), s.dim())?;
        let raw = inner_raw(s.amplitudes(), &self.op.apply(s.amplitudes())).re;
        let prob = clamp_probability(raw)?;

        let fired = if prob == 0.0 {
            false
        } else if prob == 1.0 {
            true
        } else {
            let u: f64 = rng.random();
            if prob < NEGLIGIBLE_BRANCH {
                false
            } else if 1.0 - prob < NEGLIGIBLE_BRANCH {
                true
            } else {
                u < prob
            }
        };

        let (branch, probability) = if fired { (&self.op, prob) } else { (&self.complement, 1.0 - prob) };
        let post_state = if probability == 1.0 {
            // eigenstate: the projection is the identity on it
            s.clone()
        } else {
            s.with_amplitudes(branch.apply(s.amplitudes()))?
        };
        Ok(MeasurementResult { fired, probability, post_state })
    }
}

/// Projective measurement of `p` on `s` with collapse. See [`Projector::measure`].
pub fn measure<R: Rng + ?Sized>(s: &StateVector, p: &Operator, rng: &mut R) -> Result<MeasurementResult> {
    check_dim(p.dim(), s.dim())?;
    Projector::new(p.clone())?.measure(s, rng)
}

/// Post-measurement state of one branch, without sampling. `None` if the branch
/// has zero weight.
pub fn collapse_onto(s: &StateVector, branch: &Operator) -> Result<Option<(f64, StateVector)>> {
    check_dim(branch.dim(), s.dim())?;
    let prob = born_probability(branch, s)?;
    if prob < NEGLIGIBLE_BRANCH {
        return Ok(None);
    }
    Ok(Some((prob, s.with_amplitudes(branch.apply(s.amplitudes()))?)))
}

fn inner_raw(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn l2_norm(v: &[Complex64]) -> f64 {
    v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

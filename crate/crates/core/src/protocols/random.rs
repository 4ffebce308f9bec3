//! Random states and projector pairs for the commutation audit.

use num_complex::Complex64;
use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::hilbert::{Operator, StateVector};

fn gaussian_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

/// Haar-distributed pure state.
pub fn random_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<StateVector> {
    StateVector::new(gaussian_vector(dim, rng), StateVector::numbered_labels(dim))
}

/// Orthonormal basis from Gram–Schmidt on Gaussian vectors.
pub fn random_orthonormal_basis<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Vec<StateVector>> {
    let labels = StateVector::numbered_labels(dim);
    let mut basis: Vec<StateVector> = Vec::with_capacity(dim);
    while basis.len() < dim {
        let mut v = gaussian_vector(dim, rng);
        // two passes keep the result orthogonal to machine precision
        for _ in 0..2 {
            for e in &basis {
                let overlap: Complex64 = e.amplitudes().iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ei) in v.iter_mut().zip(e.amplitudes()) {
                    *vi -= overlap * ei;
                }
            }
        }
        if let Ok(s) = StateVector::new(v, labels.iter().cloned()) {
            basis.push(s);
        }
    }
    Ok(basis)
}

/// Projector onto a random non-trivial subset of `basis`.
pub fn random_subspace_projector<R: Rng + ?Sized>(basis: &[StateVector], rng: &mut R) -> Result<Operator> {
    let dim = basis.len();
    let rank = if dim > 1 { rng.random_range(1..dim) } else { 1 };
    let chosen: Vec<&StateVector> = index::sample(rng, dim, rank).into_iter().map(|i| &basis[i]).collect();
    Operator::projector_onto_span(&chosen, dim)
}

/// Two projectors diagonal in one shared random basis, so they commute.
pub fn random_commuting_pair<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<(Operator, Operator)> {
    let basis = random_orthonormal_basis(dim, rng)?;
    Ok((random_subspace_projector(&basis, rng)?, random_subspace_projector(&basis, rng)?))
}

/// Two projectors built from independent random bases; generically they do
/// not commute.
pub fn random_generic_pair<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<(Operator, Operator)> {
    let first = random_orthonormal_basis(dim, rng)?;
    let second = random_orthonormal_basis(dim, rng)?;
    Ok((random_subspace_projector(&first, rng)?, random_subspace_projector(&second, rng)?))
}

//! The localized states |A⟩, |B⟩ and their superpositions, in basis order (A, B).

use num_complex::Complex64;

use crate::error::Result;
use crate::hilbert::{commutator, Operator, StateVector};

pub const LABELS: [&str; 2] = ["A", "B"];

pub fn ket_a() -> StateVector {
    StateVector::basis(0, LABELS).expect("two-level basis")
}

pub fn ket_b() -> StateVector {
    StateVector::basis(1, LABELS).expect("two-level basis")
}

/// (|A⟩ + |B⟩)/√2
pub fn ket_plus() -> StateVector {
    StateVector::from_real(&[1.0, 1.0], LABELS).expect("non-zero vector")
}

/// (|A⟩ − |B⟩)/√2
pub fn ket_minus() -> StateVector {
    StateVector::from_real(&[1.0, -1.0], LABELS).expect("non-zero vector")
}

pub fn projector_a() -> Operator {
    Operator::projector_onto(&ket_a())
}

pub fn projector_b() -> Operator {
    Operator::projector_onto(&ket_b())
}

/// The sender's nonlocal projector |+⟩⟨+|.
pub fn projector_plus() -> Operator {
    Operator::projector_onto(&ket_plus())
}

/// [|+⟩⟨+|, |B⟩⟨B|], computed.
pub fn paper_commutator() -> Result<Operator> {
    commutator(&projector_plus(), &projector_b())
}

/// ½(|A⟩⟨B| − |B⟩⟨A|), written down directly.
pub fn expected_commutator() -> Operator {
    let a = ket_a();
    let b = ket_b();
    let ab = Operator::outer(a.amplitudes(), b.amplitudes());
    let ba = Operator::outer(b.amplitudes(), a.amplitudes());
    (&ab - &ba).scale(Complex64::new(0.5, 0.0))
}

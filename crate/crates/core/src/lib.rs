//! Amplitude encoders for fixed-Hamming-weight, sparse and binary data.
//!
//! The crate builds logical circuits out of (controlled) RBS-type gates,
//! lowers them to CNOT + single-qubit rotations, counts CNOTs, simulates
//! the result exactly or under stochastic Pauli noise, and mitigates noisy
//! probability estimates with Clifford data regression.
//!
//! Qubit labels run from 1 to n. A [`BitString`] prints as `q_n … q_1`, so
//! `"110000"` has qubits 6 and 5 set.

pub mod bitstring;
pub mod cdr;
pub mod circuit;
pub mod compiler;
pub mod coordinates;
pub mod demo;
pub mod dense;
pub mod encoders;
pub mod error;
pub mod io;
pub mod noise;
pub mod qasm;
pub mod resources;
pub mod simulator;
pub mod su2;

pub use bitstring::{ehrlich_sequence, gate_params, next_bitstring, BitString, EhrlichState, GateParams, QubitSet};
pub use circuit::{Circuit, Gate, GateKind, Level};
pub use coordinates::{angles_complex, angles_real, reconstruct, AngleSet, DataVector, Mode};
pub use encoders::{encode_binary, encode_dense_complex, encode_dense_real, encode_sparse, EncoderReport, SparseOptions, SparseTuple};
pub use error::{Error, Result};
pub use simulator::{NoiseModel, SparseState};

pub use num_complex::Complex64;

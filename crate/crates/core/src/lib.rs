//! Exact and numerical machinery around Hecke operators on `PGL_d(Q_p)`:
//! coset enumeration, Satake transforms and the Plancherel measure, a
//! higher-rank amplifier, diophantine subalgebra detection in Q-algebras,
//! and finite metric models for covering and eigenfunction-mass bounds.

pub mod amplifier;
pub mod diophantine;
pub mod error;
pub mod exact_arith;
pub mod hecke_cosets;
pub mod mass_lab;
pub mod root_data;
pub mod satake;

pub use error::{Error, Result};

//! Universal secure network coding with rank-metric codes.
//!
//! The crate is layered bottom-up:
//!
//! - [`gf`]: the field tower GF(q) ⊂ GF(q^m) and the coordinate map φ.
//! - [`linalg`]: dense matrices over either field, rank and the rank metric.
//! - [`gabidulin`]: Gabidulin codes, brute-force and syndrome decoders,
//!   Cartesian products.
//! - [`secrecy`]: coset coding and the layered secrecy + error-control scheme.
//! - [`netsim`]: acyclic linear coded networks with wiretap and jamming
//!   adversaries.
//! - [`verify`]: exact enumeration oracles for leakage and zero-error
//!   decodability.
//! - [`campaign`] and [`formats`]: simulation campaigns and on-disk formats
//!   used by the command-line tool.

pub mod campaign;
pub mod error;
pub mod formats;
pub mod gabidulin;
pub mod gf;
pub mod linalg;
pub mod netsim;
pub mod secrecy;
pub mod verify;

pub use error::{Error, Result};
pub use gabidulin::{GabidulinCode, LinearCode};
pub use gf::{phi_contract, phi_expand, Elem, FieldTower};
pub use linalg::{low_rank_vectors, rank_distance, rank_weight, FMatrix, Layer, Subspace};

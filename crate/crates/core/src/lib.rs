//! Geometry kernel for the ALF gravitational instantons of cyclic type: the
//! flat `R^3 x S^1` and the multi-Taub-NUT metrics
//! `g = V dx^2 + eta^2 / V`, `V = 1 + sum 2m / |x - a_i|`, `d eta = *dV`.
//!
//! Everything is evaluated in explicit gauge charts over `R^3` minus the
//! centers, with exact first and second derivatives carried by [`jet::Jet2`].
//! The crate is `no_std` (it needs `alloc`) and performs no IO.

#![cfg_attr(not(feature = "std"), no_std)]
#![allow(
    clippy::needless_range_loop,
    clippy::neg_cmp_op_on_partial_ord,
    clippy::suspicious_arithmetic_impl
)]

extern crate alloc;

pub mod asymptotics;
pub mod config;
pub mod connection;
pub mod error;
pub mod fd;
pub mod geometry;
pub mod hyperkahler;
pub mod integrals;
pub mod jet;
pub mod linalg;
pub mod potential;
pub mod quadrature;

pub use config::InstantonConfig;
pub use connection::{Chart, GaugeChart};
pub use error::{Error, Result};
pub use geometry::{ChartPoint, CotensorFrame};
pub use jet::{Axis, Jet1, Jet2};

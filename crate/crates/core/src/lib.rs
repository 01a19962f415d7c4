//! Proxy-point low-rank approximation of analytic kernels, its a priori error
//! bounds, and hierarchically semiseparable (HSS) compression of Toeplitz
//! matrices generated by analytic functions.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. Index sets in the public surface are 1-based, while the dense
//! linear algebra in [`numerics`] uses 0-based row and column positions.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod bounds;
pub mod error;
pub mod hss;
pub mod kernels;
pub mod numerics;
pub mod proxy;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

//! Star-product quantization schemes on `H_d`: dequantizer/quantizer
//! families, their classification through the dequantization matrix, the
//! star-product kernel, and a catalog of concrete qubit and qudit schemes.

pub mod catalog;
pub mod cli;
pub mod error;
pub mod matrix;
pub mod operator_space;
pub mod random;
pub mod scheme;
pub mod star_product;
pub mod verify;

pub use error::{Error, Result};
pub use matrix::{Matrix, ToleranceConfig, C64};
pub use operator_space::VectorizationBasis;
pub use scheme::{classify, Cardinality, Scheme, SchemeReport};

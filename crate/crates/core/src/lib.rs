//! Connection-integral toolkit: self-dual area algebra, extended-precision
//! jets, special functions, moment engines, the area distribution and the
//! length measure.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod distribution;
pub mod jet;
pub mod measure;
pub mod moments;
pub mod optimize;
pub mod quadrature;
pub mod selfdual;
pub mod special;
pub mod verify;
pub mod xfloat;

pub use astro_float::BigFloat;

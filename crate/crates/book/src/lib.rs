//! Every chapter of `book/`, and the README, is a module here so that
//! `cargo test` runs their listings.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/space-forms.md")]
pub mod space_forms {}
#[doc = include_str!("../../../book/src/curves.md")]
pub mod curves {}
#[doc = include_str!("../../../book/src/cones.md")]
pub mod cones {}
#[doc = include_str!("../../../book/src/mobius.md")]
pub mod mobius {}
#[doc = include_str!("../../../book/src/hyperbolic-density.md")]
pub mod hyperbolic_density {}
#[doc = include_str!("../../../book/src/h2xr.md")]
pub mod h2xr {}
#[doc = include_str!("../../../book/src/knots.md")]
pub mod knots {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
#[doc = include_str!("../../../book/src/reproducing.md")]
pub mod reproducing {}
#[doc = include_str!("../../../README.md")]
pub mod readme {}

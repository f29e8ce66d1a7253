//! The guide under `book/src`, compiled as doc-tests so its snippets stay in
//! step with the crates.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/disease-model.md")]
pub mod disease_model {}

#[doc = include_str!("../../../book/src/spread.md")]
pub mod spread {}

#[doc = include_str!("../../../book/src/interventions.md")]
pub mod interventions {}

#[doc = include_str!("../../../book/src/scenarios.md")]
pub mod scenarios {}

#[doc = include_str!("../../../book/src/data-formats.md")]
pub mod data_formats {}

#[doc = include_str!("../../../book/src/service.md")]
pub mod service {}

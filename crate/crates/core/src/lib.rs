//! Constrained coding over the DNA alphabet.
//!
//! A [`ConstraintSet`](constraints::ConstraintSet) screens the de Bruijn
//! graph of k-mers into a coding digraph ([`digraph::Accessor`]); the
//! [`codec`] walks that digraph to turn bit strings into sequences that
//! satisfy every constraint; the [`corrector`] repairs edit errors by local
//! search along the digraph, sieving candidates with a check value; and
//! [`retrieval`] ranks repaired reads by frequency to recover a pool of
//! stored messages without clustering.

pub mod capacity;
pub mod channel;
pub mod codec;
pub mod constraints;
pub mod corrector;
pub mod digraph;
pub mod error;
pub mod experiment;
pub mod nucleotide;
pub mod retrieval;

pub use error::{Error, Result};

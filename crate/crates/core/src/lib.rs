//! Protocol laboratory for 60 GHz directional WPAN/WLAN links.
//!
//! The crate is organized bottom-up: [`golay`] builds the spreading sequences
//! and preamble fields, [`phy`] holds the MCS table and the header/data
//! encoding pipelines, [`link`] the free-space budget math, [`mac`] channel
//! access (TDMA schedule + EDCA), [`bf`] the sector-sweep and refinement
//! protocols, [`station`] power-save / multi-band session state, [`tput`] the
//! analytic throughput model, and [`sim`] a deterministic discrete-event
//! simulator tying the pieces together.

pub mod bf;
pub mod golay;
pub mod link;
pub mod mac;
pub mod phy;
pub mod sim;
pub mod station;
pub mod tput;

//! Rateless-coded reliable multicast at desk scale.
//!
//! The crate has four layers:
//!
//! * [`gf2_codec`] — a generation-based rateless codec over GF(2): the
//!   encoder emits an unbounded stream of random linear combinations of `k`
//!   source segments, the decoder recovers the block by incremental Gaussian
//!   elimination. [`wire`] defines the serialized packet layout.
//! * [`channel`] — per-client Bernoulli packet delivery with optional
//!   collocation correlation, driven by explicit seeded streams.
//! * [`protocol_sim`] — event-loop engines for the delivery strategies
//!   (coded broadcast with one ACK per client, per-client unicast ARQ with
//!   exponential backoff, plain multicast) plus airtime accounting, and
//!   [`policy`] — the mode-selection rules and capability negotiation.
//! * [`harness`] — experiment configuration, deterministic seed derivation,
//!   grid sweeps, CSV emission, and the codec micro-benchmark behind the
//!   `rcnc` CLI.

pub mod channel;
pub mod gf2_codec;
pub mod harness;
pub mod policy;
pub mod protocol_sim;
pub mod rng;
pub mod wire;

//! Mode-selection rules and capability negotiation.
//!
//! The access point decides, per roster, whether to deliver with coded
//! broadcast, per-client unicast, or a mix. Rules fire in order, first match
//! wins:
//!
//! 1. fewer clients than `unicast_threshold` — unicast;
//! 2. one collocation group holds more than `collocation_fraction_limit` of
//!    the roster — unicast (correlated losses void the coded broadcast's
//!    independent-reception premise);
//! 3. otherwise partition by decode capability: all capable — coded
//!    broadcast; none — unicast; some — mixed.
//!
//! Before any of that, each client negotiates with the network manager
//! whether it will host the decoder; only clients whose negotiation was
//! accepted count as capable downstream.

use crate::channel::ClientProfile;
use rand::Rng;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error("cannot decide a delivery mode for an empty client roster")]
    EmptyRoster,
    #[error("invalid policy configuration: {0}")]
    InvalidConfig(&'static str),
}

/// Thresholds steering the mode decision.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyConfig {
    /// Below this client count, plain unicast wins on complexity grounds.
    pub unicast_threshold: usize,
    /// Informational: the client count around which coded gains are
    /// expected to be comfortable. Not used by the decision rules.
    pub rcnc_sweet_spot: usize,
    /// Largest fraction of the roster one collocation group may hold before
    /// the decision falls back to unicast.
    pub collocation_fraction_limit: f64,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        Self {
            unicast_threshold: 10,
            rcnc_sweet_spot: 30,
            collocation_fraction_limit: 0.5,
        }
    }
}

impl PolicyConfig {
    pub fn validate(&self) -> Result<(), PolicyError> {
        if self.unicast_threshold == 0 {
            return Err(PolicyError::InvalidConfig("unicast_threshold must be at least 1"));
        }
        if !(self.collocation_fraction_limit > 0.0 && self.collocation_fraction_limit <= 1.0) {
            return Err(PolicyError::InvalidConfig(
                "collocation_fraction_limit must be in (0, 1]",
            ));
        }
        Ok(())
    }
}

/// Delivery mode a decision selects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecidedMode {
    Rcnc,
    Unicast,
    Mixed,
}

impl DecidedMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            DecidedMode::Rcnc => "rcnc",
            DecidedMode::Unicast => "unicast",
            DecidedMode::Mixed => "mixed",
        }
    }
}

impl fmt::Display for DecidedMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which rule produced the decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecisionReason {
    BelowThreshold,
    Collocated,
    NoCapability,
    AllCapable,
    SplitCapability,
}

impl DecisionReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            DecisionReason::BelowThreshold => "below-threshold",
            DecisionReason::Collocated => "collocated",
            DecisionReason::NoCapability => "no-capability",
            DecisionReason::AllCapable => "all-capable",
            DecisionReason::SplitCapability => "split-capability",
        }
    }
}

impl fmt::Display for DecisionReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A partition of the roster into coded-broadcast and unicast sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeDecision {
    pub mode: DecidedMode,
    /// Client ids served by coded broadcast, ascending.
    pub rcnc_set: Vec<u32>,
    /// Client ids served by unicast, ascending.
    pub unicast_set: Vec<u32>,
    pub reason: DecisionReason,
}

/// Whether a capable client agrees to host the decoder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AcceptPolicy {
    Always,
    Never,
    WithProbability(f64),
}

/// Result of the capability handshake for one client.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NegotiationOutcome {
    pub client_id: u32,
    pub accepted: bool,
    pub declared_resources_ok: bool,
}

/// Models the capability handshake: the network manager checks the client's
/// declared resources, and a resource-capable client then accepts or declines
/// per `accept_policy`. Clients without decode support never consume a
/// willingness draw.
pub fn negotiate<R: Rng>(
    client: &ClientProfile,
    accept_policy: AcceptPolicy,
    rng: &mut R,
) -> NegotiationOutcome {
    if !client.supports_decoding {
        return NegotiationOutcome {
            client_id: client.client_id,
            accepted: false,
            declared_resources_ok: false,
        };
    }
    let willing = match accept_policy {
        AcceptPolicy::Always => true,
        AcceptPolicy::Never => false,
        AcceptPolicy::WithProbability(q) => rng.gen_bool(q),
    };
    NegotiationOutcome {
        client_id: client.client_id,
        accepted: willing,
        declared_resources_ok: true,
    }
}

/// Runs the handshake across a roster and returns profiles whose effective
/// decode capability is the negotiation outcome.
pub fn apply_negotiation<R: Rng>(
    clients: &[ClientProfile],
    accept_policy: AcceptPolicy,
    rng: &mut R,
) -> Vec<ClientProfile> {
    clients
        .iter()
        .map(|client| {
            let outcome = negotiate(client, accept_policy, rng);
            ClientProfile {
                supports_decoding: outcome.accepted,
                ..*client
            }
        })
        .collect()
}

/// Picks the delivery mode for a post-negotiation roster. Pure function of
/// its inputs.
pub fn decide_mode(
    clients: &[ClientProfile],
    policy: &PolicyConfig,
) -> Result<ModeDecision, PolicyError> {
    if clients.is_empty() {
        return Err(PolicyError::EmptyRoster);
    }
    policy.validate()?;

    let total = clients.len();
    let mut all_ids: Vec<u32> = clients.iter().map(|c| c.client_id).collect();
    all_ids.sort_unstable();

    if total < policy.unicast_threshold {
        return Ok(ModeDecision {
            mode: DecidedMode::Unicast,
            rcnc_set: Vec::new(),
            unicast_set: all_ids,
            reason: DecisionReason::BelowThreshold,
        });
    }

    let mut group_sizes: BTreeMap<u32, usize> = BTreeMap::new();
    for client in clients {
        if let Some(group) = client.collocation_group {
            *group_sizes.entry(group).or_insert(0) += 1;
        }
    }
    let largest_group = group_sizes.values().copied().max().unwrap_or(0);
    if largest_group as f64 > policy.collocation_fraction_limit * total as f64 {
        return Ok(ModeDecision {
            mode: DecidedMode::Unicast,
            rcnc_set: Vec::new(),
            unicast_set: all_ids,
            reason: DecisionReason::Collocated,
        });
    }

    let mut rcnc_set: Vec<u32> = clients
        .iter()
        .filter(|c| c.supports_decoding)
        .map(|c| c.client_id)
        .collect();
    let mut unicast_set: Vec<u32> = clients
        .iter()
        .filter(|c| !c.supports_decoding)
        .map(|c| c.client_id)
        .collect();
    rcnc_set.sort_unstable();
    unicast_set.sort_unstable();

    let decision = if unicast_set.is_empty() {
        ModeDecision {
            mode: DecidedMode::Rcnc,
            rcnc_set,
            unicast_set,
            reason: DecisionReason::AllCapable,
        }
    } else if rcnc_set.is_empty() {
        ModeDecision {
            mode: DecidedMode::Unicast,
            rcnc_set,
            unicast_set,
            reason: DecisionReason::NoCapability,
        }
    } else {
        ModeDecision {
            mode: DecidedMode::Mixed,
            rcnc_set,
            unicast_set,
            reason: DecisionReason::SplitCapability,
        }
    };
    Ok(decision)
}

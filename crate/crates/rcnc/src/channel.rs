//! Per-client Bernoulli packet-delivery model.
//!
//! Each client receives a transmitted packet with its own success
//! probability, independently of the others — unless clients share a
//! collocation group, in which case the whole group shares a single draw at
//! the group's weakest probability (fully correlated losses). ACK frames are
//! carried on a loss-free reverse channel.

use rand::Rng;
use std::collections::BTreeMap;

/// One client as the access point sees it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClientProfile {
    pub client_id: u32,
    /// Probability in (0, 1] that a transmission reaches this client.
    pub success_prob: f64,
    /// Whether the client can host the rateless decoder.
    pub supports_decoding: bool,
    /// Clients sharing a group see fully correlated deliveries.
    pub collocation_group: Option<u32>,
}

impl ClientProfile {
    pub fn new(client_id: u32, success_prob: f64) -> Self {
        assert!(
            success_prob > 0.0 && success_prob <= 1.0,
            "success_prob must be in (0, 1], got {success_prob}"
        );
        Self {
            client_id,
            success_prob,
            supports_decoding: true,
            collocation_group: None,
        }
    }

    pub fn with_decoding(mut self, supports_decoding: bool) -> Self {
        self.supports_decoding = supports_decoding;
        self
    }

    pub fn with_collocation_group(mut self, group: u32) -> Self {
        self.collocation_group = Some(group);
        self
    }
}

/// Per-client delivered flags for one transmission event. Contains exactly
/// the clients addressed by that transmission.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeliveryOutcome {
    flags: BTreeMap<u32, bool>,
}

impl DeliveryOutcome {
    pub fn delivered(&self, client_id: u32) -> bool {
        self.flags.get(&client_id).copied().unwrap_or(false)
    }

    pub fn contains(&self, client_id: u32) -> bool {
        self.flags.contains_key(&client_id)
    }

    pub fn len(&self) -> usize {
        self.flags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flags.is_empty()
    }

    pub fn delivered_count(&self) -> usize {
        self.flags.values().filter(|&&d| d).count()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, bool)> + '_ {
        self.flags.iter().map(|(&id, &d)| (id, d))
    }
}

/// One broadcast event. Draws are consumed in slice order: independent
/// clients draw individually, a collocation group draws once at its first
/// member using the group's minimum success probability.
pub fn transmit_broadcast<R: Rng>(clients: &[ClientProfile], rng: &mut R) -> DeliveryOutcome {
    assert!(!clients.is_empty(), "broadcast needs at least one addressed client");
    let mut group_prob: BTreeMap<u32, f64> = BTreeMap::new();
    for client in clients {
        if let Some(group) = client.collocation_group {
            group_prob
                .entry(group)
                .and_modify(|p| *p = p.min(client.success_prob))
                .or_insert(client.success_prob);
        }
    }
    let mut group_draw: BTreeMap<u32, bool> = BTreeMap::new();
    let mut flags = BTreeMap::new();
    for client in clients {
        let delivered = match client.collocation_group {
            Some(group) => *group_draw
                .entry(group)
                .or_insert_with(|| rng.gen_bool(group_prob[&group])),
            None => rng.gen_bool(client.success_prob),
        };
        debug_assert!(
            !flags.contains_key(&client.client_id),
            "duplicate client id {} in broadcast",
            client.client_id
        );
        flags.insert(client.client_id, delivered);
    }
    DeliveryOutcome { flags }
}

/// One unicast transmission attempt: a single Bernoulli draw.
pub fn transmit_unicast<R: Rng>(client: &ClientProfile, rng: &mut R) -> bool {
    rng.gen_bool(client.success_prob)
}

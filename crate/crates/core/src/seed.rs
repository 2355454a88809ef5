//! Seed derivation.
//!
//! Every random stream in an experiment descends from one master seed through
//! [`derive`], keyed by a [`Stream`] label and an index. The tree used by the
//! experiment harness is
//!
//! ```text
//! master
//!  ├─ (Network, r) ─┬─ (AwarenessLayer, 0)
//!  │                ├─ (ContactLayer, 0)
//!  │                └─ (Omega, 0)
//!  └─ (Cell, c) ── (Replication, r) ─┬─ (Initial, 0)
//!                                    └─ (Nodes, 0)  -> one ChaCha stream per node
//! ```

/// Named branches of the seed tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Network = 1,
    AwarenessLayer = 2,
    ContactLayer = 3,
    Omega = 4,
    Cell = 5,
    Replication = 6,
    Initial = 7,
    Nodes = 8,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from `parent` for branch `stream` at position `index`.
pub fn derive(parent: u64, stream: Stream, index: u64) -> u64 {
    let tag = splitmix64((stream as u64) << 56 ^ index);
    splitmix64(parent ^ tag)
}

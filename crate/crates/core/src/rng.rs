//! Counter-based, splittable random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 stream addressed by
//! `(master_seed, tag, index)`:
//!
//! * the 256-bit key is `master_seed` (8 bytes little endian), followed by
//!   the tag code (8 bytes little endian), followed by 16 zero bytes;
//! * the 64-bit ChaCha stream id is `index`;
//! * the block counter starts at zero.
//!
//! Sample `i` of an experiment always reads stream `i`, so results do not
//! depend on how samples are distributed across worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Purpose tag separating independent families of streams under one seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StreamTag {
    Backbone,
    Brownian,
    Excursion,
    TestStrings,
}

impl StreamTag {
    pub const fn code(self) -> u64 {
        match self {
            StreamTag::Backbone => 1,
            StreamTag::Brownian => 2,
            StreamTag::Excursion => 3,
            StreamTag::TestStrings => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamSeed {
    pub master: u64,
    pub tag: StreamTag,
    pub index: u64,
}

impl StreamSeed {
    pub const fn new(master: u64, tag: StreamTag, index: u64) -> Self {
        Self { master, tag, index }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        stream_rng(self.master, self.tag, self.index)
    }
}

pub fn stream_rng(master: u64, tag: StreamTag, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&master.to_le_bytes());
    key[8..16].copy_from_slice(&tag.code().to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

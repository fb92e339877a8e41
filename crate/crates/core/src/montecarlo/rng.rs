use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Identifies one ChaCha20 stream: the key comes from `master_seed`, the
/// stream id selects an independent keystream under that key.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RngSpec {
    pub master_seed: u64,
    pub stream_id: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngSpec {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        Self { master_seed, stream_id }
    }

    /// The generator for this stream.
    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// A new key derived from `(master_seed, stream_id, label)`, at stream 0.
    /// Experiments hand each of their sub-tasks a distinct child.
    pub fn child(&self, label: u64) -> Self {
        let key = splitmix64(self.master_seed ^ splitmix64(self.stream_id ^ splitmix64(label)));
        Self { master_seed: key, stream_id: 0 }
    }

    /// The stream of trial `index`: same key as [`child`](Self::child)`(0)`,
    /// stream id equal to the trial index. Results therefore do not depend on
    /// the order in which trials run.
    pub fn trial(&self, index: u64) -> Self {
        Self { master_seed: self.child(0).master_seed, stream_id: index }
    }
}

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Seeded, counter-based random stream.
///
/// `(seed, stream)` pairs select independent ChaCha20 keystreams, so trial
/// `i` of an experiment can own `RngStream::new(seed, i)` and reproduce its
/// draws regardless of scheduling.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    inner: ChaCha20Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha20Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { seed, stream, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Derives an independent child stream, e.g. for a sub-mechanism.
    pub fn fork(&mut self) -> RngStream {
        let seed = self.inner.next_u64();
        RngStream::new(seed, self.stream)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

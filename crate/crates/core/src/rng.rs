use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Name of the generator, echoed in run files.
pub const GENERATOR_NAME: &str = "ChaCha8 (seed_from_u64(master), stream = run index)";

/// Seeded random stream owned by a single run.
///
/// Backed by ChaCha8. The substream for run `r` under master seed `s` uses
/// `s` as the key and `r` as the ChaCha stream id, so it is a pure function
/// of `(s, r)` and streams for different runs never overlap.
#[derive(Clone, Debug)]
pub struct RandomStream {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self::for_run(seed, 0)
    }

    pub fn for_run(master_seed: u64, run: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(master_seed);
        inner.set_stream(run);
        RandomStream {
            seed: master_seed,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

impl RngCore for RandomStream {
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

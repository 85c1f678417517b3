use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};

/// Random stream owned by one replication.
///
/// A ChaCha8 generator keyed by the master seed with the replication index
/// as its stream number, so the sequence depends only on the pair.
#[derive(Clone, Debug)]
pub struct ReplicationStream(ChaCha8Rng);

/// The random stream for replication `replication_index` under `master_seed`.
pub fn replication_stream(master_seed: u64, replication_index: u64) -> ReplicationStream {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(replication_index);
    ReplicationStream(rng)
}

/// Sub-master seed for the `index`-th point of a sweep (splitmix64 finaliser).
pub fn derive_seed(master_seed: u64, index: u64) -> u64 {
    let mut z = master_seed
        .wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl ReplicationStream {
    #[inline]
    pub fn standard_normal(&mut self) -> f64 {
        self.0.sample(StandardNormal)
    }

    /// Uniform index in `0..n`.
    pub fn index_below(&mut self, n: usize) -> usize {
        self.0.random_range(0..n)
    }

    pub fn binomial(&mut self, trials: u64, p: f64) -> u64 {
        Binomial::new(trials, p).map(|d| d.sample(&mut self.0)).unwrap_or(0)
    }
}

impl RngCore for ReplicationStream {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}

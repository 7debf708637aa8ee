use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

/// Random stream handed to one shot, row or setting.
pub type ShotRng = ChaCha8Rng;

/// Master seed. Stream `i` depends only on `(master, i)`, so results do not
/// depend on evaluation order or thread count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Seed(pub u64);

impl Seed {
    pub fn master(&self) -> u64 {
        self.0
    }

    pub fn stream(&self, i: u64) -> ShotRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(i);
        rng
    }

    /// Stream `i` within a named family, so that unrelated sweeps sharing a
    /// seed do not reuse each other's randomness.
    pub fn substream(&self, family: u32, i: u32) -> ShotRng {
        self.stream((u64::from(family) << 32) | u64::from(i))
    }
}

impl From<u64> for Seed {
    fn from(v: u64) -> Self {
        Seed(v)
    }
}

/// Success fraction of `shots` Bernoulli(p) trials and its binomial standard
/// error. With `shots == 0` the exact `p` is returned with zero error.
pub fn binomial_estimate(rng: &mut ShotRng, shots: u64, p: f64) -> (f64, f64) {
    if shots == 0 {
        return (p, 0.0);
    }
    let p = p.clamp(0.0, 1.0);
    let k = Binomial::new(shots, p).expect("p clamped to [0,1]").sample(rng);
    let f = k as f64 / shots as f64;
    (f, (f * (1.0 - f) / shots as f64).sqrt())
}

//! Workloads shared by the criterion benches.

use netcode_core::random::{random_instance, InstanceParams};
use netcode_core::{AugmentedNetwork, Network, RateVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A fixed batch of random instances, augmented at their drawn rates.
pub fn random_batch(count: u64) -> Vec<(Network, RateVector, AugmentedNetwork)> {
    (0..count)
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (net, rate) = random_instance(&mut rng, &InstanceParams::default());
            let aug = net.augment(&rate).expect("generated rate matches");
            (net, rate, aug)
        })
        .collect()
}

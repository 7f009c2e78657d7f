use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::group::AbelianGroup;
use crate::sequence::Sequence;

/// Generator for sample `index` of a seeded run: one ChaCha stream per sample,
/// so results do not depend on how samples are spread over threads.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `length` independent uniform elements of `group`.
pub fn random_sequence(group: &AbelianGroup, length: usize, seed: u64) -> Sequence {
    random_sequence_with(group, length, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn random_sequence_with<R: Rng>(group: &AbelianGroup, length: usize, rng: &mut R) -> Sequence {
    let n = group.order();
    Sequence::from_indices(group, (0..length).map(|_| rng.gen_range(0..n))).expect("indices below order")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_uniform() {
        let g = AbelianGroup::elementary(3, 2).unwrap();
        assert!(random_sequence(&g, 0, 1).is_empty());
        assert_eq!(random_sequence(&g, 50, 7), random_sequence(&g, 50, 7));
        assert_ne!(random_sequence(&g, 50, 7), random_sequence(&g, 50, 8));

        let s = random_sequence(&g, 10_000, 42);
        let expected = 10_000.0 / 9.0;
        for (e, m) in s.support() {
            let dev = (m as f64 - expected).abs() / expected;
            assert!(dev < 0.15, "element {e}: {m} vs {expected}");
        }
        assert_eq!(s.support().count(), 9);
    }

    #[test]
    fn streams_differ() {
        let g = AbelianGroup::cyclic(1000).unwrap();
        let a = random_sequence_with(&g, 20, &mut sample_rng(3, 0));
        let b = random_sequence_with(&g, 20, &mut sample_rng(3, 1));
        assert_ne!(a, b);
        assert_eq!(a, random_sequence_with(&g, 20, &mut sample_rng(3, 0)));
    }
}

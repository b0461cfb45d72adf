use rand::seq::SliceRandom;
use rand::Rng;

use super::AugmentError;
use crate::corpus::Discourse;

/// Permutes the sentence order, resampling until the result differs from the input.
pub fn global_shuffle<R: Rng + ?Sized>(
    discourse: &Discourse,
    rng: &mut R,
) -> Result<Discourse, AugmentError> {
    let original = discourse.sentences();
    if original.len() < 2 {
        return Err(AugmentError::TooShort { n: original.len() });
    }
    if original.iter().all(|s| *s == original[0]) {
        return Err(AugmentError::Degenerate);
    }
    let mut shuffled = original.to_vec();
    loop {
        shuffled.shuffle(rng);
        if shuffled != original {
            break;
        }
    }
    Ok(Discourse::new(shuffled, discourse.origin_id())?)
}

//! Re-randomizing shuffle over tracker lists. Instead of a zero-knowledge
//! argument, the shuffler discloses its permutation and blinding factors in
//! a transcript that a trusted auditor replays; the adversary never sees the
//! transcript.

use rand::seq::SliceRandom;
use rand::RngCore;

use super::{random_nonzero_scalar, rerandomize, GroupBackend, Tracker};

/// Audit record for one shuffle step: `outputs[i]` must equal
/// `inputs[permutation[i]]` re-randomized by `randomizers[permutation[i]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShuffleTranscript<B: GroupBackend> {
    pub inputs: Vec<Tracker<B>>,
    pub outputs: Vec<Tracker<B>>,
    pub permutation: Vec<usize>,
    pub randomizers: Vec<B::Scalar>,
}

/// Shuffles `inputs` under a fresh random permutation and per-input nonzero
/// blinding factors, returning the outputs together with the transcript.
pub fn shuffle<B: GroupBackend, R: RngCore>(
    inputs: &[Tracker<B>],
    rng: &mut R,
) -> (Vec<Tracker<B>>, ShuffleTranscript<B>) {
    let n = inputs.len();
    let randomizers: Vec<B::Scalar> = (0..n)
        .map(|_| random_nonzero_scalar::<B, _>(rng))
        .collect();
    let mut permutation: Vec<usize> = (0..n).collect();
    permutation.shuffle(rng);
    let outputs: Vec<Tracker<B>> = permutation
        .iter()
        .map(|&src| {
            rerandomize::<B>(&inputs[src], &randomizers[src])
                .expect("randomizers are drawn nonzero")
        })
        .collect();
    let transcript = ShuffleTranscript {
        inputs: inputs.to_vec(),
        outputs: outputs.clone(),
        permutation,
        randomizers,
    };
    (outputs, transcript)
}

/// Replays a transcript against the claimed input and output lists. True iff
/// the permutation is a bijection, every randomizer is nonzero, and each
/// output is exactly the stated re-randomization of its source.
pub fn verify_shuffle<B: GroupBackend>(
    inputs: &[Tracker<B>],
    outputs: &[Tracker<B>],
    transcript: &ShuffleTranscript<B>,
) -> bool {
    let n = inputs.len();
    if outputs.len() != n
        || transcript.inputs.len() != n
        || transcript.outputs.len() != n
        || transcript.permutation.len() != n
        || transcript.randomizers.len() != n
    {
        return false;
    }
    if transcript.inputs != inputs || transcript.outputs != outputs {
        return false;
    }
    let mut seen = vec![false; n];
    for &src in &transcript.permutation {
        if src >= n || seen[src] {
            return false;
        }
        seen[src] = true;
    }
    for (i, &src) in transcript.permutation.iter().enumerate() {
        if B::scalar_is_zero(&transcript.randomizers[src]) {
            return false;
        }
        let expected = rerandomize::<B>(&inputs[src], &transcript.randomizers[src])
            .expect("nonzero checked above");
        if outputs[i] != expected {
            return false;
        }
    }
    true
}

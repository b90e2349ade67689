use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::decompose::{Decomposition, Direction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Provenance {
    Vlm,
    Rule,
    Random,
    Feedback,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Vlm => "VLM",
            Provenance::Rule => "RULE",
            Provenance::Random => "RANDOM",
            Provenance::Feedback => "FEEDBACK",
        }
    }
}

/// Labels chosen to receive panels and where the choice came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelSet {
    pub labels: BTreeSet<u32>,
    pub provenance: Provenance,
}

impl LabelSet {
    pub fn new(labels: BTreeSet<u32>, provenance: Provenance) -> Self {
        Self { labels, provenance }
    }

    pub fn contains(&self, label: u32) -> bool {
        self.labels.contains(&label)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValidationError {
    #[error("empty selection")]
    Empty,
    #[error("unknown labels {0:?}")]
    UnknownLabels(Vec<u32>),
}

/// Checks that `labels` is non-empty and every label exists in `decomp`.
pub fn validate_labels(labels: &BTreeSet<u32>, decomp: &Decomposition) -> Result<(), ValidationError> {
    if labels.is_empty() {
        return Err(ValidationError::Empty);
    }
    let unknown: Vec<u32> = labels.iter().copied().filter(|&l| !decomp.has_label(l)).collect();
    if unknown.is_empty() {
        Ok(())
    } else {
        Err(ValidationError::UnknownLabels(unknown))
    }
}

/// Every labeled patch facing straight up.
pub fn rule_based_select(decomp: &Decomposition) -> LabelSet {
    let labels = decomp
        .patches
        .iter()
        .filter(|p| p.normal == Direction::PosZ)
        .filter_map(|p| p.label)
        .collect();
    LabelSet::new(labels, Provenance::Rule)
}

/// Draws `k` uniformly from `1..=n`, then a uniform `k`-subset of the labels.
///
/// The stream is ChaCha8 seeded through `seed_from_u64`, which is specified
/// independently of platform and word size.
pub fn random_select(decomp: &Decomposition, seed: u64) -> LabelSet {
    let n = decomp.label_count();
    if n == 0 {
        return LabelSet::new(BTreeSet::new(), Provenance::Random);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.random_range(1..=n);
    let labels = rand::seq::index::sample(&mut rng, n, k)
        .into_iter()
        .map(|i| i as u32 + 1)
        .collect();
    LabelSet::new(labels, Provenance::Random)
}

/// Probability that a given label is drawn by [`random_select`] on `n` labels.
pub fn random_inclusion_probability(n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    (n as f64 + 1.0) / (2.0 * n as f64)
}

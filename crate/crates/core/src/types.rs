//! Domain types shared by every module: embeddings, speaker models,
//! households, protocols, and scored trials.
//!
//! All of these are immutable values after construction and safe to share
//! across threads.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::num::Real;

/// Sentinel used in the TSV formats for an absent speaker label.
pub const UNLABELED: &str = "?";

/// One utterance represented as a fixed-dimension speaker embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding<F> {
    pub utt_id: String,
    /// `None` for unlabeled data (adaptation streams).
    pub speaker_id: Option<String>,
    pub vector: Vec<F>,
}

impl<F: Real> Embedding<F> {
    pub fn new(utt_id: impl Into<String>, speaker_id: Option<String>, vector: Vec<F>) -> Self {
        Embedding {
            utt_id: utt_id.into(),
            speaker_id,
            vector,
        }
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }

    pub fn is_finite(&self) -> bool {
        self.vector.iter().all(|v| v.is_finite())
    }
}

/// An indexed collection of embeddings with a single, validated dimension.
#[derive(Debug, Clone)]
pub struct EmbeddingSet<F> {
    embeddings: Vec<Embedding<F>>,
    by_id: HashMap<String, usize>,
    dim: usize,
}

impl<F: Real> EmbeddingSet<F> {
    /// Build an indexed set; rejects empty input, mixed dimensions,
    /// non-finite components, and duplicate utterance ids.
    pub fn new(embeddings: Vec<Embedding<F>>) -> Result<Self> {
        let dim = match embeddings.first() {
            Some(e) => e.dim(),
            None => return Err(Error::Domain("embedding set must not be empty".into())),
        };
        let mut by_id = HashMap::with_capacity(embeddings.len());
        for (i, e) in embeddings.iter().enumerate() {
            if e.dim() != dim {
                return Err(Error::Domain(format!(
                    "embedding {} has dimension {}, expected {dim}",
                    e.utt_id,
                    e.dim()
                )));
            }
            if !e.is_finite() {
                return Err(Error::Domain(format!(
                    "embedding {} contains a non-finite component",
                    e.utt_id
                )));
            }
            if by_id.insert(e.utt_id.clone(), i).is_some() {
                return Err(Error::Integrity(format!("duplicate utt id {}", e.utt_id)));
            }
        }
        Ok(EmbeddingSet {
            embeddings,
            by_id,
            dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.embeddings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.embeddings.is_empty()
    }

    pub fn get(&self, utt_id: &str) -> Option<&Embedding<F>> {
        self.by_id.get(utt_id).map(|&i| &self.embeddings[i])
    }

    /// Lookup that treats a missing id as a referential-integrity error.
    pub fn require(&self, utt_id: &str) -> Result<&Embedding<F>> {
        self.get(utt_id)
            .ok_or_else(|| Error::Integrity(format!("utt id {utt_id} not found in embedding set")))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Embedding<F>> {
        self.embeddings.iter()
    }

    pub fn into_vec(self) -> Vec<Embedding<F>> {
        self.embeddings
    }

    /// Copy of the set with every vector length-normalized.
    pub fn length_normalized(&self) -> Result<Self> {
        let normalized = self
            .embeddings
            .iter()
            .map(|e| {
                Ok(Embedding {
                    utt_id: e.utt_id.clone(),
                    speaker_id: e.speaker_id.clone(),
                    vector: crate::plda::length_normalize(&e.vector)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        EmbeddingSet::new(normalized)
    }
}

/// One enrolled household member: a centroid plus the zero-order statistic
/// behind it. `raw_set` keeps the member utterance ids for set-based scoring.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeakerModel<F> {
    pub model_id: String,
    pub centroid: Vec<F>,
    /// Effective number of observations behind the centroid (real-valued).
    pub effective_count: F,
    pub raw_set: Option<Vec<String>>,
}

impl<F: Real> SpeakerModel<F> {
    pub fn new(model_id: impl Into<String>, centroid: Vec<F>, effective_count: F) -> Self {
        SpeakerModel {
            model_id: model_id.into(),
            centroid,
            effective_count,
            raw_set: None,
        }
    }

    pub fn with_raw_set(mut self, utt_ids: Vec<String>) -> Self {
        self.raw_set = Some(utt_ids);
        self
    }

    pub fn dim(&self) -> usize {
        self.centroid.len()
    }
}

/// A household: the classification universe (members) plus the guests whose
/// utterances should be rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct Household {
    pub household_id: String,
    pub member_ids: Vec<String>,
    pub guest_ids: Vec<String>,
}

impl Household {
    pub fn new(
        household_id: impl Into<String>,
        member_ids: Vec<String>,
        guest_ids: Vec<String>,
    ) -> Result<Self> {
        let household_id = household_id.into();
        if member_ids.len() < 2 {
            return Err(Error::Domain(format!(
                "household {household_id} has {} members, need at least 2",
                member_ids.len()
            )));
        }
        if member_ids.iter().any(|m| guest_ids.contains(m)) {
            return Err(Error::Domain(format!(
                "household {household_id} has overlapping member and guest ids"
            )));
        }
        Ok(Household {
            household_id,
            member_ids,
            guest_ids,
        })
    }

    pub fn size(&self) -> usize {
        self.member_ids.len()
    }
}

/// Trial label: relation between the test speaker and the hypothesized model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TrialLabel {
    /// Test speaker equals the model speaker.
    Target,
    /// Test speaker is a different member of the same household.
    KnownNontarget,
    /// Test speaker is a guest.
    UnknownNontarget,
}

impl TrialLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            TrialLabel::Target => "target",
            TrialLabel::KnownNontarget => "known_nontarget",
            TrialLabel::UnknownNontarget => "unknown_nontarget",
        }
    }

    pub fn from_str(s: &str) -> Option<Self> {
        match s {
            "target" => Some(TrialLabel::Target),
            "known_nontarget" => Some(TrialLabel::KnownNontarget),
            "unknown_nontarget" => Some(TrialLabel::UnknownNontarget),
            _ => None,
        }
    }
}

impl std::fmt::Display for TrialLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One (model, test utterance) comparison to be scored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trial {
    pub model_id: String,
    pub test_utt_id: String,
    pub label: TrialLabel,
}

/// A scored trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialScore<F> {
    pub household_id: String,
    pub model_id: String,
    pub test_utt_id: String,
    pub label: TrialLabel,
    pub score: F,
}

/// Everything needed to run one household: who is enrolled from what,
/// the ordered unlabeled adaptation stream, and the labeled trial list.
#[derive(Debug, Clone, PartialEq)]
pub struct HouseholdProtocol {
    pub household: Household,
    /// speaker id -> enrollment utt ids. Keys double as model ids.
    pub enroll: BTreeMap<String, Vec<String>>,
    /// Order is significant and preserved by I/O round-trips.
    pub adaptation_stream: Vec<String>,
    pub trials: Vec<Trial>,
}

impl HouseholdProtocol {
    /// Check referential integrity and label consistency against the
    /// embedding set that accompanies the protocol.
    pub fn validate<F: Real>(&self, embeddings: &EmbeddingSet<F>) -> Result<()> {
        let hh = &self.household.household_id;
        for member in &self.household.member_ids {
            let utts = self.enroll.get(member).ok_or_else(|| {
                Error::Integrity(format!("member {member} of {hh} has no enrollment entry"))
            })?;
            if utts.is_empty() {
                return Err(Error::Integrity(format!(
                    "member {member} of {hh} has zero enrollment utterances"
                )));
            }
            for utt in utts {
                let e = embeddings.require(utt)?;
                if e.speaker_id.as_deref() != Some(member.as_str()) {
                    return Err(Error::Integrity(format!(
                        "enrollment utt {utt} is labeled {:?}, expected {member}",
                        e.speaker_id
                    )));
                }
            }
        }
        for model in self.enroll.keys() {
            if !self.household.member_ids.contains(model) {
                return Err(Error::Integrity(format!(
                    "enrollment model {model} is not a member of {hh}"
                )));
            }
        }
        for utt in &self.adaptation_stream {
            embeddings.require(utt)?;
        }
        for trial in &self.trials {
            if !self.household.member_ids.contains(&trial.model_id) {
                return Err(Error::Integrity(format!(
                    "trial model {} is not a member of {hh}",
                    trial.model_id
                )));
            }
            let e = embeddings.require(&trial.test_utt_id)?;
            let speaker = e.speaker_id.as_deref().ok_or_else(|| {
                Error::Integrity(format!("trial utt {} has no speaker label", trial.test_utt_id))
            })?;
            let expected = if speaker == trial.model_id {
                TrialLabel::Target
            } else if self.household.member_ids.iter().any(|m| m == speaker) {
                TrialLabel::KnownNontarget
            } else {
                TrialLabel::UnknownNontarget
            };
            if trial.label != expected {
                return Err(Error::Integrity(format!(
                    "trial ({}, {}) is labeled {}, expected {expected}",
                    trial.model_id, trial.test_utt_id, trial.label
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn household_rejects_singleton_and_overlap() {
        assert!(Household::new("h", vec!["a".into()], vec![]).is_err());
        assert!(
            Household::new("h", vec!["a".into(), "b".into()], vec!["a".into()]).is_err()
        );
        assert!(Household::new("h", vec!["a".into(), "b".into()], vec!["g".into()]).is_ok());
    }

    #[test]
    fn embedding_set_rejects_mixed_dims() {
        let e1 = Embedding::new("u1", None, vec![0.0f64, 1.0]);
        let e2 = Embedding::new("u2", None, vec![0.0f64]);
        assert!(EmbeddingSet::new(vec![e1, e2]).is_err());
    }

    #[test]
    fn embedding_set_rejects_duplicates_and_nan() {
        let e1 = Embedding::new("u1", None, vec![0.0f64, 1.0]);
        let e2 = Embedding::new("u1", None, vec![1.0f64, 0.0]);
        assert!(EmbeddingSet::new(vec![e1.clone(), e2]).is_err());
        let bad = Embedding::new("u3", None, vec![f64::NAN, 0.0]);
        assert!(EmbeddingSet::new(vec![e1, bad]).is_err());
    }

    #[test]
    fn trial_label_round_trip() {
        for label in [
            TrialLabel::Target,
            TrialLabel::KnownNontarget,
            TrialLabel::UnknownNontarget,
        ] {
            assert_eq!(TrialLabel::from_str(label.as_str()), Some(label));
        }
        assert_eq!(TrialLabel::from_str("bogus"), None);
    }
}

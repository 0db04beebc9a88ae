use serde::{Deserialize, Serialize};

use super::{percent, MetricError, SpeakerMapping, SpeakerTimelines};
use crate::timeline::Ticks;

/// Jaccard error of one reference speaker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeakerJer {
    pub ref_speaker: String,
    pub sys_speaker: Option<String>,
    pub false_alarm: Ticks,
    pub miss: Ticks,
    pub total: Ticks,
    /// Percent, in `[0, 100]`.
    pub jer: f64,
    /// The speaker has no time inside the scoring regions.
    pub zero_time: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JerComponents {
    pub speakers: Vec<SpeakerJer>,
    /// Mean of the per-speaker values, percent.
    pub jer: f64,
}

/// Per-reference-speaker Jaccard error averaged with equal weight.
///
/// A mapped pair `(r, s)` scores `(|s - r| + |r - s|) / |r ∪ s|`. An
/// unmapped reference speaker scores 100, or 0 if it has no scored time at
/// all. Unmapped system speakers are not penalized.
pub fn compute_jer(
    reference: &SpeakerTimelines,
    system: &SpeakerTimelines,
    mapping: &SpeakerMapping,
) -> Result<JerComponents, MetricError> {
    if reference.is_empty() {
        return Err(MetricError::EmptyReference);
    }
    let speakers: Vec<SpeakerJer> = reference
        .iter()
        .map(|(name, r)| {
            let paired = mapping.sys_for(name).and_then(|s| system.get(s).map(|tl| (s, tl)));
            match paired {
                Some((sys_name, s)) => {
                    let total = r.union(s).duration();
                    let false_alarm = s.subtract(r).duration();
                    let miss = r.subtract(s).duration();
                    let jer = if total > Ticks::ZERO { percent(false_alarm + miss, total) } else { 0.0 };
                    SpeakerJer {
                        ref_speaker: name.to_string(),
                        sys_speaker: Some(sys_name.to_string()),
                        false_alarm,
                        miss,
                        total,
                        jer,
                        zero_time: r.is_empty(),
                    }
                }
                None => {
                    let total = r.duration();
                    SpeakerJer {
                        ref_speaker: name.to_string(),
                        sys_speaker: None,
                        false_alarm: Ticks::ZERO,
                        miss: total,
                        total,
                        jer: if total > Ticks::ZERO { 100.0 } else { 0.0 },
                        zero_time: total == Ticks::ZERO,
                    }
                }
            }
        })
        .collect();
    let jer = speakers.iter().map(|s| s.jer).sum::<f64>() / speakers.len() as f64;
    Ok(JerComponents { speakers, jer })
}

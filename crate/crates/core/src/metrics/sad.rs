use crate::formats::{SadSegment, Turn};
use crate::timeline::{Ticks, Timeline, TimelineError};

/// Speaker-agnostic speech segmentation: the union of all turns, with gaps
/// of at most `max_gap` bridged.
pub fn derive_sad(turns: &[Turn], max_gap: Ticks) -> Result<Vec<SadSegment>, TimelineError> {
    let speech = Timeline::from_intervals(turns.iter().filter_map(Turn::interval).collect());
    Ok(speech.bridge_gaps(max_gap)?.intervals().iter().copied().map(SadSegment::speech).collect())
}

use serde::{Deserialize, Serialize};

use super::{percent, MetricError, SpeakerMapping, SpeakerTimelines};
use crate::timeline::Ticks;

/// Error components of the diarization error rate.
///
/// `total` counts reference time once per active reference speaker, so
/// overlapped speech contributes several times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DerComponents {
    pub false_alarm: Ticks,
    pub miss: Ticks,
    pub confusion: Ticks,
    pub total: Ticks,
}

impl DerComponents {
    pub fn errors(&self) -> Ticks {
        self.false_alarm + self.miss + self.confusion
    }

    /// DER in percent; `None` when there is no reference time.
    pub fn der(&self) -> Option<f64> {
        (self.total > Ticks::ZERO).then(|| percent(self.errors(), self.total))
    }
}

impl std::ops::Add for DerComponents {
    type Output = DerComponents;
    fn add(self, rhs: DerComponents) -> DerComponents {
        DerComponents {
            false_alarm: self.false_alarm + rhs.false_alarm,
            miss: self.miss + rhs.miss,
            confusion: self.confusion + rhs.confusion,
            total: self.total + rhs.total,
        }
    }
}

impl std::iter::Sum for DerComponents {
    fn sum<I: Iterator<Item = DerComponents>>(iter: I) -> DerComponents {
        iter.fold(DerComponents::default(), |a, b| a + b)
    }
}

#[derive(Clone, Copy)]
enum Side {
    Ref,
    Sys,
}

/// DER components by region decomposition.
///
/// Scored time is split into maximal pieces over which the sets of active
/// reference and system speakers are constant. For a piece of length `d`
/// with `n_ref` and `n_sys` active speakers, of which `n_correct` mapped
/// pairs are both active:
///
/// * miss += d * max(0, n_ref - n_sys)
/// * false alarm += d * max(0, n_sys - n_ref)
/// * confusion += d * (min(n_ref, n_sys) - n_correct)
/// * total += d * n_ref
///
/// Inputs are expected to be clipped to the scoring regions already.
pub fn compute_der(
    reference: &SpeakerTimelines,
    system: &SpeakerTimelines,
    mapping: &SpeakerMapping,
) -> Result<DerComponents, MetricError> {
    let ref_names: Vec<&str> = reference.names().collect();
    let sys_names: Vec<&str> = system.names().collect();

    // For each reference speaker index, the mapped system speaker index.
    let mapped: Vec<(usize, usize)> = mapping
        .pairs
        .iter()
        .filter_map(|(r, s)| {
            let ri = ref_names.binary_search(&r.as_str()).ok()?;
            let si = sys_names.binary_search(&s.as_str()).ok()?;
            Some((ri, si))
        })
        .collect();

    // (time, +1/-1, side, speaker index)
    let mut events: Vec<(Ticks, i32, Side, usize)> = Vec::new();
    for (side, timelines) in [(Side::Ref, reference), (Side::Sys, system)] {
        for (idx, (_, tl)) in timelines.iter().enumerate() {
            for iv in tl.intervals() {
                events.push((iv.onset(), 1, side, idx));
                events.push((iv.offset(), -1, side, idx));
            }
        }
    }
    events.sort_unstable_by_key(|e| e.0);

    let mut ref_active = vec![false; ref_names.len()];
    let mut sys_active = vec![false; sys_names.len()];
    let (mut n_ref, mut n_sys) = (0i64, 0i64);
    let mut out = DerComponents::default();
    let mut prev = events.first().map_or(Ticks::ZERO, |e| e.0);

    let mut k = 0;
    while k < events.len() {
        let now = events[k].0;
        let d = now - prev;
        if d > Ticks::ZERO && (n_ref > 0 || n_sys > 0) {
            let n_correct = mapped.iter().filter(|&&(r, s)| ref_active[r] && sys_active[s]).count() as i64;
            out.miss += d * (n_ref - n_sys).max(0);
            out.false_alarm += d * (n_sys - n_ref).max(0);
            out.confusion += d * (n_ref.min(n_sys) - n_correct);
            out.total += d * n_ref;
        }
        while k < events.len() && events[k].0 == now {
            let (_, delta, side, idx) = events[k];
            let on = delta > 0;
            match side {
                Side::Ref => {
                    ref_active[idx] = on;
                    n_ref += i64::from(delta);
                }
                Side::Sys => {
                    sys_active[idx] = on;
                    n_sys += i64::from(delta);
                }
            }
            k += 1;
        }
        prev = now;
    }

    if out.total == Ticks::ZERO {
        return Err(MetricError::EmptyReference);
    }
    Ok(out)
}

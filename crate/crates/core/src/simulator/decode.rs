use std::collections::HashMap;

use super::{DeliveryTranscript, PlacementRealization, Segment};
use crate::partition::DemandVector;

/// Replay every user's decoder from its own cache and the transcript, then
/// compare the reassembled file against ground truth.
pub fn decode(real: &PlacementRealization, transcript: &DeliveryTranscript, d: &DemandVector) -> bool {
    if d.check_shape(real.users(), real.files()).is_err() {
        return false;
    }
    (0..real.users()).all(|user| decode_user(real, transcript, d.files()[user], user))
}

fn decode_user(real: &PlacementRealization, transcript: &DeliveryTranscript, wanted: usize, user: usize) -> bool {
    let cache: HashMap<(usize, u32), _> = real.cache(user).iter().map(|e| ((e.file, e.mask), e)).collect();
    let read = |seg: &Segment| -> Option<&[u64]> {
        let entry = cache.get(&(seg.file, seg.mask))?;
        let from = seg.start.checked_sub(entry.start)? as usize;
        entry.data.get(from..from + seg.len as usize)
    };

    let f = real.f() as usize;
    let mut file = vec![0u64; f];
    let mut known = vec![false; f];
    for entry in real.cache(user).iter().filter(|e| e.file == wanted) {
        let at = entry.start as usize;
        file[at..at + entry.data.len()].copy_from_slice(&entry.data);
        known[at..at + entry.data.len()].fill(true);
    }

    for msg in transcript.messages.iter().filter(|m| m.mask & (1 << user) != 0) {
        let Some(own) = msg.components.iter().find(|c| c.user == user) else {
            continue;
        };
        let mut acc = msg.payload.clone();
        for other in msg.components.iter().filter(|c| c.user != user) {
            let mut at = 0usize;
            for seg in &other.segments {
                let Some(src) = read(seg) else {
                    return false;
                };
                let Some(dst) = acc.get_mut(at..at + src.len()) else {
                    return false;
                };
                for (a, v) in dst.iter_mut().zip(src) {
                    *a ^= v;
                }
                at += src.len();
            }
        }
        let mut at = 0usize;
        for seg in &own.segments {
            let (start, len) = (seg.start as usize, seg.len as usize);
            if seg.file != wanted || start + len > f || at + len > acc.len() {
                return false;
            }
            file[start..start + len].copy_from_slice(&acc[at..at + len]);
            known[start..start + len].fill(true);
            at += len;
        }
    }
    known.iter().all(|&k| k) && file == real.file_data(wanted)
}

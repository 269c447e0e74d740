use serde::Serialize;

use super::PlacementRealization;
use crate::error::Result;
use crate::math::masks_of_size;
use crate::partition::DemandVector;

/// A contiguous run of units of one subfile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Segment {
    pub file: usize,
    pub mask: u32,
    /// Index of the first unit within the file.
    pub start: u64,
    pub len: u64,
}

/// What one user recovers from a message, in payload order. Units past the
/// last segment are zero padding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Component {
    pub user: usize,
    pub segments: Vec<Segment>,
}

impl Component {
    pub fn units(&self) -> u64 {
        self.segments.iter().map(|s| s.len).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Message {
    pub mask: u32,
    pub len: u64,
    pub components: Vec<Component>,
    #[serde(skip)]
    pub payload: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeliveryTranscript {
    pub messages: Vec<Message>,
    pub total_units: u64,
}

impl DeliveryTranscript {
    /// Units sent per multicast group size, indexed `s - 1`.
    pub fn per_s_totals(&self, users: usize) -> Vec<u64> {
        let mut totals = vec![0; users];
        for m in &self.messages {
            totals[m.mask.count_ones() as usize - 1] += m.len;
        }
        totals
    }

    /// The same transcript with message `index` dropped.
    pub fn without(&self, index: usize) -> Self {
        let mut messages = self.messages.clone();
        let removed = messages.remove(index);
        Self { messages, total_units: self.total_units - removed.len }
    }
}

fn check(real: &PlacementRealization, d: &DemandVector) -> Result<()> {
    d.check_shape(real.users(), real.files())
}

/// Zero-padded length of the group `mask`.
fn group_len(real: &PlacementRealization, d: &[usize], mask: u32) -> u64 {
    members(mask).map(|k| real.size(d[k], mask & !(1 << k))).max().unwrap_or(0)
}

fn members(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |k| mask & (1 << k) != 0)
}

fn canonical_masks(users: usize) -> impl Iterator<Item = u32> {
    (1..=users).rev().flat_map(move |s| masks_of_size(users, s))
}

fn assemble(real: &PlacementRealization, mask: u32, len: u64, components: Vec<Component>) -> Message {
    let mut payload = vec![0u64; len as usize];
    for c in &components {
        let mut at = 0usize;
        for seg in &c.segments {
            let src = &real.file_data(seg.file)[seg.start as usize..(seg.start + seg.len) as usize];
            for (p, v) in payload[at..at + src.len()].iter_mut().zip(src) {
                *p ^= v;
            }
            at += src.len();
        }
    }
    Message { mask, len, components, payload }
}

fn finish(messages: Vec<Message>) -> DeliveryTranscript {
    let total_units = messages.iter().map(|m| m.len).sum();
    DeliveryTranscript { messages, total_units }
}

/// Every group `S` sends the XOR of its members' requested subfiles, each
/// zero-padded to the longest.
pub fn deliver_zero_pad(real: &PlacementRealization, d: &DemandVector) -> Result<DeliveryTranscript> {
    check(real, d)?;
    let d = d.files();
    let mut messages = Vec::new();
    for mask in canonical_masks(real.users()) {
        let len = group_len(real, d, mask);
        if len == 0 {
            continue;
        }
        let components = members(mask)
            .filter_map(|k| {
                let sub = mask & !(1 << k);
                let size = real.size(d[k], sub);
                (size > 0).then(|| Component {
                    user: k,
                    segments: vec![Segment { file: d[k], mask: sub, start: real.offset(d[k], sub), len: size }],
                })
            })
            .collect();
        messages.push(assemble(real, mask, len, components));
    }
    Ok(finish(messages))
}

/// Zero-pad message lengths, with short components filled by units of the
/// same user's requested subfiles from strict supersets of the group, which
/// are then no longer sent in their own group. Groups are planned in
/// increasing size; supersets and units are taken lowest first. A component
/// that cannot be filled is zero-padded.
pub fn deliver_hcd(real: &PlacementRealization, d: &DemandVector) -> Result<DeliveryTranscript> {
    check(real, d)?;
    let k = real.users();
    let d = d.files();
    let subsets = 1usize << k;
    // consumed[user][group]: units of W_{d_user, group \ user} already sent elsewhere.
    let mut consumed = vec![vec![0u64; subsets]; k];
    let mut planned: Vec<Option<(u64, Vec<Component>)>> = vec![None; subsets];

    for s in 1..=k {
        for mask in masks_of_size(k, s) {
            let len = group_len(real, d, mask);
            if len == 0 {
                continue;
            }
            let mut components = Vec::new();
            for user in members(mask) {
                let sub = mask & !(1 << user);
                let (size, used) = (real.size(d[user], sub), consumed[user][mask as usize]);
                let mut segments = Vec::new();
                if size > used {
                    segments.push(Segment { file: d[user], mask: sub, start: real.offset(d[user], sub) + used, len: size - used });
                }
                let mut need = len - (size - used);
                let mut sup = mask as usize + 1;
                while need > 0 && sup < subsets {
                    if sup & mask as usize == mask as usize {
                        let other = sup as u32 & !(1 << user);
                        let (osize, oused) = (real.size(d[user], other), consumed[user][sup]);
                        let take = need.min(osize.saturating_sub(oused));
                        if take > 0 {
                            segments.push(Segment {
                                file: d[user],
                                mask: other,
                                start: real.offset(d[user], other) + oused,
                                len: take,
                            });
                            consumed[user][sup] += take;
                            need -= take;
                        }
                    }
                    sup += 1;
                }
                if !segments.is_empty() {
                    components.push(Component { user, segments });
                }
            }
            planned[mask as usize] = Some((len, components));
        }
    }

    // Remaining own units are the suffix of each subfile; earlier-planned
    // groups borrowed its prefix.
    let mut messages = Vec::new();
    for mask in canonical_masks(k) {
        if let Some((len, components)) = planned[mask as usize].take() {
            messages.push(assemble(real, mask, len, components));
        }
    }
    Ok(finish(messages))
}

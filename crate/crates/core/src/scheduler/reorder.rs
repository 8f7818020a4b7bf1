//! Slot renumbering so that gateway slots follow the originals they forward.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use super::{Schedule, Slot, Target};
use crate::assignment::Channel;

fn is_gateway_slot(slot: &Slot) -> bool {
    slot.frames.iter().flat_map(|f| &f.entries).any(|e| e.is_image)
}

fn channel_of(target: Target) -> Option<Channel> {
    match target {
        Target::A => Some(Channel::A),
        Target::B => Some(Channel::B),
        Target::Both => None,
    }
}

/// Renumbers slots over the id space shared by both channels.
///
/// Non-gateway slots keep their relative order and are packed to
/// `1..=k` in each channel; the common fault-tolerant prefix therefore keeps
/// equal ids on A and B. Each gateway slot then takes the smallest free id
/// strictly above the latest slot holding one of its originals, gateway
/// slots with earlier originals choosing first.
pub fn reorder_slots(schedule: &Schedule) -> Schedule {
    let mut renumber: [BTreeMap<u32, u32>; 2] = Default::default();
    for ch in Channel::BOTH {
        let mut next = 0;
        for slot in &schedule.channel(ch).slots {
            if !is_gateway_slot(slot) {
                next += 1;
                renumber[ch.index()].insert(slot.id, next);
            }
        }
    }

    // new slot of each original, keyed by signal id
    let mut original_slot: BTreeMap<u32, u32> = BTreeMap::new();
    for p in schedule.placements.iter().filter(|p| !p.is_image) {
        let ch = channel_of(p.channel).unwrap_or(Channel::A);
        let new = renumber[ch.index()][&p.slot];
        let e = original_slot.entry(p.signal).or_default();
        *e = (*e).max(new);
    }

    for ch in Channel::BOTH {
        let mut gateway: Vec<(u32, u32)> = schedule
            .channel(ch)
            .slots
            .iter()
            .filter(|s| is_gateway_slot(s))
            .map(|s| {
                let q = s
                    .frames
                    .iter()
                    .flat_map(|f| &f.entries)
                    .filter(|e| e.is_image)
                    .map(|e| original_slot.get(&e.signal).copied().unwrap_or(0))
                    .max()
                    .unwrap_or(0);
                (q, s.id)
            })
            .collect();
        gateway.sort_unstable();
        let map = &mut renumber[ch.index()];
        let mut used: BTreeSet<u32> = map.values().copied().collect();
        for (q, old) in gateway {
            let mut id = q + 1;
            while used.contains(&id) {
                id += 1;
            }
            used.insert(id);
            map.insert(old, id);
        }
    }

    let mut out = schedule.clone();
    for ch in Channel::BOTH {
        let map = &renumber[ch.index()];
        let slots = &mut out.channel_mut(ch).slots;
        for slot in slots.iter_mut() {
            slot.id = map[&slot.id];
        }
        slots.sort_by_key(|s| s.id);
    }
    for p in &mut out.placements {
        let ch = channel_of(p.channel).unwrap_or(Channel::A);
        p.slot = renumber[ch.index()][&p.slot];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::EcuId;
    use crate::scheduler::{ChannelSchedule, Frame, FrameEntry, Placement};
    use alloc::vec;

    fn slot(id: u32, owner: u32, signal: u32, is_image: bool) -> Slot {
        Slot {
            id,
            owner: EcuId(owner),
            frames: vec![Frame {
                cycle: 1,
                entries: vec![FrameEntry {
                    signal,
                    offset_bytes: 0,
                    is_image,
                }],
            }],
        }
    }

    fn place(signal: u32, channel: Target, slot: u32, is_image: bool) -> Placement {
        Placement {
            signal,
            channel,
            base_cycle: 1,
            slot,
            offset_bytes: 0,
            is_image,
        }
    }

    #[test]
    fn gateway_slot_moves_past_its_original() {
        // A: gateway slot 1 forwards s2, whose original sits in B slot 2
        let sched = Schedule {
            slot_payload_bytes: 8,
            a: ChannelSchedule {
                slots: vec![slot(1, 0, 2, true)],
            },
            b: ChannelSchedule {
                slots: vec![slot(1, 3, 1, false), slot(2, 4, 2, false)],
            },
            placements: vec![
                place(1, Target::B, 1, false),
                place(2, Target::B, 2, false),
                place(2, Target::A, 1, true),
            ],
        };
        let out = reorder_slots(&sched);
        assert_eq!(out.a.slots[0].id, 3);
        assert_eq!(out.placements[2].slot, 3);
        assert_eq!(out.b, sched.b);
    }

    #[test]
    fn identity_without_gateway_slots() {
        let sched = Schedule {
            slot_payload_bytes: 8,
            a: ChannelSchedule {
                slots: vec![slot(1, 1, 1, false), slot(2, 3, 2, false)],
            },
            b: ChannelSchedule {
                slots: vec![slot(1, 1, 1, false)],
            },
            placements: vec![place(1, Target::Both, 1, false), place(2, Target::A, 2, false)],
        };
        assert_eq!(reorder_slots(&sched), sched);
    }

    #[test]
    fn gateway_slot_interleaves_with_free_ids() {
        // A keeps non-gateway 1..=3; the gateway slot needs an id above 1
        // but 2 and 3 are taken
        let sched = Schedule {
            slot_payload_bytes: 8,
            a: ChannelSchedule {
                slots: vec![
                    slot(1, 3, 1, false),
                    slot(2, 0, 9, true),
                    slot(3, 3, 2, false),
                    slot(4, 3, 3, false),
                ],
            },
            b: ChannelSchedule {
                slots: vec![slot(1, 4, 9, false)],
            },
            placements: vec![
                place(1, Target::A, 1, false),
                place(9, Target::A, 2, true),
                place(2, Target::A, 3, false),
                place(3, Target::A, 4, false),
                place(9, Target::B, 1, false),
            ],
        };
        let out = reorder_slots(&sched);
        let ids: Vec<(u32, u32)> = out.a.slots.iter().map(|s| (s.id, s.owner.0)).collect();
        assert_eq!(ids, [(1, 3), (2, 3), (3, 3), (4, 0)]);
        assert_eq!(out.placements[1].slot, 4);
    }
}

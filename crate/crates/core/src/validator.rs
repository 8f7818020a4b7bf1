//! Feasibility checks for a schedule against its instance and assignment.
//!
//! Works from the frame contents alone and recomputes everything it needs;
//! nothing here is shared with the packer.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::assignment::{Channel, ChannelAssignment};
use crate::model::{EcuClass, EcuId, Instance, Signal};
use crate::scheduler::{Schedule, Target};

const CYCLES: u32 = 64;
const EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub enum ViolationCode {
    /// Signal missing, duplicated, or placement table out of step with frames.
    V1,
    /// Overlapping bytes or frame overflow.
    V2,
    /// Slot ownership.
    V3,
    /// Irregular occurrences.
    V4,
    /// Release date or deadline missed.
    V5,
    /// Fault-tolerant copies misaligned.
    V6,
    /// A receiver cannot hear the signal.
    V7,
    /// Image not strictly after its original in the same base cycle.
    V8,
    /// One-port ECU transmitting on the wrong channel.
    V9,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Violation {
    pub code: ViolationCode,
    pub message: String,
}

/// Where a signal copy sits on one channel.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Occupancy {
    slot: u32,
    offset: u32,
    cycles: BTreeSet<u32>,
}

impl Occupancy {
    fn base(&self) -> u32 {
        self.cycles.first().copied().unwrap_or(0)
    }
}

struct Report(Vec<Violation>);

impl Report {
    fn push(&mut self, code: ViolationCode, message: String) {
        self.0.push(Violation { code, message });
    }
}

fn channel_name(ch: Channel) -> &'static str {
    match ch {
        Channel::A => "A",
        Channel::B => "B",
    }
}

/// All violations, ordered by check; empty when the schedule is feasible.
pub fn validate(inst: &Instance, asg: &ChannelAssignment, sched: &Schedule) -> Vec<Violation> {
    use ViolationCode::*;

    let mut r = Report(Vec::new());
    let h = inst.config.slot_payload_bytes;
    let m = inst.config.cycle_duration_ms;
    let signals: BTreeMap<u32, &Signal> = inst.signals.iter().map(|s| (s.id, s)).collect();
    let class: BTreeMap<EcuId, EcuClass> = inst.ecus.iter().map(|e| (e.id, e.class)).collect();
    let gateway = inst.ecus.iter().find(|e| e.class == EcuClass::Gateway).map(|e| e.id);

    // (channel, signal, image) -> copy
    let mut copies: BTreeMap<(Channel, u32, bool), Occupancy> = BTreeMap::new();

    for ch in [Channel::A, Channel::B] {
        let name = channel_name(ch);
        let mut seen_ids = BTreeSet::new();
        for slot in &sched.channel(ch).slots {
            if !seen_ids.insert(slot.id) {
                r.push(V3, format!("channel {name}: slot {} listed twice", slot.id));
            }
            let owned_by_gateway = Some(slot.owner) == gateway;
            for frame in &slot.frames {
                if frame.cycle == 0 || frame.cycle > CYCLES {
                    r.push(V4, format!("channel {name} slot {}: cycle {} outside 1..=64", slot.id, frame.cycle));
                }
                let mut used = BTreeSet::new();
                for e in &frame.entries {
                    let Some(sig) = signals.get(&e.signal) else {
                        r.push(V1, format!("channel {name} slot {}: unknown signal {}", slot.id, e.signal));
                        continue;
                    };
                    let end = e.offset_bytes + sig.payload_bytes;
                    if end > h {
                        r.push(
                            V2,
                            format!(
                                "channel {name} slot {} cycle {}: signal {} ends at byte {end} beyond {h}",
                                slot.id, frame.cycle, e.signal
                            ),
                        );
                    }
                    for b in e.offset_bytes..end {
                        if !used.insert(b) {
                            r.push(
                                V2,
                                format!(
                                    "channel {name} slot {} cycle {}: byte {b} used twice (signal {})",
                                    slot.id, frame.cycle, e.signal
                                ),
                            );
                            break;
                        }
                    }
                    if e.is_image != owned_by_gateway {
                        r.push(
                            V3,
                            format!(
                                "channel {name} slot {} owned by ECU {} carries {} of signal {}",
                                slot.id,
                                slot.owner,
                                if e.is_image { "an image" } else { "the original" },
                                e.signal
                            ),
                        );
                    } else if !e.is_image && slot.owner != sig.transmitter {
                        r.push(
                            V3,
                            format!(
                                "channel {name} slot {} owned by ECU {} carries signal {} of ECU {}",
                                slot.id, slot.owner, e.signal, sig.transmitter
                            ),
                        );
                    }

                    let key = (ch, e.signal, e.is_image);
                    match copies.get_mut(&key) {
                        None => {
                            copies.insert(
                                key,
                                Occupancy {
                                    slot: slot.id,
                                    offset: e.offset_bytes,
                                    cycles: [frame.cycle].into_iter().collect(),
                                },
                            );
                        }
                        Some(c) if c.slot == slot.id && c.offset == e.offset_bytes => {
                            if !c.cycles.insert(frame.cycle) {
                                r.push(V1, format!("channel {name}: signal {} twice in cycle {}", e.signal, frame.cycle));
                            }
                        }
                        Some(c) => {
                            r.push(
                                V1,
                                format!(
                                    "channel {name}: signal {} at both (slot {}, byte {}) and (slot {}, byte {})",
                                    e.signal, c.slot, c.offset, slot.id, e.offset_bytes
                                ),
                            );
                        }
                    }
                }
            }
        }
    }

    // occurrences every period from the base cycle, nothing else
    for ((ch, id, image), c) in &copies {
        let Some(sig) = signals.get(id) else { continue };
        let base = c.base();
        let expected: BTreeSet<u32> = (base..=CYCLES).step_by(sig.period_cycles as usize).collect();
        if base > sig.period_cycles || c.cycles != expected {
            r.push(
                V4,
                format!(
                    "channel {}: {} of signal {} occupies cycles {:?}, period {}",
                    channel_name(*ch),
                    if *image { "image" } else { "original" },
                    id,
                    c.cycles,
                    sig.period_cycles
                ),
            );
        }
    }

    // placement table against frames
    let mut listed: BTreeMap<(Channel, u32, bool), (u32, u32, u32)> = BTreeMap::new();
    for p in &sched.placements {
        let chans: &[Channel] = match p.channel {
            Target::A => &[Channel::A],
            Target::B => &[Channel::B],
            Target::Both => &[Channel::A, Channel::B],
        };
        for &ch in chans {
            if listed.insert((ch, p.signal, p.is_image), (p.slot, p.base_cycle, p.offset_bytes)).is_some() {
                r.push(V1, format!("signal {} listed twice for channel {}", p.signal, channel_name(ch)));
            }
        }
    }
    for (key, c) in &copies {
        match listed.get(key) {
            Some(&t) if t == (c.slot, c.base(), c.offset) => {}
            Some(&(slot, base, offset)) => r.push(
                V1,
                format!(
                    "signal {} on channel {}: placement says slot {slot} cycle {base} byte {offset}, frames say slot {} cycle {} byte {}",
                    key.1,
                    channel_name(key.0),
                    c.slot,
                    c.base(),
                    c.offset
                ),
            ),
            None => r.push(V1, format!("signal {} on channel {} has no placement", key.1, channel_name(key.0))),
        }
    }
    for key in listed.keys().filter(|k| !copies.contains_key(k)) {
        r.push(V1, format!("signal {} placed on channel {} but absent from its frames", key.1, channel_name(key.0)));
    }

    let original = |ch: Channel, id: u32| copies.get(&(ch, id, false));
    let image = |ch: Channel, id: u32| copies.get(&(ch, id, true));
    let one_port_channel = |e: EcuId| match class.get(&e) {
        Some(EcuClass::OnePort) => Some(asg.channel_of.get(&e).copied()),
        _ => None,
    };

    for sig in &inst.signals {
        let id = sig.id;
        let on = |ch: Channel| original(ch, id).is_some() || image(ch, id).is_some();
        if original(Channel::A, id).is_none() && original(Channel::B, id).is_none() {
            r.push(V1, format!("signal {id} is not scheduled"));
            continue;
        }

        let base_ok = |base: u32| {
            base >= 1
                && f64::from(base - 1) * m + EPS >= sig.release_ms
                && f64::from(base) * m <= sig.deadline_ms + EPS
        };
        for ch in [Channel::A, Channel::B] {
            if let Some(c) = original(ch, id) {
                if !base_ok(c.base()) {
                    r.push(
                        V5,
                        format!(
                            "signal {id} starts in cycle {} outside [{}, {}] ms",
                            c.base(),
                            sig.release_ms,
                            sig.deadline_ms
                        ),
                    );
                }
            }
        }

        if sig.fault_tolerant {
            match (original(Channel::A, id), original(Channel::B, id)) {
                (Some(a), Some(b)) if a == b => {}
                (Some(_), Some(_)) => r.push(V6, format!("fault-tolerant signal {id} differs between channels")),
                _ => r.push(V6, format!("fault-tolerant signal {id} is missing on one channel")),
            }
        }

        let tx_channel = one_port_channel(sig.transmitter);
        for ch in [Channel::A, Channel::B] {
            if let Some(img) = image(ch, id) {
                match tx_channel {
                    Some(Some(home)) if home != ch => match original(home, id) {
                        Some(orig) if orig.base() == img.base() && orig.slot < img.slot => {}
                        Some(orig) => r.push(
                            V8,
                            format!(
                                "image of signal {id} in slot {} cycle {} does not follow original in slot {} cycle {}",
                                img.slot,
                                img.base(),
                                orig.slot,
                                orig.base()
                            ),
                        ),
                        None => r.push(V8, format!("image of signal {id} has no original on channel {}", channel_name(home))),
                    },
                    _ => r.push(
                        V1,
                        format!("signal {id} has an image on channel {} which is not required", channel_name(ch)),
                    ),
                }
            }
            if original(ch, id).is_some() {
                match tx_channel {
                    Some(Some(home)) if home != ch => r.push(
                        V9,
                        format!(
                            "ECU {} on channel {} transmits signal {id} on channel {}",
                            sig.transmitter,
                            channel_name(home),
                            channel_name(ch)
                        ),
                    ),
                    Some(None) => r.push(V9, format!("one-port ECU {} has no channel", sig.transmitter)),
                    _ => {}
                }
            }
        }

        for &rx in &sig.receivers {
            let hears = match one_port_channel(rx) {
                Some(Some(ch)) => on(ch),
                Some(None) => false,
                None => true,
            };
            if !hears {
                r.push(V7, format!("receiver {rx} cannot hear signal {id}"));
            }
        }
    }

    r.0.sort_by_key(|v| v.code);
    r.0
}

pub fn codes(violations: &[Violation]) -> BTreeSet<ViolationCode> {
    violations.iter().map(|v| v.code).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assignment::{solve_exact, CriterionParams};
    use crate::hypergraph::build_hypergraph;
    use crate::model::fixtures::{example_one, GATEWAY};
    use crate::scheduler::{schedule_channels, ChannelSchedule, Frame, FrameEntry, Placement, Slot};
    use alloc::vec;
    use ViolationCode::*;

    fn pipeline() -> (Instance, ChannelAssignment, Schedule) {
        let inst = example_one();
        let asg = solve_exact(&build_hypergraph(&inst), &CriterionParams::for_instance(&inst));
        let sched = schedule_channels(&inst, &asg).unwrap();
        (inst, asg, sched)
    }

    #[test]
    fn scheduled_example_is_clean() {
        let (inst, asg, sched) = pipeline();
        assert_eq!(validate(&inst, &asg, &sched), vec![]);
    }

    fn frames(cycles: impl Iterator<Item = u32>, signal: u32, offset: u32) -> Vec<Frame> {
        cycles
            .map(|cycle| Frame {
                cycle,
                entries: vec![FrameEntry {
                    signal,
                    offset_bytes: offset,
                    is_image: false,
                }],
            })
            .collect()
    }

    /// Cells of the worked example: s8 at [A, 1, 3, 0] with s9 beside it at byte 4,
    /// s3 at [B, 2, 2, 0]. Slot 3 on A is ECU 5's, slot 2 on B is ECU 2's.
    #[test]
    fn figure_fragment_cells_are_consistent() {
        let inst = example_one();
        let mut asg = pipeline().1;
        asg.channel_of = [(3, Channel::B), (4, Channel::B), (5, Channel::A)]
            .into_iter()
            .map(|(e, c)| (EcuId(e), c))
            .collect();
        let mut slot3 = frames(1..=64, 8, 0);
        for f in slot3.iter_mut().step_by(2) {
            f.entries.push(FrameEntry {
                signal: 9,
                offset_bytes: 4,
                is_image: false,
            });
        }
        let sched = Schedule {
            slot_payload_bytes: 8,
            a: ChannelSchedule {
                slots: vec![Slot {
                    id: 3,
                    owner: EcuId(5),
                    frames: slot3,
                }],
            },
            b: ChannelSchedule {
                slots: vec![Slot {
                    id: 2,
                    owner: EcuId(2),
                    frames: frames((2..=64).step_by(2), 3, 0),
                }],
            },
            placements: vec![
                Placement { signal: 8, channel: Target::A, base_cycle: 1, slot: 3, offset_bytes: 0, is_image: false },
                Placement { signal: 9, channel: Target::A, base_cycle: 1, slot: 3, offset_bytes: 4, is_image: false },
                Placement { signal: 3, channel: Target::B, base_cycle: 2, slot: 2, offset_bytes: 0, is_image: false },
            ],
        };
        let found = codes(&validate(&inst, &asg, &sched));
        assert!(!found.contains(&V2));
        assert!(!found.contains(&V4));
        // the remaining signals are absent from this fragment
        assert!(found.contains(&V1));
    }

    #[test]
    fn overlapping_bytes() {
        let (inst, asg, mut sched) = pipeline();
        let slot = sched.a.slots.iter_mut().find(|s| s.frames.iter().any(|f| f.entries.len() >= 2)).unwrap();
        let frame = slot.frames.iter_mut().find(|f| f.entries.len() >= 2).unwrap();
        frame.entries[1].offset_bytes = frame.entries[0].offset_bytes;
        assert!(codes(&validate(&inst, &asg, &sched)).contains(&V2));
    }

    #[test]
    fn two_full_width_signals_at_offset_zero() {
        let (inst, asg, mut sched) = pipeline();
        // s1 (8 bytes, every cycle) shares slot 1 with a second 8-byte copy
        sched.a.slots[0].frames[0].entries.push(FrameEntry {
            signal: 3,
            offset_bytes: 0,
            is_image: false,
        });
        assert!(codes(&validate(&inst, &asg, &sched)).contains(&V2));
    }

    #[test]
    fn missing_signal_and_deaf_receiver() {
        let (inst, asg, mut sched) = pipeline();
        let id = 8;
        for ch in [&mut sched.a, &mut sched.b] {
            for slot in &mut ch.slots {
                for f in &mut slot.frames {
                    f.entries.retain(|e| e.signal != id);
                }
            }
        }
        sched.placements.retain(|p| p.signal != id);
        let found = codes(&validate(&inst, &asg, &sched));
        assert!(found.contains(&V1));
    }

    #[test]
    fn wrong_channel_for_one_port() {
        let (inst, mut asg, sched) = pipeline();
        for c in asg.channel_of.values_mut() {
            *c = c.other();
        }
        let found = codes(&validate(&inst, &asg, &sched));
        assert!(found.contains(&V9));
        assert!(found.contains(&V7));
    }

    #[test]
    fn jitter_and_window() {
        let (mut inst, asg, mut sched) = pipeline();
        let slot = sched.a.slots.iter_mut().chain(sched.b.slots.iter_mut()).find(|s| s.frames.len() > 2).unwrap();
        slot.frames.remove(1);
        assert!(codes(&validate(&inst, &asg, &sched)).contains(&V4));
        let (_, _, sched) = pipeline();
        let late = sched.placements.iter().find(|p| p.base_cycle == 2 && !p.is_image).unwrap().signal;
        inst.signals.iter_mut().find(|s| s.id == late).unwrap().deadline_ms = 1.0;
        assert!(codes(&validate(&inst, &asg, &sched)).contains(&V5));
    }

    #[test]
    fn fault_tolerant_misalignment() {
        let (inst, asg, mut sched) = pipeline();
        // s1 is fault-tolerant and sits in slot 1 on both channels
        sched.b.slots[0].id = 99;
        let found = codes(&validate(&inst, &asg, &sched));
        assert!(found.contains(&V6));
    }

    #[test]
    fn image_before_original() {
        let (inst, asg, mut sched) = pipeline();
        let img = *sched.placements.iter().find(|p| p.is_image).unwrap();
        let ch = if img.channel == Target::A { &mut sched.a } else { &mut sched.b };
        let slot = ch.slots.iter_mut().find(|s| s.id == img.slot).unwrap();
        assert_eq!(slot.owner, GATEWAY);
        slot.id = 0;
        let found = codes(&validate(&inst, &asg, &sched));
        assert!(found.contains(&V8));
    }

    #[test]
    fn original_in_gateway_slot() {
        let (inst, asg, mut sched) = pipeline();
        let slot = sched.a.slots.iter_mut().find(|s| s.owner != GATEWAY).unwrap();
        slot.owner = GATEWAY;
        assert!(codes(&validate(&inst, &asg, &sched)).contains(&V3));
    }
}

//! Channel scheduling: packs signals into (slot, cycle, offset) positions on
//! both channels for a fixed ECU-to-channel assignment.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::assignment::{Channel, ChannelAssignment};
use crate::model::{EcuClass, EcuId, Instance, Network, Signal, HYPERPERIOD_CYCLES};

mod grid;
mod reorder;

pub use grid::{ChannelGrid, PlaceRequest, Position};
pub use reorder::reorder_slots;

/// Channel(s) a signal is transmitted on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(rename_all = "SCREAMING_SNAKE_CASE")
)]
pub enum Target {
    A,
    B,
    Both,
}

impl From<Channel> for Target {
    fn from(ch: Channel) -> Self {
        match ch {
            Channel::A => Target::A,
            Channel::B => Target::B,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Placement {
    pub signal: u32,
    pub channel: Target,
    pub base_cycle: u32,
    pub slot: u32,
    pub offset_bytes: u32,
    pub is_image: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct FrameEntry {
    pub signal: u32,
    pub offset_bytes: u32,
    pub is_image: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Frame {
    pub cycle: u32,
    pub entries: Vec<FrameEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Slot {
    pub id: u32,
    pub owner: EcuId,
    /// Non-empty frames, ascending cycle.
    pub frames: Vec<Frame>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ChannelSchedule {
    /// Ascending slot id.
    pub slots: Vec<Slot>,
}

impl ChannelSchedule {
    pub fn max_slot(&self) -> u32 {
        self.slots.last().map_or(0, |s| s.id)
    }

    pub fn slot(&self, id: u32) -> Option<&Slot> {
        self.slots.iter().find(|s| s.id == id)
    }
}

/// Both channel grids. Slot ids are shared between the channels: id `k` on
/// A and on B is the same static slot in time.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Schedule {
    pub slot_payload_bytes: u32,
    pub a: ChannelSchedule,
    pub b: ChannelSchedule,
    pub placements: Vec<Placement>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ScheduleStats {
    pub max_slot_a: u32,
    pub max_slot_b: u32,
    pub gateway_slots: u32,
    pub frames: u32,
}

impl ScheduleStats {
    pub fn max_slot(&self) -> u32 {
        self.max_slot_a.max(self.max_slot_b)
    }
}

impl Schedule {
    pub fn channel(&self, ch: Channel) -> &ChannelSchedule {
        match ch {
            Channel::A => &self.a,
            Channel::B => &self.b,
        }
    }

    pub fn channel_mut(&mut self, ch: Channel) -> &mut ChannelSchedule {
        match ch {
            Channel::A => &mut self.a,
            Channel::B => &mut self.b,
        }
    }

    pub fn max_slot(&self) -> u32 {
        self.a.max_slot().max(self.b.max_slot())
    }

    pub fn stats(&self) -> ScheduleStats {
        let gateway_slots = [&self.a, &self.b]
            .iter()
            .flat_map(|c| &c.slots)
            .filter(|s| s.frames.iter().flat_map(|f| &f.entries).any(|e| e.is_image))
            .count() as u32;
        let frames = [&self.a, &self.b]
            .iter()
            .flat_map(|c| &c.slots)
            .map(|s| s.frames.len() as u32)
            .sum();
        ScheduleStats {
            max_slot_a: self.a.max_slot(),
            max_slot_b: self.b.max_slot(),
            gateway_slots,
            frames,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScheduleError {
    #[error("signal {0}: no cycle satisfies its release date and deadline")]
    InfeasibleWindow(u32),
    #[error("ECU {0} has no channel in the assignment")]
    MissingAssignment(EcuId),
    #[error("ECU {0} is not declared in the instance")]
    UnknownEcu(EcuId),
    #[error("signals must be routed over a gateway but the instance declares none")]
    MissingGateway,
}

/// Positions of `signals` in scheduling order: fault-tolerant signals first,
/// then by decreasing payload, increasing release-to-deadline window and
/// increasing period. Ties keep input order.
pub fn sort_signals(signals: &[Signal]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..signals.len()).collect();
    order.sort_by(|&x, &y| {
        let (s, t) = (&signals[x], &signals[y]);
        t.fault_tolerant
            .cmp(&s.fault_tolerant)
            .then(t.payload_bytes.cmp(&s.payload_bytes))
            .then(s.window_ms().total_cmp(&t.window_ms()))
            .then(s.period_cycles.cmp(&t.period_cycles))
    });
    order
}

/// Channel for a non-fault-tolerant signal. When every endpoint is wired to
/// both channels the channel with less scheduled volume is chosen (A on ties).
pub fn determine_channel(
    signal: &Signal,
    net: &Network,
    asg: &ChannelAssignment,
    loads: [u64; 2],
) -> Result<Target, ScheduleError> {
    let mut needed = [false; 2];
    for ecu in core::iter::once(&signal.transmitter).chain(&signal.receivers) {
        match net.class_of(*ecu).ok_or(ScheduleError::UnknownEcu(*ecu))? {
            EcuClass::OnePort => {
                let ch = asg.channel_of.get(ecu).ok_or(ScheduleError::MissingAssignment(*ecu))?;
                needed[ch.index()] = true;
            }
            EcuClass::Common | EcuClass::Gateway => {}
        }
    }
    Ok(match needed {
        [true, true] => Target::Both,
        [true, false] => Target::A,
        [false, true] => Target::B,
        [false, false] if loads[1] < loads[0] => Target::B,
        [false, false] => Target::A,
    })
}

fn base_cycles(signal: &Signal, m: f64) -> Vec<u32> {
    signal.base_cycles(m).collect()
}

fn request<'a>(signal: &Signal, bases: &'a [u32], owner: EcuId, is_image: bool) -> PlaceRequest<'a> {
    PlaceRequest {
        signal: signal.id,
        payload_bytes: signal.payload_bytes,
        period_cycles: signal.period_cycles,
        base_cycles: bases,
        owner,
        is_image,
    }
}

/// Places `signal` on `grid` at the first fit for `owner`, opening a new
/// slot if required.
pub fn place_to_schedule(
    grid: &mut ChannelGrid,
    signal: &Signal,
    cycle_duration_ms: f64,
    owner: EcuId,
) -> Result<Position, ScheduleError> {
    let bases = base_cycles(signal, cycle_duration_ms);
    grid.place(&request(signal, &bases, owner, false))
        .ok_or(ScheduleError::InfeasibleWindow(signal.id))
}

fn placement(signal: u32, channel: Target, pos: Position, is_image: bool) -> Placement {
    Placement {
        signal,
        channel,
        base_cycle: pos.base_cycle,
        slot: pos.slot,
        offset_bytes: pos.offset_bytes,
        is_image,
    }
}

/// Builds both channel schedules for a fixed assignment.
///
/// Fault-tolerant signals are packed first into a common prefix copied to
/// both channels. A signal spanning both channels from a one-port
/// transmitter is sent on the transmitter's channel and forwarded by the
/// gateway as an image in the same base cycle; a common transmitter sends
/// it on both channels itself. Finally slots are renumbered so that every
/// gateway slot follows the slots of its originals.
pub fn schedule_channels(inst: &Instance, asg: &ChannelAssignment) -> Result<Schedule, ScheduleError> {
    let net = inst.network();
    let m = inst.config.cycle_duration_ms;
    let h = inst.config.slot_payload_bytes;
    let order = sort_signals(&inst.signals);
    let mut placements = Vec::with_capacity(inst.signals.len());

    let (ft, rest): (Vec<usize>, Vec<usize>) = order.iter().partition(|&&i| inst.signals[i].fault_tolerant);

    let mut common = ChannelGrid::new(h);
    for &i in &ft {
        let s = &inst.signals[i];
        let pos = place_to_schedule(&mut common, s, m, s.transmitter)?;
        placements.push(placement(s.id, Target::Both, pos, false));
    }
    let mut grids = [common.clone(), common];

    for &i in &rest {
        let s = &inst.signals[i];
        let loads = [grids[0].volume(), grids[1].volume()];
        match determine_channel(s, &net, asg, loads)? {
            Target::A => {
                let pos = place_to_schedule(&mut grids[0], s, m, s.transmitter)?;
                placements.push(placement(s.id, Target::A, pos, false));
            }
            Target::B => {
                let pos = place_to_schedule(&mut grids[1], s, m, s.transmitter)?;
                placements.push(placement(s.id, Target::B, pos, false));
            }
            Target::Both if net.is_one_port(s.transmitter) => {
                let home = asg.channel_of[&s.transmitter];
                let gateway = net.gateway().ok_or(ScheduleError::MissingGateway)?;
                let pos = place_to_schedule(&mut grids[home.index()], s, m, s.transmitter)?;
                placements.push(placement(s.id, home.into(), pos, false));
                let base = [pos.base_cycle];
                let image = grids[home.other().index()]
                    .place(&request(s, &base, gateway, true))
                    .ok_or(ScheduleError::InfeasibleWindow(s.id))?;
                placements.push(placement(s.id, home.other().into(), image, true));
            }
            Target::Both => {
                for ch in Channel::BOTH {
                    let pos = place_to_schedule(&mut grids[ch.index()], s, m, s.transmitter)?;
                    placements.push(placement(s.id, ch.into(), pos, false));
                }
            }
        }
    }

    let [a, b] = grids;
    let draft = Schedule {
        slot_payload_bytes: h,
        a: ChannelSchedule { slots: a.into_slots() },
        b: ChannelSchedule { slots: b.into_slots() },
        placements,
    };
    Ok(reorder_slots(&draft))
}

/// Packs every signal onto one channel (A) with no gateway, as a single
/// fault-tolerant-mode bus would.
pub fn schedule_single_channel(inst: &Instance) -> Result<Schedule, ScheduleError> {
    let m = inst.config.cycle_duration_ms;
    let h = inst.config.slot_payload_bytes;
    let mut grid = ChannelGrid::new(h);
    let mut placements = Vec::with_capacity(inst.signals.len());
    for i in sort_signals(&inst.signals) {
        let s = &inst.signals[i];
        let pos = place_to_schedule(&mut grid, s, m, s.transmitter)?;
        placements.push(placement(s.id, Target::A, pos, false));
    }
    Ok(Schedule {
        slot_payload_bytes: h,
        a: ChannelSchedule { slots: grid.into_slots() },
        b: ChannelSchedule::default(),
        placements,
    })
}

/// Sum over transmitting ECUs of the rounded-up area bound
/// `ceil(sum(payload * occurrences) / (64 * slot payload))`.
pub fn lbsc(inst: &Instance) -> u64 {
    let mut area: BTreeMap<EcuId, u64> = BTreeMap::new();
    for s in &inst.signals {
        *area.entry(s.transmitter).or_default() += s.volume();
    }
    let capacity = u64::from(HYPERPERIOD_CYCLES) * u64::from(inst.config.slot_payload_bytes);
    area.values().map(|a| a.div_ceil(capacity)).sum()
}

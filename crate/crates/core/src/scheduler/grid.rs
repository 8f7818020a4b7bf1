//! First-fit packing on a single channel: slots x 64 cycles, each cell a
//! frame of `slot_payload_bytes` bytes.

use alloc::vec::Vec;

use super::{Frame, FrameEntry, Slot};
use crate::model::{EcuId, HYPERPERIOD_CYCLES, MAX_SLOT_PAYLOAD_BYTES};

const WORDS: usize = (MAX_SLOT_PAYLOAD_BYTES as usize).div_ceil(64);

/// Occupied bytes of one frame.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct ByteMask([u64; WORDS]);

impl ByteMask {
    fn is_set(&self, byte: u32) -> bool {
        self.0[(byte / 64) as usize] >> (byte % 64) & 1 == 1
    }

    fn set_range(&mut self, offset: u32, len: u32) {
        for b in offset..offset + len {
            self.0[(b / 64) as usize] |= 1 << (b % 64);
        }
    }

    fn union(&mut self, other: &ByteMask) {
        for (w, o) in self.0.iter_mut().zip(other.0) {
            *w |= o;
        }
    }

    /// Lowest offset of `len` free bytes inside `[0, capacity)`.
    fn first_gap(&self, len: u32, capacity: u32) -> Option<u32> {
        let mut run = 0;
        for b in 0..capacity {
            if self.is_set(b) {
                run = 0;
            } else {
                run += 1;
                if run == len {
                    return Some(b + 1 - len);
                }
            }
        }
        None
    }
}

#[derive(Clone, Debug)]
struct Column {
    owner: EcuId,
    masks: Vec<ByteMask>,
    entries: Vec<Vec<FrameEntry>>,
}

impl Column {
    fn new(owner: EcuId) -> Self {
        Self {
            owner,
            masks: alloc::vec![ByteMask::default(); HYPERPERIOD_CYCLES as usize],
            entries: alloc::vec![Vec::new(); HYPERPERIOD_CYCLES as usize],
        }
    }
}

/// What to place. `base_cycles` lists the admissible first-occurrence
/// cycles in the order they should be tried.
#[derive(Clone, Copy, Debug)]
pub struct PlaceRequest<'a> {
    pub signal: u32,
    pub payload_bytes: u32,
    pub period_cycles: u32,
    pub base_cycles: &'a [u32],
    pub owner: EcuId,
    pub is_image: bool,
}

/// Where a request landed; `slot` is a 1-based column index of the grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Position {
    pub slot: u32,
    pub base_cycle: u32,
    pub offset_bytes: u32,
}

#[derive(Clone, Debug)]
pub struct ChannelGrid {
    slot_payload_bytes: u32,
    columns: Vec<Column>,
    volume: u64,
}

fn occurrence_cycles(base: u32, period: u32) -> impl Iterator<Item = usize> {
    (base..=HYPERPERIOD_CYCLES).step_by(period as usize).map(|c| c as usize - 1)
}

impl ChannelGrid {
    pub fn new(slot_payload_bytes: u32) -> Self {
        Self {
            slot_payload_bytes,
            columns: Vec::new(),
            volume: 0,
        }
    }

    pub fn slot_count(&self) -> u32 {
        self.columns.len() as u32
    }

    /// Payload bytes per hyperperiod placed so far.
    pub fn volume(&self) -> u64 {
        self.volume
    }

    pub fn owner(&self, slot: u32) -> Option<EcuId> {
        self.columns.get(slot as usize - 1).map(|c| c.owner)
    }

    fn fits(&self, column: &Column, base: u32, req: &PlaceRequest<'_>) -> Option<u32> {
        let mut combined = ByteMask::default();
        for c in occurrence_cycles(base, req.period_cycles) {
            combined.union(&column.masks[c]);
        }
        combined.first_gap(req.payload_bytes, self.slot_payload_bytes)
    }

    /// First feasible position among the existing slots: slot-major, then
    /// base cycle, then byte offset.
    pub fn find(&self, req: &PlaceRequest<'_>) -> Option<Position> {
        self.columns.iter().enumerate().find_map(|(i, column)| {
            if column.owner != req.owner {
                return None;
            }
            req.base_cycles.iter().find_map(|&base| {
                self.fits(column, base, req).map(|offset_bytes| Position {
                    slot: i as u32 + 1,
                    base_cycle: base,
                    offset_bytes,
                })
            })
        })
    }

    /// Places the request at the first feasible position, opening a new slot
    /// owned by `req.owner` when none exists. `None` when `base_cycles` is empty.
    pub fn place(&mut self, req: &PlaceRequest<'_>) -> Option<Position> {
        let &first_base = req.base_cycles.first()?;
        let pos = self.find(req).unwrap_or_else(|| {
            self.columns.push(Column::new(req.owner));
            Position {
                slot: self.columns.len() as u32,
                base_cycle: first_base,
                offset_bytes: 0,
            }
        });
        let column = &mut self.columns[pos.slot as usize - 1];
        for c in occurrence_cycles(pos.base_cycle, req.period_cycles) {
            column.masks[c].set_range(pos.offset_bytes, req.payload_bytes);
            column.entries[c].push(FrameEntry {
                signal: req.signal,
                offset_bytes: pos.offset_bytes,
                is_image: req.is_image,
            });
        }
        self.volume += u64::from(req.payload_bytes) * u64::from(HYPERPERIOD_CYCLES / req.period_cycles);
        Some(pos)
    }

    /// Slots numbered `1..=slot_count`, empty cells dropped.
    pub fn into_slots(self) -> Vec<Slot> {
        self.columns
            .into_iter()
            .enumerate()
            .map(|(i, column)| Slot {
                id: i as u32 + 1,
                owner: column.owner,
                frames: column
                    .entries
                    .into_iter()
                    .enumerate()
                    .filter(|(_, e)| !e.is_empty())
                    .map(|(c, mut entries)| {
                        entries.sort_by_key(|e| e.offset_bytes);
                        Frame {
                            cycle: c as u32 + 1,
                            entries,
                        }
                    })
                    .collect(),
            })
            .collect()
    }
}

//! Network, ECU and signal types plus the instance validity predicate.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// Number of communication cycles forming the hyperperiod.
pub const HYPERPERIOD_CYCLES: u32 = 64;

/// Admissible signal periods, in cycles.
pub const PERIOD_LADDER: [u32; 7] = [1, 2, 4, 8, 16, 32, 64];

/// Largest slot payload the frame occupancy masks can represent.
pub const MAX_SLOT_PAYLOAD_BYTES: u32 = 256;

const WINDOW_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(transparent))]
pub struct EcuId(pub u32);

impl core::fmt::Display for EcuId {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(rename_all = "SCREAMING_SNAKE_CASE")
)]
pub enum EcuClass {
    /// Wired to exactly one channel; which one is decided by the assignment.
    OnePort,
    /// Wired to both channels.
    Common,
    /// Forwards signal images between the channels; never transmits its own data.
    Gateway,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(deny_unknown_fields)
)]
pub struct Ecu {
    pub id: EcuId,
    pub class: EcuClass,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(deny_unknown_fields)
)]
pub struct NetworkConfig {
    pub cycle_duration_ms: f64,
    pub slot_payload_bytes: u32,
}

impl NetworkConfig {
    pub const fn hyperperiod_cycles(&self) -> u32 {
        HYPERPERIOD_CYCLES
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(deny_unknown_fields)
)]
pub struct Signal {
    pub id: u32,
    pub transmitter: EcuId,
    pub period_cycles: u32,
    pub payload_bytes: u32,
    pub release_ms: f64,
    pub deadline_ms: f64,
    pub fault_tolerant: bool,
    pub receivers: BTreeSet<EcuId>,
}

impl Signal {
    /// Occurrences of the signal within one hyperperiod.
    pub fn occurrences(&self) -> u32 {
        HYPERPERIOD_CYCLES / self.period_cycles
    }

    /// Payload bytes per hyperperiod.
    pub fn volume(&self) -> u64 {
        u64::from(self.payload_bytes) * u64::from(self.occurrences())
    }

    /// Whether a first occurrence in the 1-based `cycle` honours the release
    /// date and the deadline.
    pub fn admits_base_cycle(&self, cycle: u32, cycle_duration_ms: f64) -> bool {
        if cycle == 0 || cycle > self.period_cycles {
            return false;
        }
        let start = f64::from(cycle - 1) * cycle_duration_ms;
        let end = f64::from(cycle) * cycle_duration_ms;
        start + WINDOW_EPS >= self.release_ms && end <= self.deadline_ms + WINDOW_EPS
    }

    /// Admissible base cycles in increasing order.
    pub fn base_cycles(&self, cycle_duration_ms: f64) -> impl Iterator<Item = u32> + '_ {
        (1..=self.period_cycles).filter(move |&c| self.admits_base_cycle(c, cycle_duration_ms))
    }

    pub fn window_ms(&self) -> f64 {
        self.deadline_ms - self.release_ms
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(deny_unknown_fields)
)]
pub struct Instance {
    #[cfg_attr(feature = "serde", serde(default))]
    pub name: String,
    pub config: NetworkConfig,
    pub ecus: Vec<Ecu>,
    pub signals: Vec<Signal>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("slot payload must be between 1 and {MAX_SLOT_PAYLOAD_BYTES} bytes, got {0}")]
    SlotPayload(u32),
    #[error("cycle duration must be positive, got {0}")]
    CycleDuration(f64),
    #[error("ECU {0} is declared more than once")]
    DuplicateEcu(EcuId),
    #[error("expected exactly one gateway ECU, found {0}")]
    GatewayCount(usize),
    #[error("at least two common ECUs are required, found {0}")]
    TooFewCommon(usize),
    #[error("signal id {0} is declared more than once")]
    DuplicateSignal(u32),
    #[error("signal {signal}: unknown ECU {ecu}")]
    UnknownEcu { signal: u32, ecu: EcuId },
    #[error("signal {0}: the gateway cannot transmit signals")]
    GatewayTransmitter(u32),
    #[error("signal {0}: fault-tolerant signals need a common transmitter")]
    FaultTolerantOnePort(u32),
    #[error("signal {signal}: period {period} cycles is not a power of two in 1..=64")]
    Period { signal: u32, period: u32 },
    #[error("signal {signal}: payload {payload} bytes outside 1..={slot}")]
    Payload { signal: u32, payload: u32, slot: u32 },
    #[error("signal {0}: release date must precede the deadline")]
    Window(u32),
    #[error("signal {0}: no cycle within the period satisfies the release date and deadline")]
    EmptyWindow(u32),
    #[error("signal {0}: has no receivers")]
    NoReceivers(u32),
    #[error("signal {0}: transmitter listed as a receiver")]
    SelfReceiver(u32),
}

/// ECU class lookup for one instance.
#[derive(Clone, Debug, Default)]
pub struct Network {
    classes: BTreeMap<EcuId, EcuClass>,
    gateway: Option<EcuId>,
}

impl Network {
    pub fn new(ecus: &[Ecu]) -> Self {
        let classes: BTreeMap<_, _> = ecus.iter().map(|e| (e.id, e.class)).collect();
        let gateway = ecus
            .iter()
            .find(|e| e.class == EcuClass::Gateway)
            .map(|e| e.id);
        Self { classes, gateway }
    }

    pub fn class_of(&self, id: EcuId) -> Option<EcuClass> {
        self.classes.get(&id).copied()
    }

    pub fn gateway(&self) -> Option<EcuId> {
        self.gateway
    }

    pub fn is_one_port(&self, id: EcuId) -> bool {
        self.class_of(id) == Some(EcuClass::OnePort)
    }

    pub fn one_port_ecus(&self) -> impl Iterator<Item = EcuId> + '_ {
        self.classes
            .iter()
            .filter(|(_, c)| **c == EcuClass::OnePort)
            .map(|(id, _)| *id)
    }
}

impl Instance {
    pub fn network(&self) -> Network {
        Network::new(&self.ecus)
    }

    pub fn total_payload_bytes(&self) -> u64 {
        self.signals.iter().map(|s| u64::from(s.payload_bytes)).sum()
    }

    pub fn signal_position(&self, id: u32) -> Option<usize> {
        self.signals.iter().position(|s| s.id == id)
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    /// Checks every invariant and reports the first violation found.
    pub fn validate(&self) -> Result<(), ModelError> {
        let h = self.config.slot_payload_bytes;
        if h == 0 || h > MAX_SLOT_PAYLOAD_BYTES {
            return Err(ModelError::SlotPayload(h));
        }
        let m = self.config.cycle_duration_ms;
        if !(m > 0.0 && m.is_finite()) {
            return Err(ModelError::CycleDuration(m));
        }

        let mut seen = BTreeSet::new();
        for ecu in &self.ecus {
            if !seen.insert(ecu.id) {
                return Err(ModelError::DuplicateEcu(ecu.id));
            }
        }
        let count = |class| self.ecus.iter().filter(|e| e.class == class).count();
        let gateways = count(EcuClass::Gateway);
        if gateways != 1 {
            return Err(ModelError::GatewayCount(gateways));
        }
        let common = count(EcuClass::Common);
        if common < 2 {
            return Err(ModelError::TooFewCommon(common));
        }

        let net = self.network();
        let mut ids = BTreeSet::new();
        for s in &self.signals {
            if !ids.insert(s.id) {
                return Err(ModelError::DuplicateSignal(s.id));
            }
            let tx_class = net.class_of(s.transmitter).ok_or(ModelError::UnknownEcu {
                signal: s.id,
                ecu: s.transmitter,
            })?;
            if tx_class == EcuClass::Gateway {
                return Err(ModelError::GatewayTransmitter(s.id));
            }
            if s.fault_tolerant && tx_class != EcuClass::Common {
                return Err(ModelError::FaultTolerantOnePort(s.id));
            }
            if !PERIOD_LADDER.contains(&s.period_cycles) {
                return Err(ModelError::Period {
                    signal: s.id,
                    period: s.period_cycles,
                });
            }
            if s.payload_bytes == 0 || s.payload_bytes > h {
                return Err(ModelError::Payload {
                    signal: s.id,
                    payload: s.payload_bytes,
                    slot: h,
                });
            }
            if !(s.release_ms >= 0.0 && s.release_ms < s.deadline_ms) {
                return Err(ModelError::Window(s.id));
            }
            if s.base_cycles(m).next().is_none() {
                return Err(ModelError::EmptyWindow(s.id));
            }
            if s.receivers.is_empty() {
                return Err(ModelError::NoReceivers(s.id));
            }
            if s.receivers.contains(&s.transmitter) {
                return Err(ModelError::SelfReceiver(s.id));
            }
            if let Some(&ecu) = s.receivers.iter().find(|r| net.class_of(**r).is_none()) {
                return Err(ModelError::UnknownEcu { signal: s.id, ecu });
            }
        }
        Ok(())
    }
}

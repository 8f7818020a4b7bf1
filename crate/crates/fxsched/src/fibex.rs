//! Simplified FIBEX-style XML export of a schedule.
//!
//! Layout: one `schedule` element per channel holding `static-slot`
//! elements; each slot holds one `frame` per base cycle, and each frame the
//! `signal-instance` elements starting in that cycle. Offsets are in bits.
//! `repetition` is the shortest period in the frame.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::path::Path;

use fxsched_core::model::{EcuClass, HYPERPERIOD_CYCLES};
use fxsched_core::scheduler::{Placement, Schedule, Target};
use fxsched_core::{Channel, Instance};
use quick_xml::escape::escape;

use crate::io::{write_text, IoError};

fn class_name(class: EcuClass) -> &'static str {
    match class {
        EcuClass::OnePort => "ONE_PORT",
        EcuClass::Common => "COMMON",
        EcuClass::Gateway => "GATEWAY",
    }
}

fn on_channel(p: &Placement, ch: Channel) -> bool {
    matches!(
        (p.channel, ch),
        (Target::Both, _) | (Target::A, Channel::A) | (Target::B, Channel::B)
    )
}

pub fn to_fibex(inst: &Instance, sched: &Schedule) -> String {
    let periods: BTreeMap<u32, u32> = inst.signals.iter().map(|s| (s.id, s.period_cycles)).collect();
    let mut x = String::new();
    // writing into a String cannot fail
    let _ = writeln!(x, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(x, r#"<fibex name="{}" format="simplified">"#, escape(inst.name.as_str()));
    let _ = writeln!(
        x,
        r#"  <cluster cycle-duration-ms="{}" slot-payload-bytes="{}" cycles="{}">"#,
        inst.config.cycle_duration_ms, inst.config.slot_payload_bytes, HYPERPERIOD_CYCLES
    );
    let _ = writeln!(x, "    <channels>");
    for ch in Channel::BOTH {
        let _ = writeln!(x, r#"      <channel id="{ch}"/>"#);
    }
    let _ = writeln!(x, "    </channels>");

    let mut ecus = inst.ecus.clone();
    ecus.sort_by_key(|e| e.id);
    let _ = writeln!(x, "    <ecus>");
    for e in &ecus {
        let _ = writeln!(x, r#"      <ecu id="{}" class="{}"/>"#, e.id, class_name(e.class));
    }
    let _ = writeln!(x, "    </ecus>");

    let mut signals = inst.signals.clone();
    signals.sort_by_key(|s| s.id);
    let _ = writeln!(x, "    <signals>");
    for s in &signals {
        let receivers: Vec<String> = s.receivers.iter().map(|r| r.to_string()).collect();
        let _ = writeln!(
            x,
            r#"      <signal id="{}" transmitter="{}" receivers="{}" period-cycles="{}" bit-length="{}" fault-tolerant="{}"/>"#,
            s.id,
            s.transmitter,
            receivers.join(" "),
            s.period_cycles,
            s.payload_bytes * 8,
            s.fault_tolerant
        );
    }
    let _ = writeln!(x, "    </signals>");

    for ch in Channel::BOTH {
        let _ = writeln!(x, r#"    <schedule channel="{ch}">"#);
        for slot in &sched.channel(ch).slots {
            let _ = writeln!(x, r#"      <static-slot id="{}" owner="{}">"#, slot.id, slot.owner);
            let mut frames: BTreeMap<u32, Vec<&Placement>> = BTreeMap::new();
            for p in sched.placements.iter().filter(|p| p.slot == slot.id && on_channel(p, ch)) {
                frames.entry(p.base_cycle).or_default().push(p);
            }
            for (base, mut entries) in frames {
                entries.sort_by_key(|p| (p.offset_bytes, p.signal));
                let repetition = entries.iter().filter_map(|p| periods.get(&p.signal)).min().copied().unwrap_or(0);
                let _ = writeln!(x, r#"        <frame base-cycle="{base}" repetition="{repetition}">"#);
                for p in entries {
                    let _ = writeln!(
                        x,
                        r#"          <signal-instance signal="{}" bit-offset="{}" image="{}"/>"#,
                        p.signal,
                        p.offset_bytes * 8,
                        p.is_image
                    );
                }
                let _ = writeln!(x, "        </frame>");
            }
            let _ = writeln!(x, "      </static-slot>");
        }
        let _ = writeln!(x, "    </schedule>");
    }
    let _ = writeln!(x, "  </cluster>");
    let _ = writeln!(x, "</fibex>");
    x
}

pub fn write_fibex(inst: &Instance, sched: &Schedule, path: &Path) -> Result<(), IoError> {
    write_text(path, &to_fibex(inst, sched))
}

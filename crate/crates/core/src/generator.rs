//! Synthetic benchmark instances and the two-partition reduction.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::hypergraph::{Hyperedge, Hypergraph};
use crate::model::{Ecu, EcuClass, EcuId, Instance, NetworkConfig, Signal, MAX_SLOT_PAYLOAD_BYTES, PERIOD_LADDER};

/// Id of the generated gateway; other ECUs are numbered from 1.
pub const GENERATED_GATEWAY: EcuId = EcuId(0);

/// Receiver-count weights (1..=8 receivers) of the low- and high-diversity
/// ends of the SAE-like family.
pub const SAE1_RECEIVERS: [f64; 8] = [0.75, 0.12, 0.06, 0.03, 0.02, 0.01, 0.005, 0.005];
pub const SAE7_RECEIVERS: [f64; 8] = [0.05, 0.08, 0.10, 0.25, 0.20, 0.15, 0.10, 0.07];

/// Distributions of a synthetic instance family. Weight vectors need not be
/// normalised.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(default, deny_unknown_fields)
)]
pub struct GeneratorProfile {
    pub name: String,
    /// All ECUs including the gateway.
    pub ecu_count: u32,
    /// Share of the non-gateway ECUs wired to both channels; at least two
    /// are always common.
    pub common_ecu_fraction: f64,
    pub signal_count: u32,
    pub cycle_duration_ms: f64,
    pub slot_payload_bytes: u32,
    /// Candidate periods in cycles with their weights.
    pub periods: Vec<u32>,
    pub period_weights: Vec<f64>,
    /// `payload_weights[i]` weighs a payload of `i + 1` bytes.
    pub payload_weights: Vec<f64>,
    /// `receiver_weights[i]` weighs `i + 1` receivers.
    pub receiver_weights: Vec<f64>,
    /// Zipf exponent over transmitters; 0 draws them uniformly.
    pub transmitter_skew: f64,
    /// Probability that a signal sent by a common ECU is fault-tolerant.
    pub fault_tolerant_fraction: f64,
    /// Share of signals whose deadline is half their period.
    pub tight_deadline_fraction: f64,
}

impl Default for GeneratorProfile {
    fn default() -> Self {
        Self::sae(1)
    }
}

fn default_period_weights() -> (Vec<u32>, Vec<f64>) {
    let rest = 0.35 / (PERIOD_LADDER.len() - 1) as f64;
    let weights = PERIOD_LADDER.iter().map(|&p| if p == 8 { 0.65 } else { rest }).collect();
    (PERIOD_LADDER.to_vec(), weights)
}

impl GeneratorProfile {
    /// SAE-like family member `k` in `1..=7`; receiver diversity grows with `k`.
    pub fn sae(k: u32) -> Self {
        let t = f64::from(k.clamp(1, 7) - 1) / 6.0;
        let receiver_weights = SAE1_RECEIVERS
            .iter()
            .zip(SAE7_RECEIVERS)
            .map(|(lo, hi)| (1.0 - t) * lo + t * hi)
            .collect();
        let (periods, period_weights) = default_period_weights();
        Self {
            name: alloc::format!("sae{}", k.clamp(1, 7)),
            ecu_count: 12,
            common_ecu_fraction: 0.25,
            signal_count: 500,
            cycle_duration_ms: 5.0,
            slot_payload_bytes: 16,
            periods,
            period_weights,
            payload_weights: alloc::vec![0.4, 0.3, 0.1, 0.2],
            receiver_weights,
            transmitter_skew: 0.0,
            fault_tolerant_fraction: 0.0,
            tight_deadline_fraction: 0.0,
        }
    }

    /// Industrial-scale family: 24 ECUs, 5043 signals, at most two receivers.
    pub fn real_case() -> Self {
        Self {
            name: String::from("realcase"),
            ecu_count: 24,
            signal_count: 5043,
            receiver_weights: alloc::vec![0.6, 0.4],
            transmitter_skew: 1.5,
            ..Self::sae(1)
        }
    }

    pub fn validate(&self) -> Result<(), GeneratorError> {
        for (field, value) in [
            ("common_ecu_fraction", self.common_ecu_fraction),
            ("fault_tolerant_fraction", self.fault_tolerant_fraction),
            ("tight_deadline_fraction", self.tight_deadline_fraction),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(GeneratorError::Fraction { field, value });
            }
        }
        if self.ecu_count < 3 {
            return Err(GeneratorError::TooFewEcus(self.ecu_count));
        }
        if self.slot_payload_bytes == 0 || self.slot_payload_bytes > MAX_SLOT_PAYLOAD_BYTES {
            return Err(GeneratorError::SlotPayload(self.slot_payload_bytes));
        }
        if !(self.cycle_duration_ms > 0.0 && self.cycle_duration_ms.is_finite()) {
            return Err(GeneratorError::CycleDuration);
        }
        if let Some(&p) = self.periods.iter().find(|p| !PERIOD_LADDER.contains(p)) {
            return Err(GeneratorError::Period(p));
        }
        if self.periods.len() != self.period_weights.len() {
            return Err(GeneratorError::Weights("period_weights"));
        }
        if self.payload_weights.len() > self.slot_payload_bytes as usize {
            return Err(GeneratorError::PayloadExceedsSlot {
                payload: self.payload_weights.len() as u32,
                slot: self.slot_payload_bytes,
            });
        }
        for (field, w) in [
            ("period_weights", &self.period_weights),
            ("payload_weights", &self.payload_weights),
            ("receiver_weights", &self.receiver_weights),
        ] {
            if w.iter().any(|x| !(*x >= 0.0 && x.is_finite())) || !w.iter().any(|x| *x > 0.0) {
                return Err(GeneratorError::Weights(field));
            }
        }
        if !(self.transmitter_skew >= 0.0 && self.transmitter_skew.is_finite()) {
            return Err(GeneratorError::Skew(self.transmitter_skew));
        }
        Ok(())
    }

    /// Number of common ECUs the profile yields.
    pub fn common_count(&self) -> u32 {
        let others = self.ecu_count - 1;
        let n = libm::round(self.common_ecu_fraction * f64::from(others)) as u32;
        n.clamp(2, others)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeneratorError {
    #[error("{field} must lie in [0, 1], got {value}")]
    Fraction { field: &'static str, value: f64 },
    #[error("at least 3 ECUs are needed (gateway and two common), got {0}")]
    TooFewEcus(u32),
    #[error("slot payload must be between 1 and {MAX_SLOT_PAYLOAD_BYTES} bytes, got {0}")]
    SlotPayload(u32),
    #[error("cycle duration must be positive")]
    CycleDuration,
    #[error("period {0} is not a power of two between 1 and 64 cycles")]
    Period(u32),
    #[error("signal payload of {payload} bytes exceeds the slot payload of {slot} bytes")]
    PayloadExceedsSlot { payload: u32, slot: u32 },
    #[error("{0} must be finite, non-negative and not all zero")]
    Weights(&'static str),
    #[error("transmitter skew must be finite and non-negative, got {0}")]
    Skew(f64),
    #[error("the multiset is empty")]
    EmptyMultiset,
    #[error("multiset items must be positive")]
    NonPositiveItem,
}

fn weighted(weights: &[f64]) -> WeightedIndex<f64> {
    // checked by GeneratorProfile::validate
    WeightedIndex::new(weights).expect("validated weights")
}

/// Draws an instance; the same `(profile, seed)` always gives the same
/// instance.
pub fn generate(profile: &GeneratorProfile, seed: u64) -> Result<Instance, GeneratorError> {
    profile.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = profile.cycle_duration_ms;

    let mut ids: Vec<u32> = (1..profile.ecu_count).collect();
    ids.shuffle(&mut rng);
    let common: BTreeSet<u32> = ids[..profile.common_count() as usize].iter().copied().collect();
    let mut ecus = alloc::vec![Ecu {
        id: GENERATED_GATEWAY,
        class: EcuClass::Gateway,
    }];
    ecus.extend((1..profile.ecu_count).map(|i| Ecu {
        id: EcuId(i),
        class: if common.contains(&i) { EcuClass::Common } else { EcuClass::OnePort },
    }));

    let tx_weights: Vec<f64> = (1..profile.ecu_count)
        .map(|rank| libm::pow(f64::from(rank), -profile.transmitter_skew))
        .collect();
    let tx_dist = weighted(&tx_weights);
    let period_dist = weighted(&profile.period_weights);
    let payload_dist = weighted(&profile.payload_weights);
    let receiver_dist = weighted(&profile.receiver_weights);

    let mut signals = Vec::with_capacity(profile.signal_count as usize);
    for id in 1..=profile.signal_count {
        let transmitter = ids[tx_dist.sample(&mut rng)];
        let period_cycles = profile.periods[period_dist.sample(&mut rng)];
        let payload_bytes = payload_dist.sample(&mut rng) as u32 + 1;
        let mut candidates: Vec<u32> = (1..profile.ecu_count).filter(|&e| e != transmitter).collect();
        let wanted = (receiver_dist.sample(&mut rng) + 1).min(candidates.len());
        candidates.shuffle(&mut rng);
        let receivers = candidates[..wanted].iter().map(|&e| EcuId(e)).collect();
        let fault_tolerant = common.contains(&transmitter) && rng.gen_bool(profile.fault_tolerant_fraction);
        let tight = rng.gen_bool(profile.tight_deadline_fraction);
        let window_cycles = if tight { period_cycles.div_ceil(2) } else { period_cycles };
        signals.push(Signal {
            id,
            transmitter: EcuId(transmitter),
            period_cycles,
            payload_bytes,
            release_ms: 0.0,
            deadline_ms: f64::from(window_cycles) * m,
            fault_tolerant,
            receivers,
        });
    }

    Ok(Instance {
        name: alloc::format!("{}-{}", profile.name, seed),
        config: NetworkConfig {
            cycle_duration_ms: m,
            slot_payload_bytes: profile.slot_payload_bytes,
        },
        ecus,
        signals,
    })
}

/// Grid over common-ECU fraction (outer) and fault-tolerant fraction
/// (inner), both from 0 to 1 in steps of `step`.
pub fn sweep_profiles(base: &GeneratorProfile, step: f64) -> Vec<GeneratorProfile> {
    let n = libm::round(1.0 / step).max(1.0) as u32;
    let values: Vec<f64> = (0..=n).map(|i| f64::from(i) / f64::from(n)).collect();
    let mut out = Vec::with_capacity(values.len() * values.len());
    for &common in &values {
        for &ft in &values {
            out.push(GeneratorProfile {
                name: alloc::format!("{}-c{:.2}-ft{:.2}", base.name, common, ft),
                common_ecu_fraction: common,
                fault_tolerant_fraction: ft,
                ..base.clone()
            });
        }
    }
    out
}

/// One one-port ECU with a self-loop of the item's weight per item; ECU ids
/// run from 1.
pub fn reduce_partition(items: &[u64]) -> Result<Hypergraph, GeneratorError> {
    if items.is_empty() {
        return Err(GeneratorError::EmptyMultiset);
    }
    if items.contains(&0) {
        return Err(GeneratorError::NonPositiveItem);
    }
    let ecus: Vec<EcuId> = (1..=items.len() as u32).map(EcuId).collect();
    let edges = ecus
        .iter()
        .zip(items)
        .map(|(&e, &w)| Hyperedge {
            endpoints: alloc::vec![e],
            free_endpoints: alloc::vec![e],
            weight_bytes: w,
            member_signals: Vec::new(),
        })
        .collect();
    Ok(Hypergraph {
        edges,
        free_ecus: ecus,
        ft_weight_bytes: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assignment::{solve_exact, CriterionParams};

    #[test]
    fn realcase_counts() {
        let inst = generate(&GeneratorProfile::real_case(), 1).unwrap();
        assert_eq!(inst.ecus.len(), 24);
        assert_eq!(inst.signals.len(), 5043);
        assert!(inst.signals.iter().all(|s| s.receivers.len() <= 2));
        inst.validate().unwrap();
    }

    #[test]
    fn zero_signals() {
        let profile = GeneratorProfile {
            signal_count: 0,
            ..GeneratorProfile::sae(3)
        };
        let inst = generate(&profile, 9).unwrap();
        assert!(inst.signals.is_empty());
        inst.validate().unwrap();
    }

    #[test]
    fn sae7_single_receiver_share() {
        let profile = GeneratorProfile {
            signal_count: 1000,
            ..GeneratorProfile::sae(7)
        };
        let inst = generate(&profile, 4).unwrap();
        let single = inst.signals.iter().filter(|s| s.receivers.len() == 1).count();
        let share = single as f64 / 1000.0;
        assert!((share - 0.05).abs() <= 0.03, "share {share}");
        let four_plus = inst.signals.iter().filter(|s| s.receivers.len() >= 4).count();
        assert!(four_plus as f64 / 1000.0 >= 0.72);
    }

    #[test]
    fn sae1_is_mostly_unicast() {
        let inst = generate(&GeneratorProfile::sae(1), 2).unwrap();
        let single = inst.signals.iter().filter(|s| s.receivers.len() == 1).count();
        assert!((single as f64 / 500.0 - 0.75).abs() <= 0.06);
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let p = GeneratorProfile::sae(4);
        assert_eq!(generate(&p, 11).unwrap(), generate(&p, 11).unwrap());
        assert_ne!(generate(&p, 11).unwrap().signals, generate(&p, 12).unwrap().signals);
    }

    #[test]
    fn fault_tolerance_only_from_common_ecus() {
        let profile = GeneratorProfile {
            fault_tolerant_fraction: 1.0,
            common_ecu_fraction: 0.5,
            ..GeneratorProfile::sae(2)
        };
        let inst = generate(&profile, 5).unwrap();
        let net = inst.network();
        for s in &inst.signals {
            assert_eq!(s.fault_tolerant, net.class_of(s.transmitter) == Some(EcuClass::Common));
        }
        inst.validate().unwrap();
    }

    #[test]
    fn dominant_period() {
        let inst = generate(&GeneratorProfile::sae(1), 3).unwrap();
        let at_8 = inst.signals.iter().filter(|s| s.period_cycles == 8).count();
        assert!((at_8 as f64 / 500.0 - 0.65).abs() <= 0.06);
        assert!(inst.signals.iter().all(|s| s.payload_bytes <= 4));
    }

    #[test]
    fn invalid_profiles() {
        let bad = GeneratorProfile {
            common_ecu_fraction: 1.5,
            ..GeneratorProfile::default()
        };
        assert!(matches!(generate(&bad, 0), Err(GeneratorError::Fraction { .. })));
        let bad = GeneratorProfile {
            slot_payload_bytes: 2,
            ..GeneratorProfile::default()
        };
        assert_eq!(
            generate(&bad, 0),
            Err(GeneratorError::PayloadExceedsSlot { payload: 4, slot: 2 })
        );
        let bad = GeneratorProfile {
            periods: alloc::vec![3],
            period_weights: alloc::vec![1.0],
            ..GeneratorProfile::default()
        };
        assert_eq!(generate(&bad, 0), Err(GeneratorError::Period(3)));
    }

    #[test]
    fn sweep_grid_sizes() {
        let base = GeneratorProfile::sae(1);
        assert_eq!(sweep_profiles(&base, 0.05).len(), 441);
        let coarse = sweep_profiles(&base, 0.5);
        assert_eq!(coarse.len(), 9);
        assert_eq!(coarse[5].common_ecu_fraction, 0.5);
        assert_eq!(coarse[5].fault_tolerant_fraction, 1.0);
    }

    #[test]
    fn sweep_grid_generates_valid_instances() {
        for p in sweep_profiles(&GeneratorProfile { signal_count: 40, ..GeneratorProfile::sae(3) }, 0.25) {
            generate(&p, 1).unwrap().validate().unwrap();
        }
    }

    fn subset_sum_half(items: &[u64]) -> bool {
        let total: u64 = items.iter().sum();
        if total % 2 == 1 {
            return false;
        }
        let mut reach = alloc::vec![false; total as usize / 2 + 1];
        reach[0] = true;
        for &x in items {
            for s in (x as usize..reach.len()).rev() {
                reach[s] |= reach[s - x as usize];
            }
        }
        reach[total as usize / 2]
    }

    #[test]
    fn partition_examples() {
        let params = CriterionParams::new(0.0, 1.0).unwrap();
        let items = [3, 1, 1, 2, 2, 1];
        let hg = reduce_partition(&items).unwrap();
        assert_eq!(hg.edges.len(), 6);
        assert!(subset_sum_half(&items));
        assert_eq!(solve_exact(&hg, &params).criterion, 5.0);
        assert_eq!(solve_exact(&reduce_partition(&[1]).unwrap(), &params).criterion, 1.0);
        assert_eq!(solve_exact(&reduce_partition(&[2, 2]).unwrap(), &params).criterion, 2.0);
        assert_eq!(reduce_partition(&[]), Err(GeneratorError::EmptyMultiset));
        assert_eq!(reduce_partition(&[1, 0]), Err(GeneratorError::NonPositiveItem));
    }
}

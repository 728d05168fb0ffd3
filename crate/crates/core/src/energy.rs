//! CPU and radio energy accounting.

use crate::analysis::{FitCoefficients, NcCoefficients};
use crate::error::{invalid, Result};
use crate::ops::OpCount;
use crate::repr::CompressedRepresentation;
use crate::spectral::Selection;

/// Cycle cost of each counted operation plus the energy of one cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct CpuProfile {
    pub name: String,
    pub cycles_add: u64,
    pub cycles_sub: u64,
    pub cycles_mul: u64,
    pub cycles_div: u64,
    pub cycles_cmp: u64,
    /// Joules per clock cycle.
    pub energy_per_cycle: f64,
}

impl CpuProfile {
    pub fn new(
        name: impl Into<String>,
        cycles: [u64; 5],
        energy_per_cycle: f64,
    ) -> Result<Self> {
        if cycles.iter().any(|&c| c == 0) {
            return Err(invalid("cycle counts must be positive"));
        }
        if !(energy_per_cycle.is_finite() && energy_per_cycle > 0.0) {
            return Err(invalid(format!("energy per cycle must be positive, got {energy_per_cycle}")));
        }
        let [cycles_add, cycles_sub, cycles_mul, cycles_div, cycles_cmp] = cycles;
        Ok(Self {
            name: name.into(),
            cycles_add,
            cycles_sub,
            cycles_mul,
            cycles_div,
            cycles_cmp,
            energy_per_cycle,
        })
    }

    /// TI MSP430 with its software floating point library.
    pub fn msp430() -> Self {
        Self {
            name: "msp430".into(),
            cycles_add: 184,
            cycles_sub: 177,
            cycles_mul: 395,
            cycles_div: 405,
            cycles_cmp: 37,
            energy_per_cycle: 0.726e-9,
        }
    }

    pub fn cycles(&self, ops: &OpCount) -> u64 {
        ops.add * self.cycles_add
            + ops.sub * self.cycles_sub
            + ops.mul * self.cycles_mul
            + ops.div * self.cycles_div
            + ops.cmp * self.cycles_cmp
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadioProfile {
    pub name: String,
    /// Joules per transmitted bit.
    pub tx_energy_per_bit: f64,
    /// Joules per received bit.
    pub rx_energy_per_bit: f64,
    /// Bits per second; informational only.
    pub data_rate: f64,
}

impl RadioProfile {
    /// `rx_energy_per_bit` of `None` means "same as TX".
    pub fn new(name: impl Into<String>, tx_energy_per_bit: f64, rx_energy_per_bit: Option<f64>, data_rate: f64) -> Result<Self> {
        let rx = rx_energy_per_bit.unwrap_or(tx_energy_per_bit);
        for (what, v) in [("tx", tx_energy_per_bit), ("rx", rx)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(format!("{what} energy per bit must be finite and >= 0, got {v}")));
            }
        }
        Ok(Self {
            name: name.into(),
            tx_energy_per_bit,
            rx_energy_per_bit: rx,
            data_rate,
        })
    }

    /// IEEE 802.15.4 transceiver used on terrestrial sensor nodes.
    pub fn cc2420() -> Self {
        Self {
            name: "cc2420".into(),
            tx_energy_per_bit: 230e-9,
            rx_energy_per_bit: 230e-9,
            data_rate: 250_000.0,
        }
    }

    /// Acoustic underwater modem.
    pub fn aquamodem() -> Self {
        Self {
            name: "aquamodem".into(),
            tx_energy_per_bit: 10e-3,
            rx_energy_per_bit: 10e-3,
            data_rate: 300.0,
        }
    }

    pub fn per_bit(&self, direction: Direction) -> f64 {
        match direction {
            Direction::Tx => self.tx_energy_per_bit,
            Direction::Rx => self.rx_energy_per_bit,
        }
    }
}

/// Looks up a built-in CPU profile by name.
pub fn builtin_cpu(name: &str) -> Option<CpuProfile> {
    match name {
        "msp430" => Some(CpuProfile::msp430()),
        _ => None,
    }
}

/// Looks up a built-in radio profile by name.
pub fn builtin_radio(name: &str) -> Option<RadioProfile> {
    match name {
        "cc2420" => Some(RadioProfile::cc2420()),
        "aquamodem" => Some(RadioProfile::aquamodem()),
        _ => None,
    }
}

/// Cycles the CPU can spend for the energy of transmitting one bit.
pub fn energy_ratio(cpu: &CpuProfile, radio: &RadioProfile) -> f64 {
    radio.tx_energy_per_bit / cpu.energy_per_cycle
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Tx,
    Rx,
}

/// Bit widths of transmitted values and indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EncodingPolicy {
    pub bits_per_value: u64,
    pub bits_per_index: u64,
}

impl Default for EncodingPolicy {
    fn default() -> Self {
        Self {
            bits_per_value: 16,
            bits_per_index: 16,
        }
    }
}

impl EncodingPolicy {
    pub fn new(bits_per_value: u64, bits_per_index: u64) -> Result<Self> {
        if bits_per_value == 0 || bits_per_index == 0 {
            return Err(invalid("bit widths must be positive"));
        }
        Ok(Self {
            bits_per_value,
            bits_per_index,
        })
    }

    /// Size of `samples` uncompressed values.
    pub fn raw_bits(&self, samples: usize) -> u64 {
        samples as u64 * self.bits_per_value
    }
}

/// Size of a representation on the air.
///
/// | representation | bits |
/// |---|---|
/// | raw | value per sample |
/// | chained segments | (value + index) per vertex |
/// | disjoint segments | 2 (value + index) per segment |
/// | polynomial piece | value per coefficient + index |
/// | AR record | value per coefficient and seed sample + index |
/// | spectral window, greedy | (value + index) per pick |
/// | spectral window, low-pass | value per pick + index (the count) |
pub fn payload_bits(rep: &CompressedRepresentation, policy: &EncodingPolicy) -> u64 {
    let v = policy.bits_per_value;
    let i = policy.bits_per_index;
    match rep {
        CompressedRepresentation::Raw { samples } => *samples as u64 * v,
        CompressedRepresentation::Segments(seg) => match seg.mode() {
            crate::pla::SharingMode::Chained => seg.vertices().len() as u64 * (v + i),
            crate::pla::SharingMode::Disjoint => seg.segment_count() as u64 * 2 * (v + i),
        },
        CompressedRepresentation::Polynomials(pieces) => pieces
            .iter()
            .map(|p| p.coefficients.len() as u64 * v + i)
            .sum(),
        CompressedRepresentation::ArModels(records) => records
            .iter()
            .map(|r| (r.coefficients.len() + r.initial_samples.len()) as u64 * v + i)
            .sum(),
        CompressedRepresentation::Spectral(windows) => windows
            .iter()
            .map(|w| match w.selection {
                Selection::Greedy => w.picks.len() as u64 * (v + i),
                Selection::LowPass => w.picks.len() as u64 * v + i,
            })
            .sum(),
    }
}

/// Energy the CPU spends executing `ops`.
pub fn compression_energy(ops: &OpCount, cpu: &CpuProfile) -> f64 {
    cpu.cycles(ops) as f64 * cpu.energy_per_cycle
}

pub fn transmission_energy(bits: u64, radio: &RadioProfile, direction: Direction) -> f64 {
    bits as f64 * radio.per_bit(direction)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    pub compression_energy: f64,
    pub tx_energy_compressed: f64,
    pub tx_energy_raw: f64,
    pub total: f64,
    /// `tx_energy_raw / total`; infinite when nothing at all is spent.
    pub gain: f64,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else if num > 0.0 {
        f64::INFINITY
    } else {
        1.0
    }
}

pub fn single_hop_report(
    raw_bits: u64,
    rep: &CompressedRepresentation,
    ops: &OpCount,
    cpu: &CpuProfile,
    radio: &RadioProfile,
    policy: &EncodingPolicy,
) -> EnergyReport {
    let compression = compression_energy(ops, cpu);
    let tx_compressed = transmission_energy(payload_bits(rep, policy), radio, Direction::Tx);
    let tx_raw = transmission_energy(raw_bits, radio, Direction::Tx);
    let total = compression + tx_compressed;
    EnergyReport {
        compression_energy: compression,
        tx_energy_compressed: tx_compressed,
        tx_energy_raw: tx_raw,
        total,
        gain: ratio(tx_raw, total),
    }
}

/// Gain over `hops` links: the source compresses once, every hop transmits
/// the payload and every relay receives it.
pub fn multi_hop_gain(
    raw_bits: u64,
    rep: &CompressedRepresentation,
    ops: &OpCount,
    cpu: &CpuProfile,
    radio: &RadioProfile,
    policy: &EncodingPolicy,
    hops: u32,
) -> Result<f64> {
    multi_hop_gain_bits(raw_bits, payload_bits(rep, policy), compression_energy(ops, cpu), radio, hops)
}

/// [`multi_hop_gain`] for a payload already sized in bits, with compression
/// energy in joules.
pub fn multi_hop_gain_bits(raw_bits: u64, bits: u64, compression: f64, radio: &RadioProfile, hops: u32) -> Result<f64> {
    if hops == 0 {
        return Err(invalid("hop count must be at least 1"));
    }
    Ok(multi_hop_path_ratio(raw_bits, bits, compression, radio, hops))
}

fn multi_hop_path_ratio(raw_bits: u64, bits: u64, compression: f64, radio: &RadioProfile, hops: u32) -> f64 {
    let h = hops as f64;
    let relays = h - 1.0;
    let path = |b: u64| {
        h * transmission_energy(b, radio, Direction::Tx) + relays * transmission_energy(b, radio, Direction::Rx)
    };
    ratio(path(raw_bits), compression + path(bits))
}

/// Whether compressing to ratio `eta` saves energy on this hardware:
/// `E_tx / E_0 > (alpha eta + beta) / (1 - eta)`.
pub fn tradeoff_holds(cpu: &CpuProfile, radio: &RadioProfile, eta: f64, fit: &FitCoefficients) -> Result<bool> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(invalid(format!("eta must lie in (0, 1), got {eta}")));
    }
    Ok(energy_ratio(cpu, radio) > tradeoff_rhs(fit.nc()?, eta))
}

/// Cycles per saved bit the method needs at compression ratio `eta`.
pub fn tradeoff_rhs(nc: &NcCoefficients, eta: f64) -> f64 {
    nc.evaluate(eta) / (1.0 - eta)
}

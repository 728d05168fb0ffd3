//! Experiment configuration: defaults, `key=value` files and hardware lookup.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use wsn_compress::energy::{builtin_cpu, builtin_radio, CpuProfile, EncodingPolicy, RadioProfile};

use crate::error::BenchError;
use crate::methods::Method;

/// A CPU paired with a radio; rows are labelled with the radio name.
#[derive(Debug, Clone, PartialEq)]
pub struct Hardware {
    pub name: String,
    pub cpu: CpuProfile,
    pub radio: RadioProfile,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub methods: Vec<Method>,
    pub n_star_list: Vec<usize>,
    /// Samples per compressed block.
    pub n: usize,
    pub sigma_noise: f64,
    /// Tolerances as multiples of `sigma_noise`.
    pub xi_list: Vec<f64>,
    pub delta: f64,
    pub runs: usize,
    pub seed: u64,
    /// Radio profile names.
    pub hardware: Vec<String>,
    pub hops: Vec<u32>,
    /// Flank length of the windowed FFT methods.
    pub w: usize,
    pub cpu: String,
    pub policy: EncodingPolicy,
    /// `radio.<name>.<field>` entries.
    pub custom_radios: BTreeMap<String, BTreeMap<String, f64>>,
    /// `cpu.<name>.<field>` entries.
    pub custom_cpus: BTreeMap<String, BTreeMap<String, f64>>,
}

/// `1, 10, 20, 50, 80, ..., 500`.
pub fn default_n_star_list() -> Vec<usize> {
    let mut v = vec![1, 10];
    v.extend((20..=500).step_by(30));
    v
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            methods: Method::all(),
            n_star_list: default_n_star_list(),
            n: 500,
            sigma_noise: 0.04,
            xi_list: vec![3.0, 4.0, 5.0],
            delta: 0.05,
            runs: 100,
            seed: 1,
            hardware: vec!["cc2420".into(), "aquamodem".into()],
            hops: (1..=8).collect(),
            w: 25,
            cpu: "msp430".into(),
            policy: EncodingPolicy::default(),
            custom_radios: BTreeMap::new(),
            custom_cpus: BTreeMap::new(),
        }
    }
}

fn parse_list<T: FromStr>(value: &str) -> Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| format!("{s:?}: {e}")))
        .collect()
}

fn parse_one<T: FromStr>(value: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    value.trim().parse::<T>().map_err(|e| format!("{value:?}: {e}"))
}

const CPU_FIELDS: [&str; 6] = ["add", "sub", "mul", "div", "cmp", "energy_per_cycle"];
const RADIO_FIELDS: [&str; 3] = ["tx", "rx", "data_rate"];

impl ExperimentConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let key = key.trim();
        match key {
            "methods" => {
                self.methods = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<Method>().map_err(|e| e.to_string()))
                    .collect::<Result<_, _>>()?
            }
            "n_star" | "n_star_list" => self.n_star_list = parse_list(value)?,
            "N" | "n" => self.n = parse_one(value)?,
            "sigma_noise" => self.sigma_noise = parse_one(value)?,
            "xi" | "xi_list" => self.xi_list = parse_list(value)?,
            "delta" => self.delta = parse_one(value)?,
            "runs" => self.runs = parse_one(value)?,
            "seed" => self.seed = parse_one(value)?,
            "hardware" => self.hardware = parse_list(value)?,
            "hops" => self.hops = parse_list(value)?,
            "W" | "w" => self.w = parse_one(value)?,
            "cpu" => self.cpu = value.trim().to_string(),
            "bits_per_value" => self.policy.bits_per_value = parse_one(value)?,
            "bits_per_index" => self.policy.bits_per_index = parse_one(value)?,
            _ => {
                let parts: Vec<&str> = key.split('.').collect();
                match parts.as_slice() {
                    ["radio", name, field] if RADIO_FIELDS.contains(field) => {
                        self.custom_radios
                            .entry(name.to_string())
                            .or_default()
                            .insert(field.to_string(), parse_one(value)?);
                    }
                    ["cpu", name, field] if CPU_FIELDS.contains(field) => {
                        self.custom_cpus
                            .entry(name.to_string())
                            .or_default()
                            .insert(field.to_string(), parse_one(value)?);
                    }
                    _ => return Err(format!("unknown key {key:?}")),
                }
            }
        }
        Ok(())
    }

    /// Parses `key = value` lines on top of the defaults. Blank lines and
    /// lines starting with `#` are skipped.
    pub fn parse(text: &str, source_name: &str) -> Result<Self, BenchError> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| BenchError::Config {
                source_name: source_name.to_string(),
                line: i + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err("expected key = value".into()))?;
            cfg.set(key, value).map_err(err)?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::Input {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: &str| Err(BenchError::InvalidConfig(m.to_string()));
        if self.methods.is_empty() {
            return bad("methods is empty");
        }
        if self.n_star_list.is_empty() || self.n_star_list.contains(&0) {
            return bad("n_star needs at least one positive value");
        }
        if self.n < 2 {
            return bad("N must be at least 2");
        }
        if !(self.sigma_noise.is_finite() && self.sigma_noise >= 0.0) {
            return bad("sigma_noise must be finite and >= 0");
        }
        if self.xi_list.is_empty() || self.xi_list.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return bad("xi needs at least one finite value >= 0");
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad("delta must lie in (0, 1)");
        }
        if self.runs == 0 {
            return bad("runs must be positive");
        }
        if self.hardware.is_empty() {
            return bad("hardware is empty");
        }
        if self.hops.is_empty() || self.hops.contains(&0) {
            return bad("hops needs at least one value >= 1");
        }
        if self.policy.bits_per_value == 0 || self.policy.bits_per_index == 0 {
            return bad("bit widths must be positive");
        }
        self.cpu_profile()?;
        self.hardware_profiles()?;
        Ok(())
    }

    pub fn cpu_profile(&self) -> Result<CpuProfile, BenchError> {
        if let Some(fields) = self.custom_cpus.get(&self.cpu) {
            let get = |f: &str| {
                fields
                    .get(f)
                    .copied()
                    .ok_or_else(|| BenchError::InvalidConfig(format!("cpu.{}.{f} is missing", self.cpu)))
            };
            let mut cycles = [0u64; 5];
            for (slot, f) in cycles.iter_mut().zip(&CPU_FIELDS[..5]) {
                let v = get(f)?;
                if v.fract() != 0.0 || v < 1.0 {
                    return Err(BenchError::InvalidConfig(format!("cpu.{}.{f} must be a positive integer", self.cpu)));
                }
                *slot = v as u64;
            }
            return Ok(CpuProfile::new(self.cpu.clone(), cycles, get("energy_per_cycle")?)?);
        }
        builtin_cpu(&self.cpu).ok_or_else(|| BenchError::UnknownProfile(self.cpu.clone()))
    }

    pub fn radio_profile(&self, name: &str) -> Result<RadioProfile, BenchError> {
        if let Some(fields) = self.custom_radios.get(name) {
            let tx = *fields
                .get("tx")
                .ok_or_else(|| BenchError::InvalidConfig(format!("radio.{name}.tx is missing")))?;
            let rate = fields.get("data_rate").copied().unwrap_or(0.0);
            return Ok(RadioProfile::new(name, tx, fields.get("rx").copied(), rate)?);
        }
        builtin_radio(name).ok_or_else(|| BenchError::UnknownProfile(name.to_string()))
    }

    pub fn hardware_profiles(&self) -> Result<Vec<Hardware>, BenchError> {
        let cpu = self.cpu_profile()?;
        self.hardware
            .iter()
            .map(|name| {
                Ok(Hardware {
                    name: name.clone(),
                    cpu: cpu.clone(),
                    radio: self.radio_profile(name)?,
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_the_protocol() {
        let c = ExperimentConfig::default();
        assert_eq!(c.n_star_list.len(), 19);
        assert_eq!(c.n_star_list[..4], [1, 10, 20, 50]);
        assert_eq!(*c.n_star_list.last().unwrap(), 500);
        assert!(c.n_star_list.contains(&110) && c.n_star_list.contains(&290));
        assert_eq!(c.hops, (1..=8).collect::<Vec<_>>());
        c.validate().unwrap();
    }

    #[test]
    fn file_settings_and_custom_profiles() {
        let text = "# comment\nmethods = ltc, dct_lpf\nn_star=50\nruns=3\nhardware=cc2420,mine\nradio.mine.tx=1e-6\ncpu=slow\ncpu.slow.add=1\ncpu.slow.sub=1\ncpu.slow.mul=2\ncpu.slow.div=3\ncpu.slow.cmp=1\ncpu.slow.energy_per_cycle=1e-9\n";
        let c = ExperimentConfig::parse(text, "t").unwrap();
        assert_eq!(c.methods, vec![Method::Ltc, Method::DctLpf]);
        assert_eq!(c.n_star_list, vec![50]);
        let hw = c.hardware_profiles().unwrap();
        assert_eq!(hw[1].radio.rx_energy_per_bit, 1e-6);
        assert_eq!(hw[0].cpu.cycles_div, 3);
        c.validate().unwrap();
    }

    #[test]
    fn errors_name_the_line() {
        match ExperimentConfig::parse("runs=1\nbogus=2\n", "cfg") {
            Err(BenchError::Config { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(ExperimentConfig::parse("runs\n", "cfg").is_err());
        assert!(ExperimentConfig::parse("methods=ltc,zip\n", "cfg").is_err());
        let mut c = ExperimentConfig::default();
        c.hardware = vec!["nope".into()];
        assert!(matches!(c.validate(), Err(BenchError::UnknownProfile(_))));
        c = ExperimentConfig::default();
        c.n = 1;
        assert!(c.validate().is_err());
        c = ExperimentConfig::default();
        c.cpu = "half".into();
        c.custom_cpus.entry("half".into()).or_default().insert("add".into(), 1.0);
        assert!(matches!(c.validate(), Err(BenchError::InvalidConfig(_))));
    }
}

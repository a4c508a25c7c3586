//! Mask recipes and sweep grids.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imgproc::blur::{DEFAULT_KERNEL_SIDE, DEFAULT_SIGMA};
use crate::imgproc::Polarity;

/// Square kernel sides swept in the reference mask grid.
pub const KERNEL_GRID: [usize; 6] = [0, 5, 8, 10, 12, 15];

/// `(dilate, clean)` pairs of the reference ablation table.
pub const TABLE_PAIRS: [KernelPair; 4] = [
    KernelPair::new(10, 10),
    KernelPair::new(15, 15),
    KernelPair::new(10, 5),
    KernelPair::new(50, 80),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Smoothing {
    None,
    Gaussian { sigma: f64, kernel_side: usize },
}

impl Default for Smoothing {
    fn default() -> Self {
        Smoothing::Gaussian {
            sigma: DEFAULT_SIGMA,
            kernel_side: DEFAULT_KERNEL_SIDE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdMethod {
    #[default]
    Otsu,
    Global(u8),
}

/// One mask recipe: grayscale, optional smoothing, threshold, opening with a
/// `clean_side` square, then dilation with a `dilate_side` square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub smoothing: Smoothing,
    pub threshold: ThresholdMethod,
    pub polarity: Polarity,
    pub clean_side: usize,
    pub dilate_side: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            smoothing: Smoothing::default(),
            threshold: ThresholdMethod::Otsu,
            polarity: Polarity::DarkForeground,
            clean_side: 5,
            dilate_side: 0,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if let Smoothing::Gaussian { sigma, kernel_side } = self.smoothing {
            if !(sigma.is_finite() && sigma > 0.0) {
                return Err(Error::InvalidSigma(sigma));
            }
            if kernel_side == 0 || kernel_side % 2 == 0 {
                return Err(Error::InvalidKernel(kernel_side));
            }
        }
        Ok(())
    }

    pub fn with_pair(mut self, pair: KernelPair) -> Self {
        self.dilate_side = pair.dilate;
        self.clean_side = pair.clean;
        self
    }

    pub fn pair(&self) -> KernelPair {
        KernelPair::new(self.dilate_side, self.clean_side)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// Kernel sides written `<dilate>_<clean>`, the order used by the
/// ablation table header.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct KernelPair {
    pub dilate: usize,
    pub clean: usize,
}

impl KernelPair {
    pub const fn new(dilate: usize, clean: usize) -> Self {
        Self { dilate, clean }
    }

    /// Parses a comma-separated list such as `10_10,15_15,10_5`.
    pub fn parse_list(s: &str) -> Result<Vec<KernelPair>> {
        s.split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(str::parse)
            .collect()
    }
}

impl fmt::Display for KernelPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.dilate, self.clean)
    }
}

impl FromStr for KernelPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidSweep(format!("malformed pair {s:?}: expected <dilate>_<clean>"));
        let (d, c) = s.split_once('_').ok_or_else(bad)?;
        let parse = |v: &str| {
            if v.is_empty() || !v.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            v.parse::<usize>().map_err(|_| bad())
        };
        Ok(Self::new(parse(d)?, parse(c)?))
    }
}

impl TryFrom<String> for KernelPair {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<KernelPair> for String {
    fn from(p: KernelPair) -> String {
        p.to_string()
    }
}

/// A grid of recipes sharing smoothing, threshold and polarity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSweep")]
pub struct SweepSpec {
    pairs: Vec<KernelPair>,
    base: PipelineConfig,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    pairs: Vec<KernelPair>,
    #[serde(default)]
    base: PipelineConfig,
}

impl TryFrom<RawSweep> for SweepSpec {
    type Error = Error;

    fn try_from(raw: RawSweep) -> Result<Self> {
        SweepSpec::new(raw.pairs, raw.base)
    }
}

impl SweepSpec {
    /// Pairs must be non-empty and distinct; order is kept.
    pub fn new(pairs: Vec<KernelPair>, base: PipelineConfig) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidSweep("no kernel pairs".into()));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = pairs.iter().find(|p| !seen.insert(**p)) {
            return Err(Error::InvalidSweep(format!("duplicate pair {dup}")));
        }
        base.validate()?;
        Ok(Self { pairs, base })
    }

    /// Every `(dilate, clean)` combination of `sides`, dilate-major.
    pub fn grid(sides: &[usize], base: PipelineConfig) -> Result<Self> {
        let pairs = sides
            .iter()
            .flat_map(|&d| sides.iter().map(move |&c| KernelPair::new(d, c)))
            .collect();
        Self::new(pairs, base)
    }

    pub fn table_pairs(base: PipelineConfig) -> Self {
        Self::new(TABLE_PAIRS.to_vec(), base).expect("reference pairs are distinct")
    }

    pub fn pairs(&self) -> &[KernelPair] {
        &self.pairs
    }

    pub fn base(&self) -> &PipelineConfig {
        &self.base
    }

    pub fn configs(&self) -> impl Iterator<Item = (KernelPair, PipelineConfig)> + '_ {
        self.pairs.iter().map(|&p| (p, self.base.with_pair(p)))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_round_trip() {
        let p: KernelPair = "50_80".parse().unwrap();
        assert_eq!(p, KernelPair::new(50, 80));
        assert_eq!(p.to_string(), "50_80");
    }

    #[test]
    fn malformed_pairs() {
        for s in ["5", "5_", "_5", "a_b", "1_2_3", "-1_2", "+1_2", ""] {
            assert!(s.parse::<KernelPair>().is_err(), "{s:?}");
        }
    }

    #[test]
    fn parse_table_list() {
        let pairs = KernelPair::parse_list("10_10,15_15,10_5,50_80").unwrap();
        assert_eq!(pairs, TABLE_PAIRS.to_vec());
    }

    #[test]
    fn sweep_rejects_empty_and_duplicates() {
        let base = PipelineConfig::default();
        assert!(SweepSpec::new(vec![], base).is_err());
        assert!(SweepSpec::new(vec![KernelPair::new(1, 1), KernelPair::new(1, 1)], base).is_err());
    }

    #[test]
    fn full_grid_has_36_pairs() {
        let s = SweepSpec::grid(&KERNEL_GRID, PipelineConfig::default()).unwrap();
        assert_eq!(s.pairs().len(), 36);
    }

    #[test]
    fn default_config_toml_round_trip() {
        let cfg = PipelineConfig::default();
        assert_eq!(PipelineConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn parse_config_document() {
        let text = r#"
            polarity = "light_foreground"
            clean_side = 8
            dilate_side = 12
            threshold = { global = 90 }

            [smoothing.gaussian]
            sigma = 1.5
            kernel_side = 7
        "#;
        let cfg = PipelineConfig::from_toml(text).unwrap();
        assert_eq!(cfg.polarity, Polarity::LightForeground);
        assert_eq!(cfg.threshold, ThresholdMethod::Global(90));
        assert_eq!(cfg.smoothing, Smoothing::Gaussian { sigma: 1.5, kernel_side: 7 });
        assert_eq!(cfg.pair(), KernelPair::new(12, 8));

        let none = PipelineConfig::from_toml("smoothing = \"none\"").unwrap();
        assert_eq!(none.smoothing, Smoothing::None);
        assert_eq!(none.clean_side, 5);
    }

    #[test]
    fn config_rejects_bad_values() {
        assert!(PipelineConfig::from_toml("threshold = { global = 300 }").is_err());
        assert!(PipelineConfig::from_toml("clean_sides = 3").is_err());
        assert!(PipelineConfig::from_toml("[smoothing.gaussian]\nsigma = 1.0\nkernel_side = 4").is_err());
        assert!(PipelineConfig::from_toml("clean_side = -1").is_err());
    }

    #[test]
    fn sweep_document() {
        let text = r#"
            pairs = ["10_10", "15_15"]
            [base]
            smoothing = "none"
        "#;
        let s = SweepSpec::from_toml(text).unwrap();
        assert_eq!(s.pairs(), &[KernelPair::new(10, 10), KernelPair::new(15, 15)]);
        assert_eq!(s.base().smoothing, Smoothing::None);
        assert!(SweepSpec::from_toml("pairs = []").is_err());
        assert!(SweepSpec::from_toml("pairs = [\"1_2\", \"1_2\"]").is_err());
    }
}

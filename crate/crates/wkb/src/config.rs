//! Experiment configuration: file format, defaults and validation.

use crate::error::{Error, Result};
use crate::numerics::C64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    #[default]
    Log,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl Default for RGrid {
    fn default() -> Self {
        RGrid {
            min: 10.0,
            max: 1e5,
            count: 20,
            spacing: Spacing::Log,
        }
    }
}

impl RGrid {
    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    return self.max;
                }
                let t = i as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => self.min + t * (self.max - self.min),
                    Spacing::Log => self.min * (self.max / self.min).powf(t),
                }
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Radii {
    pub s2: f64,
    pub s3: f64,
    pub s4: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Legendre parameter.
    pub k: f64,
    pub epsilon: f64,
    /// Coefficients (a, b) of q = (a z + b) dz^2 / prod(z - t_j) as [re, im].
    pub a: [f64; 2],
    pub b: [f64; 2],
    /// Disc radii; taken from the q* construction when absent.
    pub radii: Option<Radii>,
    pub holonomies: Vec<[f64; 4]>,
    #[serde(rename = "R_grid")]
    pub r_grid: RGrid,
    pub tolerances: BTreeMap<String, f64>,
    pub orientation_signs: [i8; 4],
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            k: 0.5,
            epsilon: 0.05,
            a: [1.0, 0.0],
            b: [0.0, 0.0],
            radii: None,
            holonomies: vec![[0.0; 4]],
            r_grid: RGrid::default(),
            tolerances: BTreeMap::new(),
            orientation_signs: [1; 4],
            seed: 0,
        }
    }
}

/// Tolerance keys understood by the experiments, with their defaults.
pub const KNOWN_TOLERANCES: [(&str, f64); 2] = [("quad", 1e-12), ("shape", 1.0)];

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.k > 0.0 && self.k < 1.0) {
            return bad(format!("k must lie in (0, 1), got {}", self.k));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad(format!("epsilon must lie in (0, 1), got {}", self.epsilon));
        }
        if self.a.iter().chain(&self.b).any(|x| !x.is_finite())
            || self.a == [0.0, 0.0] && self.b == [0.0, 0.0]
        {
            return bad("a and b must be finite and not both zero".into());
        }
        if let Some(r) = &self.radii {
            if [r.s2, r.s3, r.s4]
                .iter()
                .any(|&s| !(s > 0.0 && s.is_finite()))
            {
                return bad("radii must be positive".into());
            }
        }
        if self.holonomies.iter().flatten().any(|x| !x.is_finite()) {
            return bad("holonomy phases must be finite".into());
        }
        let g = &self.r_grid;
        if !(g.min > 0.0 && g.max.is_finite()) {
            return bad("R_grid.min must be positive".into());
        }
        if g.count < 2 {
            return bad("R_grid.count must be at least 2".into());
        }
        if !(g.max > g.min) {
            return bad("R_grid.max must exceed R_grid.min".into());
        }
        for (key, v) in &self.tolerances {
            if !KNOWN_TOLERANCES.iter().any(|(k, _)| k == key) {
                return bad(format!("unknown tolerance '{key}'"));
            }
            if !(*v > 0.0 && v.is_finite()) {
                return bad(format!("tolerance '{key}' must be positive"));
            }
        }
        if self.orientation_signs.iter().any(|s| s.abs() != 1) {
            return bad("orientation_signs must be +1 or -1".into());
        }
        Ok(())
    }

    pub fn tolerance(&self, key: &str) -> f64 {
        self.tolerances
            .get(key)
            .copied()
            .or_else(|| {
                KNOWN_TOLERANCES
                    .iter()
                    .find(|(k, _)| *k == key)
                    .map(|(_, v)| *v)
            })
            .unwrap_or(f64::NAN)
    }

    pub fn a_c64(&self) -> C64 {
        C64::new(self.a[0], self.a[1])
    }

    pub fn b_c64(&self) -> C64 {
        C64::new(self.b[0], self.b[1])
    }

    /// Canonical JSON text; field order is fixed, so equal configs give equal text.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_grid() {
        let c = ExperimentConfig::default();
        c.validate().unwrap();
        let g = c.r_grid.values();
        assert_eq!(g.len(), 20);
        assert_eq!(g[0], 10.0);
        assert_eq!(g[19], 1e5);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        let lin = RGrid {
            min: 1.0,
            max: 3.0,
            count: 3,
            spacing: Spacing::Linear,
        }
        .values();
        assert_eq!(lin, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn parsing_and_validation() {
        let c = ExperimentConfig::from_json(
            r#"{"k": 0.3, "R_grid": {"min": 1, "max": 100, "count": 5, "spacing": "linear"}}"#,
        )
        .unwrap();
        assert_eq!(c.k, 0.3);
        assert_eq!(c.epsilon, 0.05);
        assert_eq!(c.r_grid.spacing, Spacing::Linear);
        for bad in [
            r#"{"k": 1.5}"#,
            r#"{"R_grid": {"min": 0, "max": 10, "count": 5}}"#,
            r#"{"R_grid": {"min": 1, "max": 10, "count": 1}}"#,
            r#"{"tolerances": {"quad": -1}}"#,
            r#"{"tolerances": {"nope": 1}}"#,
            r#"{"orientation_signs": [1, 1, 2, 1]}"#,
            r#"{"unknown": 1}"#,
        ] {
            assert!(
                matches!(ExperimentConfig::from_json(bad), Err(Error::Config(_))),
                "{bad}"
            );
        }
        assert_eq!(c.tolerance("quad"), 1e-12);
    }

    #[test]
    fn canonical_json_roundtrip() {
        let c = ExperimentConfig::default();
        let back = ExperimentConfig::from_json(&c.canonical_json()).unwrap();
        assert_eq!(back, c);
    }
}

//! Scenario files and the shipped presets.
//!
//! Scenarios are TOML documents mirroring [`ScenarioConfig`]. A minimal
//! file only needs the fields that differ from a preset when loaded with
//! [`ScenarioConfig::from_toml_with_base`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::MAX_NETWORKS;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Dns,
    Otso,
    CellularOnly,
    Wiffler,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Dns => "dns",
            Scheme::Otso => "otso",
            Scheme::CellularOnly => "cellular-only",
            Scheme::Wiffler => "wiffler",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Topology {
    Grid { width: usize, height: usize },
    Line { length: usize },
}

impl Topology {
    pub fn locations(&self) -> usize {
        match *self {
            Topology::Grid { width, height } => width * height,
            Topology::Line { length } => length,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Mobility {
    /// One known pattern per user, sampled from a stay-or-move chain.
    Deterministic { stay: f64 },
    /// Two candidate patterns per user: a high-mobility one with prior
    /// `p_high` and a low-mobility one.
    Random {
        p_high: f64,
        high_stay: f64,
        low_stay: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapacityDist {
    pub mean: f64,
    pub stddev: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub topology: Topology,
    pub slots: usize,
    /// Slot length in seconds; capacity means are rates in Mbps and a
    /// slot carries `rate * slot_seconds` Mb.
    pub slot_seconds: f64,
    pub users: usize,
    pub cellular: CapacityDist,
    pub wifi: CapacityDist,
    /// Chance that a location has its own Wi-Fi access point.
    pub p_wifi: f64,
    /// Cost of switching between two real networks.
    pub c_switch: f64,
    /// Switching into or out of idle costs `idle_cost_ratio * c_switch`.
    pub idle_cost_ratio: f64,
    /// Off-diagonal switching time, in slots.
    pub switch_time: usize,
    pub mobility: Mobility,
    pub schemes: Vec<Scheme>,
    pub runs: usize,
    pub seed: u64,
    pub max_passes: usize,
    pub wiffler_theta: f64,
    pub wiffler_k: f64,
}

pub const PRESETS: [&str; 2] = ["deterministic-grid", "random-line"];

impl ScenarioConfig {
    /// 4x4 grid, two minutes in ten-second slots, known patterns.
    pub fn deterministic_grid() -> Self {
        Self {
            name: "deterministic-grid".into(),
            topology: Topology::Grid {
                width: 4,
                height: 4,
            },
            slots: 12,
            slot_seconds: 10.0,
            users: 30,
            cellular: CapacityDist {
                mean: 300.0,
                stddev: 5.0,
            },
            wifi: CapacityDist {
                mean: 54.0,
                stddev: 5.0,
            },
            p_wifi: 0.5,
            c_switch: 400.0,
            idle_cost_ratio: 0.5,
            switch_time: 1,
            mobility: Mobility::Deterministic { stay: 0.6 },
            schemes: vec![Scheme::Dns, Scheme::Otso, Scheme::CellularOnly],
            runs: 500,
            seed: 1,
            max_passes: 20,
            wiffler_theta: 1.0,
            wiffler_k: 0.5,
        }
    }

    /// Five locations on a road, one minute, two-type random mobility.
    pub fn random_line() -> Self {
        Self {
            name: "random-line".into(),
            topology: Topology::Line { length: 5 },
            slots: 6,
            slot_seconds: 10.0,
            users: 8,
            cellular: CapacityDist {
                mean: 100.0,
                stddev: 5.0,
            },
            wifi: CapacityDist {
                mean: 50.0,
                stddev: 5.0,
            },
            p_wifi: 0.9,
            c_switch: 10.0,
            idle_cost_ratio: 0.5,
            switch_time: 1,
            mobility: Mobility::Random {
                p_high: 0.5,
                high_stay: 0.1,
                low_stay: 0.9,
            },
            schemes: vec![Scheme::Dns, Scheme::Otso, Scheme::CellularOnly],
            runs: 500,
            seed: 1,
            max_passes: 20,
            wiffler_theta: 1.0,
            wiffler_k: 0.5,
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "deterministic-grid" => Ok(Self::deterministic_grid()),
            "random-line" => Ok(Self::random_line()),
            _ => Err(Error::Config(format!(
                "unknown preset {name:?}; expected one of {}",
                PRESETS.join(", ")
            ))),
        }
    }

    /// Parses a complete scenario document.
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Parses a document that may name a `preset` and override any subset
    /// of its fields. Without `preset` every field must be present.
    pub fn from_toml_with_base(text: &str) -> Result<Self> {
        let mut doc: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        let Some(preset) = doc.remove("preset") else {
            return Self::from_toml(text);
        };
        let name = preset
            .as_str()
            .ok_or_else(|| Error::Config("preset must be a string".into()))?;
        let base =
            toml::Table::try_from(Self::preset(name)?).map_err(|e| Error::Config(e.to_string()))?;
        let merged = merge_tables(base, doc);
        let config: Self = merged
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn locations(&self) -> usize {
        self.topology.locations()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        let prob = |name: &str, p: f64| -> Result<()> {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} = {p} is not a probability")))
            }
        };
        if self.locations() == 0 {
            return bad("topology has no locations".into());
        }
        if self.locations() + 2 > MAX_NETWORKS {
            return bad(format!(
                "at most {} locations are supported",
                MAX_NETWORKS - 2
            ));
        }
        if self.slots == 0 || self.users == 0 || self.runs == 0 || self.max_passes == 0 {
            return bad("slots, users, runs and max_passes must all be at least 1".into());
        }
        for (name, d) in [("cellular", self.cellular), ("wifi", self.wifi)] {
            if !d.mean.is_finite() || !d.stddev.is_finite() || d.stddev < 0.0 {
                return bad(format!(
                    "{name} capacity needs a finite mean and a nonnegative stddev"
                ));
            }
        }
        if !(self.slot_seconds.is_finite() && self.slot_seconds > 0.0) {
            return bad(format!(
                "slot_seconds = {} must be positive",
                self.slot_seconds
            ));
        }
        prob("p_wifi", self.p_wifi)?;
        if !(self.c_switch.is_finite() && self.c_switch >= 0.0) {
            return bad(format!("c_switch = {} must be nonnegative", self.c_switch));
        }
        if !(self.idle_cost_ratio.is_finite() && self.idle_cost_ratio >= 0.0) {
            return bad("idle_cost_ratio must be nonnegative".into());
        }
        match self.mobility {
            Mobility::Deterministic { stay } => prob("stay", stay)?,
            Mobility::Random {
                p_high,
                high_stay,
                low_stay,
            } => {
                prob("p_high", p_high)?;
                prob("high_stay", high_stay)?;
                prob("low_stay", low_stay)?;
            }
        }
        if self.schemes.is_empty() {
            return bad("no schemes selected".into());
        }
        if !(self.wiffler_theta > 0.0 && self.wiffler_k > 0.0) {
            return bad("wiffler_theta and wiffler_k must be positive".into());
        }
        Ok(())
    }

    /// Copy with one field replaced; `path` is dotted (`mobility.p_high`).
    pub fn with_param(&self, path: &str, value: f64) -> Result<Self> {
        let mut doc = serde_json::to_value(self).map_err(|e| Error::Config(e.to_string()))?;
        let mut slot = &mut doc;
        for key in path.split('.') {
            slot = slot
                .get_mut(key)
                .ok_or_else(|| Error::Config(format!("unknown parameter {path:?}")))?;
        }
        if !(slot.is_number()) {
            return Err(Error::Config(format!("parameter {path:?} is not numeric")));
        }
        *slot = if value.fract() == 0.0
            && value.abs() < 2f64.powi(53)
            && (slot.is_u64() || slot.is_i64())
        {
            serde_json::json!(value as i64)
        } else {
            serde_json::json!(value)
        };
        let config: Self = serde_json::from_value(doc)
            .map_err(|e| Error::Config(format!("{path} = {value}: {e}")))?;
        config.validate()?;
        Ok(config)
    }
}

fn merge_tables(mut base: toml::Table, overrides: toml::Table) -> toml::Table {
    for (key, value) in overrides {
        match (base.get_mut(&key), value) {
            // a changed tag replaces the whole variant
            (Some(toml::Value::Table(b)), toml::Value::Table(o))
                if o.get("kind").is_none_or(|k| Some(k) == b.get("kind")) =>
            {
                let merged = merge_tables(std::mem::take(b), o);
                *b = merged;
            }
            (_, value) => {
                base.insert(key, value);
            }
        }
    }
    base
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Scheme::Dns,
            Scheme::Otso,
            Scheme::CellularOnly,
            Scheme::Wiffler,
        ]
        .into_iter()
        .find(|x| x.as_str() == s)
        .ok_or_else(|| Error::Config(format!("unknown scheme {s:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_round_trip_through_toml() {
        for name in PRESETS {
            let c = ScenarioConfig::preset(name).unwrap();
            c.validate().unwrap();
            let text = c.to_toml().unwrap();
            assert_eq!(ScenarioConfig::from_toml(&text).unwrap(), c);
        }
        assert!(ScenarioConfig::preset("nope").is_err());
    }

    #[test]
    fn overrides_on_a_preset() {
        let text = r#"
            preset = "deterministic-grid"
            users = 15
            c_switch = 200.0
            [wifi]
            mean = 20.0
        "#;
        let c = ScenarioConfig::from_toml_with_base(text).unwrap();
        assert_eq!(c.users, 15);
        assert_eq!(c.c_switch, 200.0);
        assert_eq!(c.wifi.mean, 20.0);
        assert_eq!(c.wifi.stddev, 5.0);
        assert_eq!(
            c.topology,
            Topology::Grid {
                width: 4,
                height: 4
            }
        );
    }

    #[test]
    fn changing_the_mobility_kind_replaces_it() {
        let text = r#"
            preset = "deterministic-grid"
            [mobility]
            kind = "random"
            p_high = 0.3
            high_stay = 0.1
            low_stay = 0.9
        "#;
        let c = ScenarioConfig::from_toml_with_base(text).unwrap();
        assert!(matches!(c.mobility, Mobility::Random { p_high, .. } if p_high == 0.3));
    }

    #[test]
    fn validation_catches_bad_values() {
        let mut c = ScenarioConfig::deterministic_grid();
        c.p_wifi = 1.2;
        assert!(c.validate().is_err());
        let mut c = ScenarioConfig::deterministic_grid();
        c.cellular.stddev = -1.0;
        assert!(c.validate().is_err());
        let mut c = ScenarioConfig::random_line();
        c.runs = 0;
        assert!(c.validate().is_err());
        assert!(ScenarioConfig::from_toml("users = 3").is_err());
    }

    #[test]
    fn with_param_sets_nested_and_integer_fields() {
        let c = ScenarioConfig::random_line();
        assert_eq!(c.with_param("users", 12.0).unwrap().users, 12);
        let d = c.with_param("mobility.p_high", 0.25).unwrap();
        assert!(matches!(d.mobility, Mobility::Random { p_high, .. } if p_high == 0.25));
        assert_eq!(c.with_param("c_switch", 200.0).unwrap().c_switch, 200.0);
        assert!(c.with_param("users", 2.5).is_err());
        assert!(c.with_param("nope", 1.0).is_err());
        assert!(c.with_param("name", 1.0).is_err());
    }

    #[test]
    fn scheme_names() {
        for s in [
            Scheme::Dns,
            Scheme::Otso,
            Scheme::CellularOnly,
            Scheme::Wiffler,
        ] {
            assert_eq!(s.as_str().parse::<Scheme>().unwrap(), s);
        }
    }
}

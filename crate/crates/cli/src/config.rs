//! Pipeline configuration from a TOML or JSON file, overridden by flags.
//!
//! ```toml
//! out = "out"
//! decisions = "decisions.jsonl"
//! auto_accept_steps = [1]
//!
//! [snapshots]
//! euro-ix = "snapshots/euroix.json"
//! peeringdb = "snapshots/peeringdb.json"
//! pch = "snapshots/pch.json"
//!
//! [analysis]
//! top_n = 10
//! city_threshold = 5
//!
//! [bgp]
//! collectors = "collectors"
//! exclude_asns = [42, 3856]
//! min_jaccard = 0.05
//! ambiguity_margin = 0.01
//! ```
//!
//! Relative paths are resolved against the directory of the config file.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use ixpunion::analytics::AnalysisOptions;
use ixpunion::bgp::LinkThresholds;
use ixpunion::SourceId;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub snapshots: BTreeMap<SourceId, PathBuf>,
    #[serde(default)]
    pub decisions: Option<PathBuf>,
    #[serde(default)]
    pub auto_accept_steps: BTreeSet<u8>,
    #[serde(default)]
    pub analysis: AnalysisSection,
    #[serde(default)]
    pub bgp: BgpSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    #[serde(default = "default_top_n")]
    pub top_n: usize,
    #[serde(default = "default_city_threshold")]
    pub city_threshold: usize,
}

fn default_top_n() -> usize {
    AnalysisOptions::default().top_n
}

fn default_city_threshold() -> usize {
    AnalysisOptions::default().city_threshold
}

impl Default for AnalysisSection {
    fn default() -> Self {
        AnalysisSection {
            top_n: default_top_n(),
            city_threshold: default_city_threshold(),
        }
    }
}

impl AnalysisSection {
    pub fn options(&self) -> AnalysisOptions {
        AnalysisOptions {
            top_n: self.top_n,
            city_threshold: self.city_threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BgpSection {
    #[serde(default)]
    pub collectors: Option<PathBuf>,
    #[serde(default)]
    pub exclude_asns: BTreeSet<u32>,
    #[serde(default = "default_min_jaccard")]
    pub min_jaccard: f64,
    #[serde(default = "default_margin")]
    pub ambiguity_margin: f64,
}

fn default_min_jaccard() -> f64 {
    LinkThresholds::default().min_jaccard
}

fn default_margin() -> f64 {
    LinkThresholds::default().ambiguity_margin
}

impl Default for BgpSection {
    fn default() -> Self {
        BgpSection {
            collectors: None,
            exclude_asns: BTreeSet::new(),
            min_jaccard: default_min_jaccard(),
            ambiguity_margin: default_margin(),
        }
    }
}

impl BgpSection {
    pub fn thresholds(&self) -> LinkThresholds {
        LinkThresholds {
            min_jaccard: self.min_jaccard,
            ambiguity_margin: self.ambiguity_margin,
        }
    }
}

impl Config {
    /// Reads a `.toml` or `.json` file; other extensions are tried as TOML.
    pub fn load(path: &Path) -> anyhow::Result<Config> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: Config = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        } else {
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        };
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_relative(base);
        cfg.validate()?;
        Ok(cfg)
    }

    fn resolve_relative(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        self.out.as_mut().map(fix);
        self.decisions.as_mut().map(fix);
        self.bgp.collectors.as_mut().map(fix);
        self.snapshots.values_mut().for_each(fix);
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if let Some(s) = self
            .snapshots
            .keys()
            .find(|s| !SourceId::DATABASES.contains(s))
        {
            bail!("{s} is not a snapshot source");
        }
        if let Some(s) = self
            .auto_accept_steps
            .iter()
            .find(|s| !(1..=5).contains(*s))
        {
            bail!("auto-accept step {s} is outside 1..=5");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_and_json_agree() {
        let dir = tempfile::tempdir().unwrap();
        let t = dir.path().join("c.toml");
        std::fs::write(
            &t,
            "decisions = \"d.jsonl\"\nauto_accept_steps = [1]\n[snapshots]\npch = \"/abs/pch.json\"\n[bgp]\nexclude_asns = [42]\n",
        )
        .unwrap();
        let j = dir.path().join("c.json");
        std::fs::write(
            &j,
            r#"{"decisions":"d.jsonl","auto_accept_steps":[1],"snapshots":{"pch":"/abs/pch.json"},"bgp":{"exclude_asns":[42]}}"#,
        )
        .unwrap();
        let a = Config::load(&t).unwrap();
        assert_eq!(a, Config::load(&j).unwrap());
        assert_eq!(a.decisions.unwrap(), dir.path().join("d.jsonl"));
        assert_eq!(a.snapshots[&SourceId::Pch], PathBuf::from("/abs/pch.json"));
        assert_eq!(a.analysis.top_n, 10);
    }

    #[test]
    fn rejects_bad_steps() {
        let dir = tempfile::tempdir().unwrap();
        let t = dir.path().join("c.toml");
        std::fs::write(&t, "auto_accept_steps = [6]\n").unwrap();
        assert!(Config::load(&t).is_err());
    }
}

//! Config files: flat `key = value` text mapping onto the engine parameters
//! and terminal bindings.

use std::collections::BTreeSet;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use theorist::cfgtext;
use theorist::evolve::GpConfig;
use theorist::expr::{TerminalBindings, ValueSource};

/// A parsed config file: engine parameters, terminal bindings, and the set
/// of keys the file set explicitly (defaults fill the rest).
#[derive(Debug, Clone, Default)]
pub struct FileConfig {
    pub gp: GpConfig,
    pub bindings: TerminalBindings,
    pub explicit: BTreeSet<String>,
}

impl FileConfig {
    pub fn was_set(&self, key: &str) -> bool {
        self.explicit.contains(key)
    }
}

pub fn parse_config(text: &str) -> Result<FileConfig> {
    let mut cfg = FileConfig::default();
    for (key, value) in cfgtext::parse_pairs(text)? {
        set_key(&mut cfg, &key, &value)?;
    }
    cfg.gp.validate()?;
    Ok(cfg)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<FileConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("failed to read config {}", path.display()))?;
    parse_config(&text).with_context(|| format!("in config {}", path.display()))
}

fn set_key(cfg: &mut FileConfig, key: &str, value: &str) -> Result<()> {
    let parse_usize =
        |v: &str| -> Result<usize> { v.parse().map_err(|_| anyhow!("`{key}` needs an integer, got {v:?}")) };
    let parse_u64 =
        |v: &str| -> Result<u64> { v.parse().map_err(|_| anyhow!("`{key}` needs an integer, got {v:?}")) };
    let parse_f64 =
        |v: &str| -> Result<f64> { v.parse().map_err(|_| anyhow!("`{key}` needs a number, got {v:?}")) };

    match key {
        "population_size" => cfg.gp.population_size = parse_usize(value)?,
        "generations" => cfg.gp.generations = parse_usize(value)?,
        "crossover_prob" => cfg.gp.crossover_prob = parse_f64(value)?,
        "mutation_prob" => cfg.gp.mutation_prob = parse_f64(value)?,
        "max_depth" => cfg.gp.max_depth = parse_usize(value)?,
        "init_depth_min" => cfg.gp.init_depth.0 = parse_usize(value)?,
        "init_depth_max" => cfg.gp.init_depth.1 = parse_usize(value)?,
        "elitism" => cfg.gp.elitism = parse_usize(value)?,
        "seed" => cfg.gp.seed = parse_u64(value)?,
        "enumeration_cap" => cfg.gp.enumeration_cap = parse_usize(value)?,
        "mc_draws" => cfg.gp.mc_draws = parse_usize(value)?,
        _ => {
            if let Some(name) = key.strip_prefix("terminal.") {
                let source = ValueSource::parse(value).ok_or_else(|| {
                    anyhow!("bad value source for `{key}`: {value:?} (expected index_k, const:<real>, or stat:<d_avg|av|h|l>)")
                })?;
                cfg.bindings.insert(name, source);
            } else {
                bail!("unknown config key `{key}`");
            }
        }
    }
    cfg.explicit.insert(key.to_string());
    Ok(())
}

/// Render the effective configuration; re-running with this file reproduces
/// the run exactly.
pub fn effective_text(gp: &GpConfig, bindings: &TerminalBindings) -> String {
    let mut out = String::new();
    out.push_str(&format!("population_size = {}\n", gp.population_size));
    out.push_str(&format!("generations = {}\n", gp.generations));
    out.push_str(&format!("crossover_prob = {}\n", gp.crossover_prob));
    out.push_str(&format!("mutation_prob = {}\n", gp.mutation_prob));
    out.push_str(&format!("max_depth = {}\n", gp.max_depth));
    out.push_str(&format!("init_depth_min = {}\n", gp.init_depth.0));
    out.push_str(&format!("init_depth_max = {}\n", gp.init_depth.1));
    out.push_str(&format!("elitism = {}\n", gp.elitism));
    out.push_str(&format!("seed = {}\n", gp.seed));
    out.push_str(&format!("enumeration_cap = {}\n", gp.enumeration_cap));
    out.push_str(&format!("mc_draws = {}\n", gp.mc_draws));
    for (name, source) in bindings.iter() {
        out.push_str(&format!("terminal.{name} = {source}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use theorist::expr::StatKind;

    #[test]
    fn parses_engine_keys_and_terminals() {
        let cfg = parse_config(
            "population_size = 40\nseed = 9\nterminal.t = index_k\nterminal.v = const:4\n",
        )
        .unwrap();
        assert_eq!(cfg.gp.population_size, 40);
        assert_eq!(cfg.gp.seed, 9);
        assert_eq!(cfg.gp.generations, 100);
        assert_eq!(cfg.bindings.get("t"), Some(ValueSource::IndexK));
        assert_eq!(cfg.bindings.get("v"), Some(ValueSource::Const(4.0)));
        assert!(cfg.was_set("seed"));
        assert!(!cfg.was_set("max_depth"));
    }

    #[test]
    fn rejects_unknown_keys_and_bad_sources() {
        assert!(parse_config("popsize = 3\n").is_err());
        assert!(parse_config("terminal.d = stat:nope\n").is_err());
    }

    #[test]
    fn rejects_invalid_engine_config() {
        assert!(parse_config("crossover_prob = 0.9\nmutation_prob = 0.5\n").is_err());
    }

    #[test]
    fn effective_text_round_trips() {
        let mut cfg = parse_config("population_size = 33\nterminal.d = stat:d_avg\n").unwrap();
        cfg.gp.seed = 5;
        let text = effective_text(&cfg.gp, &cfg.bindings);
        let back = parse_config(&text).unwrap();
        assert_eq!(back.gp, cfg.gp);
        assert_eq!(
            back.bindings.get("d"),
            Some(ValueSource::Stat(StatKind::DAvg))
        );
    }
}

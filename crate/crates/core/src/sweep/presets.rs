use super::{parse_config, SweepConfig};
use crate::error::{Error, Result};

const PRESETS: [(&str, &str); 7] = [
    ("fig1a", include_str!("../../presets/fig1a.toml")),
    ("fig1b", include_str!("../../presets/fig1b.toml")),
    ("fig5a", include_str!("../../presets/fig5a.toml")),
    ("fig5b", include_str!("../../presets/fig5b.toml")),
    ("router", include_str!("../../presets/router.toml")),
    ("resonances", include_str!("../../presets/resonances.toml")),
    ("multipartite", include_str!("../../presets/multipartite.toml")),
];

pub const PRESET_NAMES: [&str; 7] = ["fig1a", "fig1b", "fig5a", "fig5b", "router", "resonances", "multipartite"];

/// Raw text of a bundled preset.
pub fn preset_text(name: &str) -> Result<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t).ok_or_else(|| {
        let hint = PRESET_NAMES
            .iter()
            .min_by_key(|p| strsim::levenshtein(name, p))
            .map(|p| format!("; did you mean `{p}`?"))
            .unwrap_or_default();
        Error::arg(format!("unknown preset `{name}`{hint}"))
    })
}

/// A bundled preset, parsed and validated.
pub fn preset(name: &str) -> Result<SweepConfig> {
    parse_config(preset_text(name)?)
}

//! Plain-text configuration: flat `[section]` blocks of `key = value` lines
//! (a TOML subset). Validation collects every problem instead of stopping at
//! the first one.

use std::collections::BTreeMap;
use std::path::PathBuf;

use toml::Value;

use super::{
    AxisKind, Integration, Multipartite, OutputSpec, RateUnit, Scenario, Series, SweepAxis, SweepConfig,
};
use crate::error::{Error, Result};
use crate::model::{DriveProtocol, Frame, NetworkSpec};
use crate::router::{build_router_graph, ArmDrive, ArmSpec, Injection, RouterSpec};
use crate::sweep::emit::Format;

pub const KNOWN_KEYS: &[&str] = &[
    "scenario",
    "seed",
    "notes",
    "network.n_sites",
    "network.gamma",
    "network.epsilon",
    "network.pair",
    "drive.h0",
    "drive.h1",
    "drive.j0",
    "drive.j1",
    "drive.omega_d",
    "drive.t_on",
    "sweep.axis",
    "sweep.start",
    "sweep.stop",
    "sweep.points",
    "sweep.values",
    "noise.lambda",
    "noise.lambda_unit",
    "integration.samples",
    "integration.steps_per_period",
    "integration.frame",
    "output.dir",
    "output.formats",
    "router.trunk",
    "router.arms",
    "router.arm_drive",
    "router.arm_field_scale",
    "router.arm_coupling",
    "router.alice_link",
    "router.injection",
    "router.labels",
    "multipartite.amplitudes",
    "multipartite.labels",
    "resonances.max_order",
];

/// Defaults that are not tied to a specific scenario.
const DEFAULT_GRID: (f64, f64, usize) = (0.2, 3.0, 101);
const DEFAULT_SAMPLES: usize = 400;
const DEFAULT_STEPS_PER_PERIOD: f64 = 200.0;
const MIN_STEPS_PER_PERIOD: f64 = 50.0;

struct Reader {
    values: BTreeMap<String, Value>,
    errors: Vec<String>,
}

fn suggest(key: &str) -> Option<&'static str> {
    KNOWN_KEYS
        .iter()
        .map(|k| (strsim::levenshtein(key, k), *k))
        .filter(|(d, _)| *d <= 4)
        .min()
        .map(|(_, k)| k)
}

impl Reader {
    fn new(text: &str) -> std::result::Result<Self, Vec<String>> {
        let table: toml::Table = toml::from_str(text).map_err(|e| vec![format!("syntax: {}", e.message())])?;
        let mut values = BTreeMap::new();
        let mut errors = Vec::new();
        let mut admit = |key: String, v: Value, errors: &mut Vec<String>| {
            if KNOWN_KEYS.contains(&key.as_str()) {
                values.insert(key, v);
            } else {
                match suggest(&key) {
                    Some(s) => errors.push(format!("unknown key `{key}`; did you mean `{s}`?")),
                    None => errors.push(format!("unknown key `{key}`")),
                }
            }
        };
        for (k, v) in table {
            match v {
                Value::Table(section) => {
                    for (sk, sv) in section {
                        if sv.is_table() {
                            errors.push(format!("nested table `{k}.{sk}` is not allowed; sections are flat"));
                        } else {
                            admit(format!("{k}.{sk}"), sv, &mut errors);
                        }
                    }
                }
                other => admit(k, other, &mut errors),
            }
        }
        Ok(Reader { values, errors })
    }

    fn has(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    fn missing(&mut self, key: &str) {
        self.errors.push(format!("missing required key `{key}`"));
    }

    fn wrong(&mut self, key: &str, expected: &str) {
        self.errors.push(format!("`{key}` must be {expected}"));
    }

    fn as_num(v: &Value) -> Option<f64> {
        match v {
            Value::Float(x) => Some(*x),
            Value::Integer(i) => Some(*i as f64),
            _ => None,
        }
    }

    fn num(&mut self, key: &str) -> Option<f64> {
        let v = self.values.get(key)?;
        match Self::as_num(v) {
            Some(x) if x.is_finite() => Some(x),
            _ => {
                self.wrong(key, "a finite number");
                None
            }
        }
    }

    fn num_req(&mut self, key: &str) -> Option<f64> {
        if !self.has(key) {
            self.missing(key);
            return None;
        }
        self.num(key)
    }

    fn num_or(&mut self, key: &str, default: f64) -> f64 {
        if self.has(key) {
            self.num(key).unwrap_or(default)
        } else {
            default
        }
    }

    fn uint(&mut self, key: &str) -> Option<u64> {
        match self.values.get(key)? {
            Value::Integer(i) if *i >= 0 => Some(*i as u64),
            _ => {
                self.wrong(key, "a non-negative integer");
                None
            }
        }
    }

    /// Scalar or list of numbers; the flag tells which.
    fn nums(&mut self, key: &str) -> Option<(Vec<f64>, bool)> {
        match self.values.get(key)? {
            Value::Array(items) => {
                let parsed: Option<Vec<f64>> = items.iter().map(Self::as_num).collect();
                match parsed {
                    Some(v) if v.iter().all(|x| x.is_finite()) => Some((v, true)),
                    _ => {
                        self.wrong(key, "a list of finite numbers");
                        None
                    }
                }
            }
            _ => self.num(key).map(|x| (vec![x], false)),
        }
    }

    fn num_list(&mut self, key: &str) -> Option<Vec<f64>> {
        self.nums(key).map(|(v, _)| v)
    }

    fn uint_list(&mut self, key: &str) -> Option<Vec<usize>> {
        match self.values.get(key)? {
            Value::Array(items) => {
                let parsed: Option<Vec<usize>> = items
                    .iter()
                    .map(|v| v.as_integer().filter(|i| *i >= 0).map(|i| i as usize))
                    .collect();
                if parsed.is_none() {
                    self.wrong(key, "a list of non-negative integers");
                }
                parsed
            }
            _ => {
                self.wrong(key, "a list of non-negative integers");
                None
            }
        }
    }

    fn string(&mut self, key: &str) -> Option<String> {
        match self.values.get(key)? {
            Value::String(s) => Some(s.clone()),
            _ => {
                self.wrong(key, "a string");
                None
            }
        }
    }

    fn strings(&mut self, key: &str) -> Option<(Vec<String>, bool)> {
        match self.values.get(key)? {
            Value::String(s) => Some((vec![s.clone()], false)),
            Value::Array(items) => {
                let parsed: Option<Vec<String>> = items.iter().map(|v| v.as_str().map(String::from)).collect();
                if parsed.is_none() {
                    self.wrong(key, "a string or list of strings");
                }
                parsed.map(|v| (v, true))
            }
            _ => {
                self.wrong(key, "a string or list of strings");
                None
            }
        }
    }

    fn choice<T: Copy>(&mut self, key: &str, options: &[(&str, T)]) -> Option<T> {
        let s = self.string(key)?;
        match options.iter().find(|(n, _)| *n == s) {
            Some((_, v)) => Some(*v),
            None => {
                let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
                self.errors.push(format!("`{key}` = {s:?} is not one of {}", names.join(", ")));
                None
            }
        }
    }
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

/// Parses and validates a configuration, reporting every problem found.
pub fn parse_config(text: &str) -> Result<SweepConfig> {
    let mut r = Reader::new(text).map_err(Error::Config)?;

    let scenario = if r.has("scenario") {
        r.choice("scenario", &Scenario::ALL)
    } else {
        r.missing("scenario");
        None
    };
    let seed = r.uint("seed").unwrap_or(0);
    let notes = r.strings("notes").map(|(v, _)| v).unwrap_or_default();

    // Drive amplitudes. h₀ = 1 sets the energy unit.
    let needs_drive = scenario.is_some_and(Scenario::is_drive);
    let h0 = r.num_or("drive.h0", 1.0);
    let pick = |r: &mut Reader, key: &str| if needs_drive { r.num_req(key) } else { Some(r.num_or(key, 0.0)) };
    let h1 = pick(&mut r, "drive.h1");
    let j0 = if scenario == Some(Scenario::Router) { r.num_req("drive.j0") } else { pick(&mut r, "drive.j0") };
    let j1 = pick(&mut r, "drive.j1");
    let omega_fixed = r.num("drive.omega_d");
    let t_on = r.num_or("drive.t_on", 0.0);
    if t_on < 0.0 {
        r.errors.push("`drive.t_on` must be non-negative".into());
    }
    if !(h0 > 0.0) && needs_drive {
        r.errors.push("`drive.h0` must be positive".into());
    }

    // Scenario/amplitude consistency.
    if let (Some(sc), Some(h1), Some(j0), Some(j1)) = (scenario, h1, j0, j1) {
        match sc {
            Scenario::CouplingDrive => {
                if h1 != 0.0 {
                    r.errors.push(format!("coupling-drive requires drive.h1 = 0, got {h1}"));
                }
                if j1 == 0.0 {
                    r.errors.push("coupling-drive requires a nonzero drive.j1".into());
                }
            }
            Scenario::FieldDrive => {
                if j1 != 0.0 {
                    r.errors.push(format!("field-drive requires drive.j1 = 0, got {j1}"));
                }
                if h1 == 0.0 {
                    r.errors.push("field-drive requires a nonzero drive.h1".into());
                }
            }
            _ => {}
        }
        if (needs_drive || sc == Scenario::Router) && !(j0.max(j1) > 0.0) {
            r.errors.push("observation window needs max(drive.j0, drive.j1) > 0".into());
        }
    }

    // Network and series.
    let gamma_series = r.nums("network.gamma");
    let lambda_series = r.nums("noise.lambda");
    let lambda_unit = if r.has("noise.lambda_unit") {
        r.choice("noise.lambda_unit", &[("absolute", RateUnit::Absolute), ("J", RateUnit::Coupling)])
            .unwrap_or(RateUnit::Absolute)
    } else {
        RateUnit::Absolute
    };
    if let Some((ls, _)) = &lambda_series {
        if ls.iter().any(|l| *l < 0.0) {
            r.errors.push("`noise.lambda` values must be non-negative".into());
        }
    }

    // Swept axis.
    let axis_kind = match r.strings("sweep.axis") {
        None => Some(AxisKind::OmegaD),
        Some((names, _)) if names.len() != 1 => {
            r.errors.push(format!(
                "exactly one swept axis is allowed, got {} ({})",
                names.len(),
                names.join(", ")
            ));
            None
        }
        Some((names, _)) => match names[0].as_str() {
            "omega_d" => Some(AxisKind::OmegaD),
            "lambda" => Some(AxisKind::Lambda),
            other => {
                r.errors.push(format!("`sweep.axis` = {other:?} is not one of omega_d, lambda"));
                None
            }
        },
    };
    let explicit = r.num_list("sweep.values");
    let range_keys = ["sweep.start", "sweep.stop", "sweep.points"];
    let grid = if let Some(v) = explicit {
        if range_keys.iter().any(|k| r.has(k)) {
            r.errors.push("give either `sweep.values` or `sweep.start/stop/points`, not both".into());
        }
        Some(v)
    } else {
        let (ds, de, dp) = DEFAULT_GRID;
        let start = r.num_or("sweep.start", ds * h0);
        let stop = r.num_or("sweep.stop", de * h0);
        let points = if r.has("sweep.points") { r.uint("sweep.points").map(|p| p as usize) } else { Some(dp) };
        points.map(|p| match p {
            0 => vec![],
            1 => vec![start],
            _ => (0..p).map(|i| (start * (p - 1 - i) as f64 + stop * i as f64) / (p - 1) as f64).collect(),
        })
    };
    if let Some(g) = &grid {
        if g.is_empty() {
            r.errors.push("sweep grid is empty".into());
        } else if !strictly_increasing(g) {
            r.errors.push("sweep grid must be strictly increasing".into());
        }
        match axis_kind {
            Some(AxisKind::OmegaD) if g.iter().any(|w| *w <= 0.0) => {
                r.errors.push("omega_d grid values must be positive".into())
            }
            Some(AxisKind::Lambda) if g.iter().any(|l| *l < 0.0) => {
                r.errors.push("lambda grid values must be non-negative".into())
            }
            _ => {}
        }
    }

    let gamma_is_list = gamma_series.as_ref().is_some_and(|(_, l)| *l);
    let lambda_is_list = lambda_series.as_ref().is_some_and(|(_, l)| *l);
    if gamma_is_list && lambda_is_list {
        r.errors.push("only one of `network.gamma` and `noise.lambda` may be a list".into());
    }
    if axis_kind == Some(AxisKind::Lambda) {
        if lambda_is_list || r.has("noise.lambda") {
            r.errors.push("`noise.lambda` cannot be set when lambda is the swept axis".into());
        }
        if omega_fixed.is_none() && needs_drive {
            r.missing("drive.omega_d");
        }
    }
    if let Some((gs, true)) = &gamma_series {
        if gs.is_empty() {
            r.errors.push("`network.gamma` list is empty".into());
        }
    }
    if let Some((ls, true)) = &lambda_series {
        if ls.is_empty() {
            r.errors.push("`noise.lambda` list is empty".into());
        }
    }
    let series = match (&gamma_series, &lambda_series) {
        (Some((g, true)), _) => Series::Gamma(g.clone()),
        (_, Some((l, true))) => Series::Lambda(l.clone()),
        _ => Series::Single,
    };
    let gamma = gamma_series.as_ref().and_then(|(g, _)| g.first().copied());
    let lambda = match &lambda_series {
        Some((l, false)) => l[0],
        _ => 0.0,
    };

    // Integration.
    let samples = if r.has("integration.samples") {
        r.uint("integration.samples").map(|s| s as usize).unwrap_or(DEFAULT_SAMPLES)
    } else {
        DEFAULT_SAMPLES
    };
    if samples == 0 {
        r.errors.push("`integration.samples` must be at least 1".into());
    }
    let steps_per_period = r.num_or("integration.steps_per_period", DEFAULT_STEPS_PER_PERIOD);
    if steps_per_period < MIN_STEPS_PER_PERIOD {
        r.errors.push(format!(
            "`integration.steps_per_period` must be at least {MIN_STEPS_PER_PERIOD}, got {steps_per_period}"
        ));
    }
    let frame = if r.has("integration.frame") {
        r.choice("integration.frame", &[("lab", Frame::Lab), ("interaction", Frame::Interaction)])
            .unwrap_or(Frame::Interaction)
    } else {
        Frame::Interaction
    };

    // Output.
    let dir = r.string("output.dir").unwrap_or_else(|| "out".into());
    let formats = match r.strings("output.formats") {
        None => vec![Format::Csv, Format::Json, Format::Svg],
        Some((names, _)) => names
            .iter()
            .filter_map(|n| match n.parse::<Format>() {
                Ok(f) => Some(f),
                Err(e) => {
                    r.errors.push(e.to_string());
                    None
                }
            })
            .collect(),
    };

    // Scenario-specific sections.
    let router = if scenario == Some(Scenario::Router) { read_router(&mut r, gamma.unwrap_or(0.0)) } else { None };
    let multipartite = if scenario == Some(Scenario::Multipartite) { read_multipartite(&mut r) } else { None };
    let max_order = match r.uint("resonances.max_order") {
        Some(0) => {
            r.errors.push("`resonances.max_order` must be at least 1".into());
            2
        }
        Some(o) => o as u32,
        None => 2,
    };

    // Network.
    let network = match scenario {
        Some(sc) if sc.is_drive() => {
            let n = if r.has("network.n_sites") {
                r.uint("network.n_sites")
            } else {
                r.missing("network.n_sites");
                None
            };
            if gamma_series.is_none() {
                r.missing("network.gamma");
            }
            match (n, gamma) {
                (Some(n), Some(g)) => build_chain(&mut r, n as usize, g),
                _ => None,
            }
        }
        Some(Scenario::Router) => router.as_ref().and_then(|rs| match build_router_graph(rs) {
            Ok(s) => Some(s),
            Err(e) => {
                r.errors.push(format!("router: {e}"));
                None
            }
        }),
        Some(Scenario::Multipartite) => {
            let n = multipartite.as_ref().map_or(1, |m| m.amplitudes.len().max(1));
            NetworkSpec::chain(n, 0.0).ok()
        }
        _ => NetworkSpec::chain(1, 0.0).ok(),
    };

    let pair = match (r.uint_list("network.pair"), &network) {
        (Some(p), Some(net)) => {
            if p.len() != 2 || p[0] == p[1] || p.iter().any(|&s| s >= net.n_sites()) {
                r.errors.push(format!("`network.pair` must be two distinct sites below {}", net.n_sites()));
                None
            } else {
                Some((p[0], p[1]))
            }
        }
        (None, Some(net)) => Some(net.end_pair()),
        _ => None,
    };

    if !r.errors.is_empty() {
        return Err(Error::Config(r.errors));
    }
    let (scenario, network, pair, axis_kind, grid) = (
        scenario.expect("checked"),
        network.expect("checked"),
        pair.expect("checked"),
        axis_kind.expect("checked"),
        grid.expect("checked"),
    );
    let drive = DriveProtocol {
        h0,
        h1: h1.unwrap_or(0.0),
        j0: j0.unwrap_or(0.0),
        j1: j1.unwrap_or(0.0),
        // Resonant by default when ω is swept or unused.
        omega_d: omega_fixed.unwrap_or(2.0 * h0),
        t_on,
    };
    Ok(SweepConfig {
        scenario,
        network,
        drive,
        axis: SweepAxis { kind: axis_kind, values: grid },
        series,
        lambda,
        lambda_unit,
        pair,
        integration: Integration { samples, steps_per_period, frame },
        output: OutputSpec { dir: PathBuf::from(dir), formats },
        seed,
        router,
        multipartite,
        max_order,
        notes,
    })
}

fn build_chain(r: &mut Reader, n: usize, gamma: f64) -> Option<NetworkSpec> {
    if n == 0 {
        r.errors.push("`network.n_sites` must be at least 1".into());
        return None;
    }
    let spec = match NetworkSpec::chain(n, gamma) {
        Ok(s) => s,
        Err(e) => {
            r.errors.push(format!("network: {e}"));
            return None;
        }
    };
    match r.num_list("network.epsilon") {
        None => Some(spec),
        Some(eps) => match spec.with_epsilon(eps) {
            Ok(s) => Some(s),
            Err(e) => {
                r.errors.push(format!("network.epsilon: {e}"));
                None
            }
        },
    }
}

fn read_router(r: &mut Reader, gamma: f64) -> Option<RouterSpec> {
    let trunk = if r.has("router.trunk") {
        r.uint("router.trunk")
    } else {
        r.missing("router.trunk");
        None
    };
    let arms = if r.has("router.arms") {
        r.uint_list("router.arms")
    } else {
        r.missing("router.arms");
        None
    };
    let (trunk, arms) = (trunk? as usize, arms?);
    let n_arms = arms.len();
    let per_arm = |r: &mut Reader, key: &str, v: Option<Vec<f64>>| -> Option<Vec<f64>> {
        match v {
            Some(v) if v.len() != n_arms => {
                r.errors.push(format!("`{key}` needs one entry per arm ({n_arms})"));
                None
            }
            other => other,
        }
    };
    let drives = match r.strings("router.arm_drive") {
        Some((v, _)) if v.len() != n_arms => {
            r.errors.push(format!("`router.arm_drive` needs one entry per arm ({n_arms})"));
            None
        }
        Some((v, _)) => Some(v),
        None => None,
    };
    let fields = r.num_list("router.arm_field_scale");
    let fields = per_arm(r, "router.arm_field_scale", fields);
    let couplings = r.num_list("router.arm_coupling");
    let couplings = per_arm(r, "router.arm_coupling", couplings);
    let alice_link = r.num_or("router.alice_link", 0.0);
    let injection = if r.has("router.injection") {
        r.choice(
            "router.injection",
            &[("bell-pair", Injection::BellPair), ("neighbor-excitation", Injection::NeighborExcitation)],
        )?
    } else {
        Injection::BellPair
    };
    let default_labels = {
        let mut v = vec!["Alice".to_string()];
        let names = ["Bob", "Charlie", "Dave", "Eve", "Frank", "Grace"];
        v.extend((0..n_arms).map(|i| names.get(i).map_or_else(|| format!("Arm{i}"), |s| s.to_string())));
        v
    };
    let labels = match r.strings("router.labels") {
        Some((v, _)) if v.len() != n_arms + 1 => {
            r.errors.push(format!("`router.labels` needs Alice plus one label per arm ({})", n_arms + 1));
            return None;
        }
        Some((v, _)) => v,
        None => default_labels,
    };
    let mut arm_specs = Vec::with_capacity(n_arms);
    for (i, len) in arms.iter().enumerate() {
        let drive = match drives.as_ref().map(|d| d[i].as_str()) {
            None | Some("undriven") => ArmDrive::Undriven,
            Some("driven") => ArmDrive::Driven { field_scale: fields.as_ref().map_or(1.0, |f| f[i]) },
            Some(other) => {
                r.errors.push(format!("`router.arm_drive` entry {other:?} is not one of undriven, driven"));
                ArmDrive::Undriven
            }
        };
        arm_specs.push(ArmSpec {
            len: *len,
            drive,
            coupling_scale: couplings.as_ref().map_or(1.0, |c| c[i]),
            end_label: labels[i + 1].clone(),
        });
    }
    Some(RouterSpec {
        trunk_len: trunk,
        arms: arm_specs,
        alice_link_scale: alice_link,
        gamma,
        injection,
        alice_label: labels[0].clone(),
    })
}

fn read_multipartite(r: &mut Reader) -> Option<Multipartite> {
    if !r.has("multipartite.amplitudes") {
        r.missing("multipartite.amplitudes");
        return None;
    }
    let amplitudes = r.num_list("multipartite.amplitudes")?;
    if amplitudes.is_empty() || amplitudes.iter().all(|a| *a == 0.0) {
        r.errors.push("`multipartite.amplitudes` must contain a nonzero entry".into());
        return None;
    }
    if amplitudes.len() > 12 {
        r.errors.push("`multipartite.amplitudes` supports at most 12 parties".into());
        return None;
    }
    let labels = match r.strings("multipartite.labels") {
        Some((v, _)) if v.len() != amplitudes.len() => {
            r.errors.push("`multipartite.labels` needs one label per amplitude".into());
            return None;
        }
        Some((v, _)) => v,
        None => (0..amplitudes.len()).map(|i| format!("P{i}")).collect(),
    };
    Some(Multipartite { amplitudes, labels })
}

use std::fs;

use xyent::sweep::{
    emit_results, parse_config, parse_csv, preset, preset_text, render_csv, render_svg, run_decoherence_sweep,
    run_evolve, run_frequency_sweep, AxisKind, Format, Scenario, Series, SweepConfig, KNOWN_KEYS, PRESET_NAMES,
};
use xyent::Error;

fn small(extra: &str) -> SweepConfig {
    let text = format!(
        r#"
scenario = "coupling-drive"
[network]
n_sites = 3
gamma = 2.0
[drive]
h1 = 0.0
j0 = 0.0
j1 = 0.3
[integration]
samples = 60
steps_per_period = 60
{extra}
"#
    );
    parse_config(&text).unwrap_or_else(|e| panic!("{e}"))
}

fn with_grid(values: &str) -> SweepConfig {
    let mut cfg = small("");
    let parsed = parse_config(&format!(
        "scenario = \"coupling-drive\"\n[network]\nn_sites = 3\ngamma = 2.0\n[drive]\nh1 = 0\nj0 = 0\nj1 = 0.3\n[sweep]\nvalues = {values}\n"
    ))
    .unwrap();
    cfg.axis = parsed.axis;
    cfg
}

#[test]
fn fig1a_preset_matches_caption() {
    let cfg = preset("fig1a").unwrap();
    assert_eq!(cfg.scenario, Scenario::CouplingDrive);
    assert_eq!(cfg.network.n_sites(), 6);
    assert_eq!((cfg.drive.h0, cfg.drive.h1, cfg.drive.j0, cfg.drive.j1), (1.0, 0.0, 0.0, 0.1));
    assert_eq!(cfg.series, Series::Gamma(vec![0.0, 1.0, 5.0]));
    assert_eq!(cfg.axis.kind, AxisKind::OmegaD);
    assert_eq!(cfg.axis.values.len(), 101);
    assert_eq!((cfg.axis.values[0], cfg.axis.values[100]), (0.2, 3.0));
    assert_eq!(cfg.pair, (0, 5));
    assert!(cfg.notes.iter().any(|n| n.contains("illustrative")));
}

#[test]
fn fig1b_and_fig5_presets() {
    let b = preset("fig1b").unwrap();
    assert_eq!((b.drive.h1, b.drive.j0, b.drive.j1, b.network.gamma()), (0.1, 0.1, 0.0, 5.0));
    for name in ["fig5a", "fig5b"] {
        let cfg = preset(name).unwrap();
        assert_eq!((cfg.network.n_sites(), cfg.network.gamma()), (6, 5.0));
        assert_eq!(cfg.series, Series::Lambda(vec![0.0, 1e-4, 1e-3, 1e-2]));
        assert_eq!(cfg.absolute_rate(1e-3), 1e-3 * 0.1);
    }
}

#[test]
fn every_preset_uses_only_known_keys() {
    for name in PRESET_NAMES {
        let table: toml::Table = toml::from_str(preset_text(name).unwrap()).unwrap();
        for (k, v) in table {
            match v {
                toml::Value::Table(t) => {
                    for sk in t.keys() {
                        assert!(KNOWN_KEYS.contains(&format!("{k}.{sk}").as_str()), "{name}: {k}.{sk}");
                    }
                }
                _ => assert!(KNOWN_KEYS.contains(&k.as_str())),
            }
        }
    }
}

#[test]
fn scenario_amplitude_mismatch_is_rejected_before_compute() {
    let text = preset_text("fig1a").unwrap().replace("h1 = 0.0", "h1 = 0.05");
    match parse_config(&text) {
        Err(Error::Config(errs)) => assert!(errs.iter().any(|e| e.contains("h1 = 0"))),
        other => panic!("{other:?}"),
    }
}

#[test]
fn empty_grid_creates_no_output() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        "{}\n[output]\ndir = \"{}\"\n",
        preset_text("fig1b").unwrap().replace("points = 101", "points = 0"),
        dir.path().join("out").display()
    );
    assert!(matches!(parse_config(&text), Err(Error::Config(_))));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn csv_round_trip_is_bitwise() {
    let cfg = with_grid("[0.7, 1.9, 2.0, 2.3]");
    let res = run_frequency_sweep(&cfg, Some(1)).unwrap();
    let csv = render_csv(&res).unwrap();
    let rows = parse_csv(&csv).unwrap();
    assert_eq!(rows.len(), res.row_count());
    for (row, p) in rows.iter().zip(&res.series[0].points) {
        assert_eq!(row.swept_value.to_bits(), p.swept_value.to_bits());
        assert_eq!(row.c_max.to_bits(), p.c_max.to_bits());
        assert_eq!(row.t_max.to_bits(), p.t_max.to_bits());
    }
    assert!(csv.lines().next().unwrap().contains("swept_value,c_max,t_max"));
}

#[test]
fn single_row_csv_has_two_lines() {
    let res = run_frequency_sweep(&with_grid("[2.0]"), None).unwrap();
    assert_eq!(render_csv(&res).unwrap().lines().count(), 2);
}

#[test]
fn worker_count_and_evaluation_order_do_not_matter() {
    let cfg = with_grid("[0.9, 1.4, 2.0, 2.6]");
    let a = render_csv(&run_frequency_sweep(&cfg, Some(1)).unwrap()).unwrap();
    let b = render_csv(&run_frequency_sweep(&cfg, Some(3)).unwrap()).unwrap();
    assert_eq!(a, b);
    // Each point computed on its own, in reverse order, gives the same values.
    let full = run_frequency_sweep(&cfg, Some(2)).unwrap();
    for p in full.series[0].points.iter().rev() {
        let single = run_frequency_sweep(&with_grid(&format!("[{}]", p.swept_value)), Some(1)).unwrap();
        assert_eq!(single.series[0].points[0], *p);
    }
}

#[test]
fn zero_dephasing_row_reproduces_closed_sweep() {
    let closed = run_frequency_sweep(&with_grid("[1.8, 2.0]"), None).unwrap();
    let mut cfg = with_grid("[1.8, 2.0]");
    cfg.series = Series::Lambda(vec![0.0, 0.05]);
    let open = run_decoherence_sweep(&cfg, None).unwrap();
    for (a, b) in closed.series[0].points.iter().zip(&open.series[0].points) {
        assert!((a.c_max - b.c_max).abs() < 1e-8);
    }
    let damped = &open.series[1].points[1];
    assert!(damped.c_max < open.series[0].points[1].c_max);
}

#[test]
fn master_equation_agrees_with_pure_sweep_at_zero_rate() {
    // Tiny but nonzero λ goes through the density-matrix integrator.
    let mut cfg = with_grid("[2.0]");
    cfg.integration.steps_per_period = 400.0;
    let closed = run_frequency_sweep(&cfg, None).unwrap();
    cfg.series = Series::Lambda(vec![1e-12]);
    let open = run_decoherence_sweep(&cfg, None).unwrap();
    assert!((closed.series[0].points[0].c_max - open.series[0].points[0].c_max).abs() < 1e-8);
}

#[test]
fn decoherence_cap_is_a_resource_error() {
    let text = preset_text("fig5a").unwrap().replace("n_sites = 6", "n_sites = 9");
    let cfg = parse_config(&text).unwrap();
    let err = run_decoherence_sweep(&cfg, None).unwrap_err();
    assert_eq!(err.category(), "resource");
    assert!(err.to_string().contains("bytes"));
}

#[test]
fn fig5_manifest_echoes_parameters() {
    let mut cfg = preset("fig5a").unwrap();
    cfg.axis.values = vec![2.0];
    cfg.network = cfg.network.clone();
    cfg.integration.samples = 20;
    cfg.series = Series::Lambda(vec![0.0]);
    let res = run_decoherence_sweep(&cfg, None).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = emit_results(&res, dir.path(), "fig5a", &[Format::Json]).unwrap();
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&files[0]).unwrap()).unwrap();
    let config = &json["metadata"]["config"];
    assert_eq!(config["network"]["gamma"], 5.0);
    assert_eq!(config["network"]["n_sites"], 6);
    for key in ["h0", "h1", "j0", "j1", "omega_d", "t_on"] {
        assert!(config["drive"][key].is_number(), "{key}");
    }
    assert!(config["network"]["epsilon"].is_array() && config["network"]["edges"].is_array());
    assert_eq!(config["lambda_unit"], "coupling");
    assert!(config["integration"]["steps_per_period"].is_number());
    assert!(config["integration"]["samples"].is_number());
    assert_eq!(config["integration"]["frame"], "interaction");
    assert!(json["metadata"]["code_version"].is_string());
    assert!(json["metadata"]["step_size_bound"].is_number());
}

#[test]
fn svg_is_well_formed_with_one_polyline_per_series() {
    let mut cfg = with_grid("[1.5, 2.0, 2.5]");
    cfg.series = Series::Gamma(vec![0.5, 2.0]);
    let res = run_frequency_sweep(&cfg, None).unwrap();
    let svg = render_svg(&res);
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let root = doc.root_element();
    assert_eq!(root.tag_name().name(), "svg");
    assert_eq!(root.tag_name().namespace(), Some("http://www.w3.org/2000/svg"));
    assert_eq!(root.attribute("version"), Some("1.1"));
    let polylines: Vec<_> = root.descendants().filter(|n| n.has_tag_name("polyline")).collect();
    assert_eq!(polylines.len(), 2);
    for p in &polylines {
        let pts: Vec<&str> = p.attribute("points").unwrap().split_whitespace().collect();
        assert_eq!(pts.len(), 3);
        for pt in pts {
            let (x, y) = pt.split_once(',').unwrap();
            assert!(x.parse::<f64>().unwrap().is_finite() && y.parse::<f64>().unwrap().is_finite());
        }
    }
    let texts: Vec<String> = root.descendants().filter(|n| n.has_tag_name("text")).filter_map(|n| n.text().map(String::from)).collect();
    assert!(texts.iter().any(|t| t.contains("ω_d")));
    assert!(texts.iter().any(|t| t.contains("C_max")));
}

#[test]
fn emission_is_deterministic() {
    let cfg = with_grid("[1.0, 2.0]");
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    let formats = [Format::Csv, Format::Json, Format::Svg];
    let f1 = emit_results(&run_frequency_sweep(&cfg, Some(1)).unwrap(), d1.path(), "s", &formats).unwrap();
    let f2 = emit_results(&run_frequency_sweep(&cfg, Some(2)).unwrap(), d2.path(), "s", &formats).unwrap();
    assert_eq!(f1.len(), 3);
    for (a, b) in f1.iter().zip(&f2) {
        assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap(), "{}", a.display());
    }
}

#[test]
fn unwritable_destination_is_io_error_without_leftovers() {
    let res = run_frequency_sweep(&with_grid("[2.0]"), None).unwrap();
    let dir = tempfile::tempdir().unwrap();
    // A regular file where the output directory should be.
    let blocker = dir.path().join("blocked");
    fs::write(&blocker, b"x").unwrap();
    let err = emit_results(&res, &blocker.join("sub"), "s", &[Format::Csv]).unwrap_err();
    assert_eq!(err.category(), "io");

    // Second format collides with an existing directory: the first file must be removed again.
    let out = dir.path().join("out");
    fs::create_dir_all(out.join("s.json")).unwrap();
    let err = emit_results(&res, &out, "s", &[Format::Csv, Format::Json]).unwrap_err();
    assert_eq!(err.category(), "io");
    let left: Vec<_> = fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(left, vec![std::ffi::OsString::from("s.json")]);
}

#[test]
fn evolve_reports_single_trace() {
    let mut cfg = small("");
    cfg.drive.omega_d = 2.0;
    let r = run_evolve(&cfg).unwrap();
    assert_eq!(r.trace.values.len(), 61);
    assert!(r.trace.c_max > 0.0);
    assert_eq!(r.trace.site_pair, (0, 2));
}

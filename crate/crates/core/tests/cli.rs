//! End-to-end runs of the `bxshadow` binary.

use std::collections::HashMap;
use std::path::Path;
use std::process::{Command, Output};

use bxshadow::channel::{c_alpha, db_to_linear, linear_to_db};
use bxshadow::specfun::SeriesPolicy;
use bxshadow::{Channel, ChannelParams};

fn bxshadow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bxshadow"))
        .args(args)
        .env_remove("BXSHADOW_WORKERS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap_or(-1)
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

/// Column name to cells; empty cells become `None`.
struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<Option<f64>>>,
}

impl Csv {
    fn parse(text: &str) -> Csv {
        let mut lines = text.lines();
        let header = lines.next().expect("header").split(',').map(str::to_string).collect();
        let rows = lines
            .map(|l| {
                l.split(',')
                    .map(|c| if c.is_empty() { None } else { Some(c.parse().expect("number")) })
                    .collect()
            })
            .collect();
        Csv { header, rows }
    }

    fn index(&self) -> HashMap<&str, usize> {
        self.header.iter().enumerate().map(|(i, h)| (h.as_str(), i)).collect()
    }

    fn column(&self, name: &str) -> Vec<f64> {
        let i = self.index()[name];
        self.rows.iter().map(|r| r[i].expect("value present")).collect()
    }
}

const PARAMS: [&str; 12] = [
    "--m-x", "1.5", "--m-y", "2.5", "--omega-x-db", "5", "--omega-y-db", "-5", "--alpha", "3", "--gamma-bar-db", "10",
];

fn with_params<'a>(head: &[&'a str], tail: &[&'a str]) -> Vec<&'a str> {
    let mut v = head.to_vec();
    v.extend_from_slice(&PARAMS);
    v.extend_from_slice(tail);
    v
}

#[test]
fn exit_codes() {
    assert_eq!(code(&bxshadow(&[])), 1);
    assert_eq!(code(&bxshadow(&["--help"])), 0);
    assert_eq!(code(&bxshadow(&["no-such-command"])), 1);
    // a required channel field is missing and the message names it
    let out = bxshadow(&["eval", "--m-x", "1", "--m-y", "1", "--omega-x", "1", "--omega-y", "1", "--alpha", "2", "--metric", "aof"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("gamma_bar"), "{}", stderr(&out));
    // invalid parameter value
    let out = bxshadow(&["eval", "--m-x", "-1", "--m-y", "1", "--omega-x", "1", "--omega-y", "1", "--alpha", "2", "--gamma-bar", "1", "--metric", "aof"]);
    assert_eq!(code(&out), 1);
    // a series budget too small for the requested point
    let out = bxshadow(&with_params(&["--max-terms", "2", "eval"], &["--metric", "cdf", "--gamma", "5"]));
    assert_eq!(code(&out), 2, "{}", stderr(&out));
    // validation against the wrong law
    let out = bxshadow(&with_params(&["mc-validate"], &["--n", "200000", "--target", "m_x=1.9"]));
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    // below the minimum sample size
    assert_eq!(code(&bxshadow(&with_params(&["mc-validate"], &["--n", "100"]))), 1);
    // sample needs an output path
    assert_eq!(code(&bxshadow(&with_params(&["sample"], &["--n", "10"]))), 1);
}

#[test]
fn single_point_row() {
    let out = bxshadow(&with_params(&["eval"], &["--metric", "aof,cqei,moment:2"]));
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = Csv::parse(&stdout(&out));
    assert_eq!(csv.header, ["aof", "cqei", "moment_2"]);
    assert_eq!(csv.rows.len(), 1);
    let p = ChannelParams::from_db(1.5, 2.5, 5.0, -5.0, 3.0, 10.0).unwrap();
    let ch = Channel::with_defaults(p).unwrap();
    let aof = csv.column("aof")[0];
    assert_eq!(aof, ch.amount_of_fading().unwrap());
    assert!((csv.column("cqei")[0] - aof / 10.0).abs() < 1e-15);
    assert!((csv.column("moment_2")[0] / 100.0 - 1.0 - aof).abs() < 1e-12);
}

#[test]
fn sweep_with_two_axes() {
    let out = bxshadow(&[
        "sweep", "--m-y", "2.5", "--omega-x-db", "5", "--omega-y-db", "-5", "--gamma-bar-db", "10", "--gamma-th-db", "3",
        "--sweep", "m_x:0.5:2:4:linear", "--sweep", "alpha:1:4:3:linear", "--metric", "pout",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = Csv::parse(&stdout(&out));
    assert_eq!(csv.header, ["m_x", "alpha", "pout"]);
    assert_eq!(csv.rows.len(), 12);
    // first axis outermost
    assert_eq!(csv.column("m_x")[..3], [0.5, 0.5, 0.5]);
    assert_eq!(csv.column("alpha")[..3], [1.0, 2.5, 4.0]);
}

#[test]
fn cqei_scales_inversely_with_mean_snr() {
    let out = bxshadow(&["figure", "fig5"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = Csv::parse(&stdout(&out));
    let gb: Vec<f64> = csv.column("gamma_bar_db").into_iter().map(db_to_linear).collect();
    let cqei_columns: Vec<&String> = csv.header.iter().filter(|h| h.starts_with("cqei_")).collect();
    assert_eq!(cqei_columns.len(), 8);
    for name in cqei_columns {
        let products: Vec<f64> = csv.column(name).iter().zip(&gb).map(|(c, g)| c * g).collect();
        for p in &products {
            assert!((p / products[0] - 1.0).abs() < 1e-12, "{name}");
        }
    }
}

#[test]
fn small_fading_parameter_is_hyper_rayleigh() {
    let out = bxshadow(&["figure", "fig6"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = Csv::parse(&stdout(&out));
    let (m_x, m_y, aof) = (csv.column("m_x"), csv.column("m_y"), csv.column("aof"));
    let mut seen = 0;
    for i in 0..m_x.len() {
        if m_x[i] < 0.25 {
            assert!(aof[i] > 1.0, "m_x = {}, m_y = {}: AoF {}", m_x[i], m_y[i], aof[i]);
            seen += 1;
        }
    }
    assert!(seen >= 8 * 4);
    // every m_y family crosses AoF = 1 somewhere on the grid
    let flagged = csv.column("on_contour").iter().filter(|&&f| f == 1.0).count();
    assert!(flagged >= 8);
}

#[test]
fn bound_ratio_in_fig2() {
    let out = bxshadow(&["figure", "fig2"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = Csv::parse(&stdout(&out));
    let gb: Vec<f64> = csv.column("gamma_bar_db").into_iter().map(db_to_linear).collect();
    let th = db_to_linear(3.0);
    for alpha in [2.0, 3.0, 4.0] {
        let p = ChannelParams::from_db(1.5, 2.5, 5.0, -5.0, alpha, 0.0).unwrap();
        let c = c_alpha(&p, &SeriesPolicy::default()).unwrap().value();
        let lower = csv.column(&format!("pout_lower_a{alpha}"));
        let upper = csv.column(&format!("pout_upper_a{alpha}"));
        let exact = csv.column(&format!("pout_exact_a{alpha}"));
        for i in 0..gb.len() {
            let want = (-(th / gb[i]).powf(alpha / 2.0) / c).exp();
            if want > 1e-250 {
                assert!((lower[i] / upper[i] / want - 1.0).abs() < 1e-12, "α = {alpha}, row {i}");
            }
            assert!(lower[i] <= exact[i] && (0.0..=1.0).contains(&exact[i]));
        }
    }
}

#[test]
fn fig2_monte_carlo_columns_track_exact() {
    let out = bxshadow(&["figure", "fig2", "--mc-samples", "1000000", "--seed", "5"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = Csv::parse(&stdout(&out));
    for alpha in [2, 3, 4] {
        let exact = csv.column(&format!("pout_exact_a{alpha}"));
        let mc = csv.column(&format!("pout_mc_a{alpha}"));
        let se = csv.column(&format!("pout_mc_stderr_a{alpha}"));
        for i in 0..exact.len() {
            let binomial = (exact[i] * (1.0 - exact[i]) / 1e6).sqrt();
            let band = 4.0 * se[i].max(binomial) + 1e-6;
            assert!((mc[i] - exact[i]).abs() <= band, "α = {alpha}, row {i}");
        }
    }
}

#[test]
fn quality_reliability_low_snr_side() {
    let out = bxshadow(&["figure", "fig7"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = Csv::parse(&stdout(&out));
    assert_eq!(csv.column("gamma_bar_db")[0], -10.0);
    for alpha in [2, 3, 4] {
        let pout = csv.column(&format!("qr_pout_a{alpha}_th-10db"))[0];
        let ber = csv.column(&format!("qr_ber_a{alpha}_th-10db"))[0];
        assert!(pout > ber, "α = {alpha}: {pout} vs {ber}");
    }
}

#[test]
fn figure_overrides() {
    let out = bxshadow(&["figure", "fig3"]);
    assert_eq!(code(&out), 1);
    let out = bxshadow(&["figure", "fig3", "--override", "m_x=0.5,1.5"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = Csv::parse(&stdout(&out));
    assert_eq!(csv.rows.len(), 51);
    assert_eq!(csv.header.len(), 1 + 2 * 2);
    assert_eq!(code(&bxshadow(&["figure", "fig3", "--override", "m_x=1", "--override", "alpha=2"])), 1);
}

#[test]
fn db_flags_round_trip() {
    for x in [-37.25, -5.0, 0.0, 3.0, 12.345_678_9, 60.0] {
        assert!((linear_to_db(db_to_linear(x)) - x).abs() <= 1e-12 * x.abs().max(1.0));
    }
    let out = bxshadow(&[
        "sweep", "--m-x", "1", "--m-y", "1", "--omega-x", "1", "--omega-y", "1", "--alpha", "2", "--gamma-th", "1",
        "--sweep", "gamma_bar:-12.5:37.5:5:db", "--metric", "pout",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = Csv::parse(&stdout(&out));
    assert_eq!(csv.header[0], "gamma_bar_db");
    let shown = csv.column("gamma_bar_db");
    for (got, want) in shown.iter().zip([-12.5, 0.0, 12.5, 25.0, 37.5]) {
        assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0));
    }
    // same point through the linear flags
    let pout = csv.column("pout");
    let out = bxshadow(&[
        "eval", "--m-x", "1", "--m-y", "1", "--omega-x", "1", "--omega-y", "1", "--alpha", "2",
        "--gamma-bar", &db_to_linear(12.5).to_string(), "--gamma-th", "1", "--metric", "pout",
    ]);
    let single = Csv::parse(&stdout(&out)).column("pout")[0];
    assert!((single / pout[2] - 1.0).abs() < 1e-12);
}

#[test]
fn missing_cells_stay_empty() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("t.csv");
    let out_str = out_path.to_string_lossy().into_owned();
    // the cdf fails at every point with a two-term budget while aof succeeds
    let out = bxshadow(&[
        "--max-terms", "2", "--out", &out_str, "sweep", "--m-x", "1.5", "--m-y", "2.5", "--omega-x-db", "5",
        "--omega-y-db", "-5", "--gamma-bar-db", "10", "--gamma", "5",
        "--sweep", "alpha:2:4:3:linear", "--metric", "cdf",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let csv = Csv::parse(&text);
    let idx = csv.index()["cdf"];
    assert!(csv.rows.iter().all(|r| r[idx].is_none()), "{text}");
    assert!(!text.contains(",0\n") && !text.contains(",0.0\n"));
    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("t.csv.meta.json")).unwrap()).unwrap();
    let missing = sidecar["missing"].as_array().unwrap();
    assert_eq!(missing.len(), 3);
    assert_eq!(missing[0]["column"], "cdf");
    assert!(!missing[0]["reason"].as_str().unwrap().is_empty());
}

#[test]
fn validation_report_schema() {
    let out = bxshadow(&with_params(&["mc-validate"], &["--n", "200000", "--seed", "4", "--orders", "1,2,3"]));
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    for key in [
        "n_samples", "significance", "ks_distance", "ks_threshold", "ks_pass", "empirical_moments", "analytic_moments",
        "moment_stderr", "moment_gaps", "moment_band", "moments_pass", "aof_empirical", "aof_analytic", "aof_stderr",
        "pass", "sampled", "target", "meta",
    ] {
        assert!(doc.get(key).is_some(), "missing {key}");
    }
    assert_eq!(doc["n_samples"], 200_000);
    assert_eq!(doc["meta"]["seed"], 4);
    assert_eq!(doc["empirical_moments"].as_object().unwrap().len(), 3);
    assert_eq!(doc["pass"], true);
}

fn replay_matches(dir: &Path, args: &[&str], produced: &str, meta: &str) {
    let first = bxshadow(args);
    assert_eq!(code(&first), 0, "{}", stderr(&first));
    let again_path = dir.join(format!("again_{produced}"));
    let again = bxshadow(&["replay", &dir.join(meta).to_string_lossy(), "--out", &again_path.to_string_lossy()]);
    assert_eq!(code(&again), 0, "{}", stderr(&again));
    assert_eq!(std::fs::read(dir.join(produced)).unwrap(), std::fs::read(&again_path).unwrap());
}

#[test]
fn replay_reproduces_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let p = |f: &str| d.join(f).to_string_lossy().into_owned();

    replay_matches(d, &["--out", &p("fig2.csv"), "figure", "fig2", "--mc-samples", "100000", "--seed", "9"], "fig2.csv", "fig2.csv.meta.json");
    replay_matches(d, &["--format", "json", "--out", &p("fig4.json"), "figure", "fig4"], "fig4.json", "fig4.json");
    let mut args = vec!["--out".to_string(), p("s.bin"), "sample".into()];
    args.extend(PARAMS.iter().map(|s| s.to_string()));
    args.extend(["--n", "50000", "--seed", "12"].map(String::from));
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    replay_matches(d, &args, "s.bin", "s.bin.meta.json");

    // a replay cannot target another replay, and a file without meta is rejected
    std::fs::write(d.join("plain.json"), "{}").unwrap();
    assert_eq!(code(&bxshadow(&["replay", &p("plain.json")])), 1);
    assert_eq!(code(&bxshadow(&["replay", &p("absent.json")])), 2);
}

#[test]
fn config_file_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(
        &config,
        "format = \"json\"\n\n[eval]\nm-x = 1.5\nm-y = 2.5\nomega-x-db = 5\nomega-y-db = -5\nalpha = 3\ngamma-bar-db = 10\nmetric = \"aof\"\n",
    )
    .unwrap();
    let cfg = config.to_string_lossy().into_owned();
    let out = bxshadow(&["--config", &cfg, "eval"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let from_file = doc["columns"][0]["values"][0].as_f64().unwrap();

    // the command line wins over the file
    let out = bxshadow(&["--config", &cfg, "--format", "csv", "eval", "--alpha", "2"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = Csv::parse(&stdout(&out));
    let p = ChannelParams::from_db(1.5, 2.5, 5.0, -5.0, 2.0, 10.0).unwrap();
    assert_eq!(csv.column("aof")[0], Channel::with_defaults(p).unwrap().amount_of_fading().unwrap());
    assert_ne!(csv.column("aof")[0], from_file);

    std::fs::write(&config, "[eval]\nno-such-flag = 1\n").unwrap();
    assert_eq!(code(&bxshadow(&["--config", &cfg, "eval"])), 1);
}

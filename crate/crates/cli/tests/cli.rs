use std::path::Path;
use std::process::{Command, Output};

fn blepvox(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blepvox")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = blepvox(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    let out = blepvox(args);
    assert!(!out.stderr.is_empty(), "{args:?} failed without a diagnostic");
    out.status.code().unwrap()
}

fn field(stdout: &str, key: &str) -> f64 {
    let prefix = format!("{key}: ");
    let line = stdout.lines().find(|l| l.starts_with(&prefix)).unwrap_or_else(|| panic!("{key} in {stdout}"));
    line[prefix.len()..].split_whitespace().next().unwrap().parse().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn silent_params_render_silence() {
    let dir = tempfile::tempdir().unwrap();
    let params = dir.path().join("p.json");
    let wav = dir.path().join("o.wav");
    ok(&["gen-params", "--f0", "200", "--voicing", "unvoiced", "--out", s(&params)]);
    let out = ok(&["render", s(&params), s(&wav)]);
    assert_eq!(field(&out, "frames"), 62.0);
    assert!(out.contains("oscillator: polyblep"));
    let audio = blepvox_core::read_wav(&wav).unwrap();
    assert_eq!(audio.len(), 62 * 256);
    assert!(audio.samples().iter().all(|&x| x == 0.0));
}

#[test]
fn render_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let params = dir.path().join("p.json");
    ok(&["gen-params", "--f0", "150:300", "--voicing", "alternating", "--noise", "0.1", "--out", s(&params)]);
    let a = dir.path().join("a.wav");
    let b = dir.path().join("b.wav");
    let c = dir.path().join("c.wav");
    ok(&["render", s(&params), s(&a), "--seed", "7"]);
    ok(&["render", s(&params), s(&b), "--seed", "7"]);
    ok(&["render", s(&params), s(&c), "--seed", "8"]);
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    assert_ne!(bytes, std::fs::read(&c).unwrap());
}

#[test]
fn oscillator_choice_shows_in_alias_analysis() {
    let dir = tempfile::tempdir().unwrap();
    let params = dir.path().join("p.json");
    ok(&["gen-params", "--f0", "1000", "--out", s(&params)]);
    let mut asr = Vec::new();
    for osc in ["naive", "polyblep"] {
        let wav = dir.path().join(format!("{osc}.wav"));
        ok(&["render", s(&params), s(&wav), "--oscillator", osc]);
        asr.push(field(&ok(&["analyze-alias", s(&wav), "--f0", "1000"]), "asr_db"));
    }
    assert!(asr[0] - asr[1] >= 10.0, "{asr:?}");
}

#[test]
fn analyze_alias_on_oracle_and_csv_append() {
    let dir = tempfile::tempdir().unwrap();
    let wav = dir.path().join("oracle.wav");
    let csv = dir.path().join("alias.csv");
    let oracle = blepvox_core::analysis::additive_bandlimited_saw(440.0, 16000.0, 16000, 0.0).unwrap();
    blepvox_core::write_wav(&oracle, &wav, blepvox_core::WavFormat::Float32).unwrap();

    let out = ok(&["analyze-alias", s(&wav), "--f0", "440", "--csv", s(&csv)]);
    assert!(field(&out, "asr_db") < -60.0);
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    let row: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(row[0], "440");
    for (key, value) in ["harmonic_power", "alias_power", "asr_db"].iter().zip(&row[1..]) {
        assert!(out.contains(&format!("{key}: {value}\n")), "{key}={value} not in {out}");
    }

    ok(&["analyze-alias", s(&wav), "--f0", "440", "--csv", s(&csv)]);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn analyze_alias_errors() {
    let dir = tempfile::tempdir().unwrap();
    let wav = dir.path().join("x.wav");
    let tone = blepvox_core::analysis::additive_bandlimited_saw(200.0, 16000.0, 16000, 0.0).unwrap();
    blepvox_core::write_wav(&tone, &wav, blepvox_core::WavFormat::Float32).unwrap();
    assert_eq!(code(&["analyze-alias", s(&wav), "--f0", "0"]), 2);
    assert_eq!(code(&["analyze-alias", s(&dir.path().join("missing.wav")), "--f0", "200"]), 3);
}

#[test]
fn compare_osc_table() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("c.csv");
    ok(&["compare-osc", "--f0-list", "500,1000,2000", "--csv", s(&csv)]);
    let first = std::fs::read(&csv).unwrap();
    let text = String::from_utf8(first.clone()).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], blepvox_core::analysis::COMPARISON_CSV_HEADER);
    assert_eq!(lines.len(), 4);
    for line in &lines[1..] {
        let delta: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert!(delta >= 10.0, "{line}");
    }
    ok(&["compare-osc", "--f0-list", "500,1000,2000", "--csv", s(&csv)]);
    assert_eq!(std::fs::read(&csv).unwrap(), first);
    assert_eq!(code(&["compare-osc", "--f0-list", "8000"]), 2);
}

#[test]
fn loss_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.wav");
    let short = dir.path().join("short.wav");
    let tone = blepvox_core::analysis::additive_bandlimited_saw(200.0, 16000.0, 4096, 0.0).unwrap();
    blepvox_core::write_wav(&tone, &a, blepvox_core::WavFormat::Float32).unwrap();
    let clipped = blepvox_core::SampleBuffer::new(tone.samples()[..3000].to_vec(), 16000.0).unwrap();
    blepvox_core::write_wav(&clipped, &short, blepvox_core::WavFormat::Float32).unwrap();

    let out = ok(&["loss", s(&a), s(&a)]);
    assert!(out.contains("L_spec: 0.000000"), "{out}");
    assert!(!out.contains("L_F0"));

    let f0_ref = dir.path().join("ref.txt");
    let f0_est = dir.path().join("est.txt");
    let v_est = dir.path().join("v.txt");
    std::fs::write(&f0_ref, "# reference\n100\n0\n220\n").unwrap();
    std::fs::write(&f0_est, "200\n123\n440\n").unwrap();
    std::fs::write(&v_est, "0.5\n0.5\n0.5\n").unwrap();
    let out = ok(&["loss", s(&a), s(&a), "--f0-ref", s(&f0_ref), "--f0-est", s(&f0_est), "--v-est", s(&v_est)]);
    assert!(out.contains("L_F0: 0.693147"), "{out}");
    assert!(out.contains("L_voiced: 0.693147"), "{out}");

    assert_eq!(code(&["loss", s(&a), s(&short)]), 2);
    std::fs::write(&f0_est, "200\nabc\n").unwrap();
    assert_eq!(code(&["loss", s(&a), s(&a), "--f0-ref", s(&f0_ref), "--f0-est", s(&f0_est)]), 2);
}

#[test]
fn gen_params_contract() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    let out = ok(&["gen-params", "--f0", "200", "--duration", "1.0", "--out", s(&path)]);
    assert_eq!(field(&out, "frames"), 62.0);
    let p = blepvox_core::read_params(&path).unwrap();
    assert_eq!(p.frame_count(), 62);
    assert!(p.contour().f0().iter().all(|&f| f == 200.0));

    ok(&["gen-params", "--f0", "100:400", "--voicing", "unvoiced", "--out", s(&path)]);
    let p = blepvox_core::read_params(&path).unwrap();
    assert!(p.contour().voicing().iter().all(|&v| v == 0.0));
    assert_eq!(p.contour().f0()[0], 100.0);
    assert_eq!(p.contour().f0()[61], 400.0);

    ok(&["gen-params", "--f0", "120", "--voicing", "alternating", "--block", "4", "--out", s(&path)]);
    let p = blepvox_core::read_params(&path).unwrap();
    let v = p.contour().voicing();
    assert_eq!(&v[..9], &[1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);

    assert_eq!(code(&["gen-params", "--f0", "-5", "--out", s(&path)]), 2);
    assert_eq!(code(&["gen-params", "--f0", "200", "--duration", "0", "--out", s(&path)]), 2);
    assert_eq!(code(&["gen-params", "--f0", "9000", "--out", s(&path)]), 2);
}

#[test]
fn render_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"schema_version": 7}"#).unwrap();
    let out = dir.path().join("o.wav");
    assert_eq!(code(&["render", s(&bad), s(&out)]), 2);
    assert_eq!(code(&["render", s(&dir.path().join("none.json")), s(&out)]), 3);
    assert!(!out.exists());
}

#[test]
fn inputs_are_not_modified() {
    let dir = tempfile::tempdir().unwrap();
    let params = dir.path().join("p.json");
    let wav = dir.path().join("o.wav");
    ok(&["gen-params", "--f0", "300", "--out", s(&params)]);
    let before = std::fs::read(&params).unwrap();
    ok(&["render", s(&params), s(&wav)]);
    assert_eq!(std::fs::read(&params).unwrap(), before);
    let wav_before = std::fs::read(&wav).unwrap();
    ok(&["analyze-alias", s(&wav), "--f0", "300"]);
    ok(&["loss", s(&wav), s(&wav)]);
    assert_eq!(std::fs::read(&wav).unwrap(), wav_before);
}

#[test]
fn sign_experiment_prefers_shipped_variant() {
    let out = ok(&["sign-experiment", "--f0-list", "440,1234"]);
    assert!(out.contains("preferred: subtract"), "{out}");
}

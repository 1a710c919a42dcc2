use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const SMALL: &str = r#"
[attitude_agent]
hidden_units = 8
batch_size = 32

[altitude_agent]
hidden_units = 8
batch_size = 32

[attitude_train]
episode_duration = 2.0
checkpoint_every = 0

[altitude_train]
episode_duration = 2.0
checkpoint_every = 0

[scenario]
duration = 3.0
"#;

fn sacflight(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sacflight")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("exp.toml");
    std::fs::write(&path, text).unwrap();
    path
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn train(cfg: &Path, out: &Path, stage: &str, extra: &[&str]) -> Output {
    let mut args = vec!["train", "--stage", stage, "--steps", "300", "--seed", "3", "--config", p(cfg), "--out", p(out)];
    args.extend_from_slice(extra);
    sacflight(&args)
}

#[test]
fn curriculum_end_to_end() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let att_dir = tmp.path().join("att");
    let out = train(&cfg, &att_dir, "attitude", &[]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["config.toml", "learning_curve.csv", "summary.toml", "checkpoints/attitude_final.ckpt"] {
        assert!(att_dir.join(f).exists(), "{f}");
    }
    let snapshot = sacflight::config::ExperimentConfig::load(att_dir.join("config.toml")).unwrap();
    assert_eq!(snapshot.seed, 3);
    assert_eq!(snapshot.attitude_agent.hidden_units, 8);
    assert_eq!(snapshot.attitude_train.total_steps, 300);

    let inner = att_dir.join("checkpoints/attitude_final.ckpt");
    let alt_dir = tmp.path().join("alt");
    let out = train(&cfg, &alt_dir, "altitude", &["--attitude-checkpoint", p(&inner)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let outer = alt_dir.join("checkpoints/altitude_final.ckpt");
    assert!(outer.exists());

    let eval_dir = tmp.path().join("eval");
    let out = sacflight(&[
        "eval", "--scenario", "rudder_jam", "--config", p(&cfg), "--out", p(&eval_dir),
        "--attitude-checkpoint", p(&inner), "--altitude-checkpoint", p(&outer),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["config.toml", "trajectory.csv", "metrics.csv", "summary.toml"] {
        assert!(eval_dir.join(f).exists(), "{f}");
    }
    let metrics = std::fs::read_to_string(eval_dir.join("metrics.csv")).unwrap();
    assert!(metrics.starts_with("name,mae,range,nmae"));

    let matrix_dir = tmp.path().join("matrix");
    let out = sacflight(&[
        "matrix", "--config", p(&cfg), "--out", p(&matrix_dir),
        "--attitude-checkpoint", p(&inner), "--altitude-checkpoint", p(&outer),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(matrix_dir.join("matrix.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 9);
    assert!(lines[0].starts_with("label,initial_altitude_m,initial_speed_mps,nmae,h_nmae,phi_nmae,beta_nmae"));

    let out = sacflight(&["inspect-checkpoint", p(&inner)]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("kind: sac-agent") && text.contains("steps: 300"), "{text}");

    let out = sacflight(&[
        "eval", "--scenario", "wing_loss", "--config", p(&cfg), "--out", p(&eval_dir),
        "--attitude-checkpoint", p(&inner), "--altitude-checkpoint", p(&outer),
    ]);
    assert_eq!(code(&out), 5);
    assert!(String::from_utf8_lossy(&out.stderr).contains("rudder_jam"));
}

#[test]
fn same_seed_same_learning_curve() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(code(&train(&cfg, &a, "attitude", &[])), 0);
    assert_eq!(code(&train(&cfg, &b, "attitude", &[])), 0);
    let read = |d: &Path, f: &str| std::fs::read(d.join(f)).unwrap();
    assert_eq!(read(&a, "learning_curve.csv"), read(&b, "learning_curve.csv"));
    assert_eq!(read(&a, "checkpoints/attitude_final.ckpt"), read(&b, "checkpoints/attitude_final.ckpt"));
}

#[test]
fn configuration_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("o");
    let missing = sacflight(&["toy", "--config", "/nonexistent/exp.toml", "--out", p(&out_dir)]);
    assert_eq!(code(&missing), 3);

    let bad = write_config(tmp.path(), "seed = 1\n[attitude_agent]\ndiscount = 1.2\n");
    let out = sacflight(&["toy", "--config", p(&bad), "--out", p(&out_dir)]);
    assert_eq!(code(&out), 4);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("attitude_agent.discount") && err.contains("line 3"), "{err}");

    let typo = write_config(tmp.path(), "[sweep]\nrunz = 3\n");
    assert_eq!(code(&sacflight(&["toy", "--config", p(&typo), "--out", p(&out_dir)])), 4);
    assert!(!out_dir.exists(), "nothing is written for a rejected config");

    assert_eq!(code(&sacflight(&["train", "--stage", "cruise"])), 2);
    assert_eq!(code(&sacflight(&["frobnicate"])), 2);
}

#[test]
fn checkpoint_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let out_dir = tmp.path().join("o");
    let out = train(&cfg, &out_dir, "altitude", &[]);
    assert_eq!(code(&out), 8);

    let absent = tmp.path().join("absent.ckpt");
    assert_eq!(code(&train(&cfg, &out_dir, "altitude", &["--attitude-checkpoint", p(&absent)])), 8);

    let garbage = tmp.path().join("garbage.ckpt");
    std::fs::write(&garbage, b"not a checkpoint at all").unwrap();
    assert_eq!(code(&sacflight(&["inspect-checkpoint", p(&garbage)])), 7);

    let mut future = b"SACFLTCK".to_vec();
    future.extend_from_slice(&99u32.to_le_bytes());
    let future_path = tmp.path().join("future.ckpt");
    std::fs::write(&future_path, future).unwrap();
    let out = sacflight(&["inspect-checkpoint", p(&future_path)]);
    assert_eq!(code(&out), 6);
    assert!(String::from_utf8_lossy(&out.stderr).contains("99"));
}

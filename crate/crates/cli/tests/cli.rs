use std::fs;
use std::process::{Command, Output};

fn warpres(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_warpres")).args(args).output().expect("run warpres")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn spectrum_csv_loads_back_as_a_file_shape() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("torus.csv");
    let p = path.to_str().unwrap();
    let o = warpres(&["spectrum", "--shape", "torus", "--dim", "2", "--lengths", "1,1.5", "--rmax", "9", "--out", p]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = warpres(&["resonances", "--shape", "file", "--spectrum-file", p, "--dim", "2", "--rmax", "5", "--cutoff", "9"]);
    // The file spectrum stops at 9 and |ν| ≤ 5 needs λ up to 7.
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("lambda,mult,re_nu,im_nu"));
    assert!(text.lines().count() >= 3);
}

#[test]
fn json_reports_carry_version_and_config() {
    let o = warpres(&["eval", "--kernel", "scattering", "--s", "1.2,0.7", "--lambda", "2", "--format", "json", "--threads", "2"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["tool_version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["config"]["command"], "eval");
    assert!(v["config"].get("threads").is_none());
    let re = v["result"]["value"][0].as_f64().unwrap();
    let im = v["result"]["value"][1].as_f64().unwrap();
    // |S| = 1 is not expected off the critical line, but S(s)S(n-s) = 1 is.
    let o = warpres(&["eval", "--kernel", "scattering", "--s", "0.8,-0.7", "--lambda", "2", "--format", "json"]);
    let w: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let (re2, im2) = (w["result"]["value"][0].as_f64().unwrap(), w["result"]["value"][1].as_f64().unwrap());
    let prod = (re * re2 - im * im2, re * im2 + im * re2);
    assert!((prod.0 - 1.0).abs() < 1e-9 && prod.1.abs() < 1e-9, "{prod:?}");
}

#[test]
fn plot_writes_svg() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("res.svg");
    let o = warpres(&["resonances", "--dim", "2", "--rmax", "6", "--plot", svg.to_str().unwrap()]);
    assert!(o.status.success());
    let text = fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg") && text.contains("<circle"));
    let o = warpres(&["plot", "--dim", "2", "--rmax", "6"]);
    assert_eq!(stdout(&o), text);
}

#[test]
fn verify_passes() {
    let o = warpres(&["verify", "--seed", "5"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn bad_input_is_refused() {
    let o = warpres(&["count", "--format", "svg"]);
    assert_eq!(o.status.code(), Some(2));
    let o = warpres(&["spectrum", "--shape", "circle", "--dim", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("dimension 1"));
    let o = warpres(&["eval", "--kernel", "outgoing", "--x", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn count_and_btheta_csv() {
    let o = warpres(&["count", "--shape", "circle", "--dim", "1", "--rmax", "10", "--radii", "5,10"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 3);
    let o = warpres(&["btheta", "--dim", "2", "--samples", "5", "--quad-tol", "1e-6"]);
    let text = stdout(&o);
    let last = text.lines().last().unwrap();
    // B vanishes on the imaginary axis.
    let b: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
    assert!(b.abs() < 1e-8, "{last}");
}

use std::process::{Command, Output};

use inflation_spectra::output::CsvTable;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_inflation-spectra"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn classify_names_the_class() {
    assert!(stdout(&["classify", "1"]).contains("Fibonacci"));
    assert!(stdout(&["classify", "2"]).contains("IntegerMultiplier ℓ=1, λ=2"));
    assert!(stdout(&["classify", "6"]).contains("IntegerMultiplier ℓ=2, λ=3"));
    assert!(stdout(&["classify", "3"]).contains("NonPV, λ≈2.302776"));
}

#[test]
fn bad_input_exits_with_usage_code() {
    assert_eq!(run(&["classify", "0"]).status.code(), Some(2));
    assert_eq!(run(&["report", "3", "--u1", "0"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["paircorr", "--range", "1..3"]).status.code(), Some(2));
}

#[test]
fn lyapunov_csv_is_reproducible() {
    let args = [
        "lyapunov",
        "3",
        "--n",
        "2000",
        "--samples",
        "5",
        "--seed",
        "7",
        "--format",
        "csv",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let table = CsvTable::parse(&String::from_utf8(a.stdout.clone()).unwrap()).unwrap();
    assert_eq!(table.rows().len(), 5);
    assert_eq!(table.emit().as_bytes(), a.stdout.as_slice());
    let other = run(&[
        "lyapunov",
        "3",
        "--n",
        "2000",
        "--samples",
        "5",
        "--seed",
        "8",
        "--format",
        "csv",
    ]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn figure1_svg_has_both_series() {
    let svg = stdout(&["figure1", "--format", "svg"]);
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("id=\"log-lambda\"") && svg.contains("id=\"mahler-q\""));
    assert_eq!(svg.matches("<circle").count(), 30);
    let csv = stdout(&["figure1", "--format", "csv"]);
    assert_eq!(CsvTable::parse(&csv).unwrap().rows().len(), 30);
}

#[test]
fn table1_small_range() {
    let csv = stdout(&[
        "table1",
        "--range",
        "18..20",
        "--resolution",
        "512",
        "--format",
        "csv",
    ]);
    let table = CsvTable::parse(&csv).unwrap();
    assert_eq!(table.rows().len(), 3);
    for i in 0..3 {
        assert_eq!(table.get(i, "N"), Some("1"));
    }
}

#[test]
fn output_file_is_written() {
    let path = std::env::temp_dir().join(format!("mahler-{}.csv", std::process::id()));
    let out = run(&[
        "mahler",
        "--range",
        "1..5",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let table = CsvTable::parse(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(table.rows().len(), 5);
    let m_q: f64 = table.get(0, "m_q").unwrap().parse().unwrap();
    assert!((m_q - 3f64.ln()).abs() < 1e-5);
}

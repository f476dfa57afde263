use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const BIN: &str = env!("CARGO_BIN_EXE_mrcode");

fn mrcode(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn worked_weights() -> Vec<u64> {
    [(2, 10), (3, 10), (5, 5), (9, 5)].iter().flat_map(|&(w, c)| std::iter::repeat_n(w, c)).collect()
}

fn lines<T: ToString>(v: &[T]) -> String {
    v.iter().map(|x| format!("{}\n", x.to_string())).collect()
}

#[test]
fn lengths_on_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.txt");
    fs::write(&w, lines(&worked_weights())).unwrap();
    let mut want: Vec<u32> = vec![6; 10];
    want.extend([5; 13]);
    want.extend([4; 7]);
    for algo in ["detailed", "basic", "huffman"] {
        let out = mrcode(&["lengths", "--algo", algo, "--in", path(&w), "--stats"]);
        assert!(out.status.success(), "{algo}");
        let got: Vec<u32> = String::from_utf8(out.stdout).unwrap().lines().map(|l| l.parse().unwrap()).collect();
        let cost: u64 = got.iter().zip(worked_weights()).map(|(&l, w)| l as u64 * w).sum();
        assert_eq!(cost, 565, "{algo}");
        if algo != "huffman" {
            assert_eq!(got, want, "{algo}");
            let err = String::from_utf8(out.stderr).unwrap();
            assert!(err.contains("k=3") && err.contains("cost=565") && err.contains("kraft=1\n"), "{err}");
        }
    }
}

#[test]
fn two_equal_weights() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.txt");
    fs::write(&w, "5\n5").unwrap();
    let out = mrcode(&["lengths", "--in", path(&w)]);
    assert!(out.status.success());
    assert_eq!(out.stdout, b"1\n1\n");
}

#[test]
fn sorted_flag_is_checked() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.txt");
    fs::write(&w, "3\n1\n2\n").unwrap();
    assert_eq!(mrcode(&["lengths", "--sorted", "--in", path(&w)]).status.code(), Some(2));
    assert_eq!(mrcode(&["lengths", "--algo", "two-queue", "--in", path(&w)]).status.code(), Some(2));
    fs::write(&w, "1\n2\n3\n").unwrap();
    let out = mrcode(&["lengths", "--algo", "two-queue", "--sorted", "--in", path(&w)]);
    assert_eq!(out.stdout, b"2\n2\n1\n");
}

#[test]
fn parse_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.txt");
    fs::write(&w, "1\nabc\n").unwrap();
    let out = mrcode(&["lengths", "--in", path(&w)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 2"));
    fs::write(&w, "").unwrap();
    assert_eq!(mrcode(&["lengths", "--in", path(&w)]).status.code(), Some(2));
    assert_eq!(mrcode(&["lengths", "--algo", "nope"]).status.code(), Some(2));
}

#[test]
fn verify_accepts_and_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.txt");
    let l = dir.path().join("l.txt");
    fs::write(&w, lines(&worked_weights())).unwrap();
    assert!(mrcode(&["lengths", "--in", path(&w), "--out", path(&l)]).status.success());
    let out = mrcode(&["verify", "--weights", path(&w), "--lengths", path(&l)]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.contains("kraft=1\n") && text.contains("cost=565") && text.contains("optimal=yes"), "{text}");
    assert!(text.contains("exclusion=yes"));

    let good = fs::read_to_string(&l).unwrap();
    let first: u32 = good.lines().next().unwrap().parse().unwrap();
    let rest: String = good.lines().skip(1).map(|x| format!("{x}\n")).collect();

    fs::write(&l, format!("{}\n{rest}", first + 1)).unwrap();
    let out = mrcode(&["verify", "--weights", path(&w), "--lengths", path(&l)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().contains("kraft=127/128 (below one)"));

    fs::write(&l, format!("{}\n{rest}", first - 1)).unwrap();
    let out = mrcode(&["verify", "--weights", path(&w), "--lengths", path(&l)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().contains("exceeds one"));

    fs::write(&l, "1\n1\n").unwrap();
    assert_eq!(mrcode(&["verify", "--weights", path(&w), "--lengths", path(&l)]).status.code(), Some(2));
}

#[test]
fn gen_is_deterministic() {
    let a = mrcode(&["gen", "--family", "example41", "--n", "16", "--seed", "3"]);
    let b = mrcode(&["gen", "--family", "example41", "--n", "16", "--seed", "3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(String::from_utf8(a.stdout).unwrap().lines().count(), 26);
    assert_eq!(mrcode(&["gen", "--family", "example41", "--n", "10"]).status.code(), Some(2));
}

#[test]
fn bench_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("b.csv");
    let out = mrcode(&[
        "bench", "--families", "equal,example41", "--sizes", "2^4,32", "--modes", "detailed-sorted,huffman",
        "--repeat", "3", "--out", path(&csv),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next(), Some("family,n,k,mode,time_ns,comparisons,iterations"));
    assert_eq!(text.lines().count(), 1 + 2 * 2 * 2 * 3);
    for row in text.lines().skip(1) {
        let f: Vec<&str> = row.split(',').collect();
        let (k, it): (usize, usize) = (f[2].parse().unwrap(), f[6].parse().unwrap());
        assert!(k >= 1 && it <= 2 * k, "{row}");
    }
    let summary = fs::read_to_string(dir.path().join("b.summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 8);
}

#[test]
fn encode_decode_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.txt");
    let raw = dir.path().join("raw");
    let enc = dir.path().join("enc");
    let back = dir.path().join("back");
    let weights = worked_weights();
    fs::write(&w, lines(&weights)).unwrap();

    // A corpus whose symbol frequencies equal the weights.
    let mut symbols: Vec<usize> = weights.iter().enumerate().flat_map(|(i, &c)| std::iter::repeat_n(i, c as usize)).collect();
    symbols.shuffle(&mut ChaCha8Rng::seed_from_u64(5));
    fs::write(&raw, lines(&symbols)).unwrap();
    assert!(mrcode(&["encode", "--weights", path(&w), "--in", path(&raw), "--out", path(&enc)]).status.success());
    assert!(mrcode(&["decode", "--in", path(&enc), "--out", path(&back)]).status.success());
    assert_eq!(fs::read(&raw).unwrap(), fs::read(&back).unwrap());

    let bytes = fs::read(&enc).unwrap();
    assert_eq!(&bytes[..4], b"PFX1");
    let n = u64::from_le_bytes(bytes[4..12].try_into().unwrap()) as usize;
    assert_eq!(n, 30);
    let at = 12 + 2 * n;
    assert_eq!(u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap()), 565);

    fs::write(&raw, "").unwrap();
    assert!(mrcode(&["encode", "--weights", path(&w), "--in", path(&raw), "--out", path(&enc)]).status.success());
    assert!(mrcode(&["decode", "--in", path(&enc), "--out", path(&back)]).status.success());
    assert_eq!(fs::read(&back).unwrap(), b"");

    fs::write(&enc, b"PFX0garbage").unwrap();
    assert_eq!(mrcode(&["decode", "--in", path(&enc), "--out", path(&back)]).status.code(), Some(2));
    fs::write(&raw, "30\n").unwrap();
    assert_eq!(mrcode(&["encode", "--weights", path(&w), "--in", path(&raw), "--out", path(&enc)]).status.code(), Some(2));
}

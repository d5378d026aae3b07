use std::process::Command;

use aram::cli::main_with;
use aram::costmodel::CSV_HEADER;

fn aram(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_aram"))
        .args(args)
        .env_remove("ARAM_SEED")
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn sssp_auto_with_verify() {
    let (code, out, _) = aram(&[
        "sssp",
        "--gen",
        "random",
        "--n",
        "1000",
        "--m",
        "10000",
        "--seed",
        "7",
        "--M",
        "1024",
        "--omega",
        "100",
        "--variant",
        "auto",
        "--verify",
    ]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 2);
    assert!(lines[1].contains("phases="));
}

#[test]
fn identical_files_align_to_zero() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("s.txt");
    std::fs::write(&f, "GATTACAGATTACA\n").unwrap();
    let f = f.to_str().unwrap();
    let (code, out, _) = aram(&["align", "--policy", "ed", "--auto", "work", "--a", f, "--b", f]);
    assert_eq!(code, 0);
    assert!(out.contains("distance=0;"));
}

#[test]
fn exit_codes() {
    let (code, _, err) = aram(&["sssp", "--M", "8", "--variant", "phased"]);
    assert_eq!(code, 2);
    assert!(err.contains("configuration"));
    assert_eq!(aram(&["nope"]).0, 2);
    assert_eq!(aram(&["align", "--tile", "3x2"]).0, 2);
    assert_eq!(main_with(["aram", "fft", "--log2n", "4", "--M", "64"]), 0);

    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    std::fs::write(&g, "3 2\n0 1 5\n1 2 -1\n").unwrap();
    assert_eq!(aram(&["sssp", "--input", g.to_str().unwrap()]).0, 2);
}

#[test]
fn seed_from_environment() {
    let run = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_aram"))
            .args(["sort", "--n", "500"])
            .env("ARAM_SEED", seed)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("3"), run("3"));
    assert_ne!(run("3"), run("4"));
    assert!(String::from_utf8(run("3")).unwrap().contains("seed=3;"));
}

#[test]
fn sweeps() {
    let (code, out, _) = aram(&["sweep", "sssp", "--ns", "400", "--what", "phased,fib"]);
    assert_eq!(code, 0);
    let rows: Vec<Vec<&str>> = out.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 8);
    // q(phased) / q(fib) shrinks as writes get dearer
    let ratios: Vec<f64> = rows
        .chunks(2)
        .map(|p| p[0][8].parse::<f64>().unwrap() / p[1][8].parse::<f64>().unwrap())
        .collect();
    assert!(ratios.windows(2).all(|w| w[1] < w[0]), "{ratios:?}");

    let (code, out, _) = aram(&["sweep", "sssp", "--omegas", ""]);
    assert_eq!(code, 0);
    assert_eq!(out.trim_end(), CSV_HEADER);

    let (code, out, _) = aram(&[
        "sweep", "align", "--ns", "1500", "--what", "1,2,4", "--Ms", "704", "--omegas", "512",
    ]);
    assert_eq!(code, 0);
    let writes: Vec<u64> = out
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(6).unwrap().parse().unwrap())
        .collect();
    assert_eq!(writes.len(), 3);
    assert!(writes[1] < writes[0] && writes[2] < writes[1], "{writes:?}");
}

#[test]
fn output_file_and_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("o.csv");
    let mat = dir.path().join("d.csv");
    let g = dir.path().join("g.txt");
    std::fs::write(&g, "3 3\n0 1 2\n1 2 3\n0 2 10\n").unwrap();
    let (code, _, _) = aram(&[
        "apsp",
        "--input",
        g.to_str().unwrap(),
        "--matrix",
        mat.to_str().unwrap(),
        "-o",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(std::fs::read_to_string(csv).unwrap().starts_with(CSV_HEADER));
    assert_eq!(std::fs::read_to_string(mat).unwrap(), "0,2,5\ninf,0,3\ninf,inf,0\n");
}

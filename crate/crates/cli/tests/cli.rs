use std::fs;
use std::process::Command as Process;

use exception_sieve::{
    decode_image, encode_image, manifest_path, read_cache, run_with, write_cache,
};
use exception_sieve_core::{build_image, Bitmap, ImageMap, MapKind, Mode, ScanConfig};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("exception-sieve").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn exceptions_json_and_csv() {
    let (code, out, _) = run(&[
        "exceptions",
        "--kind",
        "cototient",
        "--limit",
        "30",
        "--mode",
        "exact",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("\"exceptions\":[10,26]"), "{out}");
    let (code, out, _) = run(&[
        "exceptions",
        "--kind",
        "cototient",
        "--limit",
        "30",
        "--format",
        "csv",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out, "value\n10\n26\n");
}

#[test]
fn certify_statuses() {
    let (code, out, _) = run(&["certify", "--kind", "cototient", "--value", "1018406"]);
    assert_eq!(code, 0);
    assert!(out.contains("\"status\":\"exceptional\""), "{out}");
    let (_, out, _) = run(&["certify", "--kind", "cototient", "--value", "8"]);
    assert!(
        out.contains("\"status\":\"attained\"") && out.contains("\"witness\":12"),
        "{out}"
    );
    let (_, out, _) = run(&[
        "certify", "--kind", "robbins", "--value", "4", "--format", "csv",
    ]);
    assert_eq!(out, "kind,value,status,witness\nrobbins,4,undecidable,\n");
}

#[test]
fn verify_theorem_two() {
    let (code, out, _) = run(&["verify", "--theorem", "2", "--limit", "10000"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    for key in ["theorem", "X", "counts", "bound_value", "pass"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["pass"], true);
    assert_eq!(v["counts"]["K"], 833);
    let (_, csv, _) = run(&[
        "verify",
        "--theorem",
        "2",
        "--limit",
        "10000",
        "--format",
        "csv",
    ]);
    assert_eq!(
        csv,
        "theorem,X,count,bound,density,pass\n2,10000,294,208.333333333,0.0294,true\n"
    );
}

#[test]
fn sets_density_formatting() {
    let (code, out, _) = run(&["sets", "--set", "K", "--limit", "120", "--format", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "set,X,count,density,paper_density\nK,120,10,0.0833333333333,0.0833333333333\n"
    );
    let (_, out, _) = run(&["sigma-density", "--limit", "6"]);
    assert!(out.contains("\"value\":0.166666666667"), "{out}");
    let (_, out, _) = run(&["sets", "--set", "M2", "--value", "10"]);
    assert!(
        out.contains("\"member\":true") && out.contains("\"alpha\":1"),
        "{out}"
    );
}

#[test]
fn other_subcommands() {
    let (code, out, _) = run(&[
        "preimages",
        "--kind",
        "robbins",
        "--value",
        "2",
        "--ceiling",
        "100",
        "--format",
        "csv",
    ]);
    assert_eq!((code, out.as_str()), (0, "value\n13\n29\n53\n"));
    let (code, out, _) = run(&["classify", "--value", "509203"]);
    assert_eq!(code, 0);
    assert!(
        out.contains("\"two_p_noncototient\":\"true\"") && out.contains("\"riesel\":\"unknown\""),
        "{out}"
    );
    let (code, out, _) = run(&["diagnostics", "--lemma", "4", "--limit", "30", "--y", "3"]);
    assert_eq!(code, 0);
    assert!(out.contains("\"count\":10"), "{out}");
    let (code, _, _) = run(&["structure", "--limit", "100"]);
    assert_eq!(code, 0);
    let (code, out, _) = run(&[
        "image", "--kind", "aliquot", "--limit", "10", "--format", "csv",
    ]);
    assert_eq!(
        (code, out.as_str()),
        (
            0,
            "kind,limit,mode,ceiling,attained,exceptions,undecided\naliquot,10,exact,,8,2,0\n"
        )
    );
}

#[test]
fn exit_code_usage() {
    let (code, _, err) = run(&[
        "exceptions",
        "--kind",
        "cototient",
        "--limit",
        "30",
        "--bogus",
    ]);
    assert_eq!(code, 2);
    assert!(
        err.contains("--bogus") && err.contains("Commands:"),
        "{err}"
    );
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(
        run(&["exceptions", "--kind", "cototient", "--limit", "0"]).0,
        2
    );
    assert_eq!(
        run(&[
            "exceptions",
            "--kind",
            "cototient",
            "--limit",
            "9",
            "--mode",
            "heuristic"
        ])
        .0,
        2
    );
    assert_eq!(
        run(&[
            "exceptions",
            "--kind",
            "robbins",
            "--limit",
            "9",
            "--mode",
            "even-only"
        ])
        .0,
        2
    );
    assert_eq!(run(&["classify", "--value", "9"]).0, 2);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn exit_code_capacity() {
    let (code, _, err) = run(&["exceptions", "--kind", "cototient", "--limit", "40000"]);
    assert_eq!(code, 3);
    assert!(err.contains("1600000000"), "{err}");
    let (code, _, _) = run(&["certify", "--kind", "aliquot", "--value", "99999"]);
    assert_eq!(code, 3);
}

#[test]
fn capacity_env_override() {
    let bin = env!("CARGO_BIN_EXE_exception-sieve");
    let args = ["exceptions", "--kind", "cototient", "--limit", "100"];
    let st = Process::new(bin)
        .args(args)
        .env("EXCEPTION_SIEVE_MAX_SCAN", "1000")
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(3));
    let st = Process::new(bin)
        .args(args)
        .env("EXCEPTION_SIEVE_MAX_SCAN", "lots")
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(2));
    let st = Process::new(bin)
        .args(args)
        .env_remove("EXCEPTION_SIEVE_MAX_SCAN")
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(0));
}

#[test]
fn exit_code_failed_report() {
    // an exact robbins image claiming everything is attained leaves no exceptions
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("full.naim");
    let x = 1_000;
    let mut bits = Bitmap::new(x);
    (1..=x).for_each(|m| bits.set(m));
    let powers = (0..10).map(|a| 1u64 << a).collect();
    let img = ImageMap::from_parts(MapKind::Robbins, x, Mode::Exact, bits, powers).unwrap();
    write_cache(&img, &path).unwrap();
    let p = path.to_str().unwrap();
    let (code, out, _) = run(&["verify", "--theorem", "3", "--limit", "1000", "--cache", p]);
    assert_eq!(code, 1);
    assert!(out.contains("\"pass\":false"), "{out}");
    // below X = 1000 failures are reported but not fatal
    let (code, out, _) = run(&["verify", "--theorem", "3", "--limit", "999", "--cache", p]);
    assert_eq!(code, 0);
    assert!(out.contains("\"pass\":false"), "{out}");
}

#[test]
fn exit_code_corrupt_cache() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("img.naim");
    let p = path.to_str().unwrap();
    let (code, _, _) = run(&[
        "image",
        "--kind",
        "cototient",
        "--limit",
        "100",
        "--cache",
        p,
    ]);
    assert_eq!(code, 0);
    let mut bytes = fs::read(&path).unwrap();
    bytes[4] = 9;
    fs::write(&path, &bytes).unwrap();
    let (code, _, err) = run(&[
        "exceptions",
        "--kind",
        "cototient",
        "--limit",
        "100",
        "--cache",
        p,
    ]);
    assert_eq!(code, 4);
    assert!(
        err.contains("version 9") && err.contains("version 1"),
        "{err}"
    );
    bytes[4] = 1;
    fs::write(&path, &bytes[..bytes.len() - 3]).unwrap();
    let (code, _, err) = run(&[
        "exceptions",
        "--kind",
        "cototient",
        "--limit",
        "100",
        "--cache",
        p,
    ]);
    assert_eq!(code, 4);
    assert!(err.contains("truncated"), "{err}");
}

#[test]
fn cache_is_reused_and_restricted() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.naim");
    let p = path.to_str().unwrap();
    let (_, fresh, _) = run(&[
        "exceptions",
        "--kind",
        "aliquot",
        "--limit",
        "500",
        "--cache",
        p,
    ]);
    let (_, reused, err) = run(&[
        "exceptions",
        "--kind",
        "aliquot",
        "--limit",
        "500",
        "--cache",
        p,
    ]);
    assert!(err.contains("reusing"), "{err}");
    assert_eq!(fresh, reused);
    let (_, small, err) = run(&[
        "exceptions",
        "--kind",
        "aliquot",
        "--limit",
        "100",
        "--cache",
        p,
    ]);
    assert!(err.contains("reusing"), "{err}");
    let (_, rebuilt, _) = run(&["exceptions", "--kind", "aliquot", "--limit", "100"]);
    assert_eq!(small, rebuilt);
    // an exact cached image serves the even-only report
    let (_, via_cache, _) = run(&["verify", "--theorem", "2", "--limit", "480", "--cache", p]);
    let (_, direct, _) = run(&["verify", "--theorem", "2", "--limit", "480"]);
    assert_eq!(via_cache, direct);
}

#[test]
fn cache_round_trip_all_kinds_and_modes() {
    let dir = tempfile::tempdir().unwrap();
    let modes = [
        Mode::Exact,
        Mode::EvenOnly,
        Mode::Heuristic { ceiling: 2_000 },
    ];
    for kind in MapKind::ALL {
        for mode in modes {
            for x in [1, 10, 1000] {
                let Ok(img) = build_image(kind, x, mode, &ScanConfig::default()) else {
                    continue;
                };
                let path = dir.path().join(format!("{kind}-{}-{x}.naim", mode.code()));
                let sum = write_cache(&img, &path).unwrap();
                let (back, sum2) = read_cache(&path).unwrap();
                assert_eq!(back, img);
                assert_eq!(sum, sum2);
                assert_eq!(decode_image(&encode_image(&img)).unwrap(), img);
            }
        }
    }
}

#[test]
fn outputs_identical_across_worker_counts() {
    let cases: &[&[&str]] = &[
        &["exceptions", "--kind", "cototient", "--limit", "3000"],
        &[
            "exceptions",
            "--kind",
            "aliquot",
            "--limit",
            "3000",
            "--format",
            "csv",
        ],
        &["exceptions", "--kind", "robbins", "--limit", "1000"],
        &[
            "exceptions",
            "--kind",
            "aliquot",
            "--limit",
            "5000",
            "--mode",
            "heuristic",
            "--ceiling",
            "200000",
        ],
        &["verify", "--theorem", "1", "--limit", "100000"],
        &["verify", "--theorem", "3", "--limit", "2000"],
        &["structure", "--limit", "300"],
        &[
            "preimages",
            "--kind",
            "cototient",
            "--value",
            "1",
            "--ceiling",
            "300000",
        ],
    ];
    for args in cases {
        let one: Vec<&str> = args.iter().copied().chain(["--workers", "1"]).collect();
        let eight: Vec<&str> = args.iter().copied().chain(["--workers", "8"]).collect();
        let (c1, o1, _) = run(&one);
        let (c8, o8, _) = run(&eight);
        assert_eq!((c1, &o1), (c8, &o8), "{args:?}");
        assert_eq!(c1, 0);
    }
}

#[test]
fn manifest_lists_outputs_and_reproduces() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("exc.csv");
    let cache = dir.path().join("exc.naim");
    let (o, c) = (out.to_str().unwrap(), cache.to_str().unwrap());
    let args = [
        "exceptions",
        "--kind",
        "robbins",
        "--limit",
        "200",
        "--format",
        "csv",
        "--out",
        o,
        "--cache",
        c,
    ];
    let (code, stdout, _) = run(&args);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let data = fs::read(&out).unwrap();
    let m: serde_json::Value =
        serde_json::from_slice(&fs::read(manifest_path(&out)).unwrap()).unwrap();
    assert_eq!(m["subcommand"], "exceptions");
    assert_eq!(m["workers"].as_u64().map(|w| w >= 1), Some(true));
    let listed: Vec<&str> = m["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["path"].as_str().unwrap())
        .collect();
    assert!(listed.contains(&o) && listed.contains(&c), "{listed:?}");
    let want = format!("{:016x}", exception_sieve::checksum(&data));
    assert!(m["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .any(|f| f["checksum"] == want.as_str()));
    assert!(m["capacity"]["max_odd_scan"].is_u64());
    // re-running the recorded argv reproduces the data file
    fs::remove_file(&out).unwrap();
    let argv: Vec<String> = m["argv"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| a.as_str().unwrap().to_string())
        .collect();
    let mut sink = Vec::new();
    assert_eq!(run_with(argv, &mut sink, &mut Vec::new()), 0);
    assert_eq!(fs::read(&out).unwrap(), data);
}

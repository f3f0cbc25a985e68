use std::path::Path;
use std::process::Command;

use geodiam_cli::{parse_instance, run_command, serialize_instance, InstanceFile, Kind, CSV_HEADER, EXIT_USAGE};
use geodiam_core::generators::{Expected, Question};
use geodiam_core::{Point, Shape, SlopeTable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PATH3: &str = "{\"format\":\"geodiam\",\"version\":1,\"kind\":\"unit_disks\"}\n[0.0,0.0]\n[1.9,0.0]\n[3.8,0.0]\n";

fn run(args: &[&str]) -> geodiam_cli::Outcome {
    run_command(std::iter::once("geodiam").chain(args.iter().copied()))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn random_coord(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let v = match rng.gen_range(0..3) {
            0 => f64::from_bits(rng.gen()),
            1 => rng.gen_range(-10.0..10.0),
            _ => rng.gen_range(-4i32..=4) as f64 / 3.0,
        };
        if v.is_finite() {
            return v;
        }
    }
}

#[test]
fn minimal_disk_file_round_trips() {
    let text = "{\"format\":\"geodiam\",\"version\":1,\"kind\":\"unit_disks\"}\n[0.5,1.25]\n[-3.0,0.1]\n";
    let inst = parse_instance(text.as_bytes()).unwrap();
    assert_eq!(inst.kind, Kind::UnitDisks);
    assert_eq!(inst.shapes.len(), 2);
    assert_eq!(inst.shapes[1], Shape::UnitDisk { center: Point::new(-3.0, 0.1) });
    let bytes = serialize_instance(&inst).unwrap();
    assert_eq!(parse_instance(&bytes).unwrap(), inst);
    assert_eq!(serialize_instance(&parse_instance(&bytes).unwrap()).unwrap(), bytes);
}

#[test]
fn every_kind_round_trips_bit_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for round in 0..200 {
        let mut p = || Point::new(random_coord(&mut rng), random_coord(&mut rng));
        let kind = Kind::ALL[round % 5];
        let mut inst = match kind {
            Kind::UnitDisks => InstanceFile::new(kind, (0..4).map(|_| Shape::UnitDisk { center: p() }).collect()),
            Kind::UnitSquares => InstanceFile::new(kind, (0..4).map(|_| Shape::UnitSquare { center: p() }).collect()),
            Kind::Triangles => InstanceFile::new(kind, (0..3).map(|_| Shape::Triangle { a: p(), b: p(), c: p() }).collect()),
            Kind::Polylines => InstanceFile::new(kind, (0..3).map(|_| Shape::Polyline { vertices: vec![p(), p(), p()] }).collect()),
            Kind::Segments => {
                let dirs = vec![p(), p()];
                let Ok(table) = SlopeTable::new(dirs.clone()) else { continue };
                let a = p();
                let shapes = vec![
                    Shape::Segment { a, b: a.add(dirs[0].scale(0.5)), slope_class: 1 },
                    Shape::Segment { a, b: a.add(dirs[1].scale(2.0)), slope_class: 2 },
                ];
                if shapes.iter().any(|s| s.validate(0, Some(&table)).is_err()) {
                    continue;
                }
                let mut f = InstanceFile::new(kind, shapes);
                f.slope_table = Some(table);
                f
            }
        };
        inst.seed = Some(rng.gen());
        inst.generator = Some("round \"trip\"".into());
        inst.expected = Some(Expected {
            question: if round % 2 == 0 { Question::IsClique } else { Question::DiameterAtMost(3) },
            answer: round % 3 == 0,
        });
        let bytes = serialize_instance(&inst).unwrap();
        let back = parse_instance(&bytes).unwrap();
        assert_eq!(back, inst, "round {round}");
        for (x, y) in back.shapes.iter().zip(&inst.shapes) {
            for (u, v) in x.points().iter().zip(y.points()) {
                assert_eq!((u.x.to_bits(), u.y.to_bits()), (v.x.to_bits(), v.y.to_bits()));
            }
        }
    }
}

#[test]
fn kind_shape_mismatch_names_the_field() {
    let text = "{\"format\":\"geodiam\",\"version\":1,\"kind\":\"segments\"}\n[0.0,0.0]\n";
    let err = parse_instance(text.as_bytes()).unwrap_err().to_string();
    assert!(err.contains("line 2") && err.contains("`shape`"), "{err}");
    let text = "{\"format\":\"geodiam\",\"version\":1,\"kind\":\"unit_disks\"}\n[0.0,0.0]\n{\"a\":[0,0],\"b\":[1,0],\"slope\":1}\n";
    let err = parse_instance(text.as_bytes()).unwrap_err().to_string();
    assert!(err.contains("line 3") && err.contains("`center`"), "{err}");
}

#[test]
fn schema_violations_are_line_and_field_addressed() {
    let cases = [
        ("{\"format\":\"other\",\"version\":1,\"kind\":\"unit_disks\"}\n", "format"),
        ("{\"format\":\"geodiam\",\"version\":1,\"kind\":\"blobs\"}\n", "kind"),
        ("{\"format\":\"geodiam\",\"version\":1,\"kind\":\"segments\"}\n{\"a\":[0,0],\"b\":[1,1],\"slope\":1}\n", "slope"),
        ("{\"format\":\"geodiam\",\"version\":1,\"kind\":\"segments\"}\n{\"a\":[0,0],\"slope\":1}\n", "b"),
        ("{\"format\":\"geodiam\",\"version\":1,\"kind\":\"triangles\"}\n[[0,0],[1,0]]\n", "vertices"),
        ("{\"format\":\"geodiam\",\"version\":1,\"kind\":\"unit_disks\",\"expected\":{\"question\":\"x\",\"answer\":true}}\n", "expected.question"),
        ("{\"format\":\"geodiam\",\"version\":1,\"kind\":\"unit_disks\"}\n[0.0,\"a\"]\n", "center"),
    ];
    for (text, field) in cases {
        let err = parse_instance(text.as_bytes()).unwrap_err().to_string();
        assert!(err.contains(&format!("field `{field}`")), "{text}: {err}");
    }
}

#[test]
fn diam_on_three_disk_path_prints_true_first() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "p3.jsonl", PATH3);
    let out = run(&["diam", "--alg", "oracle", "--delta", "2", &f]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(out.stdout.lines().next(), Some("true"));
    assert!(out.stdout.contains("diameter=2"));
    let out = run(&["diam", "--alg", "unitdisk2", &f]);
    assert_eq!(out.stdout.lines().next(), Some("true"));
    let out = run(&["diam", "--alg", "oracle", "--delta", "1", &f]);
    assert_eq!(out.stdout.lines().next(), Some("false"));
}

#[test]
fn verify_unitdisk2_on_fifty_seeds_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify", "--alg", "unitdisk2", "--runs", "50", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(out.code, 0, "{}{}", out.stdout, out.stderr);
    assert!(out.stdout.contains("runs=50 agree=50"), "{}", out.stdout);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn verify_other_algorithms_agree_with_oracle() {
    for args in [
        ["verify", "--alg", "unitsquare", "--delta", "3", "--runs", "20"],
        ["verify", "--alg", "segments", "--delta", "2", "--runs", "20"],
        ["verify", "--alg", "oracle", "--delta", "2", "--runs", "20"],
    ] {
        let out = run(&args);
        assert_eq!(out.code, 0, "{args:?}: {}{}", out.stdout, out.stderr);
    }
}

#[test]
fn verify_disagreement_writes_replay_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let text = "{\"format\":\"geodiam\",\"version\":1,\"kind\":\"unit_disks\",\"expected\":{\"question\":\"diam_at_most\",\"delta\":2,\"answer\":false},\"seed\":9}\n[0.0,0.0]\n[1.9,0.0]\n[3.8,0.0]\n";
    let f = write(dir.path(), "wrong.jsonl", text);
    let bundles = dir.path().join("bundles");
    let out = run(&["verify", "--alg", "unitdisk2", "--out-dir", bundles.to_str().unwrap(), &f]);
    assert_eq!(out.code, 1, "{}", out.stdout);
    assert!(out.stdout.contains("disagreement seed9"), "{}", out.stdout);
    let files: Vec<_> = std::fs::read_dir(&bundles).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(files.len(), 1);
    let replay = parse_instance(&std::fs::read(&files[0]).unwrap()).unwrap();
    assert_eq!(replay.seed, Some(9));
    assert_eq!(replay.shapes.len(), 3);
    assert_eq!(replay.expected.map(|e| e.answer), Some(true));
    // The bundle replays cleanly.
    let out = run(&["verify", "--alg", "unitdisk2", "--out-dir", bundles.to_str().unwrap(), files[0].to_str().unwrap()]);
    assert_eq!(out.code, 0, "{}", out.stdout);
}

#[test]
fn bench_writes_monotone_csv_rows() {
    let out = run(&["bench", "--alg", "unitdisk2", "--sizes", "1000,2000,4000,8000"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let mut lines = out.stdout.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    let ns: Vec<usize> = lines
        .map(|l| {
            let cols: Vec<&str> = l.split(',').collect();
            assert_eq!(cols.len(), 6, "{l}");
            assert_eq!(cols[0], "unitdisk2");
            assert!(cols[4] == "true" || cols[4] == "false");
            cols[5].parse::<u128>().unwrap();
            cols[1].parse().unwrap()
        })
        .collect();
    assert!(ns.len() >= 4);
    assert!(ns.windows(2).all(|w| w[0] < w[1]));

    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("b.csv");
    let c = csv.to_str().unwrap();
    assert_eq!(run(&["bench", "--alg", "unitsquare", "--delta", "3", "--sizes", "100,200", "--csv", c]).code, 0);
    assert_eq!(run(&["bench", "--alg", "segments", "--sizes", "30", "--csv", c]).code, 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert_eq!(text.lines().filter(|l| *l == CSV_HEADER).count(), 1);
}

#[test]
fn k4_generator_output_parses_and_oracle_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("k4.jsonl");
    let out = run(&["gen", "--kind", "k4_segments", "--k", "1", "--seed", "4", "--out", f.to_str().unwrap()]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let inst = parse_instance(&std::fs::read(&f).unwrap()).unwrap();
    assert_eq!(inst.kind, Kind::Segments);
    let expected = inst.expected.unwrap();
    assert_eq!(expected.question, Question::DiameterAtMost(2));
    let out = run(&["diam", "--alg", "oracle", "--delta", "2", f.to_str().unwrap()]);
    assert_eq!(out.stdout.lines().next(), Some(expected.answer.to_string().as_str()));
    let out = run(&["verify", "--alg", "segments", "--out-dir", dir.path().to_str().unwrap(), f.to_str().unwrap()]);
    assert_eq!(out.code, 0, "{}{}", out.stdout, out.stderr);
}

#[test]
fn other_generators_produce_consistent_files() {
    let dir = tempfile::tempdir().unwrap();
    for (kind, extra, delta) in [("h6_triangles", "--k", "2"), ("ov_strings", "--n", "1"), ("bipartite_segments", "--n", "2")] {
        let f = dir.path().join(format!("{kind}.jsonl"));
        let out = run(&["gen", "--kind", kind, extra, "2", "--seed", "7", "--out", f.to_str().unwrap()]);
        assert_eq!(out.code, 0, "{kind}: {}", out.stderr);
        let inst = parse_instance(&std::fs::read(&f).unwrap()).unwrap();
        if let Some(e) = inst.expected {
            let d = e.question.delta().to_string();
            let out = run(&["diam", "--delta", &d, f.to_str().unwrap()]);
            assert_eq!(out.stdout.lines().next(), Some(e.answer.to_string().as_str()), "{kind}");
        } else {
            assert_eq!(run(&["diam", "--delta", delta, f.to_str().unwrap()]).code, 0);
        }
    }
}

#[test]
fn generation_is_deterministic() {
    for kind in ["unit_disks", "unit_squares", "segments", "k4_segments", "h6_triangles", "ov_strings"] {
        let a = run(&["gen", "--kind", kind, "--n", "20", "--seed", "11"]);
        let b = run(&["gen", "--kind", kind, "--n", "20", "--seed", "11"]);
        assert_eq!(a.code, 0, "{kind}: {}", a.stderr);
        assert_eq!(a, b);
        let c = run(&["gen", "--kind", kind, "--n", "20", "--seed", "12"]);
        if kind != "ov_strings" {
            assert_ne!(a.stdout, c.stdout, "{kind}");
        }
    }
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "p3.jsonl", PATH3);
    for args in [
        vec!["diam", "--alg", "unitsquare", f.as_str()],
        vec!["diam", "--alg", "segments", f.as_str()],
        vec!["diam", "--alg", "unitdisk2", "--delta", "3", f.as_str()],
        vec!["diam", "--alg", "quantum", f.as_str()],
        vec!["frobnicate"],
        vec!["bench", "--alg", "unitdisk2"],
        vec!["gen", "--kind", "fat_triangles"],
        vec!["gen", "--kind", "three_slope_segments"],
        vec!["verify", "--alg", "unitdisk2", "--kind", "unit_squares", "--runs", "1"],
    ] {
        let out = run(&args);
        assert_eq!(out.code, EXIT_USAGE, "{args:?}: {}", out.stderr);
    }
    let out = run(&["gen", "--kind", "fat_triangles"]);
    assert!(out.stderr.contains("unsupported construction"));
}

#[test]
fn parse_errors_fail_with_message() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.jsonl", "{\"format\":\"geodiam\",\"version\":1,\"kind\":\"segments\"}\n[0.0,0.0]\n");
    let out = run(&["diam", &f]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("field `shape`"), "{}", out.stderr);
}

#[test]
fn shatter_prints_report() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("s.jsonl");
    assert_eq!(run(&["gen", "--kind", "segments", "--n", "25", "--h", "3", "--seed", "2", "--out", f.to_str().unwrap()]).code, 0);
    let out = run(&["shatter", "--system", "rainbow", "--seq", "1,2,3", "--k", "5", "--budget", "100000", f.to_str().unwrap()]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let size: usize = out.stdout.lines().next().unwrap().parse().unwrap();
    assert!(size <= 4);
    assert!(out.stdout.contains("exhaustive="));
    let again = run(&["shatter", "--system", "rainbow", "--seq", "1,2,3", "--k", "5", "--budget", "100000", f.to_str().unwrap()]);
    assert_eq!(out, again);
    let out = run(&["shatter", "--system", "rainbow", "--seq", "1,4", f.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_USAGE);
}

#[test]
fn epsilon_comes_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    // Two disks whose centers are 2.05 apart: adjacent only with a loose tolerance.
    let f = write(dir.path(), "gap.jsonl", "{\"format\":\"geodiam\",\"version\":1,\"kind\":\"unit_disks\"}\n[0.0,0.0]\n[2.05,0.0]\n");
    let bin = env!("CARGO_BIN_EXE_geodiam");
    let strict = Command::new(bin).args(["diam", "--delta", "1", &f]).env_remove("GEODIAM_EPS").output().unwrap();
    assert_eq!(String::from_utf8_lossy(&strict.stdout).lines().next(), Some("false"));
    let loose = Command::new(bin).args(["diam", "--delta", "1", &f]).env("GEODIAM_EPS", "0.1").output().unwrap();
    assert!(loose.status.success());
    assert_eq!(String::from_utf8_lossy(&loose.stdout).lines().next(), Some("true"));
    let bad = Command::new(bin).args(["diam", &f]).env("GEODIAM_EPS", "nope").output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_USAGE));
}

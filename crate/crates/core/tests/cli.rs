use std::process::{Command, Output};

fn ppforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ppforge")).args(args).env_remove("PPFORGE_CAP").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn field_info() {
    let o = ppforge(&["field-info", "3^1:2"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("order     9"), "{s}");
    assert!(s.contains("modulus   x^2 + 1 over F_3"), "{s}");
    assert!(s.contains("|D0|      4"), "{s}");
    assert!(s.contains("generator "), "{s}");

    let o = ppforge(&["field-info", "2^2:3", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["order"], 64);
    assert_eq!(v["modulus"].as_array().unwrap().len(), 7);
    assert!(v["d0_size"].is_null());

    let o = ppforge(&["field-info", "4^1:1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not prime"));

    let o = ppforge(&["field-info", "3^1:2:mod=1,0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = ppforge(&["field-info", "3^x:2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("position"), "{}", stderr(&o));
}

#[test]
fn verify_half_power_on_f9() {
    let spec = r#"{"schema_version":1,"family":"half_power","field":"3^1:2",
                  "params":{"k":1,"a":"nonzero","b":"nonzero","delta":"all"}}"#;
    let o = ppforge(&["verify", spec, "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["grid_size"], 576);
    assert_eq!(v["agreements"], 576);
    assert_eq!(v["disagreements"].as_array().unwrap().len(), 0);
}

#[test]
fn verify_reads_files_and_lists_skips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.json");
    let spec =
        r#"{"family":"even_t","fields":["3^1:2"],"params":{"t":[2,3],"delta":"anti_k","l":["identity","trace"]}}"#;
    std::fs::write(&path, spec).unwrap();
    let o = ppforge(&["verify", path.to_str().unwrap(), "--verbose"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("skipped      6"), "{s}");
    assert!(s.contains("skipped even_t 3^1:2 t=3"), "{s}");
}

#[test]
fn malformed_json_is_a_schema_error() {
    for bad in ["{not json", r#"{"family":"half_power","field":"3^1:2","params":{"k":1}}"#] {
        let o = ppforge(&["verify", bad]);
        assert_eq!(o.status.code(), Some(2));
        assert!(stderr(&o).contains("schema error"), "{}", stderr(&o));
    }
    let o = ppforge(&["verify", "/no/such/file.json"]);
    assert_eq!(o.status.code(), Some(2));
    let o = ppforge(&["no-such-command"]);
    assert_eq!(o.status.code(), Some(2));
}

/// The degree-6 plus theorem as printed fails at odd q; its reproducer round-trips.
#[test]
fn disagreement_exits_one_and_reproduces() {
    let spec =
        r#"{"family":"q6","field":"3^1:6","params":{"variant":"plus","h":"0,1","l":"identity","delta":"sample:3"}}"#;
    let o = ppforge(&["verify", spec, "--json"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let d = &v["disagreements"][0];
    assert_eq!(d["predicted"], true);
    assert_eq!(d["observed"], false);
    let again = ppforge(&["verify", &d["spec"].to_string()]);
    assert_eq!(again.status.code(), Some(1));
    assert!(stdout(&again).contains("DISAGREE q6 3^1:6 variant=plus"));
}

#[test]
fn census_half_power_splits_by_residue_class() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("hp.csv");
    let o = ppforge(&["census", "--family", "half_power", "--field", "3^1:2", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut r = csv::Reader::from_path(&out).unwrap();
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        ["family", "field", "k", "a", "b", "delta", "predicted", "observed", "agree", "cycle_type", "note"]
    );
    let k = ppforge::make_field(3, 1, 2, None).unwrap();
    let mut n = 0;
    for rec in r.records() {
        let rec = rec.unwrap();
        let a = k.parse_elem(&rec[3]).unwrap();
        let b = k.parse_elem(&rec[4]).unwrap();
        let square = k.residue_class(k.mul(a, b)).unwrap() == ppforge::ResidueClass::D0;
        assert_eq!(&rec[7], square.to_string());
        assert_eq!(&rec[8], "true");
        assert_eq!(rec[9].is_empty(), !square);
        n += 1;
    }
    assert_eq!(n, 8 * 8 * 9);
}

#[test]
fn census_n4k_splits_on_the_trace() {
    let o = ppforge(&["census", "--family", "n4k"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let k = ppforge::make_field(3, 1, 4, None).unwrap();
    for rec in r.records() {
        let rec = rec.unwrap();
        let a = k.parse_elem(&rec[3]).unwrap();
        let delta = k.parse_elem(&rec[4]).unwrap();
        let boundary = if &rec[2] == "qtwist" { k.neg(a) } else { a };
        assert_eq!(&rec[6], (k.trace(delta) != boundary).to_string());
        assert_eq!(&rec[7], "true");
    }
}

#[test]
fn empty_grid_gives_header_only() {
    let spec = r#"{"family":"half_power","field":"3^1:2","params":{"k":[],"a":"nonzero","b":"nonzero","delta":"all"}}"#;
    let o = ppforge(&["census", spec]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "family,field,k,a,b,delta,predicted,observed,agree,cycle_type,note\n");
}

#[test]
fn census_is_byte_identical_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let seed_args = ["--seed", "7"];
    let o =
        ppforge(&[&["census", "--family", "q6", "--threads", "1", "-o", a.to_str().unwrap()][..], &seed_args].concat());
    assert_eq!(o.status.code(), Some(0));
    let o =
        ppforge(&[&["census", "--family", "q6", "--threads", "3", "-o", b.to_str().unwrap()][..], &seed_args].concat());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn verify_writes_csv_alongside() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lin.csv");
    let o = ppforge(&["verify", "--family", "linearized", "--csv", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 28);
    assert!(text.lines().nth(1).unwrap().starts_with("linearized,3^1:3,lin:0;0;0,false,false,true,"));
}

#[test]
fn cap_flag_and_env() {
    let o = ppforge(&["verify", "--family", "half_power", "--cap", "16"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("exceeds scan cap 16"));
    let o = Command::new(env!("CARGO_BIN_EXE_ppforge"))
        .args(["verify", "--family", "n4k"])
        .env("PPFORGE_CAP", "80")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn agw_check() {
    let o = ppforge(&["agw-check", "--family", "generic_l", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["checked"], 216);
    assert_eq!(v["counterexamples"].as_array().unwrap().len(), 0);

    let spec =
        r#"{"family":"q6","field":"3^1:6","params":{"variant":"plus","h":"0,1","l":"identity","delta":"sample:2"}}"#;
    let o = ppforge(&["agw-check", spec]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("inapplicable    2"), "{}", stdout(&o));
}

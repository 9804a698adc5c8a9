use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use lemmaforge::cex::read_vcd;
use lemmaforge::engine::ReportRecord;
use lemmaforge::stub_llm::{StubResponse, StubServer};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn prompts() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../prompts")
}

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_lemmaforge"));
    c.env_remove("RUST_LOG");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn run_with(mut cmd: Command, stdin: &str) -> Output {
    let mut child = cmd.stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn text(o: &Output) -> String {
    format!("{}{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr))
}

fn f(name: &str) -> String {
    fixture(name).display().to_string()
}

fn sva(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.display().to_string()
}

fn records(dir: &Path) -> Vec<ReportRecord> {
    let text = std::fs::read_to_string(dir.join("report.jsonl")).unwrap();
    let recs: Vec<ReportRecord> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    // each line round-trips byte for byte
    for (line, r) in text.lines().zip(&recs) {
        assert_eq!(r.to_json_line(), line);
    }
    recs
}

fn loop_report(dir: &Path) -> serde_json::Value {
    let text = std::fs::read_to_string(dir.join("loop_report.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn all_vcds_read(dir: &Path) -> usize {
    let mut n = 0;
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.extension().is_some_and(|x| x == "vcd") {
            read_vcd(&std::fs::read_to_string(&p).unwrap()).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            n += 1;
        }
    }
    n
}

#[test]
fn check_proves_bound() {
    let dir = tempfile::tempdir().unwrap();
    let a = sva(dir.path(), "a.sva", "lt64: assert property (@(posedge clk) count < 64);");
    let out = dir.path().join("out");
    let o = run(&["check", "--design", &f("wrap_counter.sv"), "--assert", &a, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let r = records(&out);
    assert_eq!(r.len(), 1);
    assert_eq!((r[0].status.as_str(), r[0].k), ("proven", Some(1)));
}

#[test]
fn check_reports_falsified_with_vcd() {
    let dir = tempfile::tempdir().unwrap();
    let a = sva(dir.path(), "a.sva", "ne10: assert property (@(posedge clk) count != 10);");
    let out = dir.path().join("out");
    let o = run(&[
        "check", "--design", &f("wrap_counter.sv"), "--assert", &a, "--max-k", "12", "--out", out.to_str().unwrap(), "--json",
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", text(&o));
    let line: ReportRecord = serde_json::from_str(String::from_utf8_lossy(&o.stdout).lines().next().unwrap()).unwrap();
    assert_eq!((line.status.as_str(), line.depth), ("falsified", Some(10)));
    assert!(out.join("ne10.vcd").exists());
    assert!(out.join("ne10.cti.json").exists());
    assert_eq!(all_vcds_read(&out), 1);
}

#[test]
fn check_unknown_is_exit_2() {
    let o = run(&["check", "--design", &f("wrap_counter.sv"), "--assert", &f("wrap_counter.sva"), "--max-k", "2"]);
    assert_eq!(o.status.code(), Some(2), "{}", text(&o));
    assert!(text(&o).contains("unknown_cti"));
}

#[test]
fn check_with_helper_lemma_file() {
    let o = run(&[
        "check", "--design", &f("sync_counters.sv"), "--assert", &f("sync_counters.sva"), "--lemmas",
        &f("sync_counters_helper.sva"), "--max-k", "2",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    assert!(text(&o).contains("counters_equal"));
}

#[test]
fn usage_errors_exit_3() {
    let missing = run(&["check", "--design", "/no/such/file.sv"]);
    assert_eq!(missing.status.code(), Some(3));
    assert!(text(&missing).contains("/no/such/file.sv"));
    assert_eq!(run(&["check"]).status.code(), Some(3));
    assert_eq!(run(&["check", "--bogus"]).status.code(), Some(3));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(run(&["check", "--design", &f("wrap_counter.sv"), "--max-k", "0"]).status.code(), Some(3));
    assert_eq!(run(&["check", "--design", &f("wrap_counter.sv"), "--target", "nope"]).status.code(), Some(3));
    let dir = tempfile::tempdir().unwrap();
    let bad = sva(dir.path(), "bad.sva", "x: assert property (@(posedge clk) nothing == 1);");
    assert_eq!(run(&["check", "--design", &f("wrap_counter.sv"), "--assert", &bad]).status.code(), Some(3));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn bmc_prove_oracle_and_dump() {
    let design = f("broken_counter.sv");
    let o = run(&["bmc", "--design", &design, "--depth", "10"]);
    assert_eq!(o.status.code(), Some(1), "{}", text(&o));
    let o = run(&["bmc", "--design", &f("wrap_counter.sv"), "--assert", &f("wrap_counter.sva"), "--depth", "5"]);
    assert_eq!(o.status.code(), Some(2), "{}", text(&o));
    assert!(text(&o).contains("unknown_bound"));

    let o = run(&["prove", "--design", &design, "--max-k", "2", "--depth", "10"]);
    assert_eq!(o.status.code(), Some(1), "{}", text(&o));

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run(&["oracle", "--design", &f("enable_counter.sv"), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", text(&o));
    let r = records(&out);
    assert_eq!(r.iter().map(|r| r.status.as_str()).collect::<Vec<_>>(), vec!["holds", "violated"]);
    assert_eq!(r[1].depth, Some(9));
    assert_eq!(all_vcds_read(&out), 1);
    let o = run(&["oracle", "--design", &f("sync_counters.sv"), "--assert", &f("sync_counters.sva")]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["dump", "--design", &f("wrap_counter.sv")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(text(&o).contains("count"));
}

#[test]
fn loop_wrap_counter_with_templates() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let start = std::time::Instant::now();
    let o = run(&[
        "loop", "--design", &f("wrap_counter.sv"), "--assert", &f("wrap_counter.sva"), "--max-k", "3", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(start.elapsed().as_secs() < 5);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let report = loop_report(&out);
    assert_eq!(report["final_status"], "all_proven");
    let iters = report["iterations"].as_array().unwrap();
    assert_eq!(iters.len(), 2);
    let admitted: Vec<&str> = iters[0]["lemmas_admitted"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| l["text"].as_str().unwrap())
        .collect();
    assert!(admitted.contains(&"count < 64"), "{admitted:?}");
    assert!(iters[0]["cti_rendered"].as_str().unwrap().contains("count"));
    assert!(all_vcds_read(&out) >= 1);
}

#[test]
fn loop_sync_counters_with_templates() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run(&[
        "loop", "--design", &f("sync_counters.sv"), "--assert", &f("sync_counters.sva"), "--max-k", "2", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let report = loop_report(&out);
    let first = &report["iterations"][0];
    assert!(first["cti_rendered"].as_str().unwrap().contains("bit 31 of count2"));
    assert_eq!(first["lemmas_admitted"][0]["text"], "count1 == count2");
}

#[test]
fn loop_stops_on_false_target() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run(&["loop", "--design", &f("broken_counter.sv"), "--max-k", "6", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", text(&o));
    let report = loop_report(&out);
    assert_eq!(report["final_status"], "falsified");
    assert_eq!(report["iterations"].as_array().unwrap().len(), 1);
    assert!(report["iterations"][0]["candidates_tried"].as_array().unwrap().is_empty());
}

#[test]
fn config_file_supplies_flags() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(fixture("wrap_counter.sv"), dir.path().join("wrap_counter.sv")).unwrap();
    std::fs::copy(fixture("wrap_counter.sva"), dir.path().join("wrap_counter.sva")).unwrap();
    let ini = dir.path().join("run.ini");
    std::fs::write(&ini, "design = wrap_counter.sv\nassert = wrap_counter.sva\n[engine]\nmax-k = 7\n").unwrap();
    let o = run(&["check", "--config", ini.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    // the flag wins over the file
    let o = run(&["check", "--config", ini.to_str().unwrap(), "--max-k", "2"]);
    assert_eq!(o.status.code(), Some(2), "{}", text(&o));
}

#[test]
fn suggest_templates_lists_the_helper() {
    let o = run(&["suggest", "--design", &f("sync_counters.sv")]);
    assert_eq!(o.status.code(), Some(0));
    let t = text(&o);
    assert!(t.lines().any(|l| l == "count1_eq_count2: count1 == count2"), "{t}");
    assert_eq!(t, text(&run(&["suggest", "--design", &f("sync_counters.sv")])));
}

#[test]
fn suggest_flow_b_needs_a_trace() {
    let o = run(&["suggest", "--design", &f("sync_counters.sv"), "--suggester", "llm", "--flow", "b"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(text(&o).contains("--cti"));
    let o = run(&["suggest", "--design", &f("sync_counters.sv"), "--suggester", "llm", "--flow", "a"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(text(&o).contains("--spec"));
}

fn stub(case: &str) -> StubServer {
    StubServer::start(vec![StubResponse::load(&fixture(&format!("llm/{case}/response.json"))).unwrap()])
}

const SECRET: &str = "sk-cli-secret-7d2f9a";

fn llm_cmd(server: &StubServer, args: &[&str]) -> Command {
    let mut c = bin();
    c.args(args)
        .args(["--llm-endpoint", &server.url(), "--llm-model", "stub-model", "--llm-timeout-ms", "2000"])
        .args(["--prompt-dir", prompts().to_str().unwrap()])
        .env("LEMMA_AI_API_KEY", SECRET)
        .env("RUST_LOG", "debug");
    c
}

fn assert_no_secret(o: &Output, dir: &Path) {
    assert!(!text(o).contains(SECRET));
    for e in walk(dir) {
        let content = std::fs::read(&e).unwrap();
        assert!(!String::from_utf8_lossy(&content).contains(SECRET), "{}", e.display());
    }
}

fn walk(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    if let Ok(rd) = std::fs::read_dir(dir) {
        for e in rd {
            let p = e.unwrap().path();
            if p.is_dir() {
                out.extend(walk(&p));
            } else {
                out.push(p);
            }
        }
    }
    out
}

#[test]
fn suggest_flow_a_with_stub() {
    let server = stub("flow_a_ok");
    let dir = tempfile::tempdir().unwrap();
    let spec = sva(dir.path(), "spec.txt", "Both counters reset to zero and advance together.");
    let o = run_with(
        llm_cmd(&server, &["suggest", "--design", &f("sync_counters.sv"), "--suggester", "llm", "--flow", "a", "--spec", &spec]),
        "",
    );
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("count1 == count2"));
    let req = &server.requests()[0];
    let body: serde_json::Value = serde_json::from_str(&req.body).unwrap();
    let user = body["messages"][1]["content"].as_str().unwrap();
    assert!(user.contains("Both counters reset to zero and advance together."));
    assert!(user.contains(&std::fs::read_to_string(fixture("sync_counters.sv")).unwrap()));
    assert_no_secret(&o, dir.path());
}

#[test]
fn suggest_flow_b_with_stub_uses_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run(&["check", "--design", &f("wrap_counter.sv"), "--assert", &f("wrap_counter.sva"), "--max-k", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let cti = out.join("never_70.cti.json");
    let server = stub("flow_b_ok");
    let o = run_with(
        llm_cmd(&server, &["suggest", "--design", &f("wrap_counter.sv"), "--suggester", "llm", "--cti", cti.to_str().unwrap(), "--json"]),
        "",
    );
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let body: serde_json::Value = serde_json::from_str(&server.requests()[0].body).unwrap();
    let render = std::fs::read_to_string(out.join("never_70.txt")).unwrap();
    assert!(body["messages"][1]["content"].as_str().unwrap().contains(&render));
    let line: serde_json::Value = serde_json::from_str(String::from_utf8_lossy(&o.stdout).lines().next().unwrap()).unwrap();
    assert_eq!(line["text"], "count < 64");
    assert_no_secret(&o, dir.path());
}

#[test]
fn loop_with_llm_stub() {
    let server = stub("flow_b_ok");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run_with(
        llm_cmd(&server, &[
            "loop", "--design", &f("wrap_counter.sv"), "--assert", &f("wrap_counter.sva"), "--max-k", "3", "--suggester", "llm",
            "--out", out.to_str().unwrap(),
        ]),
        "",
    );
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let report = loop_report(&out);
    assert_eq!(report["iterations"][0]["lemmas_admitted"][0]["text"], "count < 64");
    assert_eq!(report["iterations"][0]["lemmas_admitted"][0]["origin"], "llm:stub-model");
    assert_no_secret(&o, dir.path());
}

#[test]
fn reviewed_false_assertion_is_still_rejected() {
    let server = stub("false_assertion");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run_with(
        llm_cmd(&server, &[
            "loop", "--design", &f("sync_counters.sv"), "--assert", &f("sync_counters.sva"), "--max-k", "2", "--suggester", "llm",
            "--review", "--out", out.to_str().unwrap(),
        ]),
        "y\ny\n",
    );
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let report = loop_report(&out);
    let it = &report["iterations"][0];
    assert_eq!(it["lemmas_admitted"].as_array().unwrap().len(), 1);
    assert_eq!(it["lemmas_admitted"][0]["text"], "count1 == count2");
    assert_eq!(it["candidates_rejected"][0]["text"], "count1 == 0");
    assert_eq!(it["candidates_rejected"][0]["status"], "falsified");
    assert!(text(&o).contains("use this lemma?"));
}

#[test]
fn review_can_refuse_everything() {
    let server = stub("flow_a_ok");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run_with(
        llm_cmd(&server, &[
            "loop", "--design", &f("sync_counters.sv"), "--assert", &f("sync_counters.sva"), "--max-k", "2", "--suggester", "llm",
            "--review", "--out", out.to_str().unwrap(),
        ]),
        "n\n",
    );
    assert_eq!(o.status.code(), Some(2), "{}", text(&o));
    assert_eq!(loop_report(&out)["final_status"], "exhausted");
}

#[test]
fn loop_survives_llm_errors() {
    for case in ["rate_limited", "malformed", "hallucinated", "no_code"] {
        let server = stub(case);
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("out");
        let o = run_with(
            llm_cmd(&server, &[
                "loop", "--design", &f("sync_counters.sv"), "--assert", &f("sync_counters.sva"), "--max-k", "2", "--suggester",
                "llm", "--out", out.to_str().unwrap(),
            ]),
            "",
        );
        assert_eq!(o.status.code(), Some(2), "{case}: {}", text(&o));
        let report = loop_report(&out);
        assert_eq!(report["final_status"], "exhausted");
        let it = &report["iterations"][0];
        match case {
            "rate_limited" => assert!(it["llm_error"].as_str().unwrap().contains("429")),
            "malformed" => assert!(it["llm_error"].as_str().unwrap().contains("content")),
            "hallucinated" => assert_eq!(it["llm_rejects"][0]["reason"]["kind"], "unknown_symbol"),
            _ => assert_eq!(it["llm_rejects"][0]["reason"]["kind"], "no_code_block"),
        }
        assert_no_secret(&o, dir.path());
    }
}

#[test]
fn both_falls_back_to_llm_only_when_templates_fail() {
    let server = stub("flow_b_ok");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run_with(
        llm_cmd(&server, &[
            "loop", "--design", &f("wrap_counter.sv"), "--assert", &f("wrap_counter.sva"), "--max-k", "3", "--suggester", "both",
            "--out", out.to_str().unwrap(),
        ]),
        "",
    );
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    assert!(server.requests().is_empty());
}

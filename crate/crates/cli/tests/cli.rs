use std::io::Write;
use std::process::{Command, Output, Stdio};

fn iwg(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_iwg"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn iwg");
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn example_json() -> String {
    let out = iwg(&["example", "phi"], None);
    assert!(out.status.success());
    String::from_utf8(out.stdout).unwrap()
}

fn text(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn example_verifies() {
    let out = iwg(&["verify"], Some(&example_json()));
    assert_eq!(out.status.code(), Some(0));
    let t = text(&out);
    for line in ["train track: ✓", "cyclically admissible: ✓", "prevention sequence (square): ✓"] {
        assert!(t.contains(line), "{t}");
    }
}

#[test]
fn inadmissible_pair_fails_verification() {
    let out = iwg(&["verify", "--inline", "a -> ba, a -> b-a"], None);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn pipeline_dot_has_a_cut_vertex() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("iw.dot");
    let out = iwg(&["pipeline", "--rank", "4", "--emit", "dot", "--out", path.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0));
    let dot = std::fs::read_to_string(path).unwrap();
    assert!(dot.starts_with("graph IW {"));
    let edges: Vec<(String, String)> = dot
        .lines()
        .filter_map(|l| l.split_once(" -- "))
        .map(|(a, b)| (a.trim().trim_matches('"').to_string(), b.split('"').nth(1).unwrap().to_string()))
        .collect();
    assert_eq!(edges.len(), 7);
    let vertices: std::collections::BTreeSet<&String> = edges.iter().flat_map(|(a, b)| [a, b]).collect();
    assert_eq!(vertices.len(), 7);
    // some vertex whose removal disconnects the rest
    let connected_without = |cut: &String| {
        let rest: Vec<&String> = vertices.iter().copied().filter(|v| *v != cut).collect();
        let mut seen = vec![rest[0]];
        let mut i = 0;
        while i < seen.len() {
            for (a, b) in &edges {
                for (u, w) in [(a, b), (b, a)] {
                    if u == seen[i] && w != cut && !seen.contains(&w) {
                        seen.push(w);
                    }
                }
            }
            i += 1;
        }
        seen.len() == rest.len()
    };
    assert!(vertices.iter().any(|v| !connected_without(v)));
}

#[test]
fn index_and_ltt_and_diagram() {
    let json = example_json();
    assert_eq!(text(&iwg(&["index"], Some(&json))).trim(), "{-3/2}");
    assert_eq!(text(&iwg(&["ltt"], Some(&json))).trim(), "red b {b, c} | {a, c-} {a-, b-} {a-, c} {b-, c-}");
    let t = text(&iwg(&["id-diagram"], Some(&json)));
    assert!(t.contains("component 0 (seed): 8 nodes, 20 edges"), "{t}");
    let dot = text(&iwg(&["id-diagram", "--emit", "dot"], Some(&json)));
    assert_eq!(dot.lines().filter(|l| l.trim_start().starts_with('n') && l.contains(" -> n")).count(), 20);
}

#[test]
fn pnp_exit_codes() {
    let json = example_json();
    assert_eq!(iwg(&["pnp"], Some(&json)).status.code(), Some(0));
    assert_eq!(iwg(&["pnp", "--bounds.max-passes", "1", "--bounds.max-len", "3"], Some(&json)).status.code(), Some(3));
    assert_eq!(iwg(&["pnp", "--inline", "a -> ab"], None).status.code(), Some(1));
    assert_eq!(iwg(&["pnp", "--inline", "a -> ab, b -> ba, b -> ab"], None).status.code(), Some(3));
}

#[test]
fn usage_errors() {
    assert_eq!(iwg(&["frobnicate"], None).status.code(), Some(2));
    assert_eq!(iwg(&["verify", "/no/such/file"], None).status.code(), Some(2));
    assert_eq!(iwg(&["verify", "--inline", "a -> q"], None).status.code(), Some(2));
    assert_eq!(iwg(&["example", "nope"], None).status.code(), Some(2));
}

#[test]
fn glue_two_copies() {
    let json = example_json();
    let d: serde_json::Value = serde_json::from_str(&json).unwrap();
    let mut gens = d["generators"].as_array().unwrap().clone();
    gens.extend(gens.clone());
    let sq = serde_json::json!({"rank": 3, "generators": gens});
    let spec = serde_json::json!({"left": sq, "right": sq, "shared": [0, 1]}).to_string();
    let out = iwg(&["glue", "--emit", "dot"], Some(&spec));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(text(&out).matches(" -- ").count(), 7);
    let bad = serde_json::json!({"left": sq, "right": sq, "shared": [0]}).to_string();
    assert_eq!(iwg(&["glue"], Some(&bad)).status.code(), Some(1));
}

#[test]
fn output_is_deterministic() {
    let json = example_json();
    let a = text(&iwg(&["pnp", "--emit", "json"], Some(&json)));
    let b = text(&iwg(&["pnp", "--emit", "json"], Some(&json)));
    assert_eq!(a, b);
}

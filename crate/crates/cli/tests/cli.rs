mod common;

use std::collections::VecDeque;

use common::{json_lines, p, run, Scratch};
use orbitope::boundary::plucker_variables;
use orbitope::grassmann::{decomposable_check, PluckerVector};
use orbitope::linalg::{GeneralMatrix, MatrixJson};
use orbitope::matrix_orbitopes::operator_norm;
use orbitope::moment::moment_curve_point;
use orbitope::poly::SparsePolynomial;
use orbitope::verdict::MembershipVerdict;
use serde_json::{json, Value};

fn identity(n: usize) -> Value {
    let data: Vec<f64> = (0..n * n).map(|i| if i % (n + 1) == 0 { 1.0 } else { 0.0 }).collect();
    json!({ "n": n, "data": data })
}

fn membership(s: &Scratch, body: Value, points: &[Value]) -> common::Run {
    let b = s.json("body.json", &body);
    let text: Vec<String> = points.iter().map(|v| v.to_string()).collect();
    let pts = s.file("points.jsonl", &text.join("\n"));
    run(&["membership", "--body", p(&b), "--points", p(&pts)], None)
}

#[test]
fn membership_examples() {
    let s = Scratch::new();
    let cases = [
        (json!({"family": "so3"}), identity(3), "Boundary"),
        (json!({"family": "cara-hankel", "n": 2}), json!([1, 0, 0, 0, 0]), "Boundary"),
        (json!({"family": "grassmann2", "n": 4}), json!({"n": 4, "d": 2, "coords": [0, 0, 0, 0, 0, 0]}), "Inside"),
    ];
    for (body, point, status) in cases {
        let r = membership(&s, body.clone(), &[point]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        let out = json_lines(&r.stdout);
        assert_eq!(out[0]["status"], status, "{body}");
    }
}

#[test]
fn membership_reads_stdin_and_csv() {
    let s = Scratch::new();
    let b = s.json("body.json", &json!({"family": "on-operator", "n": 2}));
    let input = format!("{}\n{}\n", identity(2), json!({"n": 2, "data": [2, 0, 0, 0]}));
    let r = run(&["membership", "--body", p(&b), "--points", "-", "--format", "csv"], Some(&input));
    assert_eq!(r.code, 0, "{}", r.stderr);
    let lines: Vec<&str> = r.stdout.lines().collect();
    assert_eq!(lines[0], "line,status,margin,error");
    assert!(lines[1].starts_with("1,Boundary,"));
    assert!(lines[2].starts_with("2,Outside,"));
}

#[test]
fn batch_isolation_and_exit_codes() {
    let s = Scratch::new();
    let good = identity(3);
    let clean = membership(&s, json!({"family": "son", "n": 3}), &[good.clone(), good.clone()]);
    let b = s.json("body.json", &json!({"family": "son", "n": 3}));
    let pts = s.file(
        "points.jsonl",
        &format!("{good}\n{{not json\n{}\n{good}\n", json!({"n": 2, "data": [1, 0, 0, 1]})),
    );
    let r = run(&["membership", "--body", p(&b), "--points", p(&pts)], None);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("line 2"), "{}", r.stderr);
    let out = json_lines(&r.stdout);
    assert_eq!(out.len(), 4);
    let clean = json_lines(&clean.stdout);
    assert_eq!(out[0], clean[0]);
    assert_eq!(out[3], clean[1]);
    assert_eq!(out[1]["line"], 2);
    assert_eq!(out[2]["line"], 3);
    assert!(out[2]["error"].as_str().unwrap().contains("expected 9"));

    // missing files and invalid bodies are input errors
    assert_eq!(run(&["membership", "--body", "/nonexistent", "--points", "-"], Some("")).code, 2);
    let bad = s.json("bad.json", &json!({"family": "son", "n": 0}));
    assert_eq!(run(&["membership", "--body", p(&bad), "--points", "-"], Some("")).code, 2);
    let unknown = s.json("unknown.json", &json!({"family": "so3", "extra": 1}));
    assert_eq!(run(&["membership", "--body", p(&unknown), "--points", "-"], Some("")).code, 2);
}

fn support(s: &Scratch, body: Value, functional: Value) -> common::Run {
    let b = s.json("body.json", &body);
    let f = s.json("functional.json", &functional);
    run(&["support", "--body", p(&b), "--functional", p(&f)], None)
}

#[test]
fn support_examples() {
    let s = Scratch::new();
    let diag = json!({"n": 3, "data": [1, 0, 0, 0, 2, 0, 0, 0, 3]});
    let r = support(&s, json!({"family": "sh-sym", "model": diag}), identity(3));
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert!((v["value"].as_f64().unwrap() - 6.0).abs() < 1e-12);

    let r = support(&s, json!({"family": "cara-toeplitz", "d": 1}), json!([0, 1, 0]));
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(v["argmax"]["theta"].as_f64().unwrap().sin().abs() < 1e-8);

    let b = [0.3, -1.2, 0.7, 2.0, 0.1, -0.4, 1.5, 0.9, -0.8];
    let r = support(&s, json!({"family": "nuclear", "n": 3}), json!({"n": 3, "data": b}));
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    let expected = operator_norm(&GeneralMatrix::from_row_slice(3, &b).unwrap());
    assert!((v["value"].as_f64().unwrap() - expected).abs() < 1e-12);
    // the witness attains the value
    let arg: MatrixJson = serde_json::from_value(v["argmax"].clone()).unwrap();
    let dot: f64 = arg.data.iter().zip(b).map(|(x, y)| x * y).sum();
    assert!((dot - expected).abs() < 1e-10);

    let r = support(&s, json!({"family": "cara-hankel", "n": 2}), json!([1, 0, 0, 0, 0]));
    assert_eq!(r.code, 3);
    let r = support(&s, json!({"family": "so3"}), identity(3));
    assert_eq!(r.code, 3);
}

#[test]
fn sample_examples() {
    let s = Scratch::new();
    let b = s.json("body.json", &json!({"family": "cara-projected", "weights": [1, 3]}));
    let r = run(&["sample", "--body", p(&b), "--count", "4", "--seed", "7"], None);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let lines: Vec<&str> = r.stdout.lines().collect();
    assert_eq!(lines[0], "c1,s1,c3,s3");
    assert_eq!(lines.len(), 5);
    for row in &lines[1..] {
        let x: Vec<f64> = row.split(',').map(|v| v.parse().unwrap()).collect();
        let t = x[1].atan2(x[0]);
        assert!((x[0].hypot(x[1]) - 1.0).abs() < 1e-12);
        assert!((x[2] - (3.0 * t).cos()).abs() < 1e-12 && (x[3] - (3.0 * t).sin()).abs() < 1e-12);
    }

    let b = s.json("g.json", &json!({"family": "grassmann2", "n": 4}));
    let r = run(&["sample", "--body", p(&b), "--count", "10", "--format", "json"], None);
    for v in json_lines(&r.stdout) {
        let pv: PluckerVector = serde_json::from_value(v).unwrap();
        assert!(decomposable_check(&pv, 1e-10));
    }

    // orbit points come back as Boundary
    let model = json!({"n": 3, "data": [1.0, 0.5, 0.0, 0.5, -2.0, 0.3, 0.0, 0.3, 0.7]});
    let body = json!({"family": "sh-sym", "model": model});
    let b = s.json("sh.json", &body);
    let r = run(&["sample", "--body", p(&b), "--count", "10", "--format", "json"], None);
    let pts = json_lines(&r.stdout);
    let r = membership(&s, body, &pts);
    assert!(json_lines(&r.stdout).iter().all(|v| v["status"] == "Boundary"));
}

#[test]
fn sampling_is_deterministic() {
    let s = Scratch::new();
    let b = s.json("body.json", &json!({"family": "son", "n": 4}));
    let args = |seed: &'static str| ["sample", "--body", p(&b), "--count", "20", "--seed", seed].map(String::from);
    let go = |seed| {
        let a = args(seed);
        run(&a.iter().map(String::as_str).collect::<Vec<_>>(), None).stdout
    };
    assert_eq!(go("3"), go("3"));
    assert_ne!(go("3"), go("4"));
}

#[test]
fn json_outputs_round_trip() {
    let s = Scratch::new();
    let r = membership(&s, json!({"family": "so3"}), &[identity(3), json!({"n": 3, "data": vec![0.1; 9]})]);
    for line in r.stdout.lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        let verdict: MembershipVerdict = serde_json::from_value(v.clone()).unwrap();
        assert_eq!(serde_json::to_value(&verdict).unwrap(), v);
    }
    let b = s.json("v.json", &json!({"family": "veronese34"}));
    let r = run(&["sample", "--body", p(&b), "--count", "3", "--format", "json"], None);
    for line in r.stdout.lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        assert_eq!(v.as_object().unwrap().len(), 15);
        let l: orbitope::moment::TernaryQuarticLambda = serde_json::from_value(v.clone()).unwrap();
        assert_eq!(serde_json::to_value(l).unwrap(), v);
    }
}

/// Cells `(i, j, k)` with the given status, from CSV output.
fn grid_cells(csv: &str, res: usize, status: &str) -> Vec<bool> {
    let mut cells = vec![false; res * res * res];
    for (idx, row) in csv.lines().skip(1).enumerate() {
        cells[idx] = row.split(',').nth(3) == Some(status);
    }
    cells
}

fn connected(cells: &[bool], res: usize) -> bool {
    let Some(start) = cells.iter().position(|&c| c) else {
        return false;
    };
    let mut seen = vec![false; cells.len()];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    let mut count = 0;
    while let Some(c) = queue.pop_front() {
        count += 1;
        let (i, j, k) = (c / (res * res), c / res % res, c % res);
        let mut push = |i: usize, j: usize, k: usize| {
            let n = (i * res + j) * res + k;
            if cells[n] && !seen[n] {
                seen[n] = true;
                queue.push_back(n);
            }
        };
        if i > 0 { push(i - 1, j, k) }
        if i + 1 < res { push(i + 1, j, k) }
        if j > 0 { push(i, j - 1, k) }
        if j + 1 < res { push(i, j + 1, k) }
        if k > 0 { push(i, j, k - 1) }
        if k + 1 < res { push(i, j, k + 1) }
    }
    count == cells.iter().filter(|&&c| c).count()
}

#[test]
fn hankel_cross_section_through_curve_points() {
    let s = Scratch::new();
    let pts: Vec<Vec<f64>> = [0.1, 0.9, 1.7, 2.5].iter().map(|&t| moment_curve_point(4, t).unwrap()).collect();
    let dirs: Vec<Vec<f64>> = pts[1..].iter().map(|q| q.iter().zip(&pts[0]).map(|(a, b)| a - b).collect()).collect();
    let res = 50;
    let job = json!({
        "body": {"family": "cara-hankel", "n": 2},
        "origin": pts[0],
        "directions": dirs,
        "resolution": res,
        "range": [0.0, 1.0],
    });
    let j = s.json("job.json", &job);
    let r = run(&["cross-section", "--job", p(&j)], None);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout.lines().next(), Some("s,t,u,status,margin"));
    assert_eq!(r.stdout.lines().count(), res * res * res + 1);
    let inside = grid_cells(&r.stdout, res, "Inside");
    assert!(inside.iter().filter(|&&c| c).count() > 1000);
    assert!(connected(&inside, res));
    // the tetrahedron of the four curve points is inside (closed)
    let outside = grid_cells(&r.stdout, res, "Outside");
    let step = 1.0 / (res - 1) as f64;
    for (idx, &o) in outside.iter().enumerate() {
        let (i, j, k) = (idx / (res * res), idx / res % res, idx % res);
        if o {
            assert!((i + j + k) as f64 * step > 1.0 - 1e-12);
        }
    }

    let degenerate = json!({
        "body": {"family": "cara-hankel", "n": 2},
        "origin": pts[0],
        "directions": [dirs[0].clone(), dirs[0].iter().map(|x| 2.0 * x).collect::<Vec<_>>()],
        "resolution": 5,
    });
    let j = s.json("bad.json", &degenerate);
    assert_eq!(run(&["cross-section", "--job", p(&j)], None).code, 2);

    let empty = json!({
        "body": {"family": "cara-hankel", "n": 2},
        "origin": pts[0],
        "directions": [dirs[0].clone(), dirs[1].clone()],
        "resolution": 0,
    });
    let j = s.json("empty.json", &empty);
    let r = run(&["cross-section", "--job", p(&j)], None);
    assert_eq!((r.code, r.stdout.as_str()), (0, ""));
}

#[test]
fn expand_reports_term_counts_and_writes_text() {
    let s = Scratch::new();
    let out = s.path("g26.txt");
    let r = run(&["expand", "--boundary", "g2-6", "--output", p(&out)], None);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout.trim(), "degree 8, 10791 terms");
    let text = std::fs::read_to_string(&out).unwrap();
    let poly = SparsePolynomial::parse(&plucker_variables(6), text.trim()).unwrap();
    assert_eq!(poly.term_count(), 10791);

    let r = run(&["expand", "--boundary", "g2-7", "--format", "json"], None);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v, json!({"boundary": "g2-7", "degree": 8, "terms": 44150}));
}

fn quartic(nonzero: &[(&str, i64)]) -> Value {
    let mut m = serde_json::Map::new();
    for a in 0..=4 {
        for b in 0..=4 - a {
            m.insert(format!("c{a}{b}{}", 4 - a - b), json!(0));
        }
    }
    for (k, v) in nonzero {
        m.insert(k.to_string(), json!(v));
    }
    Value::Object(m)
}

#[test]
fn discriminant_of_the_fermat_quartic() {
    let s = Scratch::new();
    let q = s.json("fermat.json", &quartic(&[("c400", 1), ("c040", 1), ("c004", 1)]));
    let r = run(&["discriminant", "--quartic", p(&q), "--exact"], None);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let exact: i128 = r.stdout.trim().parse().unwrap();
    assert_ne!(exact, 0);
    let r = run(&["discriminant", "--quartic", p(&q)], None);
    let approx: f64 = r.stdout.trim().parse().unwrap();
    assert!((approx - exact as f64).abs() <= 1e-12 * approx.abs());

    let singular = s.json("sing.json", &quartic(&[("c400", 1), ("c220", 3), ("c040", -2)]));
    let r = run(&["discriminant", "--quartic", p(&singular), "--exact", "--format", "json"], None);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["discriminant"], "0");

    let mut missing = quartic(&[]);
    missing.as_object_mut().unwrap().remove("c211");
    let m = s.json("missing.json", &missing);
    assert_eq!(run(&["discriminant", "--quartic", p(&m)], None).code, 2);
}

#[test]
fn projected_membership_at_the_curve() {
    let s = Scratch::new();
    let x: Vec<f64> = [1.0, 3.0].iter().flat_map(|&w: &f64| [(w * 0.4).cos(), (w * 0.4).sin()]).collect();
    let far: Vec<f64> = x.iter().map(|v| v * 1.3).collect();
    let r = membership(&s, json!({"family": "cara-projected", "weights": [1, 3]}), &[json!(x), json!(far)]);
    let out = json_lines(&r.stdout);
    assert_eq!(out[0]["status"], "Feasible");
    assert_ne!(out[1]["status"], "Feasible");
}

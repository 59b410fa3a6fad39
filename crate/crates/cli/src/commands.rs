use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use num_traits::ToPrimitive;
use orbitope::boundary::g2n_boundary_expand;
use orbitope::moment::TernaryQuartic;
use orbitope::sylvester::discriminant as quartic_discriminant;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::body::{Body, BodySpec};
use crate::{Boundary, CliError, Format};

type Out<'a> = &'a mut dyn Write;

fn read_text(path: &Path) -> Result<String, CliError> {
    let mut text = String::new();
    if path == Path::new("-") {
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| CliError::input(format!("stdin: {e}")))?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    }
    Ok(text)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn load_body(path: &Path) -> Result<Body, CliError> {
    read_json::<BodySpec>(path)?.resolve()
}

fn io(e: std::io::Error) -> CliError {
    CliError::input(format!("write failed: {e}"))
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_row(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

/// Every line gets a record in input order. Points that fail to parse or
/// do not fit the body get an inline error record; malformed JSON also
/// turns the exit status into an input error once the batch is done.
pub fn membership(out: Out, body: &Path, points: &Path, tol: f64, format: Format) -> Result<(), CliError> {
    let body = load_body(body)?;
    let text = read_text(points)?;
    if format == Format::Csv {
        writeln!(out, "line,status,margin,error").map_err(io)?;
    }
    let mut first_malformed = None;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let result = match serde_json::from_str::<Value>(line) {
            Ok(v) => body
                .flatten_point(&v)
                .and_then(|x| body.evaluate(&x, tol).map_err(|e| e.to_string())),
            Err(e) => {
                let msg = format!("malformed JSON: {e}");
                first_malformed.get_or_insert_with(|| format!("{}: line {line_no}: {e}", points.display()));
                Err(msg)
            }
        };
        match (format, result) {
            (Format::Json, Ok(ev)) => writeln!(out, "{}", serde_json::to_string(&ev).expect("serializable")),
            (Format::Json, Err(e)) => writeln!(out, "{}", json!({ "line": line_no, "error": e })),
            (Format::Csv, Ok(ev)) => writeln!(out, "{line_no},{},{},", ev.status(), ev.margin()),
            (Format::Csv, Err(e)) => writeln!(out, "{line_no},,,{}", csv_field(&e)),
        }
        .map_err(io)?;
    }
    match first_malformed {
        Some(msg) => Err(CliError::input(msg)),
        None => Ok(()),
    }
}

pub fn support(out: Out, body: &Path, functional: &Path) -> Result<(), CliError> {
    let body = load_body(body)?;
    let f: Value = read_json(functional)?;
    match body.support(&f) {
        None => Err(CliError::unsupported("this family has no closed-form support function")),
        Some(Err(e)) => Err(CliError::input(format!("{}: {e}", functional.display()))),
        Some(Ok((value, argmax))) => {
            writeln!(out, "{}", json!({ "value": value, "argmax": argmax })).map_err(io)
        }
    }
}

pub fn sample(out: Out, body: &Path, count: usize, seed: u64, format: Format) -> Result<(), CliError> {
    let body = load_body(body)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if format == Format::Csv {
        writeln!(out, "{}", body.coordinate_names().join(",")).map_err(io)?;
    }
    for _ in 0..count {
        let x = body.sample(&mut rng);
        match format {
            Format::Csv => writeln!(out, "{}", csv_row(&x)),
            Format::Json => writeln!(out, "{}", body.point_json(&x)),
        }
        .map_err(io)?;
    }
    Ok(())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CrossSectionJob {
    body: BodySpec,
    origin: Vec<f64>,
    directions: Vec<Vec<f64>>,
    resolution: usize,
    #[serde(default = "default_range")]
    range: [f64; 2],
}

fn default_range() -> [f64; 2] {
    [-1.0, 1.0]
}

pub fn cross_section(out: Out, job: &Path, tol: f64, format: Format) -> Result<(), CliError> {
    let job: CrossSectionJob = read_json(job)?;
    let body = job.body.resolve()?;
    let dim = body.ambient_dim();
    let k = job.directions.len();
    if !(2..=3).contains(&k) {
        return Err(CliError::input(format!("need 2 or 3 directions, got {k}")));
    }
    if job.origin.len() != dim || job.directions.iter().any(|d| d.len() != dim) {
        return Err(CliError::input(format!("origin and directions must have {dim} coordinates")));
    }
    let dirs = DMatrix::from_fn(k, dim, |i, j| job.directions[i][j]);
    let sv = dirs.singular_values();
    let (smax, smin) = (sv.max(), sv.min());
    if !(smin > 1e-12 * smax) {
        return Err(CliError::input("directions are linearly dependent"));
    }
    let res = job.resolution;
    if res == 0 {
        return Ok(());
    }
    let [lo, hi] = job.range;
    let step = |i: usize| {
        if res == 1 {
            0.5 * (lo + hi)
        } else {
            lo + (hi - lo) * i as f64 / (res - 1) as f64
        }
    };
    let names = ["s", "t", "u"];
    if format == Format::Csv {
        writeln!(out, "{},status,margin", names[..k].join(",")).map_err(io)?;
    }
    let total = res.pow(k as u32);
    for idx in 0..total {
        let mut rem = idx;
        let mut coords = vec![0.0; k];
        for c in (0..k).rev() {
            coords[c] = step(rem % res);
            rem /= res;
        }
        let x: Vec<f64> = (0..dim)
            .map(|j| job.origin[j] + (0..k).map(|c| coords[c] * dirs[(c, j)]).sum::<f64>())
            .collect();
        let (status, margin) = match body.evaluate(&x, tol) {
            Ok(ev) => (ev.status(), Some(ev.margin())),
            Err(_) => ("Error".to_string(), None),
        };
        match format {
            Format::Csv => writeln!(
                out,
                "{},{status},{}",
                csv_row(&coords),
                margin.map_or(String::new(), |m| m.to_string())
            ),
            Format::Json => writeln!(out, "{}", json!({ "coords": coords, "status": status, "margin": margin })),
        }
        .map_err(io)?;
    }
    Ok(())
}

pub fn expand(out: Out, boundary: Boundary, output: Option<&Path>, format: Format) -> Result<(), CliError> {
    let (n, name) = match boundary {
        Boundary::G26 => (6, "g2-6"),
        Boundary::G27 => (7, "g2-7"),
    };
    let p = g2n_boundary_expand(n).expect("supported size");
    let degree = p.degree().unwrap_or(0);
    if let Some(path) = output {
        std::fs::write(path, format!("{p}\n")).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    }
    match format {
        Format::Json => writeln!(
            out,
            "{}",
            json!({ "boundary": name, "degree": degree, "terms": p.term_count() })
        ),
        Format::Csv => writeln!(out, "degree {degree}, {} terms", p.term_count()),
    }
    .map_err(io)
}

pub fn discriminant(out: Out, quartic: &Path, exact: bool, format: Format) -> Result<(), CliError> {
    let q: TernaryQuartic = read_json(quartic)?;
    let d = quartic_discriminant(&q).map_err(|e| CliError::input(format!("{}: {e}", quartic.display())))?;
    let text = if exact {
        d.to_string()
    } else {
        format!("{:e}", d.to_f64().unwrap_or(f64::NAN))
    };
    match format {
        Format::Json => writeln!(out, "{}", json!({ "discriminant": text, "exact": exact })),
        Format::Csv => writeln!(out, "{text}"),
    }
    .map_err(io)
}

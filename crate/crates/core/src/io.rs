//! Instance text format and assignment JSON.
//!
//! ```text
//! DARP v1 <n> <m> <lambda> metric=euclidean
//! D <x> <y>                  (m lines)
//! R <sx> <sy> <tx> <ty>      (n lines)
//! ```
//!
//! With `metric=matrix`, depot and request lines carry location ids
//! (`D <id>`, `R <sid> <tid>`) and are followed by the distance matrix, one
//! row per line; its size is the number of rows. Blank lines and lines
//! starting with `#` are ignored. Numbers are written in Rust's shortest
//! round-trip form, so a write/read cycle is lossless.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{Assignment, Fleet, Instance, Metric, Point, Request};

const MAGIC: &str = "DARP";
const VERSION: &str = "v1";

pub fn instance_to_string(instance: &Instance) -> String {
    let mut out = String::new();
    let metric = instance.metric();
    let kind = match metric {
        Metric::Euclidean(_) => "euclidean",
        Metric::Matrix { .. } => "matrix",
    };
    writeln!(out, "{MAGIC} {VERSION} {} {} {} metric={kind}", instance.n(), instance.m(), instance.capacity()).unwrap();
    match metric.coords() {
        Some(pts) => {
            for k in 0..instance.m() {
                let p = pts[instance.depot(k)];
                writeln!(out, "D {} {}", p.x, p.y).unwrap();
            }
            for r in instance.requests() {
                let (s, t) = (pts[r.pickup], pts[r.dropoff]);
                writeln!(out, "R {} {} {} {}", s.x, s.y, t.x, t.y).unwrap();
            }
        }
        None => {
            for k in 0..instance.m() {
                writeln!(out, "D {}", instance.depot(k)).unwrap();
            }
            for r in instance.requests() {
                writeln!(out, "R {} {}", r.pickup, r.dropoff).unwrap();
            }
            for a in 0..metric.len() {
                let row: Vec<String> = (0..metric.len()).map(|b| metric.dist(a, b).to_string()).collect();
                writeln!(out, "{}", row.join(" ")).unwrap();
            }
        }
    }
    out
}

pub fn write_instance(instance: &Instance, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, instance_to_string(instance))?;
    Ok(())
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance> {
    parse_instance(&fs::read_to_string(path)?)
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse().map_err(|_| perr(line, format!("bad {what} `{tok}`")))
}

fn floats(tokens: &[&str], line: usize) -> Result<Vec<f64>> {
    tokens
        .iter()
        .map(|t| {
            let v: f64 = num(t, line, "number")?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(perr(line, format!("non-finite number `{t}`")))
            }
        })
        .collect()
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let last_line = text.lines().count() + 1;

    let (hl, header) = lines.next().ok_or_else(|| perr(1, "empty file"))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.first() != Some(&MAGIC) {
        return Err(perr(hl, format!("expected `{MAGIC}` header")));
    }
    match h.get(1) {
        Some(&VERSION) => {}
        Some(v) => return Err(Error::Version((*v).to_string())),
        None => return Err(perr(hl, "missing version")),
    }
    if h.len() != 6 {
        return Err(perr(hl, "header is `DARP v1 <n> <m> <lambda> metric=<kind>`"));
    }
    let n: usize = num(h[2], hl, "request count")?;
    let m: usize = num(h[3], hl, "vehicle count")?;
    let capacity: usize = num(h[4], hl, "capacity")?;
    let euclidean = match h[5] {
        "metric=euclidean" => true,
        "metric=matrix" => false,
        other => return Err(perr(hl, format!("unknown metric `{other}`"))),
    };

    let mut take = |tag: &str, fields: usize, what: &str| -> Result<(usize, Vec<&str>)> {
        let (ln, l) = lines.next().ok_or_else(|| perr(last_line, format!("missing {what} line")))?;
        let t: Vec<&str> = l.split_whitespace().collect();
        if t[0] != tag {
            return Err(perr(ln, format!("expected {what} line starting with `{tag}`")));
        }
        if t.len() != fields + 1 {
            return Err(perr(ln, format!("{what} line needs {fields} values, found {}", t.len() - 1)));
        }
        Ok((ln, t[1..].to_vec()))
    };

    if euclidean {
        let mut depots = Vec::with_capacity(m);
        for _ in 0..m {
            let (ln, t) = take("D", 2, "depot")?;
            let v = floats(&t, ln)?;
            depots.push(Point::new(v[0], v[1]));
        }
        let mut requests = Vec::with_capacity(n);
        for _ in 0..n {
            let (ln, t) = take("R", 4, "request")?;
            let v = floats(&t, ln)?;
            requests.push((Point::new(v[0], v[1]), Point::new(v[2], v[3])));
        }
        if let Some((ln, _)) = lines.next() {
            return Err(perr(ln, "unexpected trailing line"));
        }
        return Instance::euclidean(&depots, &requests, capacity);
    }

    let mut depots = Vec::with_capacity(m);
    for _ in 0..m {
        let (ln, t) = take("D", 1, "depot")?;
        depots.push(num::<usize>(t[0], ln, "location id")?);
    }
    let mut requests = Vec::with_capacity(n);
    for _ in 0..n {
        let (ln, t) = take("R", 2, "request")?;
        requests.push(Request::new(num(t[0], ln, "location id")?, num(t[1], ln, "location id")?));
    }
    let mut rows = Vec::new();
    let mut first_row_line = last_line;
    for (ln, l) in lines {
        if rows.is_empty() {
            first_row_line = ln;
        }
        let t: Vec<&str> = l.split_whitespace().collect();
        rows.push(floats(&t, ln)?);
    }
    let size = rows.len();
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != size) {
        return Err(perr(first_row_line + i, format!("matrix row has {} entries, expected {size}", r.len())));
    }
    let metric = Metric::from_matrix(rows).map_err(|e| perr(first_row_line, e.to_string()))?;
    Instance::new(metric, requests, Fleet { depots, capacity })
}

pub fn write_assignment(assignment: &Assignment, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(assignment)?)?;
    Ok(())
}

pub fn read_assignment(path: impl AsRef<Path>) -> Result<Assignment> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

//! Line-oriented exchange formats.
//!
//! All four share the same lexical rules: `#` starts a comment line, blank
//! lines are ignored, tokens are separated by whitespace, and infinity is
//! written `inf`. Metric, operator and family files open with a
//! `points: id1 id2 ...` header.
//!
//! | extension | body line      | meaning                  |
//! |-----------|----------------|--------------------------|
//! | `.emx`    | `x y value`    | `d(x, y) = value`        |
//! | `.smx`    | `x y re [im]`  | `T_xy = re + i·im`       |
//! | `.hrf`    | `x z value`    | `ξ_x(z) = value`         |
//! | `.map`    | `x -> y`       | `f(x) = y` (`g:` section, `C: value`) |
//!
//! Writers are canonical: parsing their output and writing again gives the
//! same bytes.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::coarse::{CoarseMapData, PointMap};
use crate::error::{Error, Result};
use crate::operators::{Scalar, SparseOp};
use crate::schur::{HRFamily, HRParams, SparseVec};
use crate::space::{ExtMetric, MetricTable, PointSet, INF};

/// Formats a number the way every writer does: shortest round-trip decimal,
/// `inf` for infinity, and no negative zero.
pub fn fmt_value(v: f64) -> String {
    if v == INF {
        "inf".into()
    } else if v == 0.0 {
        "0".into()
    } else {
        v.to_string()
    }
}

/// Parses a finite decimal or `inf`. `nan` and spelled-out infinities are
/// rejected.
pub fn parse_value(token: &str, line: usize) -> Result<f64> {
    if token == "inf" {
        return Ok(INF);
    }
    match token.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::parse(line, format!("`{token}` is not a number"))),
    }
}

struct Body<'a> {
    points: Arc<PointSet>,
    lines: Vec<(usize, Vec<&'a str>)>,
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let trimmed = line.trim();
        (!trimmed.is_empty() && !trimmed.starts_with('#'))
            .then(|| (i + 1, trimmed.split_whitespace().collect()))
    })
}

fn with_header(text: &str) -> Result<Body<'_>> {
    let mut lines = data_lines(text);
    let (line, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing `points:` header"))?;
    if header[0] != "points:" {
        return Err(Error::parse(line, "expected `points:` header"));
    }
    let points = PointSet::new(header[1..].iter().copied())
        .map_err(|e| Error::parse(line, e.to_string()))?;
    Ok(Body {
        points: Arc::new(points),
        lines: lines.collect(),
    })
}

fn lookup(points: &PointSet, id: &str, line: usize) -> Result<usize> {
    points
        .index_of(id)
        .map_err(|e| Error::parse(line, e.to_string()))
}

fn write_header(out: &mut String, points: &PointSet) {
    out.push_str("points:");
    for id in points.ids() {
        out.push(' ');
        out.push_str(id);
    }
    out.push('\n');
}

/// Parses an `.emx` file into an unvalidated table.
pub fn parse_emx(text: &str) -> Result<MetricTable> {
    let body = with_header(text)?;
    let mut entries = Vec::with_capacity(body.lines.len());
    for (line, tokens) in &body.lines {
        let [x, y, v] = tokens[..] else {
            return Err(Error::parse(*line, "expected `x y value`"));
        };
        entries.push((
            lookup(&body.points, x, *line)?,
            lookup(&body.points, y, *line)?,
            parse_value(v, *line)?,
        ));
    }
    Ok(MetricTable {
        points: body.points,
        entries,
    })
}

/// Writes a table with each pair ordered by point index and the pairs
/// sorted; repeated pairs keep their relative order.
pub fn write_emx_table(table: &MetricTable) -> String {
    let mut entries: Vec<(usize, usize, f64)> = table
        .entries
        .iter()
        .map(|&(x, y, v)| (x.min(y), x.max(y), v))
        .collect();
    entries.sort_by_key(|&(x, y, _)| (x, y));
    let mut out = String::new();
    write_header(&mut out, &table.points);
    for (x, y, v) in entries {
        let _ = writeln!(
            out,
            "{} {} {}",
            table.points.id(x),
            table.points.id(y),
            fmt_value(v)
        );
    }
    out
}

/// Canonical form of a metric: finite off-diagonal pairs only.
pub fn write_emx(d: &ExtMetric) -> String {
    write_emx_table(&d.to_table())
}

pub fn parse_smx(text: &str) -> Result<SparseOp> {
    let body = with_header(text)?;
    let mut entries = Vec::with_capacity(body.lines.len());
    for (line, tokens) in &body.lines {
        let (x, y, re, im) = match tokens[..] {
            [x, y, re] => (x, y, re, None),
            [x, y, re, im] => (x, y, re, Some(im)),
            _ => return Err(Error::parse(*line, "expected `x y re [im]`")),
        };
        let finite = |t: &str| {
            let v = parse_value(t, *line)?;
            if v == INF {
                return Err(Error::parse(*line, "operator entries must be finite"));
            }
            Ok(v)
        };
        let value = Scalar::new(finite(re)?, im.map(finite).transpose()?.unwrap_or(0.0));
        entries.push((
            lookup(&body.points, x, *line)?,
            lookup(&body.points, y, *line)?,
            value,
        ));
    }
    SparseOp::from_entries(body.points, entries)
}

/// Row-major; the imaginary part is omitted when it is zero.
pub fn write_smx(t: &SparseOp) -> String {
    let mut out = String::new();
    write_header(&mut out, t.points());
    for (x, y, v) in t.entries() {
        let _ = write!(
            out,
            "{} {} {}",
            t.points().id(x),
            t.points().id(y),
            fmt_value(v.re)
        );
        if v.im != 0.0 {
            let _ = write!(out, " {}", fmt_value(v.im));
        }
        out.push('\n');
    }
    out
}

/// Parses an `.hrf` file. The family is not checked, and its declared
/// scale is `(0, ∞, ∞)`: callers supply the parameters they test against.
pub fn parse_hrf(text: &str) -> Result<HRFamily> {
    let body = with_header(text)?;
    let n = body.points.len();
    let mut raw: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (line, tokens) in &body.lines {
        let [x, z, v] = tokens[..] else {
            return Err(Error::parse(*line, "expected `x z value`"));
        };
        let (x, z) = (
            lookup(&body.points, x, *line)?,
            lookup(&body.points, z, *line)?,
        );
        if raw[x].iter().any(|&(w, _)| w == z) {
            return Err(Error::parse(*line, "value given twice"));
        }
        raw[x].push((z, parse_value(v, *line)?));
    }
    let vectors = raw.into_iter().map(SparseVec::new).collect::<Result<_>>()?;
    HRFamily::new(body.points, vectors, HRParams::support_only(INF))
}

pub fn write_hrf(xi: &HRFamily) -> String {
    let points = xi.points();
    let mut out = String::new();
    write_header(&mut out, points);
    for (x, v) in xi.vectors().iter().enumerate() {
        for &(z, value) in v.entries() {
            let _ = writeln!(
                out,
                "{} {} {}",
                points.id(x),
                points.id(z),
                fmt_value(value)
            );
        }
    }
    out
}

/// A `.map` file before it is resolved against point sets.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MapFile {
    pub f: Vec<(String, String)>,
    pub g: Option<Vec<(String, String)>>,
    pub closeness: Option<f64>,
}

impl MapFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut file = MapFile::default();
        for (line, tokens) in data_lines(text) {
            match tokens[..] {
                ["g:"] => {
                    if file.g.is_some() {
                        return Err(Error::parse(line, "second `g:` section"));
                    }
                    file.g = Some(Vec::new());
                }
                ["C:", v] => {
                    if file.closeness.is_some() {
                        return Err(Error::parse(line, "`C:` given twice"));
                    }
                    let c = parse_value(v, line)?;
                    if c < 0.0 {
                        return Err(Error::parse(line, "closeness bound must be nonnegative"));
                    }
                    file.closeness = Some(c);
                }
                [a, "->", b] => {
                    let pair = (a.to_string(), b.to_string());
                    match &mut file.g {
                        Some(g) => g.push(pair),
                        None => file.f.push(pair),
                    }
                }
                _ => return Err(Error::parse(line, "expected `x -> y`, `g:` or `C: value`")),
            }
        }
        Ok(file)
    }

    /// Lines in the order they were read.
    pub fn write(&self) -> String {
        let mut out = String::new();
        for (a, b) in &self.f {
            let _ = writeln!(out, "{a} -> {b}");
        }
        if let Some(g) = &self.g {
            out.push_str("g:\n");
            for (a, b) in g {
                let _ = writeln!(out, "{a} -> {b}");
            }
        }
        if let Some(c) = self.closeness {
            let _ = writeln!(out, "C: {}", fmt_value(c));
        }
        out
    }

    /// Resolves ids against the point sets of `X` and `Y`; both maps must be
    /// total.
    pub fn resolve(&self, x: &Arc<PointSet>, y: &Arc<PointSet>) -> Result<CoarseMapData> {
        let f = PointMap::from_pairs(Arc::clone(x), Arc::clone(y), &self.f)?;
        let mut data = CoarseMapData::new(f);
        if let Some(g) = &self.g {
            data.g = Some(PointMap::from_pairs(Arc::clone(y), Arc::clone(x), g)?);
        }
        data.closeness = self.closeness;
        Ok(data)
    }
}

/// Canonical `.map`: `f` in source point order, then `g` in its source
/// point order, then the closeness bound.
pub fn write_map(data: &CoarseMapData) -> String {
    let pairs = |m: &PointMap| -> Vec<(String, String)> {
        (0..m.source().len())
            .map(|x| {
                (
                    m.source().id(x).to_string(),
                    m.target().id(m.image(x)).to_string(),
                )
            })
            .collect()
    };
    MapFile {
        f: pairs(&data.f),
        g: data.g.as_ref().map(pairs),
        closeness: data.closeness,
    }
    .write()
}

//! Printed tables of connection data, loaded from plain-text fixtures and
//! compared with the derived symbols.
//!
//! A file holds blocks opened by `table: NAME`. Header lines:
//!
//! ```text
//! chart: XJ1-real          coordinate names come from the chart
//! metric: METRS2           catalog metric or potential id
//! also: begGG              optional second metric, listed entries only
//! kind: christoffel        or `connection`, or `covariant`
//! of: q                    covariant only: which differential
//! negated: true            covariant only: the table prints −D
//! symmetric: true          (a b c) also stands for (a c b); (a b) for (b a)
//! complete: all            unlisted entries vanish; `entries` or `none`
//! let S = x^2 + y^2        definitions, evaluated in order
//! ```
//!
//! Entries are `a b c = expr` for `Γ^a_{bc}` (or the coefficient of `dc` in
//! `θ^a_b`), `a b = expr` for the coefficient of `da ⊗ db`, and
//! `erratum ... = printed => corrected` where the printed value is known to
//! be wrong. Conjugate coordinates carry a `b` suffix (`wb`, `ub`).

use super::{christoffel_at, GammaValue};
use crate::calculus::Scalar;
use crate::charts::{ChartId, ChartPoint};
use crate::config::Tolerances;
use crate::error::{GeoError, Result};
use crate::expr::{Env, Expr};
use crate::metrics::{AnyMetric, MetricSource};
use crate::params::ModelParams;
use rand::Rng;
use serde::Serialize;

#[derive(Clone, Debug, PartialEq)]
pub enum Kind {
    Christoffel,
    Connection,
    Covariant { of: String, negated: bool },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Complete {
    All,
    Entries,
    None,
}

#[derive(Clone, Debug)]
pub struct Entry {
    pub idx: Vec<String>,
    pub printed: Expr,
    pub corrected: Option<Expr>,
    pub text: String,
}

#[derive(Clone, Debug)]
pub struct Table {
    pub name: String,
    pub chart: ChartId,
    pub metric: String,
    pub also: Option<String>,
    pub kind: Kind,
    pub symmetric: bool,
    pub complete: Complete,
    pub lets: Vec<(String, Expr)>,
    pub entries: Vec<Entry>,
}

const CHRISTOFFEL: &str = include_str!("../../data/christoffel.txt");
const CONNECTION: &str = include_str!("../../data/connection.txt");
const COVARIANT: &str = include_str!("../../data/covariant.txt");

/// Every table shipped with the crate.
pub fn builtin() -> Vec<Table> {
    [CHRISTOFFEL, CONNECTION, COVARIANT]
        .iter()
        .flat_map(|s| parse_tables(s).expect("embedded tables parse"))
        .collect()
}

pub fn builtin_table(name: &str) -> Result<Table> {
    builtin().into_iter().find(|t| t.name == name).ok_or_else(|| GeoError::UnknownId(name.into()))
}

struct Draft {
    name: String,
    chart: Option<ChartId>,
    metric: Option<String>,
    also: Option<String>,
    kind: Option<String>,
    of: Option<String>,
    negated: bool,
    symmetric: bool,
    complete: Complete,
    lets: Vec<(String, Expr)>,
    entries: Vec<Entry>,
}

impl Draft {
    fn finish(self) -> Result<Table> {
        let need = |o: Option<String>, what: &str| o.ok_or_else(|| GeoError::Parse(format!("table {}: no {what}", self.name)));
        let kind = match need(self.kind.clone(), "kind")?.as_str() {
            "christoffel" => Kind::Christoffel,
            "connection" => Kind::Connection,
            "covariant" => Kind::Covariant { of: need(self.of.clone(), "of")?, negated: self.negated },
            k => return Err(GeoError::Parse(format!("table {}: unknown kind `{k}`", self.name))),
        };
        let chart = self.chart.ok_or_else(|| GeoError::Parse(format!("table {}: no chart", self.name)))?;
        let arity = if matches!(kind, Kind::Covariant { .. }) { 2 } else { 3 };
        let names = holo_names(chart);
        for e in &self.entries {
            if e.idx.len() != arity || e.idx.iter().any(|i| !names.contains(i)) {
                return Err(GeoError::Parse(format!("table {}: bad indices in `{}`", self.name, e.text)));
            }
        }
        if let Kind::Covariant { of, .. } = &kind {
            if !names.contains(of) {
                return Err(GeoError::Parse(format!("table {}: unknown coordinate `{of}`", self.name)));
            }
        }
        let metric = need(self.metric, "metric")?;
        Ok(Table {
            name: self.name,
            chart,
            metric,
            also: self.also,
            kind,
            symmetric: self.symmetric,
            complete: self.complete,
            lets: self.lets,
            entries: self.entries,
        })
    }
}

fn holo_names(chart: ChartId) -> Vec<String> {
    chart.coord_names()
}

pub fn parse_tables(src: &str) -> Result<Vec<Table>> {
    let mut out = Vec::new();
    let mut cur: Option<Draft> = None;
    for (no, raw) in src.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |m: &str| GeoError::Parse(format!("line {}: {m}", no + 1));
        if let Some(name) = line.strip_prefix("table:") {
            if let Some(d) = cur.take() {
                out.push(d.finish()?);
            }
            cur = Some(Draft {
                name: name.trim().to_string(),
                chart: None,
                metric: None,
                also: None,
                kind: None,
                of: None,
                negated: false,
                symmetric: false,
                complete: Complete::None,
                lets: Vec::new(),
                entries: Vec::new(),
            });
            continue;
        }
        let d = cur.as_mut().ok_or_else(|| err("content before the first `table:`"))?;
        if let Some(rest) = line.strip_prefix("let ") {
            let (name, e) = rest.split_once('=').ok_or_else(|| err("`let` needs `=`"))?;
            d.lets.push((name.trim().to_string(), Expr::parse(e)?));
            continue;
        }
        if let Some((key, val)) = line.split_once(':') {
            let val = val.trim();
            let flag = || match val {
                "true" => Ok(true),
                "false" => Ok(false),
                _ => Err(err("expected true or false")),
            };
            match key.trim() {
                "chart" => d.chart = Some(val.parse()?),
                "metric" => d.metric = Some(val.into()),
                "also" => d.also = Some(val.into()),
                "kind" => d.kind = Some(val.into()),
                "of" => d.of = Some(val.into()),
                "negated" => d.negated = flag()?,
                "symmetric" => d.symmetric = flag()?,
                "complete" => {
                    d.complete = match val {
                        "all" => Complete::All,
                        "entries" => Complete::Entries,
                        "none" => Complete::None,
                        _ => return Err(err("complete is all, entries or none")),
                    }
                }
                k => return Err(err(&format!("unknown header `{k}`"))),
            }
            continue;
        }
        let (lhs, rhs) = line.split_once('=').ok_or_else(|| err("expected `indices = value`"))?;
        let mut idx: Vec<String> = lhs.split_whitespace().map(String::from).collect();
        let erratum = idx.first().map(|s| s == "erratum").unwrap_or(false);
        if erratum {
            idx.remove(0);
        }
        let (printed, corrected) = if erratum {
            let (p, c) = rhs.split_once("=>").ok_or_else(|| err("erratum needs `printed => corrected`"))?;
            (Expr::parse(p)?, Some(Expr::parse(c)?))
        } else {
            (Expr::parse(rhs)?, None)
        };
        d.entries.push(Entry { idx, printed, corrected, text: line.to_string() });
    }
    if let Some(d) = cur.take() {
        out.push(d.finish()?);
    }
    Ok(out)
}

/// Parameters visible to table expressions.
pub fn param_env(p: &ModelParams) -> Env {
    let r = |v: f64| Scalar::new(v, 0.0);
    [
        ("k", p.k),
        ("nu", p.nu),
        ("delta", p.delta),
        ("alpha", p.alpha()),
        ("gamma", p.gamma()),
        ("eps", p.eps()),
        ("lambda", p.lambda()),
        ("iota", p.iota()),
        ("tau", p.tau()),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), r(v)))
    .collect()
}

/// Coordinates, conjugates, parameters and `let` bindings at a point.
pub fn point_env(chart: ChartId, lets: &[(String, Expr)], p: &ModelParams, pt: &ChartPoint) -> Result<Env> {
    let mut env = param_env(p);
    for (name, v) in chart.coord_names().into_iter().zip(&pt.coords) {
        if chart.is_complex() {
            env.insert(format!("{name}b"), v.conj());
        }
        env.insert(name, *v);
    }
    for (name, e) in lets {
        let v = e.eval(&env)?;
        env.insert(name.clone(), v);
    }
    Ok(env)
}

/// Derived value of one entry.
fn derived(kind: &Kind, g: &GammaValue, idx: &[usize]) -> Scalar {
    match kind {
        Kind::Christoffel | Kind::Connection => g.get(idx[0], idx[1], idx[2]),
        Kind::Covariant { .. } => unreachable!("covariant entries go through covariant_value"),
    }
}

fn covariant_value(g: &GammaValue, of: usize, negated: bool, a: usize, b: usize) -> Scalar {
    let v = -g.get(of, a, b);
    if negated {
        -v
    } else {
        v
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EntryReport {
    pub entry: String,
    /// Largest scaled gap between the printed value and the derived one.
    pub printed_err: f64,
    /// Same for the corrected value of an erratum.
    pub corrected_err: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TableReport {
    pub table: String,
    pub metric: String,
    pub samples: usize,
    pub entries: Vec<EntryReport>,
    /// Largest derived value among entries the table says vanish.
    pub unlisted_max: f64,
}

impl TableReport {
    /// Worst error with every entry taken as printed.
    pub fn printed_max(&self) -> f64 {
        self.entries.iter().map(|e| e.printed_err).fold(self.unlisted_max, f64::max)
    }

    /// Worst error after applying the corrections.
    pub fn corrected_max(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.corrected_err.unwrap_or(e.printed_err))
            .fold(self.unlisted_max, f64::max)
    }

    /// Errata whose printed value is off by more than `gap` while the
    /// correction holds to `tol`.
    pub fn confirmed_errata(&self, gap: f64, tol: f64) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|e| matches!(e.corrected_err, Some(c) if c < tol) && e.printed_err > gap)
            .map(|e| e.entry.as_str())
            .collect()
    }

    /// Entries that fail as printed.
    pub fn mismatches(&self, tol: f64) -> Vec<&str> {
        self.entries.iter().filter(|e| e.printed_err >= tol).map(|e| e.entry.as_str()).collect()
    }
}

/// `|a − b| / max(1, |b|)`.
pub fn scaled_err(a: Scalar, b: Scalar) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

/// Checks a table against a metric at the given points.
pub fn check_table_with(t: &Table, metric_id: &str, p: &ModelParams, pts: &[ChartPoint], tol: &Tolerances, full: bool) -> Result<TableReport> {
    let m = AnyMetric::parse(metric_id, *p)?;
    let mchart = m.chart();
    let names = mchart.coord_names();
    let pos = |s: &String| names.iter().position(|n| n == s).ok_or_else(|| GeoError::UnknownId(s.clone()));
    let idxs: Vec<Vec<usize>> = t.entries.iter().map(|e| e.idx.iter().map(pos).collect()).collect::<Result<_>>()?;
    let n = m.size();
    let mut reps: Vec<EntryReport> = t
        .entries
        .iter()
        .map(|e| EntryReport { entry: e.text.clone(), printed_err: 0.0, corrected_err: e.corrected.as_ref().map(|_| 0.0) })
        .collect();
    let mut listed = std::collections::HashSet::new();
    let arity = idxs.first().map_or(3, |v| v.len());
    for ix in &idxs {
        listed.insert(ix.clone());
        if t.symmetric {
            let mut s = ix.clone();
            s.swap(arity - 2, arity - 1);
            listed.insert(s);
        }
    }
    let mut unlisted_max = 0.0f64;
    for pt in pts {
        let g = christoffel_at(&m, &pt.full(), tol)?;
        let env = point_env(mchart, &t.lets, p, pt)?;
        let value = |ix: &[usize]| match &t.kind {
            Kind::Covariant { of, negated } => {
                let o = names.iter().position(|nm| nm == of).unwrap_or(0);
                covariant_value(&g, o, *negated, ix[0], ix[1])
            }
            k => derived(k, &g, ix),
        };
        for ((e, ix), rep) in t.entries.iter().zip(&idxs).zip(reps.iter_mut()) {
            let d = value(ix);
            rep.printed_err = rep.printed_err.max(scaled_err(d, e.printed.eval(&env)?));
            if let Some(c) = &e.corrected {
                let err = scaled_err(d, c.eval(&env)?);
                rep.corrected_err = Some(rep.corrected_err.unwrap_or(0.0).max(err));
            }
            if t.symmetric {
                let mut s = ix.clone();
                s.swap(arity - 2, arity - 1);
                rep.printed_err = rep.printed_err.max(scaled_err(value(&s), e.printed.eval(&env)?));
            }
        }
        if full && t.complete != Complete::None {
            let heads: std::collections::HashSet<Vec<usize>> = idxs.iter().map(|ix| ix[..arity - 1].to_vec()).collect();
            let total = n.pow(arity as u32);
            for flat in 0..total {
                let ix: Vec<usize> = (0..arity).map(|d| flat / n.pow((arity - 1 - d) as u32) % n).collect();
                if listed.contains(&ix) {
                    continue;
                }
                if t.complete == Complete::Entries && !heads.contains(&ix[..arity - 1].to_vec()) {
                    continue;
                }
                unlisted_max = unlisted_max.max(value(&ix).norm());
            }
        }
    }
    Ok(TableReport { table: t.name.clone(), metric: metric_id.to_string(), samples: pts.len(), entries: reps, unlisted_max })
}

/// Checks a table on `samples` random points of its chart, plus its
/// optional second metric on that metric's chart.
pub fn check_table<R: Rng + ?Sized>(t: &Table, p: &ModelParams, samples: usize, rng: &mut R, tol: &Tolerances) -> Result<Vec<TableReport>> {
    let pts: Vec<ChartPoint> = (0..samples).map(|_| t.chart.sample(rng)).collect();
    let mut out = vec![check_table_with(t, &t.metric, p, &pts, tol, true)?];
    if let Some(also) = &t.also {
        let chart = AnyMetric::parse(also, *p)?.chart();
        let pts: Vec<ChartPoint> = (0..samples).map(|_| chart.sample(rng)).collect();
        out.push(check_table_with(t, also, p, &pts, tol, false)?);
    }
    Ok(out)
}

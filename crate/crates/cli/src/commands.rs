//! The non-verification subcommands, returning JSON values or CSV text.

use crate::report::fmt_f64;
use serde_json::{json, Map, Value};
use sjg_core::berry::{berry_connection, berry_phase_loop, ClosedBerry, ClosedId, LoopPhase};
use sjg_core::calculus::quad::{Circle, Disk};
use sjg_core::calculus::{form_at, Field, FormValue, Number, Rule, Scalar, I};
use sjg_core::config::NumConfig;
use sjg_core::connections::{christoffel_at, connection_matrix};
use sjg_core::cosymplectic::{acos_check, expected_top_coefficient, extended_structure};
use sjg_core::dynamics::{integrate_flow, GeodesicFlow, HamiltonianSpec, KappaTerm, State, Trajectory};
use sjg_core::metrics::{default_potential, metric_at, AnyMetric, CatalogMetric, KahlerForm, MetricId, MetricSource, PotentialMetric, RealMetric};
use sjg_core::{ChartId, ChartPoint, GeoError, ModelParams, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A catalog or potential metric, or the real form of one.
#[derive(Clone, Copy, Debug)]
pub enum CliMetric {
    Any(AnyMetric),
    Real(RealMetric<AnyMetric>),
}

impl Field for CliMetric {
    fn dim(&self) -> usize {
        match self {
            CliMetric::Any(m) => m.dim(),
            CliMetric::Real(m) => m.dim(),
        }
    }
    fn len(&self) -> usize {
        match self {
            CliMetric::Any(m) => m.len(),
            CliMetric::Real(m) => m.len(),
        }
    }
    fn check(&self, x: &[Scalar]) -> Result<()> {
        match self {
            CliMetric::Any(m) => m.check(x),
            CliMetric::Real(m) => m.check(x),
        }
    }
    fn eval<T: Number, const N: usize>(&self, x: &[T; N]) -> Vec<T> {
        match self {
            CliMetric::Any(m) => m.eval(x),
            CliMetric::Real(m) => m.eval(x),
        }
    }
}

impl MetricSource for CliMetric {
    fn chart(&self) -> ChartId {
        match self {
            CliMetric::Any(m) => m.chart(),
            CliMetric::Real(m) => m.chart(),
        }
    }
    fn size(&self) -> usize {
        match self {
            CliMetric::Any(m) => m.size(),
            CliMetric::Real(m) => m.size(),
        }
    }
}

/// The metric used on a chart unless `--metric` names another one.
pub fn metric_for(chart: ChartId, params: ModelParams, id: Option<&str>) -> Result<CliMetric> {
    if let Some(id) = id {
        let m = AnyMetric::parse(id, params)?;
        if m.chart() != chart {
            return Err(GeoError::Parse(format!("metric {id} lives on {}, not {chart}", m.chart())));
        }
        return Ok(CliMetric::Any(m));
    }
    use ChartId::*;
    let cat = |id| Ok(CliMetric::Any(AnyMetric::Catalog(CatalogMetric::new(id, params))));
    match chart {
        X1Real => cat(MetricId::X1Real),
        XJ1Real => cat(MetricId::Metrs2),
        XJ1Ext => cat(MetricId::BegGG),
        XJ1Mn => cat(MetricId::NewMM),
        XJnReal(n) => cat(MetricId::Bigm { n, ext: false }),
        XJnExt(n) => cat(MetricId::Bigm { n, ext: true }),
        D1Real | DJ1Real => {
            let partner = chart.complex_partner().expect("real charts have partners");
            let h = holomorphic(partner, params)?;
            Ok(CliMetric::Real(RealMetric::new(h, chart)?))
        }
        _ => holomorphic(chart, params).map(CliMetric::Any),
    }
}

fn holomorphic(chart: ChartId, params: ModelParams) -> Result<AnyMetric> {
    if let Some(m) = sjg_core::metrics::catalog_for(chart, params) {
        return Ok(AnyMetric::Catalog(m));
    }
    default_potential(chart, params)
        .map(|f| AnyMetric::Potential(PotentialMetric(f)))
        .ok_or_else(|| GeoError::UnknownId(format!("no default metric on {chart}")))
}

fn closed_berry_for(chart: ChartId) -> Option<ClosedId> {
    use ChartId as C;
    Some(match chart {
        C::D1 => ClosedId::D1,
        C::D1Real => ClosedId::D1Real,
        C::X1Real => ClosedId::X1Real,
        C::DJ1 => ClosedId::DJ1,
        C::DJ1Eta => ClosedId::DJ1Eta,
        C::DJ1Real => ClosedId::DJ1Real,
        C::XJ1Mn => ClosedId::XJ1Mn,
        C::XJ1Real => ClosedId::XJ1Real,
        C::S2 => ClosedId::S2,
        C::Gr { n, m, eps } => ClosedId::Gr { n, m, eps },
        C::CP { n, eps } => ClosedId::Cp { n, eps },
        _ => return None,
    })
}

/// A number on a real chart, `[re, im]` on a holomorphic one.
fn num(z: Scalar, complex: bool) -> Value {
    if complex {
        json!([z.re, z.im])
    } else {
        json!(z.re)
    }
}

/// Names of the full coordinate vector: conjugates carry a `b` suffix.
fn full_names(chart: ChartId) -> Vec<String> {
    let names = chart.coord_names();
    if chart.is_complex() {
        names.iter().cloned().chain(names.iter().map(|n| format!("{n}b"))).collect()
    } else {
        names
    }
}

fn one_form_json(f: &FormValue, chart: ChartId) -> Value {
    let mut m = Map::new();
    for (n, v) in full_names(chart).iter().zip(&f.c) {
        m.insert(format!("d{n}"), num(*v, chart.is_complex()));
    }
    Value::Object(m)
}

fn two_form_json(f: &FormValue, chart: ChartId) -> Value {
    let names = full_names(chart);
    let mut m = Map::new();
    for (idx, v) in sjg_core::calculus::forms::combos(names.len(), 2).iter().zip(&f.c) {
        if v.norm() != 0.0 {
            m.insert(format!("d{}^d{}", names[idx[0]], names[idx[1]]), num(*v, chart.is_complex()));
        }
    }
    Value::Object(m)
}

pub const EVAL_OBJECTS: [&str; 5] = ["metric", "christoffel", "connection-matrix", "berry", "kahler-form"];

/// `eval`: one geometric object at one point.
pub fn eval(chart: ChartId, object: &str, at: &str, params: ModelParams, metric: Option<&str>, num_cfg: &NumConfig) -> Result<Value> {
    let pt = ChartPoint::parse(chart, at)?;
    let x = pt.full();
    let cx = chart.is_complex();
    let names = chart.coord_names();
    let value = match object {
        "metric" => {
            let m = metric_for(chart, params, metric)?;
            let g = metric_at(&m, &x)?;
            json!(g.iter().map(|r| r.iter().map(|v| num(*v, cx)).collect::<Vec<_>>()).collect::<Vec<_>>())
        }
        "christoffel" => {
            let m = metric_for(chart, params, metric)?;
            let g = christoffel_at(&m, &x, &num_cfg.tol)?;
            let mut out = Map::new();
            for i in 0..g.n {
                for j in 0..g.n {
                    for k in 0..g.n {
                        let v = g.get(i, j, k);
                        if v.norm() > 0.0 {
                            out.insert(format!("{} {} {}", names[i], names[j], names[k]), num(v, cx));
                        }
                    }
                }
            }
            Value::Object(out)
        }
        "connection-matrix" => {
            let m = metric_for(chart, params, metric)?;
            let c = connection_matrix(&m, &x, &num_cfg.tol)?.printed_layout();
            let rows: Vec<Value> = c
                .iter()
                .map(|row| {
                    Value::Array(
                        row.iter()
                            .map(|f| {
                                Value::Object(names.iter().zip(f).map(|(n, v)| (format!("d{n}"), num(*v, cx))).collect())
                            })
                            .collect(),
                    )
                })
                .collect();
            json!({ "layout": "row j, column i holds theta^i_j", "matrix": rows })
        }
        "berry" => {
            let f = match closed_berry_for(chart) {
                Some(id) => form_at(&ClosedBerry::new(id, params), &x)?,
                None => {
                    let pot = default_potential(chart, params).ok_or_else(|| GeoError::UnknownId(format!("no Berry connection on {chart}")))?;
                    berry_connection(pot, &x)?
                }
            };
            one_form_json(&f, chart)
        }
        "kahler-form" => {
            let h = holomorphic(chart, params)?;
            let w = KahlerForm::new(h)?.with_convention(num_cfg.two_form);
            two_form_json(&form_at(&w, &x)?, chart)
        }
        other => return Err(GeoError::UnknownId(format!("object `{other}`; expected one of {}", EVAL_OBJECTS.join(", ")))),
    };
    let at: Map<String, Value> = names.iter().zip(&pt.coords).map(|(n, v)| (n.clone(), num(*v, cx))).collect();
    Ok(json!({ "space": chart.to_string(), "object": object, "params": params, "at": at, "value": value }))
}

/// A real chart listing the real and imaginary parts of `chart`.
fn real_partner(chart: ChartId) -> Option<ChartId> {
    use ChartId::*;
    [D1Real, X1Real, DJ1Real, XJ1Real, XJ1Mn].into_iter().find(|r| r.complex_partner() == Some(chart))
}

/// Initial data on `chart`; a holomorphic chart also accepts the names of
/// its real partner (`x=0,y=1,vx=1,vy=0` on `X1`).
pub fn parse_state(chart: ChartId, spec: &str) -> Result<State> {
    match State::parse(chart, spec) {
        Err(GeoError::UnknownId(name)) if chart.is_complex() => {
            let real = real_partner(chart).ok_or(GeoError::UnknownId(name))?;
            let s = State::parse(real, spec)?;
            let pair = |v: &[Scalar]| -> Vec<Scalar> { v.chunks(2).map(|c| c[0] + c[1] * I).collect() };
            State::new(ChartPoint::new(chart, pair(&s.point.coords))?, pair(&s.velocity))
        }
        other => other,
    }
}

/// CSV header names of a trajectory on `chart`, positions then velocities.
fn state_columns(chart: ChartId) -> Vec<String> {
    let pos: Vec<String> = if chart.is_complex() {
        match real_partner(chart) {
            Some(r) => r.coord_names(),
            None => chart.coord_names().iter().flat_map(|n| [format!("{n}.re"), format!("{n}.im")]).collect(),
        }
    } else {
        chart.coord_names()
    };
    pos.iter().cloned().chain(pos.iter().map(|n| format!("v{n}"))).collect()
}

fn row_values(chart: ChartId, y: &[Scalar]) -> Vec<f64> {
    if chart.is_complex() {
        y.iter().flat_map(|z| [z.re, z.im]).collect()
    } else {
        y.iter().map(|z| z.re).collect()
    }
}

/// A trajectory as rows of reals, with its column names.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Time at which the run left the chart, if it did.
    pub exit: Option<f64>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> Value {
        json!({ "columns": self.columns, "rows": self.rows, "exit": self.exit })
    }
}

fn thin<T>(tr: Trajectory<T>, every: usize, f: impl Fn(&[T]) -> Vec<f64>) -> (Vec<Vec<f64>>, Option<f64>) {
    let n = tr.samples.len();
    let rows = tr
        .samples
        .iter()
        .enumerate()
        .filter(|(i, _)| i % every.max(1) == 0 || *i + 1 == n)
        .map(|(_, (t, y))| std::iter::once(*t).chain(f(y)).collect())
        .collect();
    (rows, tr.exit)
}

pub fn geodesic(chart: ChartId, init: &str, t_max: f64, step: f64, every: usize, params: ModelParams, metric: Option<&str>, num_cfg: &NumConfig) -> Result<Table> {
    if !(step > 0.0 && t_max >= 0.0) {
        return Err(GeoError::Parse("need step > 0 and t >= 0".into()));
    }
    let flow = GeodesicFlow::new(metric_for(chart, params, metric)?, num_cfg.tol);
    let s0 = parse_state(chart, init)?;
    let tr = flow.integrate(&s0, t_max, step)?;
    let (rows, exit) = thin(tr, every, |y| row_values(chart, y));
    Ok(Table { columns: std::iter::once("t".to_string()).chain(state_columns(chart)).collect(), rows, exit })
}

pub fn flow(chart: ChartId, h: &str, kappa: Option<&str>, init: &str, t_max: f64, step: f64, every: usize, params: ModelParams) -> Result<Table> {
    if chart != ChartId::XJ1Ext {
        return Err(GeoError::UnknownId(format!("flow runs on XJ1-ext, not {chart}")));
    }
    if !(step > 0.0 && t_max >= 0.0) {
        return Err(GeoError::Parse("need step > 0 and t >= 0".into()));
    }
    let spec = HamiltonianSpec::new(sjg_core::berry::LinearHamiltonian::parse(h)?, kappa.map(KappaTerm::parse).transpose()?.unwrap_or_default());
    let s0: Vec<f64> = ChartPoint::parse(chart, init)?.coords.iter().map(|z| z.re).collect();
    let tr = integrate_flow(&spec, &params, &s0, t_max, step)?;
    let (rows, exit) = thin(tr, every, |y| y.to_vec());
    Ok(Table { columns: ["t", "x", "y", "q", "p", "kappa"].map(String::from).to_vec(), rows, exit })
}

/// The real chart a Berry loop runs on, with its default centre.
fn loop_chart(chart: ChartId) -> Result<(ClosedId, Vec<f64>)> {
    use ChartId::*;
    let real = match chart {
        D1 => D1Real,
        X1 => X1Real,
        DJ1 | DJ1Eta => DJ1Real,
        XJ1Eta => XJ1Real,
        XJ1 => XJ1Mn,
        other => other,
    };
    let center = match real {
        D1Real => vec![0.0, 0.0],
        X1Real => vec![0.0, 1.0],
        DJ1Real => vec![0.0; 4],
        XJ1Real | XJ1Mn => vec![0.0, 1.0, 0.0, 0.0],
        other => return Err(GeoError::UnknownId(format!("no loop phase on {other}"))),
    };
    Ok((closed_berry_for(real).expect("loop charts have closed forms"), center))
}

/// `circle:r=R`.
pub fn parse_curve(spec: &str) -> Result<f64> {
    let body = spec.strip_prefix("circle:").ok_or_else(|| GeoError::Parse(format!("unsupported curve `{spec}`; expected circle:r=R")))?;
    let r = body
        .strip_prefix("r=")
        .and_then(|v| v.trim().parse::<f64>().ok())
        .filter(|r| r.is_finite() && *r >= 0.0)
        .ok_or_else(|| GeoError::Parse(format!("bad radius in `{spec}`")))?;
    Ok(r)
}

pub fn loop_phase(chart: ChartId, curve: &str, center: Option<&str>, plane: Option<&str>, params: ModelParams, num_cfg: &NumConfig) -> Result<LoopPhase> {
    let r = parse_curve(curve)?;
    let (id, default_center) = loop_chart(chart)?;
    let real = id.chart();
    let names = real.coord_names();
    let center = match center {
        Some(s) => ChartPoint::parse(real, s)?.coords,
        None => ChartPoint::real(real, &default_center)?.coords,
    };
    let plane = match plane {
        Some(s) => {
            let idx: Vec<usize> = s
                .split(',')
                .map(|n| names.iter().position(|m| m == n.trim()).ok_or_else(|| GeoError::UnknownId(n.trim().into())))
                .collect::<Result<_>>()?;
            match idx[..] {
                [a, b] if a != b => (a, b),
                _ => return Err(GeoError::Parse("plane needs two distinct coordinates".into())),
            }
        }
        None => (0, 1),
    };
    let circle = Circle { center, plane, r };
    let rule = Rule::composite(num_cfg.nodes, num_cfg.segments);
    berry_phase_loop(id, params, &circle, &Disk(circle.clone()), &rule, num_cfg.holonomy)
}

pub fn cosym_check(chart: ChartId, samples: usize, seed: u64, params: ModelParams, num_cfg: &NumConfig) -> Result<Value> {
    let n = match chart {
        ChartId::XJ1Ext => 1,
        ChartId::XJnExt(n) => n,
        other => return Err(GeoError::UnknownId(format!("no cosymplectic structure on {other}"))),
    };
    let s = extended_structure(n, params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut min_rank, mut max_domega, mut top_err, mut min_top) = (usize::MAX, 0.0f64, 0.0f64, f64::INFINITY);
    let mut all = true;
    let mut expected_rank = 0;
    for _ in 0..samples {
        let x = chart.sample(&mut rng).full();
        let r = acos_check(&s, &x, &num_cfg.tol)?;
        all &= r.is_acos();
        expected_rank = r.expected_rank;
        min_rank = min_rank.min(r.rank);
        max_domega = max_domega.max(r.d_omega);
        min_top = min_top.min(r.top_coefficient.abs());
        if n == 1 {
            let want = expected_top_coefficient(&params, x[1].re);
            top_err = top_err.max((r.top_coefficient - want).abs() / want.abs().max(1.0));
        }
    }
    let mut out = json!({
        "space": chart.to_string(),
        "samples": samples,
        "seed": seed,
        "params": params,
        "acos": all && samples > 0,
        "expected_rank": expected_rank,
        "min_rank": if samples > 0 { min_rank } else { 0 },
        "max_d_omega": max_domega,
        "min_abs_top_coefficient": if samples > 0 { min_top } else { 0.0 },
    });
    if n == 1 {
        out["max_top_coefficient_err"] = json!(top_err);
    }
    Ok(out)
}

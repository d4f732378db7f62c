//! Verification suites. Every identity draws its sample points from its own
//! ChaCha stream keyed by the identity id, so adding or removing identities
//! never moves the points of the others.

use crate::report::{Conventions, IdentityResult, Kind, VerificationReport};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sjg_core::berry::{
    berry_phase_loop, closed_vs_derived, d_berry_residual, grassmann_d_berry, grassmann_omega, pulled_omega, ClosedBerry, ClosedId,
    LinearHamiltonian,
};
use sjg_core::calculus::forms::exterior_from_grad;
use sjg_core::calculus::quad::{Circle, Disk};
use sjg_core::calculus::{c, exterior_derivative, fd_jacobian, form_at, linalg, Gradient, Rule, Scalar};
use sjg_core::charts::{apply, transform_jacobian, GroupElem, Transform, TransformMap};
use sjg_core::config::{NumConfig, Tolerances};
use sjg_core::connections::cayley::{cayley_check, CHART as CAYLEY_CHART};
use sjg_core::connections::tables::{builtin, check_table_with, Kind as TableKind, TableReport};
use sjg_core::connections::{christoffel_at, christoffel_fd, connection_matrix, form_mat_diff, transform_connection};
use sjg_core::cosymplectic::{
    acos_check, darboux_vectorize, expected_top_coefficient, extended_structure, theta_from_coefficients, Omega, OmegaKind, Theta,
};
use sjg_core::dynamics::fixtures::{bridge_gap, fixtures, triangle_holonomy, Triangle};
use sjg_core::dynamics::{integrate_flow, kappa_dot_lines, HamiltonianSpec, KappaTerm, State};
use sjg_core::metrics::{
    metric_at, real_route_form, AnyMetric, CatalogForm, CatalogMetric, FormId, MetricId, MetricSource, PotKind, Potential, PotentialMetric,
};
use sjg_core::{ChartId, ChartPoint, GeoError, ModelParams};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    All,
    Christoffel,
    Berry,
    Transforms,
    Cosymplectic,
    Dynamics,
    Discrepancies,
}

impl Suite {
    pub const NAMES: [&'static str; 7] = ["all", "christoffel", "berry", "transforms", "cosymplectic", "dynamics", "discrepancies"];

    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Christoffel => "christoffel",
            Suite::Berry => "berry",
            Suite::Transforms => "transforms",
            Suite::Cosymplectic => "cosymplectic",
            Suite::Dynamics => "dynamics",
            Suite::Discrepancies => "discrepancies",
        }
    }

    fn includes(self, s: Suite) -> bool {
        self == Suite::All || self == s
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = GeoError;
    fn from_str(s: &str) -> sjg_core::Result<Self> {
        use Suite::*;
        [All, Christoffel, Berry, Transforms, Cosymplectic, Dynamics, Discrepancies]
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| GeoError::UnknownId(s.into()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub params: ModelParams,
    pub seed: u64,
    pub samples: usize,
    pub num: NumConfig,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { params: ModelParams::default(), seed: 42, samples: 200, num: NumConfig::default(), out: None }
    }
}

impl RunConfig {
    pub fn validate(&self) -> sjg_core::Result<()> {
        self.params.validate()?;
        if self.samples == 0 {
            return Err(GeoError::Parse("samples must be at least 1".into()));
        }
        Ok(())
    }
}

/// FNV-1a, so stream numbers do not depend on the standard library's hasher.
fn stream_of(id: &str) -> u64 {
    id.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    rows: Vec<IdentityResult>,
    suite: Suite,
}

type Res = Result<f64, String>;

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// Worst value of `f` over `items`, evaluated in parallel; the first error
/// in item order wins.
fn worst<T: Sync>(items: &[T], f: impl Fn(&T) -> sjg_core::Result<f64> + Sync + Send) -> Res {
    let vals: Vec<sjg_core::Result<f64>> = items.par_iter().map(f).collect();
    let mut m = 0.0f64;
    for v in vals {
        m = nan_max(m, v.map_err(|e| e.to_string())?);
    }
    Ok(m)
}

fn scale(m: f64) -> f64 {
    m.max(1.0)
}

impl Ctx<'_> {
    fn p(&self) -> ModelParams {
        self.cfg.params
    }
    fn tol(&self) -> &Tolerances {
        &self.cfg.num.tol
    }
    fn n(&self) -> usize {
        self.cfg.samples
    }

    fn rng(&self, id: &str) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        r.set_stream(stream_of(id));
        r
    }

    fn points(&self, id: &str, chart: ChartId, n: usize) -> Vec<ChartPoint> {
        let mut r = self.rng(id);
        (0..n).map(|_| chart.sample(&mut r)).collect()
    }

    fn push(&mut self, id: impl Into<String>, anchor: &str, kind: Kind, samples: usize, err: Res, tol: f64) {
        self.rows.push(IdentityResult::new(id.into(), anchor, self.suite.name(), kind, samples, err, tol));
    }

    /// An identity checked on `n` fresh points of `chart`.
    fn sampled(&mut self, id: String, anchor: &str, chart: ChartId, tol: f64, f: impl Fn(&[Scalar]) -> sjg_core::Result<f64> + Sync + Send) {
        let pts: Vec<Vec<Scalar>> = self.points(&id, chart, self.n()).iter().map(ChartPoint::full).collect();
        let err = worst(&pts, |x| f(x));
        self.push(id, anchor, Kind::Identity, pts.len(), err, tol);
    }
}

fn merge(reports: Vec<TableReport>) -> TableReport {
    let mut it = reports.into_iter();
    let mut acc = it.next().expect("at least one chunk");
    for r in it {
        acc.samples += r.samples;
        acc.unlisted_max = nan_max(acc.unlisted_max, r.unlisted_max);
        for (a, b) in acc.entries.iter_mut().zip(r.entries) {
            a.printed_err = nan_max(a.printed_err, b.printed_err);
            a.corrected_err = match (a.corrected_err, b.corrected_err) {
                (Some(x), Some(y)) => Some(nan_max(x, y)),
                (x, y) => x.or(y),
            };
        }
    }
    acc
}

/// Gap above which a printed slip counts as a real difference.
const DIFFER: f64 = 1e-3;

fn tables(ctx: &mut Ctx) {
    let p = ctx.p();
    let tol = *ctx.tol();
    for t in builtin() {
        let limit = if matches!(t.kind, TableKind::Covariant { .. }) { 1e-10 } else { 1e-9 };
        let has_errata = t.entries.iter().any(|e| e.corrected.is_some());
        let mut metrics = vec![(t.metric.clone(), true)];
        metrics.extend(t.also.clone().map(|m| (m, false)));
        for (metric, primary) in metrics {
            let id = format!("table/{}@{}", t.name, metric);
            let chart = if primary {
                Ok(t.chart)
            } else {
                AnyMetric::parse(&metric, p).map(|m| m.chart()).map_err(|e| e.to_string())
            };
            let rep = chart.and_then(|chart| {
                let pts = ctx.points(&id, chart, ctx.n());
                let parts: sjg_core::Result<Vec<TableReport>> =
                    pts.par_chunks(8).map(|ch| check_table_with(&t, &metric, &p, ch, &tol, primary)).collect();
                parts.map(merge).map_err(|e| e.to_string())
            });
            let kind = if primary && has_errata { Kind::Corrected } else { Kind::Identity };
            ctx.push(id.clone(), &t.name, kind, ctx.n(), rep.as_ref().map(|r| r.corrected_max()).map_err(Clone::clone), limit);
            if primary {
                for (e, i) in t.entries.iter().zip(0..).filter(|(e, _)| e.corrected.is_some()) {
                    let err = rep.as_ref().map(|r| r.entries[i].printed_err).map_err(Clone::clone);
                    ctx.push(format!("{id}/erratum/{}", e.idx.join(" ")), &t.name, Kind::Erratum, ctx.n(), err, DIFFER);
                }
            }
        }
    }
}

/// Jets against central differences, relative to `max(1, |jet|)`.
/// Normwise relative gap `‖a − b‖∞ / max(1, ‖a‖∞)`.
fn rel_gap(a: &[Scalar], b: &[Scalar]) -> f64 {
    let size = a.iter().map(|u| u.norm()).fold(1.0, nan_max);
    a.iter().zip(b).map(|(u, w)| (u - w).norm()).fold(0.0, nan_max) / size
}

fn christoffel_fd_rows(ctx: &mut Ctx) {
    let p = ctx.p();
    let tol = *ctx.tol();
    for id in ["metrica", "kmb", "METRS2", "begGG", "NEWMM", "newM", "X1-real", "BIGM-n2", "X1", "D1", "GGG", "Fvu"] {
        let m = match AnyMetric::parse(id, p) {
            Ok(m) => m,
            Err(e) => {
                ctx.push(format!("fd/christoffel/{id}"), "CRISTU", Kind::Identity, 0, Err(e.to_string()), tol.fd_rel);
                continue;
            }
        };
        ctx.sampled(format!("fd/christoffel/{id}"), "CRISTU", m.chart(), tol.fd_rel, |x| {
            Ok(rel_gap(&christoffel_at(&m, x, &tol)?.c, &christoffel_fd(&m, x, &tol)?.c))
        });
    }
}

fn berry_rows(ctx: &mut Ctx) {
    let p = ctx.p();
    for id in ClosedId::catalog() {
        ctx.sampled(format!("berry/dA+omega/{id}"), "DDP3", id.chart(), 1e-9, |x| {
            let w = form_at(&pulled_omega(id, p)?, x)?;
            Ok(d_berry_residual(id, p, x)? / scale(w.max_abs()))
        });
        ctx.sampled(format!("berry/closed-vs-derived/{id}"), "BCON", id.chart(), 1e-9, |x| {
            let a = form_at(&ClosedBerry::new(id, p), x)?;
            Ok(closed_vs_derived(id, p, x)? / scale(a.max_abs()))
        });
    }
    for eps in [1i8, -1] {
        for (n, m) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            let id = ClosedId::Gr { n, m, eps };
            ctx.sampled(format!("berry/grassmann-trace/{id}"), "556a", id.chart(), 1e-10, |x| {
                let da = exterior_derivative(&ClosedBerry::new(id, p), x)?;
                let w = form_at(&pulled_omega(id, p)?, x)?;
                let s = scale(w.max_abs());
                let a = da.max_abs_diff(&grassmann_d_berry(n, m, eps, x));
                let b = w.max_abs_diff(&grassmann_omega(n, m, eps, x));
                Ok(a.max(b) / s)
            });
        }
    }
    // Loop around a disk circle against the surface integral and the closed
    // value −4πk r²/(1 − r²).
    let r = 0.5;
    let circle = Circle { center: vec![c(0.0), c(0.0)], plane: (0, 1), r };
    let rule = Rule::composite(ctx.cfg.num.nodes, ctx.cfg.num.segments);
    let ph = berry_phase_loop(ClosedId::D1Real, p, &circle, &Disk(circle.clone()), &rule, ctx.cfg.num.holonomy);
    let exact = -4.0 * std::f64::consts::PI * p.k * r * r / (1.0 - r * r) * ctx.cfg.num.holonomy.factor();
    let e = |f: fn(&sjg_core::berry::LoopPhase, f64) -> f64| ph.as_ref().map(|v| f(v, exact)).map_err(|e| e.to_string());
    ctx.push("berry/loop/D1-circle-r0.5", "BF", Kind::Identity, rule.nodes.len(), e(|v, x| (v.loop_value - x).abs()), 1e-7);
    ctx.push("berry/stokes/D1-circle-r0.5", "Q1", Kind::Identity, rule.nodes.len(), e(|v, _| v.diff), 1e-7);

    let tol = *ctx.tol();
    for id in ClosedId::catalog() {
        ctx.sampled(format!("fd/exterior/{id}"), "DDP3", id.chart(), tol.fd_rel, |x| {
            let f = ClosedBerry::new(id, p);
            let jet = exterior_derivative(&f, x)?;
            let d = fd_jacobian(&f, x, tol.fd_step)?;
            Ok(rel_gap(&jet.c, &exterior_from_grad(x.len(), 1, &d)))
        });
    }
}

fn transform_rows(ctx: &mut Ctx) {
    let p = ctx.p();
    let tol = *ctx.tol();
    let g = GroupElem::new(1.3, -0.4, 0.7, 0.5, -1.1, 0.3).expect("fixed group element is valid");
    let mut all = Transform::all_parameter_free();
    all.extend([Transform::Ac1(g), Transform::Ac11(g), Transform::Ac2(g)]);
    for t in all {
        let (f, b) = (TransformMap::forward(t), TransformMap::backward(t));
        ctx.sampled(format!("transform/round-trip/{t}"), "210", t.source(), 1e-10, |x| {
            let pt = ChartPoint::from_full(t.source(), x);
            let back = apply(b, &apply(f, &pt)?)?;
            Ok(pt.coords.iter().zip(&back.coords).map(|(a, c)| (a - c).norm() / (1.0 + a.norm())).fold(0.0, nan_max))
        });
        ctx.sampled(format!("transform/jacobian-inverse/{t}"), "210", t.source(), 1e-8, |x| {
            let y = apply(f, &ChartPoint::from_full(t.source(), x))?.full();
            let prod = linalg::matmul(&transform_jacobian(b, &y)?, &transform_jacobian(f, x)?);
            Ok(linalg::max_abs_dev_from_identity(&prod))
        });
        ctx.sampled(format!("fd/transform/{t}"), "341B", t.source(), tol.fd_rel, |x| {
            let j = transform_jacobian(f, x)?;
            let d = fd_jacobian(&f, x, tol.fd_step)?;
            Ok(rel_gap(&j.concat(), &d.concat()))
        });
    }

    // Connection matrix carried by the partial Cayley transform, by block.
    let id = "cayley/blocks";
    let pts = ctx.points(id, CAYLEY_CHART, ctx.n());
    let checks: Vec<sjg_core::Result<_>> = pts.par_iter().map(|pt| cayley_check(p, pt, &tol)).collect();
    for (name, anchor) in [("A", "341B"), ("11", "522a"), ("12", "522a"), ("21", "522a"), ("22", "522a"), ("direct", "522a")] {
        let mut err = Ok(0.0);
        for ch in &checks {
            err = match (err, ch) {
                (Ok(m), Ok(c)) => Ok(nan_max(m, c.get(name))),
                (Err(e), _) => Err(e),
                (_, Err(e)) => Err(e.to_string()),
            };
        }
        ctx.push(format!("cayley/{name}"), anchor, Kind::Identity, pts.len(), err, 1e-10);
    }

    let f = TransformMap::forward;
    let cases: [(&str, &str, TransformMap); 5] = [
        ("D1", "X1", f(Transform::Cayley)),
        ("X1", "D1", TransformMap::backward(Transform::Cayley)),
        ("metrica", "kmb", f(Transform::Phi)),
        ("kmb", "metrica", TransformMap::backward(Transform::Phi)),
        ("NEWMM", "METRS2", f(Transform::Mn)),
    ];
    for (old, new, map) in cases {
        let id = format!("connection-law/{old}->{new}");
        let metrics = AnyMetric::parse(old, p).and_then(|o| Ok((o, AnyMetric::parse(new, p)?)));
        let (old, new) = match metrics {
            Ok(m) => m,
            Err(e) => {
                ctx.push(id, "522a", Kind::Identity, 0, Err(e.to_string()), 1e-9);
                continue;
            }
        };
        let pts: Vec<Vec<Scalar>> = ctx.points(&id, map.source(), ctx.n()).iter().map(ChartPoint::full).collect();
        // Points whose image leaves the target chart are not cases.
        let gaps: Vec<sjg_core::Result<Option<f64>>> = pts
            .par_iter()
            .map(|x| match transform_connection(&old, map, x, &tol) {
                Ok(t) => Ok(Some(form_mat_diff(&t.total, &connection_matrix(&new, x, &tol)?.printed_layout()))),
                Err(GeoError::ImageDomain { .. }) => Ok(None),
                Err(e) => Err(e),
            })
            .collect();
        let mut used = 0;
        let mut err = Ok(0.0);
        for g in gaps {
            err = match (err, g) {
                (Ok(m), Ok(Some(v))) => {
                    used += 1;
                    Ok(nan_max(m, v))
                }
                (Ok(m), Ok(None)) => Ok(m),
                (Err(e), _) => Err(e),
                (_, Err(e)) => Err(e.to_string()),
            };
        }
        ctx.push(id, "522a", Kind::Identity, used, err, 1e-9);
    }
    metric_rows(ctx);
}

fn metric_rows(ctx: &mut Ctx) {
    let p = ctx.p();
    let tol = *ctx.tol();
    let pairs: [(MetricId, &str, PotKind); 11] = [
        (MetricId::Metrica, "metrica", PotKind::Scwz),
        (MetricId::Kmb, "kmb", PotKind::Fvu),
        (MetricId::Hs, "hs", PotKind::P222b),
        (MetricId::HD1, "D1", PotKind::D1),
        (MetricId::HX1, "X1", PotKind::X1),
        (MetricId::HS2 { j: p.k / 2.0 }, "S2", PotKind::S2 { j: p.k / 2.0 }),
        (MetricId::Fb { n: 3, eps: 1 }, "FB", PotKind::Cp { n: 3, eps: 1 }),
        (MetricId::Fb { n: 2, eps: -1 }, "FBD", PotKind::Cp { n: 2, eps: -1 }),
        (MetricId::GrH { n: 2, m: 2, eps: 1 }, "556a", PotKind::Gr { n: 2, m: 2, eps: 1 }),
        (MetricId::GrH { n: 2, m: 1, eps: -1 }, "556a", PotKind::Gr { n: 2, m: 1, eps: -1 }),
        (MetricId::GrH { n: 1, m: 2, eps: -1 }, "556a", PotKind::Gr { n: 1, m: 2, eps: -1 }),
    ];
    for (mid, anchor, kind) in pairs {
        let (cm, pot) = (CatalogMetric::new(mid, p), Potential::new(kind, p));
        ctx.sampled(format!("metric/potential/{kind}->{mid}"), anchor, cm.chart(), 1e-10, |x| {
            let a = metric_at(&cm, x)?;
            let b = metric_at(&PotentialMetric(pot), x)?;
            Ok(linalg::max_abs_diff(&a, &b) / scale(b.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max)))
        });
        // mixed second derivatives: jet gradient differenced once
        ctx.sampled(format!("fd/metric/{kind}"), "KALP2", cm.chart(), tol.fd_rel, |x| {
            let h = metric_at(&PotentialMetric(pot), x)?;
            let d = fd_jacobian(&Gradient(&pot), x, tol.fd_step)?;
            let n = h.len();
            let fd: Vec<Scalar> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).map(|(a, b)| d[a][n + b]).collect();
            Ok(rel_gap(&h.concat(), &fd))
        });
    }
    for (a, b) in [(MetricId::Metrica, MetricId::Hinv), (MetricId::Kmb, MetricId::KmbInv)] {
        let (ga, gb) = (CatalogMetric::new(a, p), CatalogMetric::new(b, p));
        ctx.sampled(format!("metric/inverse/{b}"), &b.to_string(), ga.chart(), 1e-10, |x| {
            Ok(linalg::max_abs_dev_from_identity(&linalg::matmul(&metric_at(&ga, x)?, &metric_at(&gb, x)?)))
        });
    }
    let forms = [
        (PotKind::Kk1, FormId::Om214b),
        (PotKind::Ggg, FormId::F2),
        (PotKind::P222b, FormId::OmM),
        (PotKind::Fvu, FormId::Brf),
    ];
    for (kind, fid) in forms {
        let cf = CatalogForm::new(fid, p);
        let route = real_route_form(Potential::new(kind, p), cf.chart());
        ctx.sampled(format!("metric/two-form/{kind}->{fid}"), &fid.to_string(), cf.chart(), 1e-10, |x| {
            let r = route.as_ref().map_err(Clone::clone)?;
            let (a, b) = (form_at(r, x)?, form_at(&cf, x)?);
            Ok(a.max_abs_diff(&b) / scale(b.max_abs()))
        });
    }
}

fn cosymplectic_rows(ctx: &mut Ctx) {
    let p = ctx.p();
    let tol = *ctx.tol();
    let omegas = [
        ("half-plane", OmegaKind::HalfPlane, 1, false, ChartId::XJ1Real, "TT12"),
        ("trace-n1", OmegaKind::Trace, 1, false, ChartId::XJnReal(1), "42a"),
        ("trace-n2", OmegaKind::Trace, 2, false, ChartId::XJnReal(2), "42a"),
        ("trace-n2-ext", OmegaKind::Trace, 2, true, ChartId::XJnExt(2), "42a"),
    ];
    for (name, kind, n, ext, chart, anchor) in omegas {
        let om = Omega::new(kind, n, p, ext);
        ctx.sampled(format!("cosymplectic/closed/{name}"), anchor, chart, 1e-10, |x| {
            let om = om.as_ref().map_err(Clone::clone)?;
            let w = form_at(om, x)?;
            Ok(exterior_derivative(om, x)?.max_abs() / scale(w.max_abs()))
        });
    }
    let s1 = extended_structure(1, p);
    ctx.sampled("cosymplectic/top-coefficient/XJ1-ext".into(), "cond", ChartId::XJ1Ext, 1e-10, |x| {
        let r = acos_check(s1.as_ref().map_err(Clone::clone)?, x, &tol)?;
        let want = expected_top_coefficient(&p, x[1].re);
        Ok((r.top_coefficient - want).abs() / scale(want.abs()))
    });
    for n in 1..=2 {
        let s = extended_structure(n, p);
        // the rank deficit, zero exactly when θ∧Ωⁿ can be nonzero
        ctx.sampled(format!("cosymplectic/rank/XJ{n}-ext"), "thtOM", ChartId::XJnExt(n), 0.0, |x| {
            let r = acos_check(s.as_ref().map_err(Clone::clone)?, x, &tol)?;
            Ok(if r.is_acos() { 0.0 } else { (r.expected_rank as f64 - r.rank as f64).abs().max(1.0) })
        });
        let d = darboux_vectorize(n, p);
        let om = Omega::new(OmegaKind::Trace, n, p, false);
        ctx.sampled(format!("cosymplectic/darboux/n{n}"), "OIPI", ChartId::XJnReal(n), 1e-10, |x| {
            let (d, om) = (d.as_ref().map_err(Clone::clone)?, om.as_ref().map_err(Clone::clone)?);
            let (a, b) = (d.two_form(x)?, form_at(om, x)?);
            Ok(a.max_abs_diff(&b) / scale(b.max_abs()))
        });
        let theta = Theta { n, params: p };
        ctx.sampled(format!("cosymplectic/theta-coefficients/n{n}"), "AIBI", ChartId::XJnExt(n), 1e-12, |x| {
            let a = theta_from_coefficients(n, p, x)?;
            let b = form_at(&theta, x)?;
            Ok(a.max_abs_diff(&b) / scale(b.max_abs()))
        });
    }
}

fn dynamics_rows(ctx: &mut Ctx) {
    let p = ctx.p();
    let tol = *ctx.tol();
    let step = ctx.cfg.num.step;
    for fx in fixtures() {
        let rep = fx.check(p, tol, step, ctx.n()).map_err(|e| e.to_string());
        let id = format!("geodesic/{}", fx.name);
        let get = |f: fn(&sjg_core::dynamics::fixtures::FixtureReport) -> f64| rep.as_ref().map(f).map_err(Clone::clone);
        ctx.push(format!("{id}/residual"), "GEO", Kind::Identity, ctx.n() + 1, get(|r| r.residual), 1e-10);
        ctx.push(format!("{id}/deviation"), "GEO", Kind::Identity, (fx.t_max / step).round() as usize, get(|r| r.deviation), 1e-7);
        ctx.push(format!("{id}/speed-drift"), "GEO", Kind::Identity, (fx.t_max / step).round() as usize, get(|r| r.speed_drift), 1e-7);
    }

    let s0 = ChartPoint::real(ChartId::XJ1Real, &[0.2, 1.1, 0.3, -0.4])
        .and_then(|pt| State::new(pt, vec![c(0.3), c(-0.2), c(0.5), c(0.1)]));
    let gap = s0.and_then(|s| bridge_gap(p, tol, &s, 1.0, step)).map_err(|e| e.to_string());
    ctx.push("geodesic/bridge-u", "GAMELE", Kind::Identity, 1, gap, 1e-6);

    let tri = Triangle::new([(-0.5, 1.0), (0.6, 0.8), (0.1, 2.0)]);
    let h = triangle_holonomy(p, tol, &tri, 1000, &Rule::composite(32, 4)).map_err(|e| e.to_string());
    ctx.push("transport/triangle-holonomy", "DdD", Kind::Identity, 1000, h.as_ref().map(|h| (h.angle - h.curvature_integral).abs()).map_err(Clone::clone), 1e-4);
    ctx.push("transport/angle-defect", "DdD", Kind::Identity, 1, h.map(|h| (h.angle_defect - h.curvature_integral).abs()), 1e-8);

    // κ̇ expanded against its primary form, random Hamiltonians
    let id = "flow/kappa-dot-expansion".to_string();
    let pts = ctx.points(&id, ChartId::XJ1Ext, ctx.n());
    let mut r = ctx.rng(&format!("{id}/coefficients"));
    let specs: Vec<HamiltonianSpec> = (0..pts.len()).map(|_| random_spec(&mut r)).collect();
    let items: Vec<(&ChartPoint, &HamiltonianSpec)> = pts.iter().zip(&specs).collect();
    let err = worst(&items, |(pt, spec)| {
        let s: Vec<f64> = pt.coords.iter().map(|z| z.re).collect();
        let l = kappa_dot_lines(spec, &p, &s)?;
        Ok(l.derived_gap() / scale(l.primary.abs()))
    });
    ctx.push(id, "corH", Kind::Identity, items.len(), err, 1e-12);

    let spec = HamiltonianSpec::new(
        LinearHamiltonian { a: 0.3, b: -0.2, c: 0.5, m: 0.1, n: 0.4 },
        // h′ damps (q, p), so only h = 0 conserves the energy
        KappaTerm::Zero,
    );
    let s0 = [0.1, 1.2, 0.3, -0.2, 0.0];
    let t_max = 2.0;
    let drift = integrate_flow(&spec, &p, &s0, t_max, step).and_then(|tr| {
        let tr = tr.complete()?;
        let e0 = spec.energy(&p, &s0)?;
        let mut m = 0.0f64;
        for (_, s) in &tr.samples {
            m = nan_max(m, (spec.energy(&p, s)? - e0).abs());
        }
        Ok(m / t_max)
    });
    ctx.push("flow/energy-drift", "corH", Kind::Identity, (t_max / step).round() as usize, drift.map_err(|e| e.to_string()), 1e-6);
}

fn random_spec<R: rand::Rng>(r: &mut R) -> HamiltonianSpec {
    let mut u = || r.gen_range(-1.0..1.0);
    let linear = LinearHamiltonian { a: u(), b: u(), c: u(), m: u(), n: u() };
    HamiltonianSpec::new(linear, KappaTerm::Poly(vec![u(), u(), u()]))
}

fn discrepancy_rows(ctx: &mut Ctx) {
    let p = ctx.p();
    let real = |chart: ChartId, pts: &[[f64; 4]]| -> Vec<Vec<Scalar>> {
        pts.iter().filter_map(|v| ChartPoint::real(chart, v).ok()).map(|pt| pt.full()).collect()
    };
    let dj1 = real(ChartId::DJ1Real, &[[0.3, -0.2, 0.5, 0.4], [0.1, 0.4, -0.7, 0.2], [-0.5, 0.1, 0.3, -0.6]]);
    let xj1 = real(ChartId::XJ1Real, &[[0.3, 1.2, 0.5, -0.4], [-0.5, 0.7, 1.1, 0.3], [1.0, 2.0, -0.2, 0.8]]);
    let pairs = [(FormId::F2, FormId::E32bb, &dj1, "F2/E32bb"), (FormId::OmM, FormId::Om214b, &xj1, "omM/214b")];
    for (a, b, pts, anchor) in pairs {
        let (fa, fb) = (CatalogForm::new(a, p), CatalogForm::new(b, p));
        let err = worst(pts, |x| Ok(form_at(&fa, x)?.max_abs_diff(&form_at(&fb, x)?)));
        ctx.push(format!("discrepancy/{a}-vs-{b}"), anchor, Kind::Discrepancy, pts.len(), err, DIFFER);
    }
    let holo: Vec<Vec<Scalar>> = [[(0.3, 1.2), (0.5, 0.4)], [(-0.4, 0.6), (1.0, -0.3)], [(0.0, 2.0), (0.2, 0.9)]]
        .iter()
        .filter_map(|v| ChartPoint::new(ChartId::XJ1, v.iter().map(|&(a, b)| Scalar::new(a, b)).collect()).ok())
        .map(|pt| pt.full())
        .collect();
    let pot = Potential::new(PotKind::P222a, p);
    let err = worst(&holo, |x| Ok((sjg_core::berry::kernels::half_plane_kernel(p, x).ln() - pot.value(x)).norm()));
    ctx.push("discrepancy/222a-vs-log-kernel", "222a/DOIIi", Kind::Discrepancy, holo.len(), err, DIFFER);

    for id in ClosedId::printed_variants() {
        let pts: Vec<Vec<Scalar>> = ctx.points(&format!("discrepancy/{id}"), id.chart(), 3).iter().map(ChartPoint::full).collect();
        let reference = id.reference();
        let err = worst(&pts, |x| Ok(form_at(&ClosedBerry::new(id, p), x)?.max_abs_diff(&form_at(&ClosedBerry::new(reference, p), x)?)));
        ctx.push(format!("discrepancy/{id}-vs-{reference}"), "BCON", Kind::Discrepancy, pts.len(), err, DIFFER);
    }

    let spec = HamiltonianSpec::new(LinearHamiltonian { a: 0.3, b: -0.2, c: 0.5, m: 0.1, n: 0.4 }, KappaTerm::Zero);
    let probes = [[0.4, 1.3, 0.7, -0.5, 0.2], [-0.6, 0.8, 0.2, 0.9, -1.0]];
    let err = worst(&probes, |s| Ok(kappa_dot_lines(&spec, &p, s)?.printed_gap()));
    ctx.push("discrepancy/kappa-dot-printed-expansion", "corH", Kind::Discrepancy, probes.len(), err, DIFFER);
    let err = worst(&probes, |s| {
        let (a, b) = (spec.linear.gradient(&p, &s[..4])?, spec.linear.printed_gradient(&p, &s[..4])?);
        Ok(a.iter().zip(&b).map(|(u, w)| (u - w).abs()).fold(0.0, f64::max))
    });
    ctx.push("discrepancy/energy-gradient-printed", "corH", Kind::Discrepancy, probes.len(), err, DIFFER);
}

type Group = fn(&mut Ctx);

const GROUPS: [(Suite, Group); 7] = [
    (Suite::Christoffel, tables),
    (Suite::Christoffel, christoffel_fd_rows),
    (Suite::Berry, berry_rows),
    (Suite::Transforms, transform_rows),
    (Suite::Cosymplectic, cosymplectic_rows),
    (Suite::Dynamics, dynamics_rows),
    (Suite::Discrepancies, discrepancy_rows),
];

pub fn conventions(num: &NumConfig) -> Conventions {
    Conventions { two_form: num.two_form, holonomy: num.holonomy, vech: "row-wise upper triangle" }
}

/// Runs every identity of `suite` and assembles the report.
pub fn run(cfg: &RunConfig, suite: Suite) -> sjg_core::Result<VerificationReport> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for (s, group) in GROUPS {
        if suite.includes(s) {
            let mut ctx = Ctx { cfg, rows: Vec::new(), suite: s };
            group(&mut ctx);
            rows.extend(ctx.rows);
        }
    }
    Ok(VerificationReport::new(suite.name().into(), cfg.seed, cfg.samples, cfg.params, conventions(&cfg.num), cfg.num.tol, rows))
}

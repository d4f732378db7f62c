//! Verification reports, their JSON and CSV encodings, and atomic writes.

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use sjg_core::config::{HolonomyConvention, Tolerances, TwoFormConvention};
use sjg_core::ModelParams;
use std::io::{self, Write};
use std::path::Path;

pub const SCHEMA: &str = "1";

/// What an identity asserts about its measured gap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Expect {
    /// The gap is at most `tol`.
    Agree,
    /// The gap exceeds `tol`: two expressions known to differ.
    Differ,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Identity,
    /// A printed table compared after its known slips are corrected.
    Corrected,
    /// A printed entry that is wrong as printed.
    Erratum,
    /// A pair of published expressions that are stated to differ.
    Discrepancy,
}

impl Kind {
    pub fn expect(self) -> Expect {
        match self {
            Kind::Identity | Kind::Corrected => Expect::Agree,
            Kind::Erratum | Kind::Discrepancy => Expect::Differ,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityResult {
    pub identity_id: String,
    pub paper_anchor: String,
    pub suite: String,
    pub kind: Kind,
    pub expect: Expect,
    pub samples: usize,
    /// `null` when the evaluation itself failed.
    pub max_abs_err: f64,
    pub tol: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl IdentityResult {
    pub fn new(id: String, anchor: &str, suite: &str, kind: Kind, samples: usize, err: Result<f64, String>, tol: f64) -> Self {
        let (max_abs_err, error) = match err {
            Ok(e) => (e, None),
            Err(m) => (f64::NAN, Some(m)),
        };
        let pass = !max_abs_err.is_nan()
            && match kind.expect() {
                Expect::Agree => max_abs_err <= tol,
                Expect::Differ => max_abs_err > tol,
            };
        IdentityResult {
            identity_id: id,
            paper_anchor: anchor.to_string(),
            suite: suite.to_string(),
            kind,
            expect: kind.expect(),
            samples,
            max_abs_err,
            tol,
            pass,
            error,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Conventions {
    pub two_form: TwoFormConvention,
    pub holonomy: HolonomyConvention,
    /// Half-vectorisation order of symmetric matrices.
    pub vech: &'static str,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub errata: usize,
    pub discrepancies: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub schema: &'static str,
    pub suite: String,
    pub seed: u64,
    pub samples: usize,
    pub params: ModelParams,
    pub conventions: Conventions,
    pub tolerances: Tolerances,
    pub identities: Vec<IdentityResult>,
    pub summary: Summary,
    pub pass: bool,
}

impl VerificationReport {
    pub fn new(suite: String, seed: u64, samples: usize, params: ModelParams, conventions: Conventions, tolerances: Tolerances, identities: Vec<IdentityResult>) -> Self {
        let mut s = Summary { total: identities.len(), ..Summary::default() };
        for r in &identities {
            if r.pass {
                s.passed += 1;
            } else {
                s.failed += 1;
            }
            match r.kind {
                Kind::Erratum => s.errata += 1,
                Kind::Discrepancy => s.discrepancies += 1,
                _ => {}
            }
        }
        VerificationReport { schema: SCHEMA, suite, seed, samples, params, conventions, tolerances, identities, pass: s.failed == 0, summary: s }
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityResult> {
        self.identities.iter().filter(|r| !r.pass)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("identity_id,paper_anchor,suite,kind,expect,samples,max_abs_err,tol,pass\n");
        for r in &self.identities {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                csv_field(&r.identity_id),
                csv_field(&r.paper_anchor),
                r.suite,
                serde_json::to_value(r.kind).unwrap().as_str().unwrap_or(""),
                serde_json::to_value(r.expect).unwrap().as_str().unwrap_or(""),
                r.samples,
                fmt_f64(r.max_abs_err),
                fmt_f64(r.tol),
                r.pass
            ));
        }
        out
    }
}

/// Seventeen significant digits, `.` decimal, exponent form.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Pretty JSON whose floats carry seventeen significant digits.
struct SigFigs<'a>(PrettyFormatter<'a>);

impl Formatter for SigFigs<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(fmt_f64(v).as_bytes())
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, v as f64)
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigFigs(PrettyFormatter::with_indent(b"  ")));
    value.serialize(&mut ser).expect("report types serialize");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

/// Writes next to the destination and renames, so readers never see a
/// partial file.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "report path has no file name"))?;
    let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    let res = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if res.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    res
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(kind: Kind, err: Result<f64, String>) -> IdentityResult {
        IdentityResult::new("a".into(), "A", "s", kind, 3, err, 1e-3)
    }

    #[test]
    fn pass_follows_the_expectation() {
        assert!(row(Kind::Identity, Ok(1e-3)).pass);
        assert!(!row(Kind::Identity, Ok(2e-3)).pass);
        assert!(row(Kind::Discrepancy, Ok(2e-3)).pass);
        assert!(!row(Kind::Erratum, Ok(1e-3)).pass);
        let bad = row(Kind::Identity, Err("domain".into()));
        assert!(!bad.pass && bad.max_abs_err.is_nan());
        assert!(to_json(&bad).contains("\"max_abs_err\": null"));
    }

    #[test]
    fn floats_have_seventeen_digits() {
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f64(-0.1), "-1.0000000000000001e-1");
        let j = to_json(&serde_json::json!({"x": 0.5, "n": 3}));
        assert!(j.contains("\"x\": 5.0000000000000000e-1"));
        assert!(j.contains("\"n\": 3"));
        let v: serde_json::Value = serde_json::from_str(&j).unwrap();
        assert_eq!(v["x"], 0.5);
    }

    #[test]
    fn csv_quotes_commas() {
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("ab"), "ab");
    }

    #[test]
    fn atomic_write_replaces() {
        let d = tempfile::tempdir().unwrap();
        let p = d.path().join("r.json");
        write_atomic(&p, "one").unwrap();
        write_atomic(&p, "two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(d.path()).unwrap().count(), 1);
    }
}

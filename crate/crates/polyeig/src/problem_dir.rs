//! A problem on disk: one Matrix Market file per coefficient plus a
//! `meta.txt` sidecar of `key = value` lines.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use polyeig_core::{HermMatrixPolynomial, Interval, ProblemBundle, ProblemKind, Upper};

use crate::error::{Error, Result};
use crate::mm;

pub const META_FILE: &str = "meta.txt";
const GENERATOR_PREFIX: &str = "generator.";

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemMetadata {
    pub kind: ProblemKind,
    pub degree: usize,
    pub n: usize,
    pub interval: Interval,
    pub known_lambda1: Option<f64>,
    /// `(key, value)` pairs from the generator, e.g. `problem`, `n`, `seed`.
    pub generator: Vec<(String, String)>,
    /// Coefficient files, leading coefficient first.
    pub coefficient_files: Vec<String>,
    /// How the `inv-c` preconditioner is formed, e.g. `-C`.
    pub preconditioner: Option<String>,
}

fn real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn kind_name(kind: ProblemKind) -> &'static str {
    match kind {
        ProblemKind::Pencil => "pencil",
        ProblemKind::Hyperbolic => "hyperbolic",
    }
}

impl ProblemMetadata {
    pub fn from_bundle(b: &ProblemBundle) -> Self {
        let f = &b.polynomial;
        let preconditioner = match b.kind {
            ProblemKind::Hyperbolic => b.natural_preconditioner_matrix().ok().map(|m| {
                if m == f.coeffs()[2] { "C" } else { "-C" }.to_string()
            }),
            ProblemKind::Pencil => Some("-F(lower)".to_string()),
        };
        ProblemMetadata {
            kind: b.kind,
            degree: f.degree(),
            n: f.n(),
            interval: f.interval(),
            known_lambda1: b.known_lambda1,
            generator: b.metadata.clone(),
            coefficient_files: (0..=f.degree()).map(|k| format!("coeff{k}.mtx")).collect(),
            preconditioner,
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "kind = {}", kind_name(self.kind));
        let _ = writeln!(s, "degree = {}", self.degree);
        let _ = writeln!(s, "n = {}", self.n);
        let _ = writeln!(s, "lower = {}", real(self.interval.lower));
        let upper = match self.interval.upper {
            Upper::Finite(u) => real(u),
            Upper::Unbounded => "+inf".to_string(),
        };
        let _ = writeln!(s, "upper = {upper}");
        if let Some(l) = self.known_lambda1 {
            let _ = writeln!(s, "known_lambda1 = {}", real(l));
        }
        let _ = writeln!(s, "coefficients = {}", self.coefficient_files.join(","));
        if let Some(p) = &self.preconditioner {
            let _ = writeln!(s, "preconditioner = {p}");
        }
        for (k, v) in &self.generator {
            let _ = writeln!(s, "{GENERATOR_PREFIX}{k} = {v}");
        }
        s
    }

    /// Parses [`Self::to_text`] output; `origin` only labels errors.
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut pairs: Vec<(usize, &str, &str)> = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::parse(origin, k + 1, "expected `key = value`"))?;
            pairs.push((k + 1, key.trim(), value.trim()));
        }
        let last = text.lines().count().max(1);
        let get = |key: &str| -> Result<(usize, &str)> {
            pairs
                .iter()
                .find(|(_, k, _)| *k == key)
                .map(|(l, _, v)| (*l, *v))
                .ok_or_else(|| Error::parse(origin, last, format!("missing key `{key}`")))
        };
        let num = |key: &str| -> Result<f64> {
            let (l, v) = get(key)?;
            v.parse().map_err(|_| Error::parse(origin, l, format!("`{key}` is not a number")))
        };
        let int = |key: &str| -> Result<usize> {
            let (l, v) = get(key)?;
            v.parse().map_err(|_| Error::parse(origin, l, format!("`{key}` is not an integer")))
        };

        let (kl, kv) = get("kind")?;
        let kind = match kv {
            "pencil" => ProblemKind::Pencil,
            "hyperbolic" => ProblemKind::Hyperbolic,
            _ => return Err(Error::parse(origin, kl, "unknown kind")),
        };
        let upper = match get("upper")? {
            (_, "+inf" | "inf") => Upper::Unbounded,
            _ => Upper::Finite(num("upper")?),
        };
        let known_lambda1 = if get("known_lambda1").is_ok() { Some(num("known_lambda1")?) } else { None };
        let coefficient_files = get("coefficients")?.1.split(',').map(|s| s.trim().to_string()).collect();
        let generator = pairs
            .iter()
            .filter_map(|(_, k, v)| k.strip_prefix(GENERATOR_PREFIX).map(|k| (k.to_string(), v.to_string())))
            .collect();
        Ok(ProblemMetadata {
            kind,
            degree: int("degree")?,
            n: int("n")?,
            interval: Interval::new(num("lower")?, upper),
            known_lambda1,
            generator,
            coefficient_files,
            preconditioner: get("preconditioner").ok().map(|(_, v)| v.to_string()),
        })
    }
}

pub fn write_problem(bundle: &ProblemBundle, dir: &Path) -> Result<ProblemMetadata> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let meta = ProblemMetadata::from_bundle(bundle);
    for (c, name) in bundle.polynomial.coeffs().iter().zip(&meta.coefficient_files) {
        mm::write_matrix_market(c, &dir.join(name))?;
    }
    let path = dir.join(META_FILE);
    fs::write(&path, meta.to_text()).map_err(|e| Error::io(&path, e))?;
    Ok(meta)
}

pub fn read_problem(dir: &Path) -> Result<ProblemBundle> {
    let path = dir.join(META_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let meta = ProblemMetadata::parse(&text, &path)?;
    if meta.coefficient_files.len() != meta.degree + 1 {
        return Err(Error::parse(&path, 1, "coefficient count does not match the degree"));
    }
    let coeffs = meta
        .coefficient_files
        .iter()
        .map(|name| mm::read_matrix_market(&dir.join(name)))
        .collect::<Result<Vec<_>>>()?;
    if let Some(c) = coeffs.iter().find(|c| c.n() != meta.n) {
        return Err(Error::Core(polyeig_core::Error::DimensionMismatch { expected: meta.n, got: c.n() }));
    }
    if meta.kind == ProblemKind::Hyperbolic && meta.degree != 2 {
        return Err(Error::parse(&path, 1, "hyperbolic problems are quadratic"));
    }
    if meta.kind == ProblemKind::Pencil && meta.degree != 1 {
        return Err(Error::parse(&path, 1, "pencils are linear"));
    }
    let polynomial = HermMatrixPolynomial::new(coeffs, meta.interval)?;
    Ok(ProblemBundle { polynomial, kind: meta.kind, known_lambda1: meta.known_lambda1, metadata: meta.generator })
}

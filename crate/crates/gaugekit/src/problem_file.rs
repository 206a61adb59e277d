//! Text format for problem and set descriptions.
//!
//! Files are `key: expression` statements; `#` starts a comment. Example:
//!
//! ```text
//! # minimum 1-norm over an affine constraint
//! kappa: norm1
//! A: [[1, 1]]
//! b: [2]
//! rho: norm2
//! sigma: 0
//! ```
//!
//! Gauge expressions: `norm1`, `norm2`, `norminf` (dimension inferred from
//! `A` at top level, or given as `norm1(3)` / weighted as `norm1([1,2])`),
//! `atomic([[...], ...])`, `conic(c, cone)` with `c` a vector or a
//! symmetric matrix for PSD cones, `sum(g, ...)`, `compose(g, [[...]])`,
//! and `lovasz(n, [table by bitmask])`. Cones: `orthant(n)`, `psd(n)`,
//! `zero(n)`, `free(n)`, `rays([[...], ...])`.
//!
//! Set expressions: `ball(rho, b, sigma)`, `polarlevel(rho, b, sigma)`,
//! `affine(A, b)`, `conetranslate(b, cone)`, `dualcone(cone)`,
//! `halfspace(a, beta)`, `image(A, set)`, `preimage(A, set)`,
//! `union(...)`, `hull(...)`, `intersect(...)`, `scaledunion(set)`,
//! `point(b)`.
//!
//! Parse failures carry the line and column of the offending token.

use thiserror::Error;

use crate::duality::{Assumptions, DualityError, GaugeProblem};
use crate::gauge::{ConeDescr, Gauge, GaugeError, NormKind, SetFunction};
use crate::linalg::{LinalgError, LinearMap};
use crate::sets::SetDescr;

#[derive(Debug, Clone, Error)]
#[error("line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            col,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(f64),
    Punct(char),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    for (lno, raw) in text.lines().enumerate() {
        let line = lno + 1;
        let chars: Vec<char> = raw.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c == '#' {
                break;
            }
            if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                out.push(Token {
                    tok: Tok::Ident(word.to_ascii_lowercase()),
                    line,
                    col,
                });
                continue;
            }
            if c.is_ascii_digit()
                || ((c == '-' || c == '+' || c == '.')
                    && chars
                        .get(i + 1)
                        .is_some_and(|d| d.is_ascii_digit() || *d == '.'))
            {
                let start = i;
                i += 1;
                while i < chars.len()
                    && (chars[i].is_ascii_digit()
                        || chars[i] == '.'
                        || chars[i] == 'e'
                        || chars[i] == 'E'
                        || ((chars[i] == '+' || chars[i] == '-')
                            && matches!(chars[i - 1], 'e' | 'E')))
                {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                let value = word.parse::<f64>().map_err(|_| {
                    ParseError::new(line, col, format!("malformed number `{word}`"))
                })?;
                out.push(Token {
                    tok: Tok::Number(value),
                    line,
                    col,
                });
                continue;
            }
            if "[](),:".contains(c) {
                out.push(Token {
                    tok: Tok::Punct(c),
                    line,
                    col,
                });
                i += 1;
                continue;
            }
            return Err(ParseError::new(line, col, format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> (usize, usize) {
        self.tokens
            .get(self.pos)
            .or_else(|| self.tokens.last())
            .map_or((1, 1), |t| (t.line, t.col))
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError::new(line, col, message)
    }

    fn expect_punct(&mut self, c: char) -> Result<(), ParseError> {
        match self.next() {
            Some(Token {
                tok: Tok::Punct(p), ..
            }) if p == c => Ok(()),
            Some(t) => Err(ParseError::new(
                t.line,
                t.col,
                format!("expected `{c}`, found {:?}", t.tok),
            )),
            None => Err(self.err(format!("expected `{c}`, found end of file"))),
        }
    }

    fn eat_punct(&mut self, c: char) -> bool {
        if matches!(self.peek(), Some(Token { tok: Tok::Punct(p), .. }) if *p == c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        match self.next() {
            Some(Token {
                tok: Tok::Number(v),
                ..
            }) => Ok(v),
            Some(t) => Err(ParseError::new(
                t.line,
                t.col,
                format!("expected a number, found {:?}", t.tok),
            )),
            None => Err(self.err("expected a number, found end of file")),
        }
    }

    fn usize_number(&mut self) -> Result<usize, ParseError> {
        let (line, col) = self.here();
        let v = self.number()?;
        if v.fract() != 0.0 || v < 0.0 {
            return Err(ParseError::new(line, col, "expected a nonnegative integer"));
        }
        Ok(v as usize)
    }

    fn vector(&mut self) -> Result<Vec<f64>, ParseError> {
        self.expect_punct('[')?;
        let mut out = Vec::new();
        if self.eat_punct(']') {
            return Ok(out);
        }
        loop {
            out.push(self.number()?);
            if self.eat_punct(']') {
                return Ok(out);
            }
            self.expect_punct(',')?;
        }
    }

    fn matrix(&mut self) -> Result<Vec<Vec<f64>>, ParseError> {
        self.expect_punct('[')?;
        let mut rows = Vec::new();
        if self.eat_punct(']') {
            return Ok(rows);
        }
        loop {
            rows.push(self.vector()?);
            if self.eat_punct(']') {
                return Ok(rows);
            }
            self.expect_punct(',')?;
        }
    }

    fn ident(&mut self) -> Result<(String, usize, usize), ParseError> {
        match self.next() {
            Some(Token {
                tok: Tok::Ident(w),
                line,
                col,
            }) => Ok((w, line, col)),
            Some(t) => Err(ParseError::new(
                t.line,
                t.col,
                format!("expected an identifier, found {:?}", t.tok),
            )),
            None => Err(self.err("expected an identifier, found end of file")),
        }
    }

    fn cone(&mut self) -> Result<ConeDescr, ParseError> {
        let (word, line, col) = self.ident()?;
        match word.as_str() {
            "orthant" | "psd" | "zero" | "free" => {
                self.expect_punct('(')?;
                let n = self.usize_number()?;
                self.expect_punct(')')?;
                Ok(match word.as_str() {
                    "orthant" => ConeDescr::NonnegOrthant(n),
                    "psd" => ConeDescr::Psd(n),
                    "zero" => ConeDescr::Zero(n),
                    _ => ConeDescr::Free(n),
                })
            }
            "rays" => {
                self.expect_punct('(')?;
                let rays = self.matrix()?;
                self.expect_punct(')')?;
                let dim = rays.first().map_or(0, |r| r.len());
                if dim == 0 || rays.iter().any(|r| r.len() != dim) {
                    return Err(ParseError::new(line, col, "rays need consistent nonzero dimension"));
                }
                Ok(ConeDescr::Polyhedral { dim, rays })
            }
            other => Err(ParseError::new(
                line,
                col,
                format!("unknown cone `{other}` (orthant/psd/zero/free/rays)"),
            )),
        }
    }

    fn gauge(&mut self, allow_bare: bool) -> Result<ParsedGauge, ParseError> {
        let (word, line, col) = self.ident()?;
        let norm_kind = match word.as_str() {
            "norm1" => Some(NormKind::One),
            "norm2" => Some(NormKind::Two),
            "norminf" => Some(NormKind::Inf),
            _ => None,
        };
        if let Some(kind) = norm_kind {
            if self.eat_punct('(') {
                let g = if matches!(self.peek(), Some(Token { tok: Tok::Punct('['), .. })) {
                    let weights = self.vector()?;
                    Gauge::weighted_norm(kind, weights)
                        .map_err(|e| ParseError::new(line, col, e.to_string()))?
                } else {
                    let dim = self.usize_number()?;
                    Gauge::norm(kind, dim)
                };
                self.expect_punct(')')?;
                return Ok(ParsedGauge::Ready(g));
            }
            if allow_bare {
                return Ok(ParsedGauge::Bare(kind));
            }
            return Err(ParseError::new(
                line,
                col,
                "norms nested inside gauge expressions need an explicit dimension",
            ));
        }
        let g = match word.as_str() {
            "atomic" => {
                self.expect_punct('(')?;
                let atoms = self.matrix()?;
                self.expect_punct(')')?;
                Gauge::atomic(atoms).map_err(|e| ParseError::new(line, col, e.to_string()))?
            }
            "conic" => {
                self.expect_punct('(')?;
                // a matrix literal denotes the symmetric objective of a
                // PSD cone; a vector literal is the plain linear part
                let save = self.pos;
                let as_matrix = {
                    self.expect_punct('[')?;
                    let is_mat = matches!(self.peek(), Some(Token { tok: Tok::Punct('['), .. }));
                    self.pos = save;
                    is_mat
                };
                let c = if as_matrix {
                    let rows = self.matrix()?;
                    let n = rows.len();
                    if rows.iter().any(|r| r.len() != n) {
                        return Err(ParseError::new(line, col, "conic matrix must be square"));
                    }
                    rows.into_iter().flatten().collect()
                } else {
                    self.vector()?
                };
                self.expect_punct(',')?;
                let cone = self.cone()?;
                self.expect_punct(')')?;
                Gauge::conic(c, cone).map_err(|e| ParseError::new(line, col, e.to_string()))?
            }
            "sum" => {
                self.expect_punct('(')?;
                let mut parts = Vec::new();
                loop {
                    match self.gauge(false)? {
                        ParsedGauge::Ready(g) => parts.push(g),
                        ParsedGauge::Bare(_) => unreachable!("bare refused above"),
                    }
                    if self.eat_punct(')') {
                        break;
                    }
                    self.expect_punct(',')?;
                }
                Gauge::sum(parts).map_err(|e| ParseError::new(line, col, e.to_string()))?
            }
            "compose" => {
                self.expect_punct('(')?;
                let inner = match self.gauge(false)? {
                    ParsedGauge::Ready(g) => g,
                    ParsedGauge::Bare(_) => unreachable!(),
                };
                self.expect_punct(',')?;
                let rows = self.matrix()?;
                self.expect_punct(')')?;
                let map = LinearMap::from_rows(&rows)
                    .map_err(|e| ParseError::new(line, col, e.to_string()))?;
                Gauge::composed(inner, map)
                    .map_err(|e| ParseError::new(line, col, e.to_string()))?
            }
            "lovasz" => {
                self.expect_punct('(')?;
                let n = self.usize_number()?;
                self.expect_punct(',')?;
                let table = self.vector()?;
                self.expect_punct(')')?;
                let f = SetFunction::new(n, table)
                    .map_err(|e| ParseError::new(line, col, e.to_string()))?;
                Gauge::lovasz(f)
            }
            other => {
                return Err(ParseError::new(
                    line,
                    col,
                    format!("unknown gauge `{other}` (norm1/norm2/norminf/atomic/conic/sum/compose/lovasz)"),
                ))
            }
        };
        Ok(ParsedGauge::Ready(g))
    }

    fn set(&mut self) -> Result<SetDescr, ParseError> {
        let (word, line, col) = self.ident()?;
        let mk_map = |rows: Vec<Vec<f64>>, line: usize, col: usize| {
            LinearMap::from_rows(&rows).map_err(|e: LinalgError| ParseError::new(line, col, e.to_string()))
        };
        match word.as_str() {
            "ball" | "polarlevel" => {
                self.expect_punct('(')?;
                let rho = match self.gauge(false)? {
                    ParsedGauge::Ready(g) => g,
                    ParsedGauge::Bare(_) => unreachable!(),
                };
                self.expect_punct(',')?;
                let b = self.vector()?;
                self.expect_punct(',')?;
                let sigma = self.number()?;
                self.expect_punct(')')?;
                if rho.dim() != b.len() {
                    return Err(ParseError::new(
                        line,
                        col,
                        format!("gauge dimension {} does not match center length {}", rho.dim(), b.len()),
                    ));
                }
                Ok(if word == "ball" {
                    SetDescr::GaugeBallTranslate {
                        rho,
                        center: b,
                        sigma,
                    }
                } else {
                    SetDescr::PolarLevel { rho, b, sigma }
                })
            }
            "affine" => {
                self.expect_punct('(')?;
                let rows = self.matrix()?;
                self.expect_punct(',')?;
                let b = self.vector()?;
                self.expect_punct(')')?;
                let map = mk_map(rows, line, col)?;
                if map.rows() != b.len() {
                    return Err(ParseError::new(line, col, "matrix rows must match vector length"));
                }
                Ok(SetDescr::Affine { map, rhs: b })
            }
            "point" => {
                self.expect_punct('(')?;
                let b = self.vector()?;
                self.expect_punct(')')?;
                Ok(SetDescr::Affine {
                    map: LinearMap::identity(b.len()),
                    rhs: b,
                })
            }
            "conetranslate" => {
                self.expect_punct('(')?;
                let b = self.vector()?;
                self.expect_punct(',')?;
                let cone = self.cone()?;
                self.expect_punct(')')?;
                if cone.dim() != b.len() {
                    return Err(ParseError::new(line, col, "cone dimension must match base length"));
                }
                Ok(SetDescr::ConeTranslate { base: b, cone })
            }
            "dualcone" => {
                self.expect_punct('(')?;
                let cone = self.cone()?;
                self.expect_punct(')')?;
                Ok(SetDescr::DualCone { cone })
            }
            "halfspace" => {
                self.expect_punct('(')?;
                let a = self.vector()?;
                self.expect_punct(',')?;
                let beta = self.number()?;
                self.expect_punct(')')?;
                Ok(SetDescr::Halfspace {
                    normal: a,
                    offset: beta,
                })
            }
            "image" | "preimage" => {
                self.expect_punct('(')?;
                let rows = self.matrix()?;
                self.expect_punct(',')?;
                let inner = self.set()?;
                self.expect_punct(')')?;
                let map = mk_map(rows, line, col)?;
                Ok(if word == "image" {
                    SetDescr::Image {
                        map,
                        inner: Box::new(inner),
                        closure: false,
                    }
                } else {
                    SetDescr::Preimage {
                        map,
                        inner: Box::new(inner),
                    }
                })
            }
            "union" | "hull" | "intersect" => {
                self.expect_punct('(')?;
                let mut parts = Vec::new();
                loop {
                    parts.push(self.set()?);
                    if self.eat_punct(')') {
                        break;
                    }
                    self.expect_punct(',')?;
                }
                Ok(match word.as_str() {
                    "union" => SetDescr::Union { parts, hull: false },
                    "hull" => SetDescr::Union { parts, hull: true },
                    _ => SetDescr::Intersection { parts },
                })
            }
            "scaledunion" => {
                self.expect_punct('(')?;
                let inner = self.set()?;
                self.expect_punct(')')?;
                Ok(SetDescr::ScaledUnion {
                    inner: Box::new(inner),
                })
            }
            other => Err(ParseError::new(
                line,
                col,
                format!("unknown set `{other}`"),
            )),
        }
    }
}

#[derive(Debug)]
enum ParsedGauge {
    Ready(Gauge),
    Bare(NormKind),
}

/// Parsed problem file. `kappa`/`rho` may be bare norms whose dimensions
/// are resolved against `A` when the problem is assembled.
#[derive(Debug, Default)]
pub struct ProblemFile {
    kappa: Option<ParsedGauge>,
    rho: Option<ParsedGauge>,
    pub a: Option<LinearMap>,
    pub b: Option<Vec<f64>>,
    pub sigma: Option<f64>,
    pub cone: Option<ConeDescr>,
    pub obj_map: Option<LinearMap>,
    pub set: Option<SetDescr>,
    pub point: Option<Vec<f64>>,
    pub declares: Vec<String>,
    /// Optional affine post-processing `offset + scale·v_p` reported by
    /// the solve command (e.g. a cut-value from an SDP relaxation value).
    pub report_offset: Option<f64>,
    pub report_scale: Option<f64>,
}

const DECLARE_KEYS: &[&str] = &[
    "ri_constraint_overlap",
    "ri_domain_overlap",
    "ri_polar_overlap",
    "interior_cq",
];

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let tokens = tokenize(text)?;
        let mut p = Parser { tokens, pos: 0 };
        let mut out = ProblemFile::default();
        while p.peek().is_some() {
            let (key, line, col) = p.ident()?;
            p.expect_punct(':')?;
            match key.as_str() {
                "kappa" => out.kappa = Some(p.gauge(true)?),
                "rho" => out.rho = Some(p.gauge(true)?),
                "a" => {
                    let rows = p.matrix()?;
                    out.a = Some(
                        LinearMap::from_rows(&rows)
                            .map_err(|e| ParseError::new(line, col, e.to_string()))?,
                    );
                }
                "d" => {
                    let rows = p.matrix()?;
                    out.obj_map = Some(
                        LinearMap::from_rows(&rows)
                            .map_err(|e| ParseError::new(line, col, e.to_string()))?,
                    );
                }
                "b" => out.b = Some(p.vector()?),
                "point" => out.point = Some(p.vector()?),
                "sigma" => out.sigma = Some(p.number()?),
                "report_offset" => out.report_offset = Some(p.number()?),
                "report_scale" => out.report_scale = Some(p.number()?),
                "cone" => out.cone = Some(p.cone()?),
                "set" => out.set = Some(p.set()?),
                "declare" => {
                    let (word, dline, dcol) = p.ident()?;
                    if !DECLARE_KEYS.contains(&word.as_str()) {
                        return Err(ParseError::new(
                            dline,
                            dcol,
                            format!("unknown declaration `{word}` ({})", DECLARE_KEYS.join("/")),
                        ));
                    }
                    out.declares.push(word);
                }
                other => {
                    return Err(ParseError::new(
                        line,
                        col,
                        format!("unknown key `{other}` (kappa/rho/a/b/sigma/cone/d/set/point/declare/report_offset/report_scale)"),
                    ))
                }
            }
        }
        Ok(out)
    }

    pub fn assumptions(&self) -> Assumptions {
        Assumptions {
            ri_constraint_overlap: self.declares.iter().any(|d| d == "ri_constraint_overlap"),
            ri_domain_overlap: self.declares.iter().any(|d| d == "ri_domain_overlap"),
            ri_polar_overlap: self.declares.iter().any(|d| d == "ri_polar_overlap"),
        }
    }

    pub fn interior_declared(&self) -> bool {
        self.declares.iter().any(|d| d == "interior_cq")
    }

    /// Assembles the gauge program, inferring bare-norm dimensions from `A`.
    pub fn to_problem(&self) -> Result<GaugeProblem, FileError> {
        let a = self
            .a
            .clone()
            .ok_or_else(|| FileError::Missing("A".into()))?;
        let b = self
            .b
            .clone()
            .ok_or_else(|| FileError::Missing("b".into()))?;
        let sigma = self.sigma.ok_or_else(|| FileError::Missing("sigma".into()))?;
        let kappa_dim = match &self.obj_map {
            Some(d) => d.rows(),
            None => a.cols(),
        };
        let kappa = match &self.kappa {
            None => return Err(FileError::Missing("kappa".into())),
            Some(ParsedGauge::Ready(g)) => g.clone(),
            Some(ParsedGauge::Bare(kind)) => Gauge::norm(*kind, kappa_dim),
        };
        let rho = match &self.rho {
            None => return Err(FileError::Missing("rho".into())),
            Some(ParsedGauge::Ready(g)) => g.clone(),
            Some(ParsedGauge::Bare(kind)) => Gauge::norm(*kind, a.rows()),
        };
        Ok(GaugeProblem::with_extensions(
            kappa,
            a,
            b,
            rho,
            sigma,
            self.cone.clone(),
            self.obj_map.clone(),
        )?)
    }
}

#[derive(Debug, Error)]
pub enum FileError {
    #[error("missing required key `{0}`")]
    Missing(String),
    #[error(transparent)]
    Duality(#[from] DualityError),
    #[error(transparent)]
    Gauge(#[from] GaugeError),
}

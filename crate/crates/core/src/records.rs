//! JSON shapes read and written by the command-line tool.
//!
//! Numbers are accepted as JSON numbers, `"p/q"` strings, decimal strings or
//! `{"decimal", "rational"}` objects. JSON number literals are read as the
//! exact decimal they spell, so `0.1` is `1/10`. Output numbers carry both
//! the shortest round-trip decimal and the exact `p/q`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::lift::{CaseTag, LiftSolution, StructuralConstants, Transcription, EPS_CASE, EPS_RESIDUAL, EPS_ZERO};
use crate::oscillator::DEFAULT_DIM;
use crate::rational::{format_decimal, format_rational, parse, Rational};
use crate::recurrence::{Definiteness, PeriodicRecurrence};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumberInput {
    Number(serde_json::Number),
    Text(String),
    Record(NumberRecord),
}

impl NumberInput {
    pub fn to_rational(&self) -> Result<Rational> {
        match self {
            NumberInput::Number(n) => parse(&n.to_string()),
            NumberInput::Text(s) => parse(s),
            NumberInput::Record(r) => r.to_rational(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumberRecord {
    pub decimal: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rational: Option<String>,
}

impl NumberRecord {
    pub fn of(x: &Rational) -> Self {
        Self { decimal: format_decimal(x), rational: Some(format_rational(x)) }
    }

    /// The rational string wins; the decimal is a fallback for hand-written files.
    pub fn to_rational(&self) -> Result<Rational> {
        parse(self.rational.as_deref().unwrap_or(&self.decimal))
    }
}

fn opt_num(x: &Option<Rational>) -> Option<NumberRecord> {
    x.as_ref().map(NumberRecord::of)
}

fn read_opt(x: &Option<NumberRecord>) -> Result<Option<Rational>> {
    x.as_ref().map(NumberRecord::to_rational).transpose()
}

pub fn parse_definiteness(s: &str) -> Result<Definiteness> {
    match s.trim().to_ascii_lowercase().as_str() {
        "positive" => Ok(Definiteness::Positive),
        "quasi" => Ok(Definiteness::Quasi),
        other => Err(Error::Parse(format!("definiteness must be \"positive\" or \"quasi\", got {other:?}"))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyRecord {
    #[serde(default = "default_k")]
    pub k: usize,
    /// entries of `beta` before the periodic tail; 3 for lifted families
    #[serde(default = "default_head", skip_serializing_if = "is_default_head")]
    pub head: usize,
    pub beta: Vec<NumberInput>,
    pub gamma: Vec<NumberInput>,
    #[serde(default = "default_definiteness")]
    pub definiteness: String,
    /// false when the coefficients only approximate the intended values
    #[serde(default = "default_true", skip_serializing_if = "is_true")]
    pub exact: bool,
}

fn default_k() -> usize {
    2
}

fn default_head() -> usize {
    2
}

fn is_default_head(h: &usize) -> bool {
    *h == 2
}

fn default_definiteness() -> String {
    "positive".into()
}

fn default_true() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

impl FamilyRecord {
    pub fn of(p: &PeriodicRecurrence) -> Self {
        let text = |xs: &[Rational]| xs.iter().map(|x| NumberInput::Text(format_rational(x))).collect();
        Self {
            k: p.k(),
            head: p.head(),
            beta: text(p.beta_coeffs()),
            gamma: text(p.gamma_coeffs()),
            definiteness: p.definiteness().as_str().into(),
            exact: p.is_exact(),
        }
    }

    pub fn to_family(&self) -> Result<PeriodicRecurrence> {
        let read = |xs: &[NumberInput], what: &str| {
            xs.iter()
                .enumerate()
                .map(|(i, x)| x.to_rational().map_err(|e| Error::Parse(format!("{what}[{i}]: {e}"))))
                .collect::<Result<Vec<_>>>()
        };
        let beta = read(&self.beta, "beta")?;
        let gamma = read(&self.gamma, "gamma")?;
        PeriodicRecurrence::build_with_head(self.k, self.head, beta, gamma, parse_definiteness(&self.definiteness)?, self.exact)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    pub fn to_vec(&self) -> Vec<f64> {
        match self {
            OneOrMany::One(x) => vec![*x],
            OneOrMany::Many(xs) => xs.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseRequest {
    #[serde(default = "default_case")]
    pub case: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<OneOrMany>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<OneOrMany>,
    #[serde(default)]
    pub paper_literal: bool,
}

fn default_case() -> String {
    "all".into()
}

impl Default for CaseRequest {
    fn default() -> Self {
        Self { case: default_case(), lambda: None, theta: None, paper_literal: false }
    }
}

impl CaseRequest {
    /// `None` for "all".
    pub fn case_tag(&self) -> Result<Option<CaseTag>> {
        if self.case.trim().eq_ignore_ascii_case("all") {
            return Ok(None);
        }
        self.case.parse().map(Some)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "d_zero")]
    pub zero: f64,
    #[serde(default = "d_residual")]
    pub residual: f64,
    #[serde(default = "d_case")]
    pub case_routing: f64,
}

fn d_zero() -> f64 {
    EPS_ZERO
}
fn d_residual() -> f64 {
    EPS_RESIDUAL
}
fn d_case() -> f64 {
    EPS_CASE
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { zero: EPS_ZERO, residual: EPS_RESIDUAL, case_routing: EPS_CASE }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub path: Option<String>,
    #[serde(default)]
    pub format: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub family: FamilyRecord,
    #[serde(default)]
    pub request: CaseRequest,
    #[serde(default = "default_dim")]
    pub truncation_dim: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
}

fn default_dim() -> usize {
    DEFAULT_DIM
}

impl RunConfig {
    pub fn for_family(family: FamilyRecord) -> Self {
        Self { family, request: CaseRequest::default(), truncation_dim: DEFAULT_DIM, tolerances: Tolerances::default(), output: None }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ConstantsRecord {
    pub s1: Option<NumberRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s2: Option<NumberRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s3: Option<NumberRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<NumberRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_lambda: Option<NumberRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<NumberRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<NumberRecord>,
}

impl ConstantsRecord {
    pub fn of(c: &StructuralConstants) -> Self {
        Self {
            s1: Some(NumberRecord::of(&c.s1)),
            s2: opt_num(&c.s2),
            s3: opt_num(&c.s3),
            w: opt_num(&c.w),
            w_lambda: opt_num(&c.w_lambda),
            kappa: opt_num(&c.kappa),
            lambda: c.lambda,
            theta: c.theta,
            c: opt_num(&c.c),
        }
    }

    pub fn to_constants(&self) -> Result<StructuralConstants> {
        Ok(StructuralConstants {
            s1: read_opt(&self.s1)?.unwrap_or_default(),
            s2: read_opt(&self.s2)?,
            s3: read_opt(&self.s3)?,
            w: read_opt(&self.w)?,
            w_lambda: read_opt(&self.w_lambda)?,
            kappa: read_opt(&self.kappa)?,
            lambda: self.lambda,
            theta: self.theta,
            c: read_opt(&self.c)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub case: CaseTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<String>,
    #[serde(default)]
    pub transcription: Transcription,
    pub a1: NumberRecord,
    pub a2: NumberRecord,
    pub beta_tilde: [NumberRecord; 3],
    pub q_family: FamilyRecord,
    #[serde(default)]
    pub constants: ConstantsRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root: Option<NumberRecord>,
    #[serde(default = "default_true")]
    pub exact: bool,
    #[serde(default = "default_true")]
    pub admissible: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl SolutionRecord {
    pub fn of(s: &LiftSolution) -> Self {
        Self {
            case: s.case,
            branch: s.branch().ok().map(|b| b.name().to_string()),
            transcription: s.transcription,
            a1: NumberRecord::of(&s.a1),
            a2: NumberRecord::of(&s.a2),
            beta_tilde: [0, 1, 2].map(|i| NumberRecord::of(&s.beta_tilde[i])),
            q_family: FamilyRecord::of(&s.q_family),
            constants: ConstantsRecord::of(&s.constants),
            param: s.param,
            root: opt_num(&s.root),
            exact: s.exact,
            admissible: s.admissible,
            reason: s.reason.clone(),
        }
    }

    pub fn to_solution(&self) -> Result<LiftSolution> {
        let mut q = self.q_family.clone();
        q.exact = q.exact && self.exact;
        Ok(LiftSolution {
            case: self.case,
            transcription: self.transcription,
            a1: self.a1.to_rational()?,
            a2: self.a2.to_rational()?,
            beta_tilde: [
                self.beta_tilde[0].to_rational()?,
                self.beta_tilde[1].to_rational()?,
                self.beta_tilde[2].to_rational()?,
            ],
            q_family: q.to_family()?,
            constants: self.constants.to_constants()?,
            param: self.param,
            root: read_opt(&self.root)?,
            exact: self.exact,
            admissible: self.admissible,
            reason: self.reason.clone(),
        })
    }
}

/// What `solve` writes and `verify` reads back.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionsFile {
    pub family: FamilyRecord,
    #[serde(default)]
    pub request: CaseRequest,
    pub solutions: Vec<SolutionRecord>,
    /// inadmissible candidates with the reason each was dropped
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rejected: Vec<SolutionRecord>,
}

impl SolutionsFile {
    pub fn to_solutions(&self) -> Result<Vec<LiftSolution>> {
        self.solutions.iter().map(SolutionRecord::to_solution).collect()
    }
}

/// Any input the tool accepts.
#[derive(Debug, Clone, PartialEq)]
pub enum InputDocument {
    Config(RunConfig),
    Solutions(SolutionsFile),
}

impl InputDocument {
    /// A run config, a solutions file, or a bare family object.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))?;
        let schema = |what: &str, e: serde_json::Error| Error::Parse(format!("{what} does not match the schema: {e}"));
        if value.get("solutions").is_some() {
            return serde_json::from_value(value).map(Self::Solutions).map_err(|e| schema("solutions file", e));
        }
        if value.get("family").is_some() {
            return serde_json::from_value(value).map(Self::Config).map_err(|e| schema("run config", e));
        }
        let family: FamilyRecord = serde_json::from_value(value).map_err(|e| schema("family", e))?;
        Ok(Self::Config(RunConfig::for_family(family)))
    }

    pub fn family(&self) -> &FamilyRecord {
        match self {
            Self::Config(c) => &c.family,
            Self::Solutions(s) => &s.family,
        }
    }
}

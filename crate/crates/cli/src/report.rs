use mk_core::{Complex, Hp, LaurentPoly, Real, Scalar};
use serde_json::{json, Value};

pub const SCHEMA: &str = "mk-report/1";

/// Why a run did not produce a passing report.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags; reported on stderr, exit status 2.
    Usage(String),
    /// The computation raised; reported in the JSON error object, exit status 1.
    Compute(mk_core::Error),
}

impl From<mk_core::Error> for Failure {
    fn from(e: mk_core::Error) -> Self {
        Failure::Compute(e)
    }
}

pub fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

#[derive(Debug)]
pub struct Report {
    pub command: &'static str,
    pub config: Value,
    pub thresholds: Value,
    pub result: Value,
    pub pass: bool,
    pub error: Option<Value>,
}

impl Report {
    pub fn new(command: &'static str, config: Value, thresholds: Value) -> Self {
        Report { command, config, thresholds, result: Value::Null, pass: false, error: None }
    }

    pub fn fail_with(mut self, e: &mk_core::Error) -> Self {
        self.pass = false;
        self.error = Some(error_object(e));
        self
    }

    pub fn to_json(&self, defaults: &Value) -> Value {
        json!({
            "schema": SCHEMA,
            "command": self.command,
            "config": self.config,
            "thresholds": self.thresholds,
            "defaults": defaults,
            "result": self.result,
            "pass": self.pass,
            "error": self.error,
        })
    }
}

pub fn error_object(e: &mk_core::Error) -> Value {
    json!({ "kind": e.kind(), "message": e.to_string() })
}

/// Numbers in the working precision: JSON numbers for `f64`, decimal strings for `Hp`.
pub trait Precision: Real {
    const NAME: &'static str;
    fn parse_num(s: &str) -> Option<Self>;
    fn json(&self) -> Value;
}

impl Precision for f64 {
    const NAME: &'static str = "f64";

    fn parse_num(s: &str) -> Option<Self> {
        s.trim().parse().ok().filter(|x: &f64| x.is_finite())
    }

    fn json(&self) -> Value {
        json!(self)
    }
}

impl Precision for Hp {
    const NAME: &'static str = "hp";

    fn parse_num(s: &str) -> Option<Self> {
        Hp::parse(s.trim())
    }

    fn json(&self) -> Value {
        Value::String(self.to_string())
    }
}

pub fn complex_json<T: Precision>(z: &Complex<T>) -> (Value, Value) {
    (z.re.json(), z.im.json())
}

/// `{"rank": n, "terms": [{"exp", "re", "im"}]}`, graded-lex ascending.
pub fn poly_json<T: Precision>(p: &LaurentPoly<Complex<T>>) -> Value {
    let terms: Vec<Value> = p
        .terms()
        .map(|(e, c)| {
            let (re, im) = complex_json(c);
            json!({ "exp": e.entries(), "re": re, "im": im })
        })
        .collect();
    json!({ "rank": p.rank(), "terms": terms })
}

pub fn f64_of<T: Scalar>(x: &T) -> f64 {
    x.to_f64()
}

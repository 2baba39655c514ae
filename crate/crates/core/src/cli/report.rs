use serde_json::{json, Map, Value};

use crate::error::Error;
use crate::space::INF;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Error => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub rule: String,
    pub message: String,
    pub payload: Value,
}

impl Witness {
    pub fn new(rule: impl Into<String>, message: impl Into<String>, payload: Value) -> Self {
        Witness {
            rule: rule.into(),
            message: message.into(),
            payload,
        }
    }
}

/// Outcome of one subcommand. Failing without a witness is impossible:
/// [`Report::fail`] takes one.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub status: Status,
    pub witnesses: Vec<Witness>,
    pub outputs: Vec<String>,
    pub results: Map<String, Value>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report {
            command: command.into(),
            status: Status::Pass,
            witnesses: Vec::new(),
            outputs: Vec::new(),
            results: Map::new(),
        }
    }

    pub fn error(command: impl Into<String>, err: &Error) -> Self {
        let mut report = Report::new(command);
        report.status = Status::Error;
        report
            .witnesses
            .push(Witness::new("input", err.to_string(), json!({})));
        report
    }

    pub fn fail(&mut self, w: Witness) {
        self.status = Status::Fail;
        self.witnesses.push(w);
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.results.insert(key.into(), value.into());
    }

    pub fn to_json(&self) -> Value {
        let witnesses: Vec<Value> = self
            .witnesses
            .iter()
            .map(|w| json!({"rule": w.rule, "message": w.message, "payload": w.payload}))
            .collect();
        json!({
            "command": self.command,
            "status": self.status.as_str(),
            "witnesses": witnesses,
            "outputs": self.outputs,
            "results": self.results,
        })
    }

    /// Sorted keys, one line, trailing newline; `pretty` indents instead.
    pub fn render(&self, pretty: bool) -> String {
        let value = self.to_json();
        let mut text = if pretty {
            serde_json::to_string_pretty(&value)
        } else {
            serde_json::to_string(&value)
        }
        .expect("reports serialize");
        text.push('\n');
        text
    }
}

/// JSON number, with infinity written as the string `"inf"`.
pub fn num(v: f64) -> Value {
    if v == INF {
        Value::from("inf")
    } else if v == 0.0 {
        Value::from(0.0)
    } else {
        Value::from(v)
    }
}

/// Turns a rule violation into a witness; any other error is passed back
/// as an input problem.
pub fn violation(err: Error) -> Result<Witness, Error> {
    let message = err.to_string();
    let (rule, payload) = match &err {
        Error::InvalidMetric(v) => (
            "metric",
            json!({"violations": v.len(), "first": v[0].rule()}),
        ),
        Error::GapBelowOne { x, y, value } => ("D1", json!({"x": x, "y": y, "value": num(*value)})),
        Error::FiniteOverInfinite { x, y, value } => {
            ("D2", json!({"x": x, "y": y, "value": num(*value)}))
        }
        Error::PropagationExceeds {
            x,
            y,
            distance,
            radius,
        } => (
            "propagation",
            json!({"x": x, "y": y, "distance": num(*distance), "radius": num(*radius)}),
        ),
        Error::InfinitePropagation { x, y } => ("infinite-propagation", json!({"x": x, "y": y})),
        Error::NormNotConverged {
            estimate,
            iterations,
        } => (
            "norm-convergence",
            json!({"estimate": num(*estimate), "iterations": iterations}),
        ),
        Error::Hr1Violation { x, reason } => ("HR1", json!({"x": x, "reason": reason})),
        Error::NegativeValue { x, z, value } => {
            ("HR1", json!({"x": x, "z": z, "value": num(*value)}))
        }
        Error::SupportTooWide {
            x,
            z,
            distance,
            radius,
        } => (
            "HR3",
            json!({"x": x, "z": z, "distance": num(*distance), "radius": num(*radius)}),
        ),
        Error::StageFailed { index, reason } => {
            ("stage", json!({"index": index, "reason": reason}))
        }
        Error::OutsideWindow { y, m, window } => {
            ("window", json!({"y": y, "m": m, "window": window}))
        }
        Error::InvalidBlock(reason) => ("block", json!({"reason": reason})),
        Error::NoPreimage(y) => ("section", json!({"y": y})),
        _ => return Err(err),
    };
    Ok(Witness::new(rule, message, payload))
}

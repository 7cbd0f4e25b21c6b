//! Model file formats.
//!
//! A fuzzy model file is a JSON document:
//!
//! ```json
//! {
//!   "n": 2,
//!   "initial": ["0.9", "0"],
//!   "events": [
//!     { "name": "a", "matrix": [["0.9", "0.4"], ["0", "0.4"]], "obs": "0.4", "unctrl": "0.1" }
//!   ],
//!   "marked": [["1", "1"]]
//! }
//! ```
//!
//! Degrees are decimal strings (bare JSON numbers are accepted on input).
//! `marked` is optional and defaults to one all-ones vector. `obs` / `unctrl`
//! are optional per event; the plant's values are authoritative and a
//! specification that repeats them must agree.
//!
//! A crisp model file describes a classical automaton and is embedded with
//! 0/1 matrices:
//!
//! ```json
//! {
//!   "states": ["0", "1"], "initial": "0", "events": ["u"],
//!   "transitions": [{ "from": "0", "event": "u", "to": ["1"] }],
//!   "marked": ["1"], "observable": [], "controllable": ["u"]
//! }
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{Degree, EventMatrix, StateVector};
use crate::model::{Attributes, ControlProblem, EventAttr, FuzzyAutomaton, ModelError, NamedEvent};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {message}")]
    Field { path: String, message: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("event `{event}`: plant and specification disagree on `{field}`")]
    AttrConflict { event: String, field: &'static str },
}

fn field_err(path: impl Into<String>, message: impl ToString) -> FormatError {
    FormatError::Field {
        path: path.into(),
        message: message.to_string(),
    }
}

/// A decimal literal, written as a JSON string or number.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Decimal {
    Text(String),
    Number(serde_json::Number),
}

impl Decimal {
    fn parse(&self, path: &str) -> Result<Degree, FormatError> {
        let text = match self {
            Decimal::Text(s) => s.clone(),
            Decimal::Number(n) => n.to_string(),
        };
        Degree::parse(&text).map_err(|e| field_err(path, e))
    }
}

impl From<Degree> for Decimal {
    fn from(d: Degree) -> Decimal {
        Decimal::Text(d.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventEntry {
    pub name: String,
    pub matrix: Vec<Vec<Decimal>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obs: Option<Decimal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unctrl: Option<Decimal>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub n: usize,
    pub initial: Vec<Decimal>,
    pub events: Vec<EventEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marked: Option<Vec<Vec<Decimal>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrispTransition {
    pub from: String,
    pub event: String,
    pub to: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrispModelFile {
    pub states: Vec<String>,
    pub initial: String,
    pub events: Vec<String>,
    pub transitions: Vec<CrispTransition>,
    /// Marked states; all states when absent.
    #[serde(default)]
    pub marked: Option<Vec<String>>,
    /// Observable events; all events when absent.
    #[serde(default)]
    pub observable: Option<Vec<String>>,
    /// Controllable events; all events when absent.
    #[serde(default)]
    pub controllable: Option<Vec<String>>,
}

/// A parsed automaton together with whatever attributes its file declared.
#[derive(Clone, Debug)]
pub struct LoadedModel {
    pub automaton: FuzzyAutomaton,
    pub obs: Vec<Option<Degree>>,
    pub unctrl: Vec<Option<Degree>>,
}

fn one_zero(b: bool) -> Decimal {
    Decimal::Text(if b { "1" } else { "0" }.to_string())
}

impl CrispModelFile {
    pub fn to_model_file(&self) -> Result<ModelFile, FormatError> {
        let n = self.states.len();
        let index = |name: &str, path: String| {
            self.states
                .iter()
                .position(|s| s == name)
                .ok_or_else(|| field_err(path, format!("unknown state `{name}`")))
        };
        let init = index(&self.initial, "initial".into())?;
        let mut matrices = vec![vec![vec![false; n]; n]; self.events.len()];
        for (k, t) in self.transitions.iter().enumerate() {
            let e = self
                .events
                .iter()
                .position(|x| x == &t.event)
                .ok_or_else(|| {
                    field_err(
                        format!("transitions[{k}].event"),
                        format!("unknown event `{}`", t.event),
                    )
                })?;
            let from = index(&t.from, format!("transitions[{k}].from"))?;
            for (j, to) in t.to.iter().enumerate() {
                let to = index(to, format!("transitions[{k}].to[{j}]"))?;
                matrices[e][from][to] = true;
            }
        }
        let check_events = |list: &Option<Vec<String>>, key: &str| -> Result<(), FormatError> {
            for (i, name) in list.iter().flatten().enumerate() {
                if !self.events.contains(name) {
                    return Err(field_err(format!("{key}[{i}]"), format!("unknown event `{name}`")));
                }
            }
            Ok(())
        };
        check_events(&self.observable, "observable")?;
        check_events(&self.controllable, "controllable")?;
        let in_set = |list: &Option<Vec<String>>, name: &String| {
            list.as_ref().is_none_or(|l| l.contains(name))
        };
        let marked = match &self.marked {
            None => None,
            Some(list) => {
                let mut v = vec![false; n];
                for (i, s) in list.iter().enumerate() {
                    v[index(s, format!("marked[{i}]"))?] = true;
                }
                Some(vec![v.into_iter().map(one_zero).collect()])
            }
        };
        let events = self
            .events
            .iter()
            .zip(matrices)
            .map(|(name, m)| EventEntry {
                name: name.clone(),
                matrix: m
                    .into_iter()
                    .map(|row| row.into_iter().map(one_zero).collect())
                    .collect(),
                obs: Some(one_zero(in_set(&self.observable, name))),
                unctrl: Some(one_zero(!in_set(&self.controllable, name))),
            })
            .collect();
        Ok(ModelFile {
            n,
            initial: (0..n).map(|i| one_zero(i == init)).collect(),
            events,
            marked,
        })
    }
}

impl ModelFile {
    pub fn from_model(a: &FuzzyAutomaton, attrs: Option<&Attributes>) -> ModelFile {
        let vec = |v: &StateVector| v.entries().iter().map(|&d| d.into()).collect::<Vec<Decimal>>();
        ModelFile {
            n: a.dim(),
            initial: vec(a.initial()),
            events: a
                .events()
                .iter()
                .enumerate()
                .map(|(i, e)| EventEntry {
                    name: e.name.clone(),
                    matrix: e
                        .matrix
                        .rows()
                        .map(|r| r.iter().map(|&d| d.into()).collect())
                        .collect(),
                    obs: attrs.map(|at| at.attr(i).obs.into()),
                    unctrl: attrs.map(|at| at.attr(i).unctrl.into()),
                })
                .collect(),
            marked: Some(a.marked().iter().map(vec).collect()),
        }
    }

    pub fn load(&self) -> Result<LoadedModel, FormatError> {
        let n = self.n;
        let vector = |v: &[Decimal], path: &str| -> Result<StateVector, FormatError> {
            if v.len() != n {
                return Err(field_err(path, format!("expected {n} entries, found {}", v.len())));
            }
            v.iter()
                .enumerate()
                .map(|(i, x)| x.parse(&format!("{path}[{i}]")))
                .collect::<Result<Vec<_>, _>>()
                .map(StateVector::new)
        };
        let initial = vector(&self.initial, "initial")?;
        let mut events = Vec::new();
        let mut obs = Vec::new();
        let mut unctrl = Vec::new();
        for (k, e) in self.events.iter().enumerate() {
            let path = format!("events[{k}]");
            if e.matrix.len() != n {
                return Err(field_err(
                    format!("{path}.matrix"),
                    format!("expected {n} rows, found {}", e.matrix.len()),
                ));
            }
            let rows = e
                .matrix
                .iter()
                .enumerate()
                .map(|(i, r)| vector(r, &format!("{path}.matrix[{i}]")).map(|v| v.entries().to_vec()))
                .collect::<Result<Vec<_>, _>>()?;
            let matrix = EventMatrix::from_rows(rows).map_err(ModelError::from)?;
            events.push(NamedEvent {
                name: e.name.clone(),
                matrix,
            });
            obs.push(e.obs.as_ref().map(|x| x.parse(&format!("{path}.obs"))).transpose()?);
            unctrl.push(
                e.unctrl
                    .as_ref()
                    .map(|x| x.parse(&format!("{path}.unctrl")))
                    .transpose()?,
            );
        }
        let marked = match &self.marked {
            None => None,
            Some(list) => Some(
                list.iter()
                    .enumerate()
                    .map(|(i, v)| vector(v, &format!("marked[{i}]")))
                    .collect::<Result<Vec<_>, _>>()?,
            ),
        };
        let automaton = FuzzyAutomaton::new(initial, events, marked)?;
        Ok(LoadedModel {
            automaton,
            obs,
            unctrl,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model files always serialize")
    }
}

/// Parses either a fuzzy or a crisp model file (recognized by its `states` key).
pub fn parse_model_file(text: &str) -> Result<ModelFile, FormatError> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    if value.get("states").is_some() {
        let crisp: CrispModelFile = serde_json::from_value(value)?;
        crisp.to_model_file()
    } else {
        // Re-parse from text so that errors carry line and column.
        Ok(serde_json::from_str(text)?)
    }
}

pub fn load_model(text: &str) -> Result<LoadedModel, FormatError> {
    parse_model_file(text)?.load()
}

/// Combines a plant and a specification into a problem, resolving attributes.
pub fn problem_from_models(plant: LoadedModel, spec: LoadedModel) -> Result<ControlProblem, FormatError> {
    let names = plant.automaton.event_names();
    let spec_names = spec.automaton.event_names();
    let mut attrs = Vec::with_capacity(names.len());
    for (i, name) in names.iter().enumerate() {
        let j = spec_names.iter().position(|n| n == name);
        let pick = |p: Option<Degree>, s: Option<Degree>, field, default| match (p, s) {
            (Some(a), Some(b)) if a != b => Err(FormatError::AttrConflict {
                event: name.clone(),
                field,
            }),
            (Some(a), _) | (None, Some(a)) => Ok(a),
            (None, None) => Ok(default),
        };
        let obs = pick(plant.obs[i], j.and_then(|j| spec.obs[j]), "obs", Degree::ONE)?;
        let unctrl = pick(plant.unctrl[i], j.and_then(|j| spec.unctrl[j]), "unctrl", Degree::ZERO)?;
        attrs.push(EventAttr::new(obs, unctrl));
    }
    let attrs = Attributes::new(names, attrs);
    Ok(ControlProblem::new(plant.automaton, spec.automaton, attrs)?)
}

pub fn load_problem(plant: &str, spec: &str) -> Result<ControlProblem, FormatError> {
    problem_from_models(load_model(plant)?, load_model(spec)?)
}

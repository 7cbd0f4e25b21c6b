//! Fuzzy automata, event attributes and the observation-scaled (`^f`)
//! language degrees.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{Degree, EventMatrix, ShapeError, StateVector};

pub type EventId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error("initial state has {found} entries, automaton has dimension {expected}")]
    InitialLength { expected: usize, found: usize },
    #[error("event `{name}` has a {found}x{found} matrix, expected {expected}x{expected}")]
    MatrixSize {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("marked vector {index} has {found} entries, expected {expected}")]
    MarkedLength {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("duplicate event `{0}`")]
    DuplicateEvent(String),
    #[error("unknown event `{0}`")]
    UnknownEvent(String),
    #[error("event index {0} is outside the alphabet")]
    EventIndex(EventId),
    #[error("plant has dimension {plant}, specification has dimension {spec}")]
    DimensionMismatch { plant: usize, spec: usize },
    #[error("alphabet mismatch: plant events {plant:?}, specification events {spec:?}")]
    AlphabetMismatch { plant: Vec<String>, spec: Vec<String> },
    #[error("event `{0}` is unobservable and cannot occur in a projected string")]
    UnobservableInProjection(String),
}

/// A string over the event alphabet, stored as event indices.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EventString(Vec<EventId>);

impl EventString {
    pub fn empty() -> EventString {
        EventString(Vec::new())
    }

    pub fn new(events: Vec<EventId>) -> EventString {
        EventString(events)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn events(&self) -> &[EventId] {
        &self.0
    }

    pub fn push(&mut self, e: EventId) {
        self.0.push(e);
    }

    pub fn extended(&self, e: EventId) -> EventString {
        let mut s = self.clone();
        s.push(e);
        s
    }

    pub fn prefixes(&self) -> impl Iterator<Item = EventString> + '_ {
        (0..=self.0.len()).map(|k| EventString(self.0[..k].to_vec()))
    }

    /// Human-readable form: `ε`, `ca` when every name is one character,
    /// otherwise names joined by `·`.
    pub fn render(&self, names: &[String]) -> String {
        if self.0.is_empty() {
            return "ε".to_string();
        }
        let short = self.0.iter().all(|&e| names[e].chars().count() == 1);
        let sep = if short { "" } else { "·" };
        self.0
            .iter()
            .map(|&e| names[e].as_str())
            .collect::<Vec<_>>()
            .join(sep)
    }

    /// Length-lexicographic order by event index.
    pub fn shortlex_cmp(&self, other: &EventString) -> std::cmp::Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }

    /// Every string over `events` symbols of length at most `max_len`, in
    /// length-lexicographic order.
    pub fn all_up_to(events: usize, max_len: usize) -> impl Iterator<Item = EventString> {
        let mut layer = vec![EventString::empty()];
        let mut len = 0;
        std::iter::from_fn(move || {
            if layer.is_empty() {
                return None;
            }
            let out = std::mem::take(&mut layer);
            if len < max_len && events > 0 {
                layer = out
                    .iter()
                    .flat_map(|s| (0..events).map(move |e| s.extended(e)))
                    .collect();
            }
            len += 1;
            Some(out)
        })
        .flatten()
    }
}

impl fmt::Debug for EventString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Observability and uncontrollability grades of one event. The controllable
/// and unobservable grades are their complements.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EventAttr {
    pub obs: Degree,
    pub unctrl: Degree,
}

impl EventAttr {
    pub fn new(obs: Degree, unctrl: Degree) -> EventAttr {
        EventAttr { obs, unctrl }
    }

    pub fn ctrl(&self) -> Degree {
        self.unctrl.complement()
    }

    pub fn unobs(&self) -> Degree {
        self.obs.complement()
    }

    /// Kept by the projection iff the observability grade is positive.
    pub fn observable(&self) -> bool {
        !self.obs.is_zero()
    }
}

impl Default for EventAttr {
    fn default() -> EventAttr {
        EventAttr::new(Degree::ONE, Degree::ZERO)
    }
}

/// Event names with their attributes, in declaration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attributes {
    names: Vec<String>,
    attrs: Vec<EventAttr>,
}

impl Attributes {
    pub fn new(names: Vec<String>, attrs: Vec<EventAttr>) -> Attributes {
        assert_eq!(names.len(), attrs.len());
        Attributes { names, attrs }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn attr(&self, e: EventId) -> &EventAttr {
        &self.attrs[e]
    }

    pub fn attrs(&self) -> &[EventAttr] {
        &self.attrs
    }

    pub fn set(&mut self, e: EventId, attr: EventAttr) {
        self.attrs[e] = attr;
    }

    pub fn id_of(&self, name: &str) -> Option<EventId> {
        self.names.iter().position(|n| n == name)
    }

    pub fn observable(&self, e: EventId) -> bool {
        self.attrs[e].observable()
    }

    pub fn all_observable(&self) -> bool {
        self.attrs.iter().all(EventAttr::observable)
    }

    /// Parses a comma-separated list of event names; the empty string is ε.
    pub fn parse_string(&self, text: &str) -> Result<EventString, ModelError> {
        let text = text.trim();
        if text.is_empty() || text == "ε" {
            return Ok(EventString::empty());
        }
        text.split(',')
            .map(|name| {
                let name = name.trim();
                self.id_of(name)
                    .ok_or_else(|| ModelError::UnknownEvent(name.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(EventString)
    }

    pub fn render(&self, s: &EventString) -> String {
        s.render(&self.names)
    }
}

/// The factor of observable projection carried along a string: `Empty`
/// while the projection is still ε (value 0), otherwise the running minimum
/// of observability grades.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ObsFactor {
    Empty,
    Factor(Degree),
}

impl ObsFactor {
    pub fn value(self) -> Degree {
        match self {
            ObsFactor::Empty => Degree::ZERO,
            ObsFactor::Factor(d) => d,
        }
    }

    pub fn is_empty(self) -> bool {
        matches!(self, ObsFactor::Empty)
    }

    pub fn step(self, attr: &EventAttr) -> ObsFactor {
        if !attr.observable() {
            return self;
        }
        match self {
            ObsFactor::Empty => ObsFactor::Factor(attr.obs),
            ObsFactor::Factor(d) => ObsFactor::Factor(d.min(attr.obs)),
        }
    }

    pub fn along(attrs: &Attributes, s: &EventString) -> ObsFactor {
        s.events()
            .iter()
            .fold(ObsFactor::Empty, |f, &e| f.step(attrs.attr(e)))
    }

    /// `value × x`, the scaling used by every `^f` quantity.
    pub fn scale(self, x: Degree) -> Degree {
        self.value().product(x)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedEvent {
    pub name: String,
    pub matrix: EventMatrix,
}

/// A max-min fuzzy automaton (plant or specification).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuzzyAutomaton {
    initial: StateVector,
    events: Vec<NamedEvent>,
    marked: Vec<StateVector>,
}

impl FuzzyAutomaton {
    /// `marked: None` defaults to the single all-ones vector.
    pub fn new(
        initial: StateVector,
        events: Vec<NamedEvent>,
        marked: Option<Vec<StateVector>>,
    ) -> Result<FuzzyAutomaton, ModelError> {
        let n = initial.dim();
        for (i, ev) in events.iter().enumerate() {
            if ev.matrix.dim() != n {
                return Err(ModelError::MatrixSize {
                    name: ev.name.clone(),
                    expected: n,
                    found: ev.matrix.dim(),
                });
            }
            if events[..i].iter().any(|o| o.name == ev.name) {
                return Err(ModelError::DuplicateEvent(ev.name.clone()));
            }
        }
        let marked = marked.unwrap_or_else(|| vec![StateVector::ones(n)]);
        for (index, m) in marked.iter().enumerate() {
            if m.dim() != n {
                return Err(ModelError::MarkedLength {
                    index,
                    expected: n,
                    found: m.dim(),
                });
            }
        }
        Ok(FuzzyAutomaton {
            initial,
            events,
            marked,
        })
    }

    pub fn dim(&self) -> usize {
        self.initial.dim()
    }

    pub fn initial(&self) -> &StateVector {
        &self.initial
    }

    pub fn events(&self) -> &[NamedEvent] {
        &self.events
    }

    pub fn event_names(&self) -> Vec<String> {
        self.events.iter().map(|e| e.name.clone()).collect()
    }

    pub fn matrix(&self, e: EventId) -> &EventMatrix {
        &self.events[e].matrix
    }

    pub fn marked(&self) -> &[StateVector] {
        &self.marked
    }

    pub(crate) fn step(&self, v: &StateVector, e: EventId) -> StateVector {
        v.step(&self.events[e].matrix)
    }

    /// `initial ⊙ σ₁ ⊙ … ⊙ σₖ`.
    pub fn run(&self, s: &EventString) -> Result<StateVector, ModelError> {
        let mut v = self.initial.clone();
        for &e in s.events() {
            if e >= self.events.len() {
                return Err(ModelError::EventIndex(e));
            }
            v = self.step(&v, e);
        }
        Ok(v)
    }

    /// Marked degree of a fuzzy state: max over marked vectors `m` of `v ⊙ mᵀ`.
    pub fn marked_at(&self, v: &StateVector) -> Degree {
        self.marked
            .iter()
            .map(|m| v.meet_height(m))
            .max()
            .unwrap_or(Degree::ZERO)
    }

    /// Same automaton with its events listed in `order` (by name).
    pub(crate) fn reordered(&self, order: &[String]) -> Option<FuzzyAutomaton> {
        let events = order
            .iter()
            .map(|n| self.events.iter().find(|e| &e.name == n).cloned())
            .collect::<Option<Vec<_>>>()?;
        Some(FuzzyAutomaton {
            initial: self.initial.clone(),
            events,
            marked: self.marked.clone(),
        })
    }
}

/// A plant, a specification automaton generating `pr(K)` (its marking
/// defines `K`) and the shared event attributes. The plant's declaration
/// order is canonical.
#[derive(Clone, Debug)]
pub struct ControlProblem {
    pub plant: FuzzyAutomaton,
    pub spec: FuzzyAutomaton,
    pub attrs: Attributes,
}

impl ControlProblem {
    pub fn new(
        plant: FuzzyAutomaton,
        spec: FuzzyAutomaton,
        attrs: Attributes,
    ) -> Result<ControlProblem, ModelError> {
        if plant.dim() != spec.dim() {
            return Err(ModelError::DimensionMismatch {
                plant: plant.dim(),
                spec: spec.dim(),
            });
        }
        let names = plant.event_names();
        let mismatch = || ModelError::AlphabetMismatch {
            plant: plant.event_names(),
            spec: spec.event_names(),
        };
        if spec.events.len() != names.len() {
            return Err(mismatch());
        }
        let spec = spec.reordered(&names).ok_or_else(mismatch)?;
        if attrs.names() != names.as_slice() {
            return Err(ModelError::AlphabetMismatch {
                plant: names,
                spec: attrs.names().to_vec(),
            });
        }
        Ok(ControlProblem { plant, spec, attrs })
    }

    pub fn names(&self) -> &[String] {
        self.attrs.names()
    }

    pub fn event_count(&self) -> usize {
        self.attrs.len()
    }
}

pub fn generated_degree(a: &FuzzyAutomaton, s: &EventString) -> Result<Degree, ModelError> {
    Ok(a.run(s)?.height())
}

pub fn marked_degree(a: &FuzzyAutomaton, s: &EventString) -> Result<Degree, ModelError> {
    Ok(a.marked_at(&a.run(s)?))
}

/// Erases the events whose observability grade is zero.
pub fn project(attrs: &Attributes, s: &EventString) -> EventString {
    EventString(
        s.events()
            .iter()
            .copied()
            .filter(|&e| attrs.observable(e))
            .collect(),
    )
}

/// Factor of observable projection of an already projected string.
pub fn obs_factor(attrs: &Attributes, w: &EventString) -> Result<Degree, ModelError> {
    let mut d: Option<Degree> = None;
    for &e in w.events() {
        let a = attrs.attr(e);
        if !a.observable() {
            return Err(ModelError::UnobservableInProjection(
                attrs.names()[e].clone(),
            ));
        }
        d = Some(d.map_or(a.obs, |x| x.min(a.obs)));
    }
    Ok(d.unwrap_or(Degree::ZERO))
}

/// Incremental factor update along one event: `(d, is_empty)` for `P(s)`
/// becomes the pair for `P(sσ)`.
pub fn d_step(attrs: &Attributes, d: Degree, is_empty: bool, sigma: EventId) -> (Degree, bool) {
    let before = if is_empty {
        ObsFactor::Empty
    } else {
        ObsFactor::Factor(d)
    };
    let after = before.step(attrs.attr(sigma));
    (after.value(), after.is_empty())
}

pub fn eff_generated(
    g: &FuzzyAutomaton,
    attrs: &Attributes,
    s: &EventString,
) -> Result<Degree, ModelError> {
    if s.is_empty() {
        return Ok(Degree::ONE);
    }
    let l = generated_degree(g, s)?;
    Ok(ObsFactor::along(attrs, s).scale(l))
}

/// `pr(K)^f`, with `pr(K)` the language generated by the specification.
pub fn eff_prefix(
    h: &FuzzyAutomaton,
    attrs: &Attributes,
    s: &EventString,
) -> Result<Degree, ModelError> {
    eff_generated(h, attrs, s)
}

pub fn eff_unctrl(attrs: &Attributes, s: &EventString, sigma: EventId) -> Degree {
    let f = ObsFactor::along(attrs, s).step(attrs.attr(sigma));
    f.scale(attrs.attr(sigma).unctrl)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn d(s: &str) -> Degree {
        s.parse().unwrap()
    }

    fn word(p: &ControlProblem, s: &str) -> EventString {
        p.attrs.parse_string(s).unwrap()
    }

    #[test]
    fn generated_degrees() {
        let ex1 = corpus::example1();
        assert_eq!(generated_degree(&ex1.plant, &word(&ex1, "b,c")).unwrap(), d("0.8"));
        let ex3 = corpus::example3();
        assert_eq!(generated_degree(&ex3.plant, &word(&ex3, "u,b")).unwrap(), Degree::ONE);
        assert_eq!(
            generated_degree(&ex1.plant, &EventString::empty()).unwrap(),
            ex1.plant.initial().height()
        );
        assert!(generated_degree(&ex1.plant, &EventString::new(vec![7])).is_err());
    }

    #[test]
    fn marked_degrees() {
        let ex1 = corpus::example1();
        for s in ["", "a", "b,c", "c,c,a"] {
            let s = word(&ex1, s);
            assert_eq!(
                marked_degree(&ex1.plant, &s).unwrap(),
                generated_degree(&ex1.plant, &s).unwrap()
            );
        }
        let only_second = FuzzyAutomaton::new(
            ex1.plant.initial().clone(),
            ex1.plant.events().to_vec(),
            Some(vec![StateVector::new(vec![Degree::ZERO, Degree::ONE])]),
        )
        .unwrap();
        assert_eq!(only_second.run(&word(&ex1, "b")).unwrap().to_string(), "[0.2,0.8]");
        assert_eq!(marked_degree(&only_second, &word(&ex1, "b")).unwrap(), d("0.8"));
        let unmarked = FuzzyAutomaton::new(
            ex1.plant.initial().clone(),
            ex1.plant.events().to_vec(),
            Some(vec![]),
        )
        .unwrap();
        assert_eq!(marked_degree(&unmarked, &word(&ex1, "a,b")).unwrap(), Degree::ZERO);
    }

    #[test]
    fn projection_and_factor() {
        let ex2 = corpus::example2();
        assert_eq!(project(&ex2.attrs, &word(&ex2, "b,d")), word(&ex2, "b"));
        let ex4 = corpus::example4();
        assert_eq!(project(&ex4.attrs, &word(&ex4, "c,a")), word(&ex4, "a"));
        assert_eq!(project(&ex4.attrs, &EventString::empty()), EventString::empty());

        let ex1 = corpus::example1();
        assert_eq!(obs_factor(&ex1.attrs, &word(&ex1, "b,c")).unwrap(), d("0.5"));
        assert_eq!(obs_factor(&ex1.attrs, &EventString::empty()).unwrap(), Degree::ZERO);
        assert_eq!(obs_factor(&ex4.attrs, &word(&ex4, "a")).unwrap(), d("0.4"));
        assert!(obs_factor(&ex4.attrs, &word(&ex4, "c")).is_err());
    }

    #[test]
    fn factor_steps() {
        let ex4 = corpus::example4();
        let c = ex4.attrs.id_of("c").unwrap();
        let a = ex4.attrs.id_of("a").unwrap();
        assert_eq!(d_step(&ex4.attrs, Degree::ZERO, true, c), (Degree::ZERO, true));
        assert_eq!(d_step(&ex4.attrs, Degree::ZERO, true, a), (d("0.4"), false));
        let ex1 = corpus::example1();
        let c1 = ex1.attrs.id_of("c").unwrap();
        assert_eq!(d_step(&ex1.attrs, d("0.7"), false, c1), (d("0.5"), false));
    }

    #[test]
    fn effective_quantities() {
        let ex1 = corpus::example1();
        assert_eq!(eff_prefix(&ex1.spec, &ex1.attrs, &word(&ex1, "b")).unwrap(), d("0.35"));
        let ex4 = corpus::example4();
        assert_eq!(eff_prefix(&ex4.spec, &ex4.attrs, &word(&ex4, "c")).unwrap(), Degree::ZERO);
        assert_eq!(
            eff_generated(&ex4.plant, &ex4.attrs, &EventString::empty()).unwrap(),
            Degree::ONE
        );
        let c = ex1.attrs.id_of("c").unwrap();
        assert_eq!(eff_unctrl(&ex1.attrs, &word(&ex1, "b"), c), d("0.4"));
    }

    #[test]
    fn complements_are_derived() {
        let a = EventAttr::new(d("0.4"), d("0.1"));
        assert_eq!(a.ctrl(), d("0.9"));
        assert_eq!(a.unobs(), d("0.6"));
    }

    #[test]
    fn spec_events_follow_plant_order() {
        let ex4 = corpus::example4();
        let mut events = ex4.spec.events().to_vec();
        events.reverse();
        let spec = FuzzyAutomaton::new(ex4.spec.initial().clone(), events, None).unwrap();
        let p = ControlProblem::new(ex4.plant.clone(), spec, ex4.attrs.clone()).unwrap();
        assert_eq!(p.spec, ex4.spec);

        let mut fewer = ex4.spec.events().to_vec();
        fewer.pop();
        let spec = FuzzyAutomaton::new(ex4.spec.initial().clone(), fewer, None).unwrap();
        assert!(matches!(
            ControlProblem::new(ex4.plant.clone(), spec, ex4.attrs.clone()),
            Err(ModelError::AlphabetMismatch { .. })
        ));
    }

    #[test]
    fn duplicate_names_rejected() {
        let m = EventMatrix::identity(1);
        let ev = NamedEvent {
            name: "x".into(),
            matrix: m,
        };
        let r = FuzzyAutomaton::new(StateVector::ones(1), vec![ev.clone(), ev], None);
        assert_eq!(r.unwrap_err(), ModelError::DuplicateEvent("x".into()));
    }

    #[test]
    fn enumeration_is_shortlex() {
        let all: Vec<EventString> = EventString::all_up_to(2, 2).collect();
        assert_eq!(all.len(), 7);
        assert!(all.windows(2).all(|w| w[0].shortlex_cmp(&w[1]).is_lt()));
        assert_eq!(EventString::all_up_to(0, 3).count(), 1);
    }
}

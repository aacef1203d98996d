//! Social-network data model: persons, typed relations and the dataset
//! document they are read from.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Map, Value};
use thiserror::Error;

/// Relation kind. The three built-ins have fixed directedness; anything else
/// is a user kind whose directedness comes from a [`KindRegistry`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelationKind {
    ParentOf,
    SpouseOf,
    GodparentOf,
    Custom(String),
}

impl RelationKind {
    pub fn parse(name: &str) -> Self {
        match name {
            "parent_of" => Self::ParentOf,
            "spouse_of" => Self::SpouseOf,
            "godparent_of" => Self::GodparentOf,
            other => Self::Custom(other.to_string()),
        }
    }

    pub fn as_str(&self) -> &str {
        match self {
            Self::ParentOf => "parent_of",
            Self::SpouseOf => "spouse_of",
            Self::GodparentOf => "godparent_of",
            Self::Custom(name) => name,
        }
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for RelationKind {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for RelationKind {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d).map(|s| Self::parse(&s))
    }
}

/// Directedness of relation kinds. Built-ins cannot be overridden; unknown
/// kinds are directed unless registered otherwise.
#[derive(Clone, Debug, Default)]
pub struct KindRegistry {
    undirected: HashSet<String>,
}

impl KindRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a user kind. Returns false (and changes nothing) for built-ins.
    pub fn register(&mut self, name: &str, directed: bool) -> bool {
        if !matches!(RelationKind::parse(name), RelationKind::Custom(_)) {
            return false;
        }
        if directed {
            self.undirected.remove(name);
        } else {
            self.undirected.insert(name.to_string());
        }
        true
    }

    pub fn is_directed(&self, kind: &RelationKind) -> bool {
        match kind {
            RelationKind::ParentOf | RelationKind::GodparentOf => true,
            RelationKind::SpouseOf => false,
            RelationKind::Custom(name) => !self.undirected.contains(name),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Person {
    pub id: String,
    pub label: String,
    pub birth_year: Option<i32>,
    pub death_year: Option<i32>,
    pub attributes: BTreeMap<String, String>,
}

impl Person {
    pub fn new(id: impl Into<String>, label: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            label: label.into(),
            birth_year: None,
            death_year: None,
            attributes: BTreeMap::new(),
        }
    }

    pub fn years(mut self, birth: Option<i32>, death: Option<i32>) -> Self {
        self.birth_year = birth;
        self.death_year = death;
        self
    }

    pub fn attribute(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.attributes.insert(key.into(), value.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub source: String,
    pub target: String,
    pub kind: RelationKind,
    pub directed: bool,
}

impl Relation {
    /// Key under which duplicates are detected; undirected pairs are ordered.
    fn triple_key(&self) -> (String, String, String) {
        let (a, b) = if !self.directed && self.target < self.source {
            (&self.target, &self.source)
        } else {
            (&self.source, &self.target)
        };
        (a.clone(), b.clone(), self.kind.as_str().to_string())
    }

    fn describe(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -{}-> {}", self.source, self.kind, self.target)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationCode {
    EmptyId,
    DuplicateId,
    TemporalOrder,
    SelfLoop,
    UnknownEndpoint,
    DuplicateRelation,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::EmptyId => "EMPTY_ID",
            Self::DuplicateId => "DUPLICATE_ID",
            Self::TemporalOrder => "TEMPORAL_ORDER",
            Self::SelfLoop => "SELF_LOOP",
            Self::UnknownEndpoint => "UNKNOWN_ENDPOINT",
            Self::DuplicateRelation => "DUPLICATE_RELATION",
        }
    }
}

/// One broken dataset invariant. `entity` is a person id or a relation triple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub entity: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]: {}", self.code.as_str(), self.entity, self.message)
    }
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("{} validation error(s): {}", .0.len(), join_violations(.0))]
    Validation(Vec<Violation>),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
}

/// Persons plus typed relations. Person order is the canonical node order
/// every algorithm iterates in.
#[derive(Clone, Debug)]
pub struct GraphDataset {
    meta: BTreeMap<String, String>,
    persons: Vec<Person>,
    relations: Vec<Relation>,
    index: HashMap<String, usize>,
    edges: Vec<Option<(usize, usize)>>,
}

impl PartialEq for GraphDataset {
    fn eq(&self, other: &Self) -> bool {
        self.meta == other.meta && self.persons == other.persons && self.relations == other.relations
    }
}

impl GraphDataset {
    /// Builds a dataset and checks every invariant.
    pub fn new(
        meta: BTreeMap<String, String>,
        persons: Vec<Person>,
        relations: Vec<Relation>,
    ) -> Result<Self, DatasetError> {
        let ds = Self::new_unchecked(meta, persons, relations);
        let violations = validate(&ds);
        if violations.is_empty() {
            Ok(ds)
        } else {
            Err(DatasetError::Validation(violations))
        }
    }

    /// Builds a dataset without validation; see [`validate`].
    pub fn new_unchecked(
        meta: BTreeMap<String, String>,
        persons: Vec<Person>,
        relations: Vec<Relation>,
    ) -> Self {
        let mut index = HashMap::with_capacity(persons.len());
        for (i, p) in persons.iter().enumerate() {
            index.entry(p.id.clone()).or_insert(i);
        }
        let edges = relations
            .iter()
            .map(|r| Some((*index.get(&r.source)?, *index.get(&r.target)?)))
            .collect();
        Self {
            meta,
            persons,
            relations,
            index,
            edges,
        }
    }

    pub fn empty() -> Self {
        Self::new_unchecked(BTreeMap::new(), Vec::new(), Vec::new())
    }

    pub fn meta(&self) -> &BTreeMap<String, String> {
        &self.meta
    }

    pub fn persons(&self) -> &[Person] {
        &self.persons
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn len(&self) -> usize {
        self.persons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.persons.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn person(&self, id: &str) -> Option<&Person> {
        self.index_of(id).map(|i| &self.persons[i])
    }

    /// `(relation index, source index, target index)` for every relation whose
    /// endpoints resolve, in relation order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter_map(|(k, e)| e.map(|(s, t)| (k, s, t)))
    }

    /// Undirected incidence lists over all relation kinds: `(neighbor, relation index)`.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.persons.len()];
        for (k, s, t) in self.edges() {
            adj[s].push((t, k));
            adj[t].push((s, k));
        }
        adj
    }

    /// Number of incident relations per person (each relation counts once
    /// per endpoint).
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.persons.len()];
        for (_, s, t) in self.edges() {
            deg[s] += 1;
            deg[t] += 1;
        }
        deg
    }

    /// Canonical document as a JSON value.
    pub fn to_json_value(&self) -> Value {
        let mut root = Map::new();
        root.insert(
            "meta".into(),
            Value::Object(
                self.meta
                    .iter()
                    .map(|(k, v)| (k.clone(), Value::String(v.clone())))
                    .collect(),
            ),
        );
        let persons = self
            .persons
            .iter()
            .map(|p| {
                let mut o = Map::new();
                o.insert("id".into(), p.id.clone().into());
                o.insert("label".into(), p.label.clone().into());
                if let Some(b) = p.birth_year {
                    o.insert("birth_year".into(), b.into());
                }
                if let Some(d) = p.death_year {
                    o.insert("death_year".into(), d.into());
                }
                if !p.attributes.is_empty() {
                    o.insert(
                        "attributes".into(),
                        Value::Object(
                            p.attributes
                                .iter()
                                .map(|(k, v)| (k.clone(), Value::String(v.clone())))
                                .collect(),
                        ),
                    );
                }
                Value::Object(o)
            })
            .collect();
        root.insert("persons".into(), Value::Array(persons));
        let relations = self
            .relations
            .iter()
            .map(|r| {
                let mut o = Map::new();
                o.insert("source".into(), r.source.clone().into());
                o.insert("target".into(), r.target.clone().into());
                o.insert("kind".into(), r.kind.as_str().into());
                Value::Object(o)
            })
            .collect();
        root.insert("relations".into(), Value::Array(relations));
        Value::Object(root)
    }

    /// Canonical document text (two-space indented JSON, trailing newline).
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json_value())
            .expect("dataset values always serialize");
        s.push('\n');
        s
    }

    /// Sub-dataset of the persons for which `keep` holds and the relations
    /// between them, in canonical order.
    pub fn retain(&self, mut keep: impl FnMut(&Person) -> bool) -> GraphDataset {
        let persons: Vec<Person> = self.persons.iter().filter(|p| keep(p)).cloned().collect();
        let kept: HashSet<&str> = persons.iter().map(|p| p.id.as_str()).collect();
        let relations = self
            .relations
            .iter()
            .filter(|r| kept.contains(r.source.as_str()) && kept.contains(r.target.as_str()))
            .cloned()
            .collect();
        GraphDataset::new_unchecked(self.meta.clone(), persons, relations)
    }
}

/// Every broken invariant, in canonical order. Empty iff the dataset is valid.
pub fn validate(dataset: &GraphDataset) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for p in &dataset.persons {
        if p.id.is_empty() {
            out.push(Violation {
                code: ViolationCode::EmptyId,
                entity: String::new(),
                message: format!("person labelled {:?} has an empty id", p.label),
            });
        } else if !seen.insert(p.id.as_str()) {
            out.push(Violation {
                code: ViolationCode::DuplicateId,
                entity: p.id.clone(),
                message: "id appears more than once".into(),
            });
        }
        if let (Some(b), Some(d)) = (p.birth_year, p.death_year) {
            if b > d {
                out.push(Violation {
                    code: ViolationCode::TemporalOrder,
                    entity: p.id.clone(),
                    message: format!("birth year {b} is after death year {d}"),
                });
            }
        }
    }
    let mut triples = HashSet::new();
    for r in &dataset.relations {
        if r.source == r.target {
            out.push(Violation {
                code: ViolationCode::SelfLoop,
                entity: r.describe(),
                message: "relation connects a person to themselves".into(),
            });
        }
        for end in [&r.source, &r.target] {
            if !dataset.index.contains_key(end.as_str()) {
                out.push(Violation {
                    code: ViolationCode::UnknownEndpoint,
                    entity: end.clone(),
                    message: format!("relation {} references unknown person {end:?}", r.describe()),
                });
            }
        }
        if !triples.insert(r.triple_key()) {
            out.push(Violation {
                code: ViolationCode::DuplicateRelation,
                entity: r.describe(),
                message: "relation is listed more than once".into(),
            });
        }
    }
    out
}

pub fn parse_dataset(text: &str, format: Format) -> Result<GraphDataset, DatasetError> {
    parse_dataset_with(text, format, &KindRegistry::default())
}

pub fn parse_dataset_with(
    text: &str,
    format: Format,
    registry: &KindRegistry,
) -> Result<GraphDataset, DatasetError> {
    match format {
        Format::Json => {
            let root: Value = serde_json::from_str(text).map_err(|e| DatasetError::Syntax {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })?;
            from_json_value(&root, registry)
        }
    }
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> DatasetError {
    DatasetError::Schema {
        path: path.into(),
        message: message.into(),
    }
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, DatasetError> {
    v.as_object().ok_or_else(|| schema(path, "expected an object"))
}

fn check_keys(o: &Map<String, Value>, path: &str, allowed: &[&str]) -> Result<(), DatasetError> {
    match o.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(schema(format!("{path}.{k}"), "unknown field")),
        None => Ok(()),
    }
}

fn required_str(o: &Map<String, Value>, key: &str, path: &str) -> Result<String, DatasetError> {
    match o.get(key) {
        Some(Value::String(s)) => Ok(s.clone()),
        Some(_) => Err(schema(format!("{path}.{key}"), "expected a string")),
        None => Err(schema(format!("{path}.{key}"), "missing field")),
    }
}

fn string_map(v: &Value, path: &str) -> Result<BTreeMap<String, String>, DatasetError> {
    object(v, path)?
        .iter()
        .map(|(k, v)| match v {
            Value::String(s) => Ok((k.clone(), s.clone())),
            _ => Err(schema(format!("{path}.{k}"), "expected a string")),
        })
        .collect()
}

fn year(o: &Map<String, Value>, key: &str, path: &str) -> Result<Option<i32>, DatasetError> {
    match o.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::Number(n)) => n
            .as_i64()
            .and_then(|y| i32::try_from(y).ok())
            .map(Some)
            .ok_or_else(|| schema(format!("{path}.{key}"), "expected an integer year")),
        Some(_) => Err(schema(format!("{path}.{key}"), "expected an integer year")),
    }
}

fn from_json_value(root: &Value, registry: &KindRegistry) -> Result<GraphDataset, DatasetError> {
    let root = object(root, "$")?;
    check_keys(root, "$", &["meta", "persons", "relations"])?;
    let meta = match root.get("meta") {
        Some(v) => string_map(v, "$.meta")?,
        None => BTreeMap::new(),
    };

    let persons_v = root
        .get("persons")
        .ok_or_else(|| schema("$.persons", "missing field"))?
        .as_array()
        .ok_or_else(|| schema("$.persons", "expected an array"))?;
    let mut persons = Vec::with_capacity(persons_v.len());
    for (i, v) in persons_v.iter().enumerate() {
        let path = format!("$.persons[{i}]");
        let o = object(v, &path)?;
        check_keys(o, &path, &["id", "label", "birth_year", "death_year", "attributes"])?;
        persons.push(Person {
            id: required_str(o, "id", &path)?,
            label: required_str(o, "label", &path)?,
            birth_year: year(o, "birth_year", &path)?,
            death_year: year(o, "death_year", &path)?,
            attributes: match o.get("attributes") {
                Some(a) => string_map(a, &format!("{path}.attributes"))?,
                None => BTreeMap::new(),
            },
        });
    }

    let relations_v = root
        .get("relations")
        .ok_or_else(|| schema("$.relations", "missing field"))?
        .as_array()
        .ok_or_else(|| schema("$.relations", "expected an array"))?;
    let mut relations = Vec::with_capacity(relations_v.len());
    for (i, v) in relations_v.iter().enumerate() {
        let path = format!("$.relations[{i}]");
        let o = object(v, &path)?;
        check_keys(o, &path, &["source", "target", "kind"])?;
        let kind_name = required_str(o, "kind", &path)?;
        if kind_name.is_empty() {
            return Err(schema(format!("{path}.kind"), "relation kind must be non-empty"));
        }
        let kind = RelationKind::parse(&kind_name);
        relations.push(Relation {
            source: required_str(o, "source", &path)?,
            target: required_str(o, "target", &path)?,
            directed: registry.is_directed(&kind),
            kind,
        });
    }

    GraphDataset::new(meta, persons, relations)
}

/// Incremental construction for code and tests.
#[derive(Default)]
pub struct DatasetBuilder {
    meta: BTreeMap<String, String>,
    persons: Vec<Person>,
    relations: Vec<Relation>,
    registry: KindRegistry,
}

impl DatasetBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn meta(mut self, key: &str, value: &str) -> Self {
        self.meta.insert(key.into(), value.into());
        self
    }

    pub fn registry(mut self, registry: KindRegistry) -> Self {
        self.registry = registry;
        self
    }

    pub fn person(mut self, id: &str) -> Self {
        self.persons.push(Person::new(id, id));
        self
    }

    pub fn persons(mut self, ids: &[&str]) -> Self {
        self.persons.extend(ids.iter().map(|id| Person::new(*id, *id)));
        self
    }

    pub fn push_person(mut self, person: Person) -> Self {
        self.persons.push(person);
        self
    }

    pub fn relation(mut self, source: &str, target: &str, kind: &str) -> Self {
        let kind = RelationKind::parse(kind);
        self.relations.push(Relation {
            source: source.into(),
            target: target.into(),
            directed: self.registry.is_directed(&kind),
            kind,
        });
        self
    }

    pub fn build(self) -> Result<GraphDataset, DatasetError> {
        GraphDataset::new(self.meta, self.persons, self.relations)
    }

    pub fn build_unchecked(self) -> GraphDataset {
        GraphDataset::new_unchecked(self.meta, self.persons, self.relations)
    }
}

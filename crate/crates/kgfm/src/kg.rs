//! Integer-encoded multi-relational graphs.
//!
//! Triple files are UTF-8 text, one `head<TAB>relation<TAB>tail` per line,
//! matching the public FB15k-237/UMLS distribution format. Entity and
//! relation ids are assigned by first appearance in file order so that
//! loading is deterministic without any external sorting.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::{Error, Result};

/// A single subject-relation-object edge, integer encoded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub subject: usize,
    pub relation: usize,
    pub object: usize,
}

impl Triple {
    pub fn new(subject: usize, relation: usize, object: usize) -> Self {
        Triple { subject, relation, object }
    }
}

/// Ordered symbol table: names are dense ids in insertion order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocab {
    names: Vec<String>,
    ids: HashMap<String, usize>,
}

impl Vocab {
    pub fn new() -> Self {
        Vocab::default()
    }

    pub fn from_names<I: IntoIterator<Item = S>, S: Into<String>>(names: I) -> Self {
        let mut v = Vocab::new();
        for n in names {
            v.intern(&n.into());
        }
        v
    }

    /// Returns the id for `name`, inserting it if unseen.
    pub fn intern(&mut self, name: &str) -> usize {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = self.names.len();
        self.names.push(name.to_string());
        self.ids.insert(name.to_string(), id);
        id
    }

    pub fn get(&self, name: &str) -> Option<usize> {
        self.ids.get(name).copied()
    }

    pub fn name(&self, id: usize) -> &str {
        &self.names[id]
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
}

/// Options controlling how a triple file is bound to existing vocabularies.
#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    /// Pre-existing entity vocabulary. New entities are an error unless
    /// `allow_new_entities` is set.
    pub known_entities: Option<Vocab>,
    /// Pre-existing relation vocabulary. Unknown relations are always an
    /// error when this is supplied.
    pub known_relations: Option<Vocab>,
    /// Permit extending a supplied entity vocabulary.
    pub allow_new_entities: bool,
}

/// An integer-encoded knowledge graph with bidirectional adjacency indices.
///
/// `out_index[v]` lists `(relation, object)` pairs of edges leaving `v`;
/// `in_index[v]` lists `(relation, subject)` pairs of edges arriving at `v`.
/// Together they enumerate every triple exactly twice. Duplicate input
/// triples are dropped (`duplicates_dropped` counts them).
#[derive(Debug, Clone)]
pub struct KnowledgeGraph {
    pub entities: Vocab,
    pub relations: Vocab,
    pub triples: Vec<Triple>,
    out_index: Vec<Vec<(usize, usize)>>,
    in_index: Vec<Vec<(usize, usize)>>,
    /// Number of relations before reciprocal augmentation.
    n_base_relations: usize,
    /// Set once `add_reciprocals` has run; guards double application.
    has_reciprocals: bool,
    pub duplicates_dropped: usize,
}

impl KnowledgeGraph {
    /// Builds a graph from already-encoded triples, deduplicating and
    /// indexing them. Triple ids must be within the vocabularies.
    pub fn from_triples(entities: Vocab, relations: Vocab, triples: Vec<Triple>) -> Result<Self> {
        let n_base_relations = relations.len();
        let mut g = KnowledgeGraph {
            entities,
            relations,
            triples: Vec::with_capacity(triples.len()),
            out_index: Vec::new(),
            in_index: Vec::new(),
            n_base_relations,
            has_reciprocals: false,
            duplicates_dropped: 0,
        };
        let mut seen = HashSet::with_capacity(triples.len());
        for t in triples {
            if t.subject >= g.entities.len() || t.object >= g.entities.len() {
                return Err(Error::Index(format!(
                    "entity id out of range in triple ({}, {}, {})",
                    t.subject, t.relation, t.object
                )));
            }
            if t.relation >= g.relations.len() {
                return Err(Error::Index(format!("relation id {} out of range", t.relation)));
            }
            if seen.insert(t) {
                g.triples.push(t);
            } else {
                g.duplicates_dropped += 1;
            }
        }
        g.rebuild_indices();
        Ok(g)
    }

    fn rebuild_indices(&mut self) {
        self.out_index = vec![Vec::new(); self.entities.len()];
        self.in_index = vec![Vec::new(); self.entities.len()];
        for t in &self.triples {
            self.out_index[t.subject].push((t.relation, t.object));
            self.in_index[t.object].push((t.relation, t.subject));
        }
    }

    pub fn n_entities(&self) -> usize {
        self.entities.len()
    }

    /// Relation count of the graph as stored (augmented count once
    /// reciprocals have been added).
    pub fn n_relations(&self) -> usize {
        self.relations.len()
    }

    /// Relation count before reciprocal augmentation.
    pub fn n_base_relations(&self) -> usize {
        self.n_base_relations
    }

    pub fn n_triples(&self) -> usize {
        self.triples.len()
    }

    pub fn has_reciprocals(&self) -> bool {
        self.has_reciprocals
    }

    /// Outgoing and incoming 1-hop neighborhoods of `v`, in insertion order.
    pub fn neighborhood(&self, v: usize) -> Result<(&[(usize, usize)], &[(usize, usize)])> {
        if v >= self.entities.len() {
            return Err(Error::Index(format!(
                "entity id {v} out of range (|E| = {})",
                self.entities.len()
            )));
        }
        Ok((&self.out_index[v], &self.in_index[v]))
    }

    pub fn outgoing(&self, v: usize) -> &[(usize, usize)] {
        &self.out_index[v]
    }

    pub fn incoming(&self, v: usize) -> &[(usize, usize)] {
        &self.in_index[v]
    }

    /// First `(v, r, v)` edge, if any. The message-passing reformulation
    /// assumes none exist, so construction of that path rejects graphs where
    /// this returns `Some`.
    pub fn first_self_loop(&self) -> Option<Triple> {
        self.triples.iter().copied().find(|t| t.subject == t.object)
    }

    /// Returns a new graph with `|R'| = 2|R|` and `|T'| = 2|T|`: for every
    /// `(s, r, o)` the edge `(o, r + |R|, s)` is added. Inverse relation ids
    /// are derived arithmetically, so `r` and `r + |R|` always pair up.
    pub fn add_reciprocals(&self) -> Result<KnowledgeGraph> {
        if self.has_reciprocals {
            return Err(Error::Logic(
                "reciprocal relations already present; refusing to apply twice".into(),
            ));
        }
        let n_rel = self.relations.len();
        let mut relations = self.relations.clone();
        for r in 0..n_rel {
            relations.intern(&format!("{}**inv", self.relations.name(r)));
        }
        let mut triples = Vec::with_capacity(self.triples.len() * 2);
        triples.extend_from_slice(&self.triples);
        for t in &self.triples {
            triples.push(Triple::new(t.object, t.relation + n_rel, t.subject));
        }
        let mut g = KnowledgeGraph::from_triples(self.entities.clone(), relations, triples)?;
        g.n_base_relations = n_rel;
        g.has_reciprocals = true;
        g.duplicates_dropped = self.duplicates_dropped;
        Ok(g)
    }

    /// Serializes the triples back to the tab-separated text format.
    pub fn to_triple_text(&self) -> String {
        let mut out = String::new();
        for t in &self.triples {
            let _ = writeln!(
                out,
                "{}\t{}\t{}",
                self.entities.name(t.subject),
                self.relations.name(t.relation),
                self.entities.name(t.object)
            );
        }
        out
    }
}

/// Parses a tab-separated triple file. Vocabularies are assigned by first
/// appearance unless supplied through `opts`.
pub fn parse_triples(path: &Path, opts: &ParseOptions) -> Result<KnowledgeGraph> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;
    parse_triples_str(&text, opts)
}

/// Same as [`parse_triples`] but over in-memory text.
pub fn parse_triples_str(text: &str, opts: &ParseOptions) -> Result<KnowledgeGraph> {
    let mut entities = opts.known_entities.clone().unwrap_or_default();
    let mut relations = opts.known_relations.clone().unwrap_or_default();
    let fixed_entities = opts.known_entities.is_some() && !opts.allow_new_entities;
    let fixed_relations = opts.known_relations.is_some();

    let mut triples = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        let (h, r, t) = match (fields.next(), fields.next(), fields.next(), fields.next()) {
            (Some(h), Some(r), Some(t), None) => (h, r, t),
            _ => {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("expected 3 tab-separated fields, got line {line:?}"),
                })
            }
        };
        let s = if fixed_entities {
            entities
                .get(h)
                .ok_or_else(|| Error::Vocab(format!("unknown entity {h:?} at line {}", i + 1)))?
        } else {
            entities.intern(h)
        };
        let p = if fixed_relations {
            relations
                .get(r)
                .ok_or_else(|| Error::Vocab(format!("unknown relation {r:?} at line {}", i + 1)))?
        } else {
            relations.intern(r)
        };
        let o = if fixed_entities {
            entities
                .get(t)
                .ok_or_else(|| Error::Vocab(format!("unknown entity {t:?} at line {}", i + 1)))?
        } else {
            entities.intern(t)
        };
        triples.push(Triple::new(s, p, o));
    }
    KnowledgeGraph::from_triples(entities, relations, triples)
}

/// Dense per-entity feature matrix, row `i` belonging to entity id `i`.
#[derive(Debug, Clone)]
pub struct NodeFeatureMatrix {
    pub rows: usize,
    pub dim: usize,
    pub values: Vec<f64>,
}

impl NodeFeatureMatrix {
    pub fn new(rows: usize, dim: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != rows * dim {
            return Err(Error::Shape(format!(
                "feature matrix expects {} values, got {}",
                rows * dim,
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Value(format!("non-finite feature value {bad}")));
        }
        Ok(NodeFeatureMatrix { rows, dim, values })
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }
}

/// Loads a feature file: header line `rows dim`, then `rows` lines of `dim`
/// whitespace-separated decimals. Row count must match the graph.
pub fn load_features(path: &Path, g: &KnowledgeGraph) -> Result<NodeFeatureMatrix> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;
    load_features_str(&text, g)
}

pub fn load_features_str(text: &str, g: &KnowledgeGraph) -> Result<NodeFeatureMatrix> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 1, msg: "empty feature file".into() })?;
    let mut parts = header.split_whitespace();
    let parse_dim = |s: Option<&str>| -> Result<usize> {
        s.and_then(|x| x.parse::<usize>().ok())
            .ok_or_else(|| Error::Parse { line: 1, msg: format!("bad header {header:?}") })
    };
    let rows = parse_dim(parts.next())?;
    let dim = parse_dim(parts.next())?;
    if rows != g.n_entities() {
        return Err(Error::Shape(format!(
            "feature rows {} != |E| {}",
            rows,
            g.n_entities()
        )));
    }
    let mut values = Vec::with_capacity(rows * dim);
    let mut filled = 0usize;
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        if filled == rows {
            return Err(Error::Parse { line: i + 1, msg: "more rows than declared".into() });
        }
        let mut n = 0usize;
        for tok in line.split_whitespace() {
            let v: f64 = tok.parse().map_err(|_| Error::Parse {
                line: i + 1,
                msg: format!("bad number {tok:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Value(format!("non-finite value {tok:?} at line {}", i + 1)));
            }
            values.push(v);
            n += 1;
        }
        if n != dim {
            return Err(Error::Shape(format!("row {} has {} values, expected {}", filled, n, dim)));
        }
        filled += 1;
    }
    if filled != rows {
        return Err(Error::Shape(format!("file has {filled} rows, header declared {rows}")));
    }
    NodeFeatureMatrix::new(rows, dim, values)
}

/// Known-true answer sets for filtered ranking, built over a caller-chosen
/// union of splits. Answers both `(s, p, ?)` and `(?, p, o)` membership.
#[derive(Debug, Clone, Default)]
pub struct FilterIndex {
    objects: HashMap<(usize, usize), Vec<usize>>,
    subjects: HashMap<(usize, usize), Vec<usize>>,
}

impl FilterIndex {
    pub fn build(splits: &[&[Triple]]) -> Self {
        let mut objects: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        let mut subjects: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for split in splits {
            for t in *split {
                objects.entry((t.subject, t.relation)).or_default().push(t.object);
                subjects.entry((t.relation, t.object)).or_default().push(t.subject);
            }
        }
        for v in objects.values_mut().chain(subjects.values_mut()) {
            v.sort_unstable();
            v.dedup();
        }
        FilterIndex { objects, subjects }
    }

    /// True objects recorded for `(s, p, ?)`, sorted ascending.
    pub fn objects_for(&self, s: usize, p: usize) -> &[usize] {
        self.objects.get(&(s, p)).map(Vec::as_slice).unwrap_or(&[])
    }

    /// True subjects recorded for `(?, p, o)`, sorted ascending.
    pub fn subjects_for(&self, p: usize, o: usize) -> &[usize] {
        self.subjects.get(&(p, o)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn contains_object(&self, s: usize, p: usize, o: usize) -> bool {
        self.objects_for(s, p).binary_search(&o).is_ok()
    }

    pub fn contains_subject(&self, s: usize, p: usize, o: usize) -> bool {
        self.subjects_for(p, o).binary_search(&s).is_ok()
    }
}

/// Train/valid/test splits over one shared vocabulary.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub train: KnowledgeGraph,
    pub valid: Vec<Triple>,
    pub test: Vec<Triple>,
}

/// Loads `train.txt`, `valid.txt`, and `test.txt` from a directory. The
/// train split defines the vocabularies; valid/test must stay within them.
pub fn load_dir(dir: &Path) -> Result<Dataset> {
    let train = parse_triples(&dir.join("train.txt"), &ParseOptions::default())?;
    let fixed = ParseOptions {
        known_entities: Some(train.entities.clone()),
        known_relations: Some(train.relations.clone()),
        allow_new_entities: false,
    };
    let valid = parse_triples(&dir.join("valid.txt"), &fixed)?.triples;
    let test = parse_triples(&dir.join("test.txt"), &fixed)?.triples;
    Ok(Dataset { train, valid, test })
}

//! Sparse crowd label storage, ground truth and the benchmark file formats.
//!
//! Label files are comma-separated text with the header `question,worker,answer`
//! and one (item, worker, answer) triple per line. Truth files use the header
//! `question,truth`. External string identifiers are mapped to dense indices in
//! order of first appearance.
//!
//! Answers are interpreted as class indices when every answer parses as a
//! non-negative integer; the label space is then `0..=max`. Otherwise answers
//! are treated as categorical strings and numbered in first-appearance order.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

const LABEL_HEADER: [&str; 3] = ["question", "worker", "answer"];
const TRUTH_HEADER: [&str; 2] = ["question", "truth"];
const PREDICTION_HEADER: [&str; 2] = ["question", "label"];

/// How answer strings map onto class indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelKind {
    /// Answers are non-negative integers used directly as class indices.
    Integer,
    /// Answers are arbitrary strings numbered in first-appearance order.
    Categorical,
}

/// One observed label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Triple {
    pub item: usize,
    pub worker: usize,
    pub class: usize,
}

/// A label as seen from an item: who gave it and which class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ItemLabel {
    pub worker: usize,
    pub class: usize,
}

/// A label as seen from a worker: which item and which class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WorkerLabel {
    pub item: usize,
    pub class: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct IdMap {
    ids: Vec<String>,
    index: HashMap<String, usize>,
}

impl IdMap {
    fn get_or_insert(&mut self, id: &str) -> usize {
        if let Some(&i) = self.index.get(id) {
            return i;
        }
        let i = self.ids.len();
        self.ids.push(id.to_owned());
        self.index.insert(id.to_owned(), i);
        i
    }

    fn get(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    fn len(&self) -> usize {
        self.ids.len()
    }
}

/// Immutable sparse store of (item, worker, class) triples.
///
/// Both adjacency lists are kept in compressed form: the labels of item `i`
/// are sorted by worker index and the labels of worker `j` by item index.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelMatrix {
    items: IdMap,
    workers: IdMap,
    classes: IdMap,
    kind: LabelKind,
    triples: Vec<Triple>,
    item_offsets: Vec<usize>,
    item_entries: Vec<ItemLabel>,
    worker_offsets: Vec<usize>,
    worker_entries: Vec<WorkerLabel>,
}

impl LabelMatrix {
    /// Builds a matrix directly from dense indices.
    ///
    /// Items are named `i<index>`, workers `w<index>` and classes by their
    /// integer value.
    pub fn from_dense(
        num_items: usize,
        num_workers: usize,
        num_classes: usize,
        triples: impl IntoIterator<Item = (usize, usize, usize)>,
    ) -> Result<Self> {
        if num_classes < 1 {
            return Err(Error::InvalidParameter("at least one class is required".into()));
        }
        let items = IdMap {
            ids: (0..num_items).map(|i| format!("i{i}")).collect(),
            index: (0..num_items).map(|i| (format!("i{i}"), i)).collect(),
        };
        let workers = IdMap {
            ids: (0..num_workers).map(|j| format!("w{j}")).collect(),
            index: (0..num_workers).map(|j| (format!("w{j}"), j)).collect(),
        };
        let triples = triples
            .into_iter()
            .map(|(item, worker, class)| Triple { item, worker, class })
            .collect::<Vec<_>>();
        for t in &triples {
            if t.item >= num_items || t.worker >= num_workers || t.class >= num_classes {
                return Err(Error::Validation(format!(
                    "triple ({}, {}, {}) out of range for N={num_items}, W={num_workers}, K={num_classes}",
                    t.item, t.worker, t.class
                )));
            }
        }
        Self::assemble(items, workers, integer_classes(num_classes), LabelKind::Integer, triples)
    }

    fn assemble(
        items: IdMap,
        workers: IdMap,
        classes: IdMap,
        kind: LabelKind,
        triples: Vec<Triple>,
    ) -> Result<Self> {
        let mut seen = HashSet::with_capacity(triples.len());
        for t in &triples {
            if !seen.insert((t.item, t.worker)) {
                return Err(Error::Validation(format!(
                    "worker '{}' labelled item '{}' more than once",
                    workers.ids[t.worker], items.ids[t.item]
                )));
            }
        }

        let (item_offsets, item_entries) = compress(items.len(), &triples, |t| {
            (t.item, t.worker, ItemLabel { worker: t.worker, class: t.class })
        });
        let (worker_offsets, worker_entries) = compress(workers.len(), &triples, |t| {
            (t.worker, t.item, WorkerLabel { item: t.item, class: t.class })
        });

        Ok(Self {
            items,
            workers,
            classes,
            kind,
            triples,
            item_offsets,
            item_entries,
            worker_offsets,
            worker_entries,
        })
    }

    pub fn num_items(&self) -> usize {
        self.items.len()
    }

    pub fn num_workers(&self) -> usize {
        self.workers.len()
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn num_labels(&self) -> usize {
        self.triples.len()
    }

    pub fn kind(&self) -> LabelKind {
        self.kind
    }

    /// Triples in insertion (file) order.
    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    /// Labels given to item `i` (the set W_i), ascending by worker index.
    pub fn item_labels(&self, item: usize) -> &[ItemLabel] {
        &self.item_entries[self.item_offsets[item]..self.item_offsets[item + 1]]
    }

    /// Labels given by worker `j` (the set N_j), ascending by item index.
    pub fn worker_labels(&self, worker: usize) -> &[WorkerLabel] {
        &self.worker_entries[self.worker_offsets[worker]..self.worker_offsets[worker + 1]]
    }

    pub fn item_id(&self, item: usize) -> &str {
        &self.items.ids[item]
    }

    pub fn worker_id(&self, worker: usize) -> &str {
        &self.workers.ids[worker]
    }

    pub fn class_name(&self, class: usize) -> &str {
        &self.classes.ids[class]
    }

    pub fn item_index(&self, id: &str) -> Option<usize> {
        self.items.get(id)
    }

    pub fn worker_index(&self, id: &str) -> Option<usize> {
        self.workers.get(id)
    }

    /// Resolves an answer string to a class index under this matrix's label map.
    pub fn class_index(&self, answer: &str) -> Option<usize> {
        match self.kind {
            LabelKind::Integer => parse_class_integer(answer).filter(|&k| k < self.num_classes()),
            LabelKind::Categorical => self.classes.get(answer),
        }
    }

    /// Writes the matrix in the label file format, triples in insertion order.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(LABEL_HEADER).map_err(csv_write_error)?;
        for t in &self.triples {
            w.write_record([self.item_id(t.item), self.worker_id(t.worker), self.class_name(t.class)])
                .map_err(csv_write_error)?;
        }
        w.flush().map_err(|e| csv_write_error(e.into()))?;
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|source| Error::Io { path: path.into(), source })?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

fn integer_classes(k: usize) -> IdMap {
    IdMap {
        ids: (0..k).map(|c| c.to_string()).collect(),
        index: (0..k).map(|c| (c.to_string(), c)).collect(),
    }
}

fn parse_class_integer(s: &str) -> Option<usize> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Builds CSR offsets/entries grouped by `key`, each group sorted by `order`.
fn compress<E: Copy>(
    groups: usize,
    triples: &[Triple],
    project: impl Fn(&Triple) -> (usize, usize, E),
) -> (Vec<usize>, Vec<E>) {
    let mut keyed: Vec<(usize, usize, E)> = triples.iter().map(&project).collect();
    keyed.sort_by_key(|&(key, order, _)| (key, order));
    let mut offsets = vec![0usize; groups + 1];
    for &(key, _, _) in &keyed {
        offsets[key + 1] += 1;
    }
    for g in 0..groups {
        offsets[g + 1] += offsets[g];
    }
    (offsets, keyed.into_iter().map(|(_, _, e)| e).collect())
}

fn csv_write_error(e: csv::Error) -> Error {
    Error::Io {
        path: "<output>".into(),
        source: std::io::Error::other(e.to_string()),
    }
}

/// Accumulates string triples and resolves the label space on [`build`](Self::build).
#[derive(Debug, Default)]
pub struct LabelMatrixBuilder {
    num_classes: Option<usize>,
    items: IdMap,
    workers: IdMap,
    rows: Vec<(usize, usize, String)>,
    seen: HashSet<(usize, usize)>,
}

impl LabelMatrixBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Forces the number of classes instead of inferring it from the answers.
    pub fn num_classes(mut self, k: usize) -> Self {
        self.num_classes = Some(k);
        self
    }

    /// Registers an item id without attaching a label to it.
    pub fn register_item(&mut self, id: &str) -> usize {
        self.items.get_or_insert(id)
    }

    pub fn register_worker(&mut self, id: &str) -> usize {
        self.workers.get_or_insert(id)
    }

    /// Adds one label. Fails if this worker already labelled this item.
    pub fn push(&mut self, item: &str, worker: &str, answer: &str) -> Result<()> {
        let i = self.items.get_or_insert(item);
        let j = self.workers.get_or_insert(worker);
        if !self.seen.insert((i, j)) {
            return Err(Error::Validation(format!(
                "duplicate label: worker '{worker}' labelled item '{item}' more than once"
            )));
        }
        self.rows.push((i, j, answer.to_owned()));
        Ok(())
    }

    pub fn build(self) -> Result<LabelMatrix> {
        let integer = !self.rows.is_empty()
            && self.rows.iter().all(|(_, _, a)| parse_class_integer(a).is_some());

        let (kind, classes, triples) = if integer {
            let classes_of: Vec<usize> = self
                .rows
                .iter()
                .map(|(_, _, a)| parse_class_integer(a).expect("checked above"))
                .collect();
            let inferred = classes_of.iter().max().map_or(0, |m| m + 1);
            let k = match self.num_classes {
                Some(k) if k < inferred => {
                    return Err(Error::Validation(format!(
                        "class override K={k} is smaller than the largest answer index {}",
                        inferred - 1
                    )))
                }
                Some(k) => k,
                None => inferred,
            };
            let triples = self
                .rows
                .iter()
                .zip(classes_of)
                .map(|(&(item, worker, _), class)| Triple { item, worker, class })
                .collect();
            (LabelKind::Integer, integer_classes(k), triples)
        } else {
            let mut classes = IdMap::default();
            let triples: Vec<Triple> = self
                .rows
                .iter()
                .map(|(item, worker, a)| Triple {
                    item: *item,
                    worker: *worker,
                    class: classes.get_or_insert(a),
                })
                .collect();
            if let Some(k) = self.num_classes {
                if k < classes.len() {
                    return Err(Error::Validation(format!(
                        "class override K={k} is smaller than the {} distinct answers",
                        classes.len()
                    )));
                }
                // Unnamed trailing classes cannot be produced by any answer string.
                for c in classes.len()..k {
                    classes.ids.push(format!("#{c}"));
                }
            }
            (LabelKind::Categorical, classes, triples)
        };

        LabelMatrix::assemble(self.items, self.workers, classes, kind, triples)
    }
}

/// Loads a label file. `num_classes` optionally overrides the inferred K.
pub fn load_labels(path: impl AsRef<Path>, num_classes: Option<usize>) -> Result<LabelMatrix> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io { path: path.into(), source })?;
    read_labels(file, path, num_classes)
}

/// Parses the label file format from any reader. `path` is used in messages only.
pub fn read_labels<R: Read>(reader: R, path: &Path, num_classes: Option<usize>) -> Result<LabelMatrix> {
    let mut rdr = csv_reader(reader);
    check_header(&mut rdr, path, &LABEL_HEADER)?;

    let mut builder = LabelMatrixBuilder::new();
    if let Some(k) = num_classes {
        builder = builder.num_classes(k);
    }
    for record in rdr.records() {
        let record = record.map_err(|e| csv_parse_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let fields = non_empty_fields::<3>(&record, path, line)?;
        builder.push(fields[0], fields[1], fields[2]).map_err(|e| match e {
            Error::Validation(msg) => Error::Validation(format!("{}:{line}: {msg}", path.display())),
            other => other,
        })?;
    }
    if builder.rows.is_empty() {
        return Err(Error::Validation(format!("{}: no labels after the header", path.display())));
    }
    builder.build()
}

/// Known true classes for a subset of items.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroundTruth {
    classes: BTreeMap<usize, usize>,
}

impl GroundTruth {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        Self { classes: pairs.into_iter().collect() }
    }

    pub fn insert(&mut self, item: usize, class: usize) -> Option<usize> {
        self.classes.insert(item, class)
    }

    pub fn get(&self, item: usize) -> Option<usize> {
        self.classes.get(&item).copied()
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// (item, class) pairs in ascending item order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.classes.iter().map(|(&i, &k)| (i, k))
    }

    /// Writes the truth file format using the ids and class names of `labels`.
    pub fn write_csv<W: Write>(&self, labels: &LabelMatrix, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(TRUTH_HEADER).map_err(csv_write_error)?;
        for (item, class) in self.iter() {
            w.write_record([labels.item_id(item), labels.class_name(class)])
                .map_err(csv_write_error)?;
        }
        w.flush().map_err(|e| csv_write_error(e.into()))?;
        Ok(())
    }

    pub fn save(&self, labels: &LabelMatrix, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|source| Error::Io { path: path.into(), source })?;
        self.write_csv(labels, std::io::BufWriter::new(file))
    }
}

/// Loads a truth file, resolving ids and answers through `labels`' maps.
pub fn load_truth(path: impl AsRef<Path>, labels: &LabelMatrix) -> Result<GroundTruth> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io { path: path.into(), source })?;
    read_truth(file, path, labels)
}

pub fn read_truth<R: Read>(reader: R, path: &Path, labels: &LabelMatrix) -> Result<GroundTruth> {
    read_item_classes(reader, path, labels, &TRUTH_HEADER, "truth")
}

/// Writes one `question,label` row per item, using external ids and class names.
pub fn write_predictions<W: Write>(labels: &LabelMatrix, predictions: &[usize], out: W) -> Result<()> {
    if predictions.len() != labels.num_items() {
        return Err(Error::Validation(format!(
            "{} predictions for {} items",
            predictions.len(),
            labels.num_items()
        )));
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PREDICTION_HEADER).map_err(csv_write_error)?;
    for (item, &class) in predictions.iter().enumerate() {
        w.write_record([labels.item_id(item), labels.class_name(class)])
            .map_err(csv_write_error)?;
    }
    w.flush().map_err(|e| csv_write_error(e.into()))?;
    Ok(())
}

pub fn save_predictions(labels: &LabelMatrix, predictions: &[usize], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|source| Error::Io { path: path.into(), source })?;
    write_predictions(labels, predictions, std::io::BufWriter::new(file))
}

/// Loads a `question,label` file; every item of `labels` must be present.
pub fn load_predictions(path: impl AsRef<Path>, labels: &LabelMatrix) -> Result<Vec<usize>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io { path: path.into(), source })?;
    read_predictions(file, path, labels)
}

pub fn read_predictions<R: Read>(reader: R, path: &Path, labels: &LabelMatrix) -> Result<Vec<usize>> {
    let found = read_item_classes(reader, path, labels, &PREDICTION_HEADER, "prediction")?;
    (0..labels.num_items())
        .map(|i| {
            found.get(i).ok_or_else(|| {
                Error::Validation(format!("{}: no prediction for item '{}'", path.display(), labels.item_id(i)))
            })
        })
        .collect()
}

fn read_item_classes<R: Read>(
    reader: R,
    path: &Path,
    labels: &LabelMatrix,
    header: &[&str],
    what: &str,
) -> Result<GroundTruth> {
    let mut rdr = csv_reader(reader);
    check_header(&mut rdr, path, header)?;

    let mut rows = GroundTruth::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_parse_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let [item_id, answer] = non_empty_fields::<2>(&record, path, line)?;
        let item = labels.item_index(item_id).ok_or_else(|| {
            Error::Validation(format!("{}:{line}: unknown item '{item_id}'", path.display()))
        })?;
        let class = labels.class_index(answer).ok_or_else(|| {
            Error::Validation(format!("{}:{line}: unknown label '{answer}'", path.display()))
        })?;
        if rows.insert(item, class).is_some() {
            return Err(Error::Validation(format!(
                "{}:{line}: item '{item_id}' has more than one {what} row",
                path.display()
            )));
        }
    }
    Ok(rows)
}

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader)
}

fn check_header<R: Read>(rdr: &mut csv::Reader<R>, path: &Path, expected: &[&str]) -> Result<()> {
    let header = rdr.headers().map_err(|e| csv_parse_error(path, e))?.clone();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(Error::Validation(format!("{}: file is empty", path.display())));
    }
    let got: Vec<&str> = header
        .iter()
        .enumerate()
        .map(|(n, f)| if n == 0 { f.trim_start_matches('\u{feff}') } else { f })
        .collect();
    if got != expected {
        return Err(Error::Parse {
            path: path.into(),
            line: 1,
            message: format!("expected header '{}', found '{}'", expected.join(","), got.join(",")),
        });
    }
    Ok(())
}

fn non_empty_fields<'r, const N: usize>(
    record: &'r csv::StringRecord,
    path: &Path,
    line: u64,
) -> Result<[&'r str; N]> {
    if record.len() != N {
        return Err(Error::Parse {
            path: path.into(),
            line,
            message: format!("expected {N} fields, found {}", record.len()),
        });
    }
    let mut out = [""; N];
    for (slot, field) in out.iter_mut().zip(record.iter()) {
        if field.is_empty() {
            return Err(Error::Parse { path: path.into(), line, message: "empty field".into() });
        }
        *slot = field;
    }
    Ok(out)
}

fn csv_parse_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::Parse { path: path.into(), line, message: e.to_string() }
}

/// Per-item class counts n_ik.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoteCounts {
    num_classes: usize,
    counts: Vec<usize>,
}

impl VoteCounts {
    pub fn counts(&self, item: usize) -> &[usize] {
        &self.counts[item * self.num_classes..(item + 1) * self.num_classes]
    }

    /// |W_i|, the number of labels on `item`.
    pub fn total(&self, item: usize) -> usize {
        self.counts(item).iter().sum()
    }

    pub fn num_items(&self) -> usize {
        self.counts.len() / self.num_classes.max(1)
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }
}

pub fn vote_counts(labels: &LabelMatrix) -> VoteCounts {
    let k = labels.num_classes();
    let mut counts = vec![0usize; labels.num_items() * k];
    for t in labels.triples() {
        counts[t.item * k + t.class] += 1;
    }
    VoteCounts { num_classes: k, counts }
}

/// One-versus-rest view of a [`LabelMatrix`]: y = 1 where the label equals
/// the focal class, 0 elsewhere, over the same observed (item, worker) pairs.
#[derive(Debug, Clone, Copy)]
pub struct BinaryView<'a> {
    labels: &'a LabelMatrix,
    class: usize,
}

impl<'a> BinaryView<'a> {
    pub fn labels(&self) -> &'a LabelMatrix {
        self.labels
    }

    pub fn class(&self) -> usize {
        self.class
    }

    pub fn indicator(&self, class: usize) -> f64 {
        if class == self.class {
            1.0
        } else {
            0.0
        }
    }

    /// (worker, y) pairs for item `i`.
    pub fn item_labels(&self, item: usize) -> impl Iterator<Item = (usize, f64)> + 'a {
        let class = self.class;
        self.labels
            .item_labels(item)
            .iter()
            .map(move |l| (l.worker, if l.class == class { 1.0 } else { 0.0 }))
    }

    /// (item, y) pairs for worker `j`.
    pub fn worker_labels(&self, worker: usize) -> impl Iterator<Item = (usize, f64)> + 'a {
        let class = self.class;
        self.labels
            .worker_labels(worker)
            .iter()
            .map(move |l| (l.item, if l.class == class { 1.0 } else { 0.0 }))
    }

    pub fn num_items(&self) -> usize {
        self.labels.num_items()
    }

    pub fn num_workers(&self) -> usize {
        self.labels.num_workers()
    }
}

pub fn binary_view(labels: &LabelMatrix, class: usize) -> Result<BinaryView<'_>> {
    if class >= labels.num_classes() {
        return Err(Error::InvalidParameter(format!(
            "class {class} out of range for K={}",
            labels.num_classes()
        )));
    }
    Ok(BinaryView { labels, class })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn parse(text: &str) -> Result<LabelMatrix> {
        read_labels(Cursor::new(text), Path::new("test.csv"), None)
    }

    #[test]
    fn three_triple_fixture() {
        let m = parse("question,worker,answer\nq1,w1,A\nq1,w2,B\nq2,w1,A\n").unwrap();
        assert_eq!((m.num_items(), m.num_workers(), m.num_classes()), (2, 2, 2));
        assert_eq!(m.num_labels(), 3);
        assert_eq!(m.kind(), LabelKind::Categorical);
        assert_eq!(m.class_index("B"), Some(1));
    }

    #[test]
    fn header_only_is_rejected() {
        assert!(matches!(parse("question,worker,answer\n"), Err(Error::Validation(_))));
    }

    #[test]
    fn empty_file_is_rejected() {
        assert!(matches!(parse(""), Err(Error::Validation(_))));
    }

    #[test]
    fn duplicate_pair_is_rejected() {
        let err = parse("question,worker,answer\nq1,w1,A\nq1,w1,A\n").unwrap_err();
        match err {
            Error::Validation(msg) => assert!(msg.contains(":3:"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_row_reports_line() {
        let err = parse("question,worker,answer\nq1,w1,A\nq2,w2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
        let err = parse("question,worker,answer\nq1,,A\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn wrong_header_is_a_parse_error() {
        assert!(matches!(parse("item,worker,label\nq1,w1,0\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn integer_answers_index_classes_directly() {
        let m = parse("question,worker,answer\na,x,0\nb,x,3\n").unwrap();
        assert_eq!(m.kind(), LabelKind::Integer);
        assert_eq!(m.num_classes(), 4);
        assert_eq!(m.triples()[1].class, 3);
    }

    #[test]
    fn class_override() {
        let m = read_labels(Cursor::new("question,worker,answer\na,x,0\nb,x,1\n"), Path::new("t"), Some(3))
            .unwrap();
        assert_eq!(m.num_classes(), 3);
        assert_eq!(m.class_index("2"), Some(2));
        assert!(read_labels(Cursor::new("question,worker,answer\na,x,5\n"), Path::new("t"), Some(3)).is_err());
    }

    #[test]
    fn truth_loading() {
        let m = parse("question,worker,answer\nq1,w1,A\nq1,w2,B\nq2,w1,A\n").unwrap();
        let t = read_truth(Cursor::new("question,truth\nq2,B\n"), Path::new("t"), &m).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.get(1), Some(1));

        let unknown_item = read_truth(Cursor::new("question,truth\nq9,A\n"), Path::new("t"), &m);
        assert!(matches!(unknown_item, Err(Error::Validation(_))));
        let unknown_label = read_truth(Cursor::new("question,truth\nq1,C\n"), Path::new("t"), &m);
        assert!(matches!(unknown_label, Err(Error::Validation(_))));
    }

    #[test]
    fn predictions_round_trip() {
        let m = parse("question,worker,answer\nq1,w1,A\nq1,w2,B\nq2,w1,A\n").unwrap();
        let mut buf = Vec::new();
        write_predictions(&m, &[1, 0], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "question,label\nq1,B\nq2,A\n");
        assert_eq!(read_predictions(Cursor::new(buf), Path::new("p"), &m).unwrap(), vec![1, 0]);

        let missing = read_predictions(Cursor::new("question,label\nq1,B\n"), Path::new("p"), &m);
        assert!(matches!(missing, Err(Error::Validation(_))));
        assert!(write_predictions(&m, &[0], Vec::new()).is_err());
    }

    #[test]
    fn vote_counts_examples() {
        let m = LabelMatrix::from_dense(3, 3, 3, [(0, 0, 0), (0, 1, 0), (0, 2, 1), (2, 0, 2), (2, 1, 2), (2, 2, 2)])
            .unwrap();
        let v = vote_counts(&m);
        assert_eq!(v.counts(0), &[2, 1, 0]);
        assert_eq!(v.counts(1), &[0, 0, 0]);
        assert_eq!(v.counts(2), &[0, 0, 3]);
        for i in 0..3 {
            assert_eq!(v.total(i), m.item_labels(i).len());
        }
    }

    #[test]
    fn binary_view_indicators() {
        let m = LabelMatrix::from_dense(1, 1, 3, [(0, 0, 2)]).unwrap();
        let y = |k| binary_view(&m, k).unwrap().item_labels(0).next().unwrap().1;
        assert_eq!(y(2), 1.0);
        assert_eq!(y(0), 0.0);
        assert_eq!(y(0) + y(1) + y(2), 1.0);
        assert!(binary_view(&m, 3).is_err());
    }

    #[test]
    fn adjacency_is_sorted() {
        let m = LabelMatrix::from_dense(3, 3, 2, [(2, 1, 0), (0, 2, 1), (0, 0, 0), (2, 0, 1)]).unwrap();
        let workers: Vec<_> = m.item_labels(0).iter().map(|l| l.worker).collect();
        assert_eq!(workers, vec![0, 2]);
        let items: Vec<_> = m.worker_labels(0).iter().map(|l| l.item).collect();
        assert_eq!(items, vec![0, 2]);
        assert!(m.item_labels(1).is_empty());
    }
}

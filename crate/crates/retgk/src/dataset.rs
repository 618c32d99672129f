//! Reading the TU benchmark text layout and writing artifact outputs.
//!
//! A dataset named N in directory `dir` consists of plain-text files:
//!
//! * `N_A.txt`: one `i, j` pair per line, 1-based global node indices.
//!   Edges appear in both directions and are folded into one undirected
//!   edge; repeated identical pairs are tolerated.
//! * `N_graph_indicator.txt`: line k holds the 1-based graph id of node k.
//! * `N_graph_labels.txt`: one class label per graph, re-indexed here to
//!   0..K−1 in sorted order.
//! * `N_node_labels.txt` (optional): one integer symbol per node, mapped
//!   to a dense alphabet.
//! * `N_node_attributes.txt` (optional): comma-separated reals per node,
//!   uniform dimension.
//! * `N_edge_labels.txt` is ignored.
//!
//! Fields may carry surrounding whitespace; empty trailing lines are
//! ignored. Node indices are converted to 0-based local indices at this
//! boundary and nowhere else.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::gram::GramMatrix;
use crate::graph::{Graph, GraphDataset};
use crate::matrix::Matrix;
use crate::rpf::RpfMatrix;

/// Location and name of a dataset in the TU text layout.
#[derive(Clone, Debug)]
pub struct TuDatasetLayout {
    pub dir: PathBuf,
    pub name: String,
}

impl TuDatasetLayout {
    pub fn new(dir: impl Into<PathBuf>, name: impl Into<String>) -> Self {
        TuDatasetLayout {
            dir: dir.into(),
            name: name.into(),
        }
    }

    fn file(&self, suffix: &str) -> PathBuf {
        self.dir
            .join(self.name.as_str())
            .join(format!("{}_{suffix}.txt", self.name))
    }
}

fn read_trimmed_lines(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::MissingFile(path.to_path_buf())
        } else {
            Error::Io(e)
        }
    })?;
    let mut lines: Vec<String> = text.lines().map(|l| l.trim().to_string()).collect();
    while lines.last().is_some_and(String::is_empty) {
        lines.pop();
    }
    Ok(lines)
}

fn malformed(path: &Path, line: usize, reason: impl Into<String>) -> Error {
    Error::MalformedLine {
        file: path.display().to_string(),
        line,
        reason: reason.into(),
    }
}

fn parse_i64(path: &Path, line_no: usize, field: &str) -> Result<i64> {
    field
        .trim()
        .parse()
        .map_err(|_| malformed(path, line_no, format!("expected an integer, got {field:?}")))
}

fn parse_f64(path: &Path, line_no: usize, field: &str) -> Result<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| malformed(path, line_no, format!("expected a number, got {field:?}")))
}

pub fn load_tu_dataset(layout: &TuDatasetLayout) -> Result<GraphDataset> {
    // Graph indicator defines node count and the node → graph map.
    let ind_path = layout.file("graph_indicator");
    let ind_lines = read_trimmed_lines(&ind_path)?;
    let node_count = ind_lines.len();
    let mut graph_of = Vec::with_capacity(node_count);
    let mut graph_count = 0usize;
    for (k, line) in ind_lines.iter().enumerate() {
        if line.is_empty() {
            return Err(malformed(&ind_path, k + 1, "empty line"));
        }
        let id = parse_i64(&ind_path, k + 1, line)?;
        if id < 1 {
            return Err(Error::InconsistentIndicator(format!(
                "graph id {id} on line {} is not positive",
                k + 1
            )));
        }
        let id = id as usize;
        graph_count = graph_count.max(id);
        graph_of.push(id - 1);
    }
    if node_count == 0 {
        return Err(Error::InconsistentIndicator(
            "indicator file is empty".into(),
        ));
    }

    // Local node numbering inside each graph follows global order.
    let mut nodes_per_graph = vec![0usize; graph_count];
    let mut local_of = Vec::with_capacity(node_count);
    for &g in &graph_of {
        local_of.push(nodes_per_graph[g]);
        nodes_per_graph[g] += 1;
    }
    if let Some(empty) = nodes_per_graph.iter().position(|&n| n == 0) {
        return Err(Error::InconsistentIndicator(format!(
            "graph {} has no nodes",
            empty + 1
        )));
    }

    // Directed pairs fold into undirected edges per graph.
    let a_path = layout.file("A");
    let mut edge_sets: Vec<BTreeSet<(usize, usize)>> =
        vec![BTreeSet::new(); graph_count];
    for (k, line) in read_trimmed_lines(&a_path)?.iter().enumerate() {
        if line.is_empty() {
            return Err(malformed(&a_path, k + 1, "empty line"));
        }
        let mut fields = line.split(',');
        let (a, b) = match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(malformed(
                    &a_path,
                    k + 1,
                    format!("expected \"i, j\", got {line:?}"),
                ))
            }
        };
        let i = parse_i64(&a_path, k + 1, a)?;
        let j = parse_i64(&a_path, k + 1, b)?;
        if i < 1 || j < 1 || i as usize > node_count || j as usize > node_count {
            return Err(Error::InconsistentIndicator(format!(
                "edge ({i}, {j}) on line {} of {} references a node outside 1..={node_count}",
                k + 1,
                a_path.display()
            )));
        }
        let (i, j) = (i as usize - 1, j as usize - 1);
        if graph_of[i] != graph_of[j] {
            return Err(Error::InconsistentIndicator(format!(
                "edge on line {} joins graph {} and graph {}",
                k + 1,
                graph_of[i] + 1,
                graph_of[j] + 1
            )));
        }
        let (li, lj) = (local_of[i], local_of[j]);
        edge_sets[graph_of[i]].insert((li.min(lj), li.max(lj)));
    }

    // Optional node labels, mapped to a dense alphabet.
    let labels_path = layout.file("node_labels");
    let (node_labels, alphabet) = if labels_path.exists() {
        let lines = read_trimmed_lines(&labels_path)?;
        if lines.len() != node_count {
            return Err(Error::InconsistentIndicator(format!(
                "{} node labels for {node_count} nodes",
                lines.len()
            )));
        }
        let mut raw = Vec::with_capacity(node_count);
        for (k, line) in lines.iter().enumerate() {
            if line.is_empty() {
                return Err(malformed(&labels_path, k + 1, "empty line"));
            }
            raw.push(parse_i64(&labels_path, k + 1, line)?);
        }
        let alphabet: Vec<i64> = raw.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let index: BTreeMap<i64, usize> = alphabet
            .iter()
            .enumerate()
            .map(|(ix, &v)| (v, ix))
            .collect();
        let dense: Vec<usize> = raw.iter().map(|v| index[v]).collect();
        (Some(dense), alphabet)
    } else {
        (None, Vec::new())
    };

    // Optional continuous attributes with a uniform dimension.
    let attrs_path = layout.file("node_attributes");
    let node_attrs = if attrs_path.exists() {
        let lines = read_trimmed_lines(&attrs_path)?;
        if lines.len() != node_count {
            return Err(Error::InconsistentIndicator(format!(
                "{} attribute lines for {node_count} nodes",
                lines.len()
            )));
        }
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(node_count);
        let mut expected = None;
        for (k, line) in lines.iter().enumerate() {
            if line.is_empty() {
                return Err(malformed(&attrs_path, k + 1, "empty line"));
            }
            let row: Vec<f64> = line
                .split(',')
                .map(|f| parse_f64(&attrs_path, k + 1, f))
                .collect::<Result<_>>()?;
            let dim = *expected.get_or_insert(row.len());
            if row.len() != dim {
                return Err(Error::RaggedAttributes {
                    line: k + 1,
                    got: row.len(),
                    expected: dim,
                });
            }
            rows.push(row);
        }
        Some(rows)
    } else {
        None
    };

    // Class labels, one per graph, re-indexed to 0..K−1.
    let classes_path = layout.file("graph_labels");
    let class_lines = read_trimmed_lines(&classes_path)?;
    if class_lines.len() != graph_count {
        return Err(Error::InconsistentIndicator(format!(
            "{} class labels for {graph_count} graphs",
            class_lines.len()
        )));
    }
    let mut raw_classes = Vec::with_capacity(graph_count);
    for (k, line) in class_lines.iter().enumerate() {
        if line.is_empty() {
            return Err(malformed(&classes_path, k + 1, "empty line"));
        }
        raw_classes.push(parse_i64(&classes_path, k + 1, line)?);
    }
    let class_set: Vec<i64> = raw_classes
        .iter()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let class_index: BTreeMap<i64, i64> = class_set
        .iter()
        .enumerate()
        .map(|(ix, &v)| (v, ix as i64))
        .collect();
    let class_labels: Vec<i64> = raw_classes.iter().map(|v| class_index[v]).collect();

    // Assemble per-graph node slices and graphs.
    let mut graphs = Vec::with_capacity(graph_count);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); graph_count];
    for (global, &g) in graph_of.iter().enumerate() {
        members[g].push(global);
    }
    for g in 0..graph_count {
        let edges: Vec<(usize, usize, f64)> = edge_sets[g]
            .iter()
            .map(|&(i, j)| (i, j, 1.0))
            .collect();
        let labels = node_labels
            .as_ref()
            .map(|all| members[g].iter().map(|&k| all[k]).collect());
        let attrs = node_attrs
            .as_ref()
            .map(|all| members[g].iter().map(|&k| all[k].clone()).collect());
        graphs.push(Graph::with_attributes(
            nodes_per_graph[g],
            edges,
            labels,
            attrs,
        )?);
    }
    GraphDataset::new(graphs, class_labels, alphabet)
}

/// On-disk representation for Gram matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GramFormat {
    Csv,
    Binary,
}

const GRAM_MAGIC: &[u8; 8] = b"RETGKGRM";

/// CSV: the size on the first line, then one row per line with 17
/// significant digits. Binary: magic, u32 size, row-major little-endian
/// f64, bit-exact on round-trip.
pub fn write_gram(gram: &GramMatrix, path: &Path, format: GramFormat) -> Result<()> {
    match format {
        GramFormat::Csv => {
            let mut w = BufWriter::new(File::create(path)?);
            writeln!(w, "{}", gram.len())?;
            for i in 0..gram.len() {
                let row: Vec<String> =
                    gram.row(i).iter().map(|v| format!("{v:.16e}")).collect();
                writeln!(w, "{}", row.join(","))?;
            }
            w.flush()?;
        }
        GramFormat::Binary => {
            let mut w = BufWriter::new(File::create(path)?);
            w.write_all(GRAM_MAGIC)?;
            w.write_all(&(gram.len() as u32).to_le_bytes())?;
            for i in 0..gram.len() {
                for v in gram.row(i) {
                    w.write_all(&v.to_le_bytes())?;
                }
            }
            w.flush()?;
        }
    }
    Ok(())
}

pub fn read_gram(path: &Path, format: GramFormat) -> Result<GramMatrix> {
    match format {
        GramFormat::Csv => {
            let lines = read_trimmed_lines(path)?;
            if lines.is_empty() {
                return Err(malformed(path, 1, "empty gram file"));
            }
            let n = parse_i64(path, 1, &lines[0])? as usize;
            if lines.len() != n + 1 {
                return Err(malformed(
                    path,
                    lines.len(),
                    format!("expected {n} rows after the header"),
                ));
            }
            let mut rows = Vec::with_capacity(n);
            for (k, line) in lines[1..].iter().enumerate() {
                let row: Vec<f64> = line
                    .split(',')
                    .map(|f| parse_f64(path, k + 2, f))
                    .collect::<Result<_>>()?;
                if row.len() != n {
                    return Err(malformed(
                        path,
                        k + 2,
                        format!("expected {n} columns, got {}", row.len()),
                    ));
                }
                rows.push(row);
            }
            Ok(GramMatrix::from_upper(Matrix::from_rows(rows)))
        }
        GramFormat::Binary => {
            let mut r = BufReader::new(File::open(path).map_err(|e| {
                if e.kind() == std::io::ErrorKind::NotFound {
                    Error::MissingFile(path.to_path_buf())
                } else {
                    Error::Io(e)
                }
            })?);
            let mut magic = [0u8; 8];
            r.read_exact(&mut magic)?;
            if &magic != GRAM_MAGIC {
                return Err(malformed(path, 0, "bad magic for gram file"));
            }
            let mut u32buf = [0u8; 4];
            r.read_exact(&mut u32buf)?;
            let n = u32::from_le_bytes(u32buf) as usize;
            let mut m = Matrix::zeros(n, n);
            let mut f64buf = [0u8; 8];
            for i in 0..n {
                for j in 0..n {
                    r.read_exact(&mut f64buf)?;
                    m[(i, j)] = f64::from_le_bytes(f64buf);
                }
            }
            Ok(GramMatrix::from_upper(m))
        }
    }
}

/// One CSV for the whole dataset: graph_id, node_id, then the S return
/// probabilities. An empty dataset produces only the header.
pub fn write_rpf(rpfs: &[RpfMatrix], steps: usize, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let header: Vec<String> = (1..=steps).map(|s| format!("s{s}")).collect();
    writeln!(w, "graph_id,node_id,{}", header.join(","))?;
    for (g, rpf) in rpfs.iter().enumerate() {
        assert_eq!(rpf.steps(), steps, "rpf step count mismatch");
        for i in 0..rpf.node_count() {
            let values: Vec<String> = rpf.row(i).iter().map(ToString::to_string).collect();
            writeln!(w, "{g},{i},{}", values.join(","))?;
        }
    }
    w.flush()?;
    Ok(())
}

//! Directed/undirected graph representation and edge-list file I/O.
//!
//! Undirected graphs are stored as symmetric arc pairs; `is_symmetric` is a
//! flag, not a separate type, so one engine serves both the directed update
//! rules and the undirected constructions. Self-loops and multi-arcs are
//! rejected at construction and at load time.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// An immutable graph: vertex count, arc set, symmetry flag, vertex labels.
///
/// Adjacency lists are precomputed with neighbors in ascending index order;
/// every engine sums neighbors in that order, which makes runs bitwise
/// reproducible and preserves exact ties between structurally equal vertices.
#[derive(Debug, Clone)]
pub struct Graph {
    num_vertices: usize,
    arcs: Vec<(usize, usize)>,
    is_symmetric: bool,
    labels: Vec<String>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.num_vertices == other.num_vertices
            && self.arcs == other.arcs
            && self.is_symmetric == other.is_symmetric
            && self.labels == other.labels
    }
}

impl Eq for Graph {}

impl Graph {
    /// Builds a directed graph from an arc list. Labels default to the
    /// decimal vertex index when `labels` is `None`.
    pub fn directed(
        num_vertices: usize,
        arcs: Vec<(usize, usize)>,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        Self::build(num_vertices, arcs, false, labels)
    }

    /// Builds an undirected graph from a list of edges `{i, j}`; each edge is
    /// stored as the symmetric arc pair `(i, j)`, `(j, i)`.
    pub fn undirected(
        num_vertices: usize,
        edges: Vec<(usize, usize)>,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        let mut arcs = Vec::with_capacity(edges.len() * 2);
        for (i, j) in edges {
            arcs.push((i, j));
            arcs.push((j, i));
        }
        Self::build(num_vertices, arcs, true, labels)
    }

    fn build(
        num_vertices: usize,
        mut arcs: Vec<(usize, usize)>,
        is_symmetric: bool,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        for &(i, j) in &arcs {
            if i >= num_vertices || j >= num_vertices {
                return Err(Error::InvalidParameter(format!(
                    "arc ({i}, {j}) out of range for {num_vertices} vertices"
                )));
            }
            if i == j {
                return Err(Error::InvalidParameter(format!("self-loop at vertex {i}")));
            }
        }
        arcs.sort_unstable();
        let before = arcs.len();
        arcs.dedup();
        if arcs.len() != before {
            return Err(Error::InvalidParameter("duplicate arc".into()));
        }
        if is_symmetric {
            let set: HashSet<(usize, usize)> = arcs.iter().copied().collect();
            for &(i, j) in &arcs {
                if !set.contains(&(j, i)) {
                    return Err(Error::InvalidParameter(format!(
                        "symmetric graph missing reverse arc ({j}, {i})"
                    )));
                }
            }
        }
        let labels = match labels {
            Some(l) => {
                if l.len() != num_vertices {
                    return Err(Error::InvalidParameter(format!(
                        "{} labels for {} vertices",
                        l.len(),
                        num_vertices
                    )));
                }
                l
            }
            None => (0..num_vertices).map(|i| i.to_string()).collect(),
        };
        let unique: HashSet<&String> = labels.iter().collect();
        if unique.len() != labels.len() {
            return Err(Error::InvalidParameter("labels are not unique".into()));
        }

        let mut out_adj = vec![Vec::new(); num_vertices];
        let mut in_adj = vec![Vec::new(); num_vertices];
        for &(i, j) in &arcs {
            out_adj[i].push(j);
            in_adj[j].push(i);
        }
        // arcs are sorted, so out_adj is ascending already; in_adj needs it.
        for list in &mut in_adj {
            list.sort_unstable();
        }

        Ok(Graph {
            num_vertices,
            arcs,
            is_symmetric,
            labels,
            out_adj,
            in_adj,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    /// Ordered arc set (sorted, deduplicated).
    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_symmetric
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Out-neighbors of `v` in ascending index order.
    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out_adj[v]
    }

    /// In-neighbors of `v` in ascending index order.
    pub fn in_neighbors(&self, v: usize) -> &[usize] {
        &self.in_adj[v]
    }

    /// Degree of `v` on a symmetric graph.
    pub fn degree(&self, v: usize) -> usize {
        self.out_adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.num_vertices)
            .map(|v| self.degree(v))
            .max()
            .unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        (0..self.num_vertices)
            .map(|v| self.degree(v))
            .min()
            .unwrap_or(0)
    }

    /// Number of undirected edges on a symmetric graph.
    pub fn edge_count(&self) -> usize {
        debug_assert!(self.is_symmetric);
        self.arcs.len() / 2
    }

    /// Undirected edges as `(i, j)` with `i < j` (symmetric graphs).
    pub fn undirected_edges(&self) -> Vec<(usize, usize)> {
        self.arcs.iter().copied().filter(|&(i, j)| i < j).collect()
    }

    /// Connected components (undirected sense), each sorted ascending, ordered
    /// by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.num_vertices];
        let mut components = Vec::new();
        for start in 0..self.num_vertices {
            if seen[start] {
                continue;
            }
            let mut stack = vec![start];
            seen[start] = true;
            let mut comp = Vec::new();
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &u in self.out_adj[v].iter().chain(self.in_adj[v].iter()) {
                    if !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
            comp.sort_unstable();
            components.push(comp);
        }
        components
    }

    /// Serializes to the edge-list text format: line 1 `N M directed|undirected`,
    /// then `M` lines `i j` (one per undirected edge when `undirected`).
    pub fn to_edge_list(&self) -> String {
        let mut s = String::new();
        if self.is_symmetric {
            let edges = self.undirected_edges();
            let _ = writeln!(s, "{} {} undirected", self.num_vertices, edges.len());
            for (i, j) in edges {
                let _ = writeln!(s, "{i} {j}");
            }
        } else {
            let _ = writeln!(s, "{} {} directed", self.num_vertices, self.arcs.len());
            for &(i, j) in &self.arcs {
                let _ = writeln!(s, "{i} {j}");
            }
        }
        s
    }

    /// Companion label file: one `index<TAB>label` line per vertex.
    pub fn to_label_file(&self) -> String {
        let mut s = String::new();
        for (i, l) in self.labels.iter().enumerate() {
            let _ = writeln!(s, "{i}\t{l}");
        }
        s
    }

    /// Parses the edge-list format produced by [`Graph::to_edge_list`].
    pub fn from_edge_list(text: &str, labels: Option<Vec<String>>) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty file".into(),
        })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected `N M directed|undirected`, got `{header}`"),
            });
        }
        let n: usize = fields[0].parse().map_err(|_| Error::Parse {
            line: 1,
            msg: format!("bad vertex count `{}`", fields[0]),
        })?;
        let m: usize = fields[1].parse().map_err(|_| Error::Parse {
            line: 1,
            msg: format!("bad arc count `{}`", fields[1]),
        })?;
        let directed = match fields[2] {
            "directed" => true,
            "undirected" => false,
            other => {
                return Err(Error::Parse {
                    line: 1,
                    msg: format!("expected `directed` or `undirected`, got `{other}`"),
                })
            }
        };
        let mut pairs = Vec::with_capacity(m);
        for (idx, line) in lines {
            let line_no = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let (a, b) = match (it.next(), it.next(), it.next()) {
                (Some(a), Some(b), None) => (a, b),
                _ => {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("expected `i j`, got `{line}`"),
                    })
                }
            };
            let i: usize = a.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad endpoint `{a}`"),
            })?;
            let j: usize = b.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad endpoint `{b}`"),
            })?;
            if i >= n || j >= n {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("arc endpoint ({i}, {j}) out of range for {n} vertices"),
                });
            }
            pairs.push((i, j));
        }
        if pairs.len() != m {
            return Err(Error::Parse {
                line: 1,
                msg: format!("header declares {m} lines, found {}", pairs.len()),
            });
        }
        if directed {
            Graph::directed(n, pairs, labels)
        } else {
            Graph::undirected(n, pairs, labels)
        }
    }

    /// Parses a companion label file (`index<TAB>label` per line).
    pub fn parse_label_file(text: &str, num_vertices: usize) -> Result<Vec<String>> {
        let mut labels = vec![None; num_vertices];
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let (i, label) = line.split_once('\t').ok_or(Error::Parse {
                line: line_no,
                msg: "expected `index<TAB>label`".into(),
            })?;
            let i: usize = i.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad index `{i}`"),
            })?;
            if i >= num_vertices {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("label index {i} out of range"),
                });
            }
            labels[i] = Some(label.to_string());
        }
        labels
            .into_iter()
            .enumerate()
            .map(|(i, l)| {
                l.ok_or(Error::Parse {
                    line: 1,
                    msg: format!("missing label for vertex {i}"),
                })
            })
            .collect()
    }

    /// Writes the edge list to `path` and labels to `path` + `.labels`.
    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_edge_list())?;
        fs::write(label_path(path), self.to_label_file())?;
        Ok(())
    }

    /// Loads an edge list from `path`, picking up `path` + `.labels` when present.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let headerless = Self::from_edge_list(&text, None)?;
        let lp = label_path(path);
        if lp.exists() {
            let ltext = fs::read_to_string(&lp)?;
            let labels = Self::parse_label_file(&ltext, headerless.num_vertices())?;
            Self::from_edge_list(&text, Some(labels))
        } else {
            Ok(headerless)
        }
    }
}

/// Companion label path for a graph file: `<path>.labels`.
pub fn label_path(path: &Path) -> std::path::PathBuf {
    let mut os = path.as_os_str().to_os_string();
    os.push(".labels");
    std::path::PathBuf::from(os)
}

//! Directed graphs in compressed adjacency form, read from DIMACS
//! shortest-path files or a plain edge-list format.
//!
//! Edge list: `#` starts a comment, the first data line is
//! `<nodes> <edges>`, every following line `<from> <to> <weight>` with
//! 0-based node ids. DIMACS `.gr` files use `c` comment lines, one
//! `p sp <nodes> <arcs>` line and 1-based `a <from> <to> <weight>` lines.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use clap::ValueEnum;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GraphFormat {
    /// DIMACS shortest-path format (`.gr`).
    Dimacs,
    /// Whitespace-separated 0-based edge list.
    Edges,
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("header declares {declared} edges but the file contains {found}")]
    EdgeCountMismatch { declared: usize, found: usize },
    #[error("edge ({from}, {to}) references a node outside 0..{nodes}")]
    NodeOutOfRange { from: u32, to: u32, nodes: usize },
    #[error("missing `p sp` header line")]
    MissingHeader,
}

/// Compact adjacency: outgoing edges of node `v` live in
/// `targets[offsets[v]..offsets[v + 1]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<u32>,
}

impl Graph {
    pub fn from_edges(num_nodes: usize, edges: &[(u32, u32, u32)]) -> Result<Graph, GraphError> {
        for &(from, to, _) in edges {
            if from as usize >= num_nodes || to as usize >= num_nodes {
                return Err(GraphError::NodeOutOfRange {
                    from,
                    to,
                    nodes: num_nodes,
                });
            }
        }
        let mut offsets = vec![0usize; num_nodes + 1];
        for &(from, _, _) in edges {
            offsets[from as usize + 1] += 1;
        }
        for i in 1..offsets.len() {
            offsets[i] += offsets[i - 1];
        }
        let mut targets = vec![0u32; edges.len()];
        let mut weights = vec![0u32; edges.len()];
        let mut cursor = offsets.clone();
        for &(from, to, w) in edges {
            let slot = cursor[from as usize];
            targets[slot] = to;
            weights[slot] = w;
            cursor[from as usize] += 1;
        }
        Ok(Graph {
            offsets,
            targets,
            weights,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn num_edges(&self) -> usize {
        self.targets.len()
    }

    /// Outgoing `(target, weight)` pairs of `v`.
    pub fn neighbors(&self, v: u32) -> impl Iterator<Item = (u32, u32)> + '_ {
        let range = self.offsets[v as usize]..self.offsets[v as usize + 1];
        self.targets[range.clone()]
            .iter()
            .copied()
            .zip(self.weights[range].iter().copied())
    }

    pub fn edges(&self) -> Vec<(u32, u32, u32)> {
        (0..self.num_nodes() as u32)
            .flat_map(|v| self.neighbors(v).map(move |(t, w)| (v, t, w)))
            .collect()
    }
}

pub fn load_graph<P: AsRef<Path>>(path: P, format: GraphFormat) -> Result<Graph, GraphError> {
    let reader = BufReader::new(File::open(path)?);
    match format {
        GraphFormat::Dimacs => read_dimacs(reader),
        GraphFormat::Edges => read_edge_list(reader),
    }
}

fn parse_field<T: std::str::FromStr>(
    field: Option<&str>,
    line: usize,
    what: &str,
) -> Result<T, GraphError> {
    field
        .ok_or_else(|| GraphError::Parse {
            line,
            message: format!("missing {what}"),
        })?
        .parse()
        .map_err(|_| GraphError::Parse {
            line,
            message: format!("malformed {what}"),
        })
}

pub fn read_dimacs<R: BufRead>(reader: R) -> Result<Graph, GraphError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges: Vec<(u32, u32, u32)> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let mut fields = line.split_ascii_whitespace();
        match fields.next() {
            None | Some("c") => continue,
            Some("p") => {
                if fields.next() != Some("sp") {
                    return Err(GraphError::Parse {
                        line: lineno,
                        message: "expected `p sp <nodes> <arcs>`".into(),
                    });
                }
                let nodes: usize = parse_field(fields.next(), lineno, "node count")?;
                let arcs: usize = parse_field(fields.next(), lineno, "arc count")?;
                header = Some((nodes, arcs));
                edges.reserve(arcs);
            }
            Some("a") => {
                let (nodes, _) = header.ok_or(GraphError::MissingHeader)?;
                let from: usize = parse_field(fields.next(), lineno, "source node")?;
                let to: usize = parse_field(fields.next(), lineno, "target node")?;
                let weight: u32 = parse_field(fields.next(), lineno, "weight")?;
                if from < 1 || from > nodes || to < 1 || to > nodes {
                    return Err(GraphError::Parse {
                        line: lineno,
                        message: format!("arc ({from}, {to}) outside 1..={nodes}"),
                    });
                }
                edges.push((from as u32 - 1, to as u32 - 1, weight));
            }
            Some(other) => {
                return Err(GraphError::Parse {
                    line: lineno,
                    message: format!("unknown line type {other:?}"),
                })
            }
        }
    }
    let (nodes, arcs) = header.ok_or(GraphError::MissingHeader)?;
    if edges.len() != arcs {
        return Err(GraphError::EdgeCountMismatch {
            declared: arcs,
            found: edges.len(),
        });
    }
    Graph::from_edges(nodes, &edges)
}

pub fn read_edge_list<R: BufRead>(reader: R) -> Result<Graph, GraphError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges: Vec<(u32, u32, u32)> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let data = line.split('#').next().unwrap_or("");
        let mut fields = data.split_ascii_whitespace().peekable();
        if fields.peek().is_none() {
            continue;
        }
        if header.is_none() {
            let nodes: usize = parse_field(fields.next(), lineno, "node count")?;
            let count: usize = parse_field(fields.next(), lineno, "edge count")?;
            header = Some((nodes, count));
            edges.reserve(count);
        } else {
            let from: u32 = parse_field(fields.next(), lineno, "source node")?;
            let to: u32 = parse_field(fields.next(), lineno, "target node")?;
            let weight: u32 = parse_field(fields.next(), lineno, "weight")?;
            edges.push((from, to, weight));
        }
    }
    let (nodes, count) = header.ok_or(GraphError::MissingHeader)?;
    if edges.len() != count {
        return Err(GraphError::EdgeCountMismatch {
            declared: count,
            found: edges.len(),
        });
    }
    Graph::from_edges(nodes, &edges)
}

pub fn write_edge_list<W: Write>(mut w: W, g: &Graph) -> io::Result<()> {
    writeln!(w, "{} {}", g.num_nodes(), g.num_edges())?;
    for (from, to, weight) in g.edges() {
        writeln!(w, "{from} {to} {weight}")?;
    }
    Ok(())
}

pub fn write_dimacs<W: Write>(mut w: W, g: &Graph) -> io::Result<()> {
    writeln!(w, "p sp {} {}", g.num_nodes(), g.num_edges())?;
    for (from, to, weight) in g.edges() {
        writeln!(w, "a {} {} {weight}", from + 1, to + 1)?;
    }
    Ok(())
}

pub fn write_graph_file<P: AsRef<Path>>(
    path: P,
    format: GraphFormat,
    g: &Graph,
) -> io::Result<()> {
    let w = BufWriter::new(File::create(path)?);
    match format {
        GraphFormat::Dimacs => write_dimacs(w, g),
        GraphFormat::Edges => write_edge_list(w, g),
    }
}

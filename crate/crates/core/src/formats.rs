//! Text and JSON formats at the I/O boundary: instance and assignment
//! documents, PACE `.td` decompositions, edge lists and size lists.
//!
//! Every parser here accepts untrusted input and must return an error, never
//! panic or allocate proportionally to a header value.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::decomposition::TreeDecomposition;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::model::{profile, Assignment, SchellingInstance};
use crate::rational::Rational;

/// Upper bound on vertex counts accepted from files.
pub const MAX_PARSED_VERTICES: usize = 1 << 20;

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn check_vertex_count(n: usize) -> Result<()> {
    if n > MAX_PARSED_VERTICES {
        return Err(parse_err(format!("vertex count {n} exceeds limit {MAX_PARSED_VERTICES}")));
    }
    Ok(())
}

/// `{"vertices": n, "edges": [[u,v],...], "type_counts": [...], "names": [...]?}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
    pub type_counts: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
}

impl InstanceFile {
    /// Canonical form: edges as sorted `u < v` pairs.
    pub fn from_instance(instance: &SchellingInstance, names: Option<Vec<String>>) -> Self {
        InstanceFile {
            vertices: instance.vertex_count(),
            edges: instance.graph().edges().iter().map(|&(u, v)| [u, v]).collect(),
            type_counts: instance.type_counts().to_vec(),
            names,
        }
    }

    pub fn to_instance(&self) -> Result<SchellingInstance> {
        check_vertex_count(self.vertices)?;
        if let Some(names) = &self.names {
            if names.len() != self.vertices {
                return Err(parse_err(format!("{} names for {} vertices", names.len(), self.vertices)));
            }
            let mut sorted: Vec<&String> = names.iter().collect();
            sorted.sort();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(parse_err("vertex names must be unique"));
            }
        }
        let graph = Graph::new(self.vertices, self.edges.iter().map(|&[u, v]| (u, v)))?;
        SchellingInstance::new(graph, self.type_counts.clone())
    }

    pub fn to_canonical_string(&self) -> String {
        serde_json::to_string(self).expect("instance serializes")
    }
}

/// Parses an instance document, returning the instance and optional names.
pub fn parse_instance(text: &str) -> Result<(SchellingInstance, Option<Vec<String>>)> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
    let instance = file.to_instance()?;
    Ok((instance, file.names))
}

pub fn write_instance(instance: &SchellingInstance, names: Option<&[String]>) -> String {
    InstanceFile::from_instance(instance, names.map(<[String]>::to_vec)).to_canonical_string()
}

/// `{"placement": {"<vertex>": type or null, ...}, "sw": "p/q"}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AssignmentFile {
    pub placement: BTreeMap<usize, Option<usize>>,
    pub sw: Rational,
}

#[derive(Deserialize)]
struct RawAssignmentFile {
    placement: BTreeMap<String, Option<usize>>,
    sw: String,
}

impl AssignmentFile {
    pub fn new(instance: &SchellingInstance, assignment: &Assignment) -> Result<Self> {
        let sw = profile(instance, assignment)?.sw_total;
        let placement = assignment.placement().iter().copied().enumerate().collect();
        Ok(AssignmentFile { placement, sw })
    }

    pub fn to_canonical_string(&self) -> String {
        serde_json::to_string(self).expect("assignment serializes")
    }

    pub fn to_pretty_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("assignment serializes")
    }
}

/// Parses an assignment document against `instance`. Keys are vertex indices
/// or, when `names` is given, vertex names; omitted vertices are empty. The
/// recorded `sw` must match the placement exactly.
pub fn parse_assignment(text: &str, instance: &SchellingInstance, names: Option<&[String]>) -> Result<Assignment> {
    let raw: RawAssignmentFile = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
    let n = instance.vertex_count();
    let mut placement = vec![None; n];
    let mut assigned = vec![false; n];
    for (key, t) in raw.placement {
        let v = match key.parse::<usize>() {
            Ok(v) => v,
            Err(_) => names
                .and_then(|ns| ns.iter().position(|name| *name == key))
                .ok_or_else(|| parse_err(format!("unknown vertex key {key:?}")))?,
        };
        if v >= n {
            return Err(parse_err(format!("vertex {v} out of range")));
        }
        if assigned[v] {
            return Err(parse_err(format!("vertex {v} listed twice")));
        }
        assigned[v] = true;
        placement[v] = t;
    }
    let assignment = Assignment::new(placement);
    let recorded: Rational = raw.sw.parse()?;
    let actual = profile(instance, &assignment)?.sw_total;
    if recorded != actual {
        return Err(Error::InvalidAssignment(format!("recorded sw {recorded} but placement yields {actual}")));
    }
    Ok(assignment)
}

/// A decomposition read from PACE `.td` text, with the declared vertex count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TdFile {
    pub decomposition: TreeDecomposition,
    pub vertex_count: usize,
}

/// Parses PACE `.td`: `s td <bags> <width+1> <vertices>`, then `b <id> <v...>`
/// lines and tree edges `<a> <b>`, all 1-based. `c` lines are comments.
/// The first bag becomes the root.
pub fn parse_td(text: &str) -> Result<TdFile> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut bags: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut edges = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let at = |msg: &str| parse_err(format!("line {}: {msg}", lineno + 1));
        let mut tokens = line.split_whitespace();
        let Some(first) = tokens.next() else { continue };
        let nums = |tokens: std::str::SplitWhitespace<'_>| -> Result<Vec<usize>> {
            tokens.map(|t| t.parse::<usize>().map_err(|_| at(&format!("bad integer {t:?}")))).collect()
        };
        match first {
            "c" => continue,
            "s" => {
                if header.is_some() {
                    return Err(at("duplicate header"));
                }
                if tokens.next() != Some("td") {
                    return Err(at("expected `s td`"));
                }
                let vals = nums(tokens)?;
                let [b, w, n] = vals[..] else { return Err(at("header needs three integers")) };
                check_vertex_count(n)?;
                header = Some((b, w, n));
            }
            "b" => {
                let (count, _, n) = header.ok_or_else(|| at("bag before header"))?;
                let vals = nums(tokens)?;
                let (&id, verts) = vals.split_first().ok_or_else(|| at("bag without id"))?;
                if id == 0 || id > count {
                    return Err(at(&format!("bag id {id} out of range")));
                }
                if verts.iter().any(|&v| v == 0 || v > n) {
                    return Err(at("bag vertex out of range"));
                }
                if bags.insert(id, verts.iter().map(|v| v - 1).collect()).is_some() {
                    return Err(at(&format!("bag {id} declared twice")));
                }
            }
            _ => {
                let (count, _, _) = header.ok_or_else(|| at("edge before header"))?;
                let a: usize = first.parse().map_err(|_| at(&format!("unexpected token {first:?}")))?;
                let rest = nums(tokens)?;
                let [b] = rest[..] else { return Err(at("tree edge needs two bag ids")) };
                if a == 0 || b == 0 || a > count || b > count {
                    return Err(at("tree edge references unknown bag"));
                }
                edges.push((a - 1, b - 1));
            }
        }
    }
    let (count, declared_size, n) = header.ok_or_else(|| parse_err("missing `s td` header"))?;
    if bags.len() != count {
        return Err(parse_err(format!("header declares {count} bags, found {}", bags.len())));
    }
    if edges.len() + 1 != count {
        return Err(parse_err(format!("{} tree edges for {count} bags; not a tree", edges.len())));
    }
    let bag_list: Vec<Vec<usize>> = bags.into_values().collect();
    let td = TreeDecomposition::new(bag_list, edges, 0);
    let max_bag = td.bags.iter().map(Vec::len).max().unwrap_or(0);
    if max_bag != declared_size {
        return Err(parse_err(format!("header declares max bag size {declared_size}, found {max_bag}")));
    }
    Ok(TdFile { decomposition: td, vertex_count: n })
}

pub fn write_td(td: &TreeDecomposition, vertex_count: usize) -> String {
    let max_bag = td.bags.iter().map(Vec::len).max().unwrap_or(0);
    let mut out = format!("s td {} {} {}\n", td.bags.len(), max_bag, vertex_count);
    // Emit the root first so that re-reading keeps it as the root.
    let mut ids: Vec<usize> = (0..td.bags.len()).collect();
    ids.swap(0, td.root);
    let mut new_id = vec![0; td.bags.len()];
    for (i, &b) in ids.iter().enumerate() {
        new_id[b] = i + 1;
    }
    for &b in &ids {
        out.push_str(&format!("b {}", new_id[b]));
        for v in &td.bags[b] {
            out.push_str(&format!(" {}", v + 1));
        }
        out.push('\n');
    }
    for &(a, b) in &td.tree_edges {
        out.push_str(&format!("{} {}\n", new_id[a], new_id[b]));
    }
    out
}

/// Edge list text: the first data line holds the vertex count, every further
/// line one 0-based edge `u v`. Blank lines and lines starting with `#` are skipped.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut lines =
        text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (_, head) = lines.next().ok_or_else(|| parse_err("empty edge list"))?;
    let n: usize = head.parse().map_err(|_| parse_err(format!("bad vertex count {head:?}")))?;
    check_vertex_count(n)?;
    let mut edges = Vec::new();
    for (lineno, line) in lines {
        let vals: Vec<usize> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| parse_err(format!("line {lineno}: bad integer {t:?}"))))
            .collect::<Result<_>>()?;
        let [u, v] = vals[..] else { return Err(parse_err(format!("line {lineno}: expected `u v`"))) };
        edges.push((u, v));
    }
    Graph::new(n, edges)
}

pub fn write_edge_list(graph: &Graph) -> String {
    let mut out = format!("{}\n", graph.vertex_count());
    for &(u, v) in graph.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

/// Comma- or whitespace-separated positive integers.
pub fn parse_sizes(text: &str) -> Result<Vec<usize>> {
    let sizes: Vec<usize> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<usize>().map_err(|_| parse_err(format!("bad size {t:?}"))))
        .collect::<Result<_>>()?;
    if sizes.is_empty() {
        return Err(parse_err("empty size list"));
    }
    if sizes.contains(&0) {
        return Err(parse_err("sizes must be positive"));
    }
    Ok(sizes)
}

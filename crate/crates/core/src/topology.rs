//! Neighborhood graphs: regular lattices, incidence (edge-marker) graphs of a
//! complete graph, distance-threshold networks, and arbitrary edge lists.
//!
//! Adjacency is stored in compressed sparse row form. Every constructor
//! enforces symmetry, absence of self-loops, and sorted duplicate-free
//! neighbor lists.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lattice neighborhood structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeKind {
    /// Horizontal pair `±(1, 0)`.
    Two,
    /// Cardinal directions `±(0, 1), ±(1, 0)`.
    Four,
    /// Cardinal directions plus diagonals `±(1, −1), ±(1, 1)`.
    Eight,
}

impl LatticeKind {
    /// Offsets `(du, dv)` with `u` the column (horizontal) coordinate.
    pub fn offsets(self) -> &'static [(i64, i64)] {
        match self {
            LatticeKind::Two => &[(1, 0), (-1, 0)],
            LatticeKind::Four => &[(0, 1), (0, -1), (1, 0), (-1, 0)],
            LatticeKind::Eight => &[
                (0, 1),
                (0, -1),
                (1, 0),
                (-1, 0),
                (1, -1),
                (-1, 1),
                (1, 1),
                (-1, -1),
            ],
        }
    }
}

impl FromStr for LatticeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "two" | "2" | "two-nearest" | "two_nearest" => Ok(LatticeKind::Two),
            "four" | "4" | "four-nearest" | "four_nearest" => Ok(LatticeKind::Four),
            "eight" | "8" | "eight-nearest" | "eight_nearest" => Ok(LatticeKind::Eight),
            other => Err(Error::InvalidLatticeKind(other.to_string())),
        }
    }
}

impl fmt::Display for LatticeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LatticeKind::Two => "two",
            LatticeKind::Four => "four",
            LatticeKind::Eight => "eight",
        })
    }
}

/// Dimensions of a graph produced by [`build_lattice`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeShape {
    pub rows: usize,
    pub cols: usize,
    pub kind: LatticeKind,
}

/// Per-site metadata. A graph carries either coordinates for every site,
/// vertex pairs for every site, or neither.
#[derive(Debug, Clone, PartialEq)]
pub enum SiteLabels {
    None,
    /// `(u, v)` lattice coordinates; `u` is horizontal.
    Coords(Vec<(f64, f64)>),
    /// Edge markers `{v1, v2}` with `v1 < v2`.
    VertexPairs(Vec<(usize, usize)>),
}

/// View of one site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Site {
    pub index: usize,
    pub coords: Option<(f64, f64)>,
    pub vertex_pair: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeighborhoodGraph {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    labels: SiteLabels,
    lattice: Option<LatticeShape>,
    vertices: Option<usize>,
}

impl NeighborhoodGraph {
    /// Builds a graph from per-site neighbor lists, sorting them and
    /// validating symmetry.
    pub fn from_adjacency(adjacency: Vec<Vec<usize>>) -> Result<Self> {
        let n = adjacency.len();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut neighbors = Vec::new();
        offsets.push(0);
        for (i, mut list) in adjacency.into_iter().enumerate() {
            list.sort_unstable();
            for w in list.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::InvalidGraph(format!(
                        "site {i} lists neighbor {} twice",
                        w[0]
                    )));
                }
            }
            for &j in &list {
                if j >= n {
                    return Err(Error::InvalidGraph(format!(
                        "site {i} has neighbor {j} outside 0..{n}"
                    )));
                }
                if j == i {
                    return Err(Error::InvalidGraph(format!("site {i} is its own neighbor")));
                }
            }
            neighbors.extend_from_slice(&list);
            offsets.push(neighbors.len());
        }
        let graph = Self {
            offsets,
            neighbors,
            labels: SiteLabels::None,
            lattice: None,
            vertices: None,
        };
        graph.check_symmetry()?;
        Ok(graph)
    }

    /// Builds a graph on `n` sites from undirected edges. Duplicate edges
    /// (in either orientation) are merged.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({i}, {j}) outside 0..{n}"
                )));
            }
            if i == j {
                return Err(Error::InvalidGraph(format!("self-loop at site {i}")));
            }
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Self::from_adjacency(adjacency)
    }

    /// Attaches site metadata; `labels` must cover every site.
    pub fn with_labels(mut self, labels: SiteLabels) -> Result<Self> {
        let len = match &labels {
            SiteLabels::None => self.n(),
            SiteLabels::Coords(c) => c.len(),
            SiteLabels::VertexPairs(p) => p.len(),
        };
        if len != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                actual: len,
            });
        }
        if let SiteLabels::VertexPairs(pairs) = &labels {
            if let Some(&(a, b)) = pairs.iter().find(|(a, b)| a == b) {
                return Err(Error::InvalidGraph(format!(
                    "vertex pair ({a}, {b}) is not an edge marker"
                )));
            }
        }
        self.labels = labels;
        Ok(self)
    }

    fn check_symmetry(&self) -> Result<()> {
        for i in 0..self.n() {
            for &j in self.neighbors(i) {
                if self.neighbors(j).binary_search(&i).is_err() {
                    return Err(Error::InvalidGraph(format!(
                        "asymmetric adjacency: {j} is a neighbor of {i} but not vice versa"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n()).map(|i| self.degree(i)).max().unwrap_or(0)
    }

    pub fn is_adjacent(&self, i: usize, j: usize) -> bool {
        self.neighbors(i).binary_search(&j).is_ok()
    }

    /// Number of unordered adjacent pairs.
    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    /// Unordered adjacent pairs `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |i| {
            self.neighbors(i)
                .iter()
                .copied()
                .filter(move |&j| j > i)
                .map(move |j| (i, j))
        })
    }

    pub fn labels(&self) -> &SiteLabels {
        &self.labels
    }

    pub fn lattice(&self) -> Option<LatticeShape> {
        self.lattice
    }

    /// Vertex count of the underlying complete graph for incidence graphs.
    pub fn incidence_vertices(&self) -> Option<usize> {
        self.vertices
    }

    pub fn coords(&self, i: usize) -> Option<(f64, f64)> {
        match &self.labels {
            SiteLabels::Coords(c) => Some(c[i]),
            _ => None,
        }
    }

    pub fn vertex_pair(&self, i: usize) -> Option<(usize, usize)> {
        match &self.labels {
            SiteLabels::VertexPairs(p) => Some(p[i]),
            _ => None,
        }
    }

    pub fn site(&self, i: usize) -> Site {
        Site {
            index: i,
            coords: self.coords(i),
            vertex_pair: self.vertex_pair(i),
        }
    }

    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        (0..self.n()).map(|i| self.site(i))
    }

    /// Raw CSR arrays `(offsets, neighbors)`.
    pub fn csr(&self) -> (&[usize], &[usize]) {
        (&self.offsets, &self.neighbors)
    }

    /// Dense 0/1 adjacency matrix, row-major.
    pub fn adjacency_matrix(&self) -> Vec<f64> {
        let n = self.n();
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for &j in self.neighbors(i) {
                a[i * n + j] = 1.0;
            }
        }
        a
    }
}

/// Regular `rows × cols` lattice with free boundary. Sites are numbered in
/// row-major order and carry coordinates `(u, v) = (col, row)`.
pub fn build_lattice(rows: usize, cols: usize, kind: LatticeKind) -> Result<NeighborhoodGraph> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidArgument(format!(
            "lattice dimensions must be positive, got {rows}×{cols}"
        )));
    }
    let n = rows * cols;
    let mut adjacency = Vec::with_capacity(n);
    let mut coords = Vec::with_capacity(n);
    for row in 0..rows {
        for col in 0..cols {
            let mut list = Vec::with_capacity(kind.offsets().len());
            for &(du, dv) in kind.offsets() {
                let u = col as i64 + du;
                let v = row as i64 + dv;
                if u >= 0 && v >= 0 && (u as usize) < cols && (v as usize) < rows {
                    list.push(v as usize * cols + u as usize);
                }
            }
            adjacency.push(list);
            coords.push((col as f64, row as f64));
        }
    }
    let mut graph =
        NeighborhoodGraph::from_adjacency(adjacency)?.with_labels(SiteLabels::Coords(coords))?;
    graph.lattice = Some(LatticeShape { rows, cols, kind });
    Ok(graph)
}

/// Index of the edge marker `{a, b}` in the lexicographic enumeration of
/// vertex pairs of `K_V`.
pub fn incidence_index(vertices: usize, a: usize, b: usize) -> usize {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    a * vertices - a * (a + 1) / 2 + (b - a - 1)
}

/// Edge-marker graph of the complete graph on `vertices` vertices: one site
/// per unordered vertex pair, adjacent when the pairs share a vertex.
pub fn build_incidence(vertices: usize) -> Result<NeighborhoodGraph> {
    if vertices < 2 {
        return Err(Error::InvalidArgument(format!(
            "incidence graphs need at least 2 vertices, got {vertices}"
        )));
    }
    let v = vertices;
    let mut pairs = Vec::with_capacity(v * (v - 1) / 2);
    for a in 0..v {
        for b in a + 1..v {
            pairs.push((a, b));
        }
    }
    let mut incident: Vec<Vec<usize>> = vec![Vec::with_capacity(v - 1); v];
    for (idx, &(a, b)) in pairs.iter().enumerate() {
        incident[a].push(idx);
        incident[b].push(idx);
    }
    let adjacency = pairs
        .iter()
        .enumerate()
        .map(|(idx, &(a, b))| {
            incident[a]
                .iter()
                .chain(&incident[b])
                .copied()
                .filter(|&j| j != idx)
                .collect::<Vec<_>>()
        })
        .collect();
    let mut graph = NeighborhoodGraph::from_adjacency(adjacency)?
        .with_labels(SiteLabels::VertexPairs(pairs))?;
    graph.vertices = Some(v);
    Ok(graph)
}

/// Sites `i ≠ j` are adjacent iff `distances[i][j] >= threshold`.
pub fn build_threshold_graph(distances: &[Vec<f64>], threshold: f64) -> Result<NeighborhoodGraph> {
    let n = distances.len();
    for (i, row) in distances.iter().enumerate() {
        if row.len() != n {
            return Err(Error::InvalidGraph(format!(
                "distance matrix row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
        if row[i] != 0.0 {
            return Err(Error::InvalidGraph(format!(
                "distance matrix diagonal entry {i} is {} (expected 0)",
                row[i]
            )));
        }
    }
    let mut adjacency = vec![Vec::new(); n];
    for (i, row) in distances.iter().enumerate() {
        for (j, &d) in row.iter().enumerate() {
            if !d.is_finite() || d < 0.0 {
                return Err(Error::InvalidGraph(format!(
                    "distance ({i}, {j}) = {d} is not a nonnegative number"
                )));
            }
            if d != distances[j][i] {
                return Err(Error::InvalidGraph(format!(
                    "distance matrix not symmetric at ({i}, {j})"
                )));
            }
            if i != j && d >= threshold {
                adjacency[i].push(j);
            }
        }
    }
    NeighborhoodGraph::from_adjacency(adjacency)
}

/// Triangle-completing pairs through site `i` of an incidence graph: for
/// edge marker `{a, b}` and every third vertex `c`, the pair
/// `({a, c}, {b, c})`. Returned as `(j, k)` with `j < k`, ordered by `c`.
/// There are `V − 2` such unordered pairs.
pub fn triangle_pairs(graph: &NeighborhoodGraph, i: usize) -> Result<Vec<(usize, usize)>> {
    let SiteLabels::VertexPairs(pairs) = graph.labels() else {
        return Err(Error::Incompatible(
            "triangle pairs need edge-marker (vertex pair) sites".into(),
        ));
    };
    let (a, b) = pairs[i];
    // Locate the third edge of each triangle among i's neighbors rather than
    // by index arithmetic, so graphs read back from JSON work too.
    let mut by_pair = std::collections::HashMap::with_capacity(graph.degree(i));
    for &j in graph.neighbors(i) {
        let (x, y) = pairs[j];
        by_pair.insert((x.min(y), x.max(y)), j);
    }
    let mut out = Vec::new();
    let mut thirds: Vec<usize> = graph
        .neighbors(i)
        .iter()
        .map(|&j| {
            let (x, y) = pairs[j];
            if x == a || x == b {
                y
            } else {
                x
            }
        })
        .collect();
    thirds.sort_unstable();
    thirds.dedup();
    for c in thirds {
        let ac = by_pair.get(&(a.min(c), a.max(c)));
        let bc = by_pair.get(&(b.min(c), b.max(c)));
        if let (Some(&j), Some(&k)) = (ac, bc) {
            if graph.is_adjacent(j, k) {
                out.push((j.min(k), j.max(k)));
            }
        }
    }
    Ok(out)
}

/// `(unordered, ordered)` sizes of the triangle-pair set through `i`. The
/// ordered count lists `(j, k)` and `(k, j)` separately; on a complete
/// incidence graph it equals `2(V − 2)`.
pub fn triangle_pair_counts(graph: &NeighborhoodGraph, i: usize) -> Result<(usize, usize)> {
    let unordered = triangle_pairs(graph, i)?.len();
    Ok((unordered, 2 * unordered))
}

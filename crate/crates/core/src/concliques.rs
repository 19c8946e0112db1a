//! Conclique covers: partitions of the sites into classes of mutually
//! non-adjacent sites.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::topology::{incidence_index, LatticeKind, NeighborhoodGraph};

/// A partition of sites into `Q` concliques.
///
/// Covers are kept in canonical form: classes are ordered by their smallest
/// member, labels follow that order, and no class is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcliqueCover {
    assignment: Vec<usize>,
    classes: Vec<Vec<usize>>,
}

impl ConcliqueCover {
    /// Canonicalizes arbitrary labels. Unused labels are dropped.
    pub fn from_assignment(labels: &[usize]) -> Self {
        let mut relabel = std::collections::HashMap::new();
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut assignment = Vec::with_capacity(labels.len());
        for (site, &label) in labels.iter().enumerate() {
            let next = classes.len();
            let class = *relabel.entry(label).or_insert(next);
            if class == next {
                classes.push(Vec::new());
            }
            classes[class].push(site);
            assignment.push(class);
        }
        Self {
            assignment,
            classes,
        }
    }

    /// Builds a cover from explicit classes, which must partition `0..n`.
    pub fn from_classes(n: usize, classes: &[Vec<usize>]) -> Result<Self> {
        let mut labels = vec![usize::MAX; n];
        for (c, class) in classes.iter().enumerate() {
            for &s in class {
                if s >= n {
                    return Err(Error::InvalidCover(format!("site {s} outside 0..{n}")));
                }
                if labels[s] != usize::MAX {
                    return Err(Error::InvalidCover(format!("site {s} in two classes")));
                }
                labels[s] = c;
            }
        }
        if let Some(s) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(Error::InvalidCover(format!("site {s} not covered")));
        }
        Ok(Self::from_assignment(&labels))
    }

    /// Number of concliques.
    pub fn q(&self) -> usize {
        self.classes.len()
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self, site: usize) -> usize {
        self.assignment[site]
    }
}

/// Outcome of [`verify_cover`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverCheck {
    Valid,
    /// First adjacent pair `(i, j)`, `i < j`, sharing a class.
    Violation(usize, usize),
}

impl CoverCheck {
    pub fn is_valid(self) -> bool {
        self == CoverCheck::Valid
    }
}

/// Checks that no two adjacent sites share a class. Pairs are scanned in
/// lexicographic order so the reported violation is deterministic.
pub fn verify_cover(graph: &NeighborhoodGraph, cover: &ConcliqueCover) -> Result<CoverCheck> {
    if cover.n() != graph.n() {
        return Err(Error::LengthMismatch {
            expected: graph.n(),
            actual: cover.n(),
        });
    }
    for (i, j) in graph.edges() {
        if cover.assignment[i] == cover.assignment[j] {
            return Ok(CoverCheck::Violation(i, j));
        }
    }
    Ok(CoverCheck::Valid)
}

/// Same as [`verify_cover`] but turns a violation into an error.
pub fn ensure_valid_cover(graph: &NeighborhoodGraph, cover: &ConcliqueCover) -> Result<()> {
    match verify_cover(graph, cover)? {
        CoverCheck::Valid => Ok(()),
        CoverCheck::Violation(i, j) => Err(Error::InvalidCover(format!(
            "adjacent sites {i} and {j} share conclique {}",
            cover.class_of(i)
        ))),
    }
}

/// Upper bound on the number of concliques a greedy coloring needs:
/// `max_i min(d_(n−i+1) + 1, i)` over the ascending degree sequence `d_(·)`.
pub fn delta_n_bound(graph: &NeighborhoodGraph) -> usize {
    let mut degrees: Vec<usize> = (0..graph.n()).map(|i| graph.degree(i)).collect();
    degrees.sort_unstable_by(|a, b| b.cmp(a));
    degrees
        .iter()
        .enumerate()
        .map(|(k, &d)| (d + 1).min(k + 1))
        .max()
        .unwrap_or(0)
}

/// Smallest label not present in `used` (which must be sorted).
fn smallest_free(used: &[usize]) -> usize {
    let mut c = 0;
    for &u in used {
        if u == c {
            c += 1;
        } else if u > c {
            break;
        }
    }
    c
}

/// Welsh-Powell greedy coloring: sites in non-increasing degree order (ties
/// by index), each placed in the lowest class holding none of its neighbors.
pub fn greedy_welsh_powell(graph: &NeighborhoodGraph) -> ConcliqueCover {
    let n = graph.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| graph.degree(b).cmp(&graph.degree(a)).then(a.cmp(&b)));
    let mut color = vec![usize::MAX; n];
    let mut used = Vec::new();
    for &s in &order {
        used.clear();
        used.extend(
            graph
                .neighbors(s)
                .iter()
                .map(|&j| color[j])
                .filter(|&c| c != usize::MAX),
        );
        used.sort_unstable();
        used.dedup();
        color[s] = smallest_free(&used);
    }
    ConcliqueCover::from_assignment(&color)
}

/// DSatur (Brélaz): repeatedly colors the uncolored site with the most
/// distinct neighbor colors, ties broken by larger degree then smaller
/// index, using the smallest feasible color.
pub fn dsatur(graph: &NeighborhoodGraph) -> ConcliqueCover {
    let n = graph.n();
    let mut color = vec![usize::MAX; n];
    // Sorted distinct colors seen among each site's neighbors.
    let mut seen: Vec<Vec<usize>> = vec![Vec::new(); n];
    // Max-heap by (saturation, degree, -index); BTreeSet supports re-keying.
    let key = |sat: usize, i: usize| (sat, graph.degree(i), std::cmp::Reverse(i));
    let mut queue: BTreeSet<(usize, usize, std::cmp::Reverse<usize>)> =
        (0..n).map(|i| key(0, i)).collect();
    while let Some(top) = queue.pop_last() {
        let s = top.2 .0;
        let c = smallest_free(&seen[s]);
        color[s] = c;
        for &j in graph.neighbors(s) {
            if color[j] != usize::MAX {
                continue;
            }
            if let Err(pos) = seen[j].binary_search(&c) {
                let old = key(seen[j].len(), j);
                seen[j].insert(pos, c);
                queue.remove(&old);
                queue.insert(key(seen[j].len(), j));
            }
        }
    }
    ConcliqueCover::from_assignment(&color)
}

/// Closed-form lattice covers: checkerboard for two- and four-nearest
/// neighborhoods, 2×2 blocks for eight-nearest.
pub fn analytic_lattice_cover(
    rows: usize,
    cols: usize,
    kind: LatticeKind,
) -> Result<ConcliqueCover> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidArgument(format!(
            "lattice dimensions must be positive, got {rows}×{cols}"
        )));
    }
    let mut labels = Vec::with_capacity(rows * cols);
    for row in 0..rows {
        for col in 0..cols {
            labels.push(match kind {
                LatticeKind::Two | LatticeKind::Four => (row + col) % 2,
                LatticeKind::Eight => 2 * (row % 2) + col % 2,
            });
        }
    }
    Ok(ConcliqueCover::from_assignment(&labels))
}

/// Minimal cover of the incidence graph of `K_V` by the circle method: each
/// round of a round-robin tournament is a matching, hence a conclique.
/// Yields `2⌈V/2⌉ − 1` classes.
pub fn round_robin_edge_cover(vertices: usize) -> Result<ConcliqueCover> {
    if vertices < 2 {
        return Err(Error::InvalidArgument(format!(
            "round-robin cover needs at least 2 vertices, got {vertices}"
        )));
    }
    // With odd V a dummy player `vertices` sits out one match per round.
    let players = vertices + vertices % 2;
    let rounds = players - 1;
    let n = vertices * (vertices - 1) / 2;
    let mut labels = vec![usize::MAX; n];
    for r in 0..rounds {
        let mut assign = |a: usize, b: usize| {
            if a < vertices && b < vertices {
                labels[incidence_index(vertices, a, b)] = r;
            }
        };
        assign(players - 1, r);
        for k in 1..players / 2 {
            assign((r + k) % rounds, (r + rounds - k) % rounds);
        }
    }
    debug_assert!(labels.iter().all(|&l| l != usize::MAX));
    Ok(ConcliqueCover::from_assignment(&labels))
}

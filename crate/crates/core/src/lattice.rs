//! Coupling graphs and edge colourings used to schedule two-qubit blocks.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Simple undirected graph; edges are stored as `(min, max)` pairs, sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice {
    n_sites: usize,
    edges: Vec<(usize, usize)>,
}

impl Lattice {
    pub fn new(n_sites: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidLattice(format!("self-loop on site {a}")));
            }
            if a.max(b) >= n_sites {
                return Err(Error::InvalidLattice(format!("edge ({a},{b}) outside {n_sites} sites")));
            }
            out.push((a.min(b), a.max(b)));
        }
        out.sort_unstable();
        let before = out.len();
        out.dedup();
        if out.len() != before {
            return Err(Error::InvalidLattice("duplicate edge".into()));
        }
        Ok(Lattice { n_sites, edges: out })
    }

    /// Open chain `0 - 1 - … - (n-1)`.
    pub fn chain(n: usize) -> Result<Self> {
        Lattice::new(n, (1..n).map(|i| (i - 1, i)))
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n_sites];
        for &(a, b) in &self.edges {
            d[a] += 1;
            d[b] += 1;
        }
        d
    }

    /// Maximum degree `z`.
    pub fn coordination(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.binary_search(&(a.min(b), a.max(b))).is_ok()
    }

    pub fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n_sites];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        if self.n_sites == 0 {
            return true;
        }
        self.bfs_order(0).len() == self.n_sites
    }

    fn bfs_order(&self, start: usize) -> Vec<usize> {
        let adj = self.neighbours();
        let mut seen = vec![false; self.n_sites];
        let mut order = Vec::with_capacity(self.n_sites);
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next = adj[v].clone();
            next.sort_unstable();
            for w in next {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        order
    }

    /// Induced subgraph on the first `n` sites of a breadth-first walk from site 0,
    /// relabelled in walk order. The result is connected.
    pub fn bfs_truncate(&self, n: usize) -> Result<Self> {
        let order = self.bfs_order(0);
        if n > order.len() {
            return Err(Error::InvalidLattice(format!(
                "cannot take {n} sites from a component of {}",
                order.len()
            )));
        }
        let mut label = vec![usize::MAX; self.n_sites];
        for (new, &old) in order[..n].iter().enumerate() {
            label[old] = new;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(a, b)| label[a] != usize::MAX && label[b] != usize::MAX)
            .map(|&(a, b)| (label[a], label[b]));
        Lattice::new(n, edges)
    }

    /// Edge-list text: a `SITES n` header followed by one `a b` pair per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("SITES {}\n", self.n_sites);
        for (a, b) in &self.edges {
            let _ = writeln!(s, "{a} {b}");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut n = None;
        let mut edges = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| Error::Parse { line: k + 1, msg };
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks[0].eq_ignore_ascii_case("SITES") {
                n = Some(
                    toks.get(1)
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| perr("SITES needs a count".into()))?,
                );
                continue;
            }
            if toks.len() != 2 {
                return Err(perr(format!("expected two site indices, got {line:?}")));
            }
            let a: usize = toks[0].parse().map_err(|e| perr(format!("{e}")))?;
            let b: usize = toks[1].parse().map_err(|e| perr(format!("{e}")))?;
            edges.push((a, b));
        }
        let n = match n {
            Some(n) => n,
            None => edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0),
        };
        Lattice::new(n, edges)
    }
}

/// Heavy-hex tiling with `rows × cols` hexagons.
///
/// Built from a brick-wall honeycomb of `rows + 1` horizontal lines with
/// `2·cols + 2` vertices each; line `i` connects down to line `i + 1` at the
/// columns `j ≡ i (mod 2)`. Every honeycomb edge then gets a midpoint site.
/// Honeycomb vertices are numbered first (row-major), midpoints after.
pub fn build_heavyhex_lattice(rows: usize, cols: usize) -> Result<Lattice> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidLattice("rows and cols must be at least 1".into()));
    }
    let width = 2 * cols + 2;
    let lines = rows + 1;
    let vid = |i: usize, j: usize| i * width + j;
    let mut hex_edges = Vec::new();
    for i in 0..lines {
        for j in 0..width - 1 {
            hex_edges.push((vid(i, j), vid(i, j + 1)));
        }
    }
    for i in 0..rows {
        for j in (i % 2..width).step_by(2) {
            hex_edges.push((vid(i, j), vid(i + 1, j)));
        }
    }
    let n_vertices = lines * width;
    let mut edges = Vec::with_capacity(2 * hex_edges.len());
    for (k, &(a, b)) in hex_edges.iter().enumerate() {
        let m = n_vertices + k;
        edges.push((a, m));
        edges.push((m, b));
    }
    Lattice::new(n_vertices + hex_edges.len(), edges)
}

/// Connected heavy-hex patch with exactly `n` sites: the smallest square
/// tiling with at least `n` sites, truncated breadth-first.
pub fn heavyhex_with_sites(n: usize) -> Result<Lattice> {
    if n < 2 {
        return Err(Error::InvalidLattice("need at least 2 sites".into()));
    }
    let mut s = 1;
    loop {
        let lat = build_heavyhex_lattice(s, s)?;
        if lat.n_sites() >= n {
            return lat.bfs_truncate(n);
        }
        s += 1;
    }
}

/// Partition of a lattice's edges into matchings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeColoring {
    classes: Vec<Vec<(usize, usize)>>,
    seed: u64,
}

impl EdgeColoring {
    /// Wraps explicit classes after checking the matching property.
    pub fn from_classes(classes: Vec<Vec<(usize, usize)>>, seed: u64) -> Result<Self> {
        let mut classes: Vec<Vec<(usize, usize)>> = classes
            .into_iter()
            .map(|c| c.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect())
            .collect();
        for c in &mut classes {
            c.sort_unstable();
            let mut used = std::collections::HashSet::new();
            for &(a, b) in c.iter() {
                if !used.insert(a) || !used.insert(b) {
                    return Err(Error::InvalidLattice(format!("class is not a matching at edge ({a},{b})")));
                }
            }
        }
        Ok(EdgeColoring { classes, seed })
    }

    /// Two-class colouring of a chain: bonds starting on even sites, then odd sites.
    pub fn chain(n: usize) -> Self {
        let even = (0..n.saturating_sub(1)).step_by(2).map(|i| (i, i + 1)).collect();
        let odd = (1..n.saturating_sub(1)).step_by(2).map(|i| (i, i + 1)).collect();
        EdgeColoring {
            classes: vec![even, odd],
            seed: 0,
        }
    }

    pub fn classes(&self) -> &[Vec<(usize, usize)>] {
        &self.classes
    }

    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Class index of an edge, if covered.
    pub fn class_of(&self, a: usize, b: usize) -> Option<usize> {
        let e = (a.min(b), a.max(b));
        self.classes.iter().position(|c| c.binary_search(&e).is_ok())
    }

    /// True when the classes partition exactly the lattice's edges.
    pub fn covers(&self, lat: &Lattice) -> bool {
        let mut all: Vec<(usize, usize)> = self.classes.iter().flatten().copied().collect();
        all.sort_unstable();
        all == lat.edges()
    }
}

/// Colour names used in schedules: `G`, `B`, `O`, then `C3`, `C4`, ...
pub fn class_label(k: usize) -> String {
    match k {
        0 => "G".into(),
        1 => "B".into(),
        2 => "O".into(),
        _ => format!("C{k}"),
    }
}

/// Inverse of [`class_label`]; plain integers are accepted as well.
pub fn parse_class_label(s: &str) -> Option<usize> {
    match s.trim() {
        "G" | "g" => Some(0),
        "B" | "b" => Some(1),
        "O" | "o" => Some(2),
        t => t
            .strip_prefix('C')
            .or_else(|| t.strip_prefix('c'))
            .unwrap_or(t)
            .parse()
            .ok(),
    }
}

/// Seeded edge colouring with `classes` colours.
///
/// Edges are visited in a seeded random order and given the lowest colour free
/// at both endpoints. When no common colour is free, an alternating path of
/// two colours is swapped to free one (exact for bipartite graphs such as the
/// heavy-hex family). If that fails, the colour count is raised by one.
pub fn color_edges(lat: &Lattice, classes: usize, seed: u64) -> Result<EdgeColoring> {
    let degree = lat.coordination();
    if classes < degree {
        return Err(Error::InfeasibleColouring { classes, degree });
    }
    let mut order: Vec<(usize, usize)> = lat.edges().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let mut k = classes.max(1);
    loop {
        if let Some(colour) = try_colour(lat.n_sites(), &order, k) {
            let mut out = vec![Vec::new(); k];
            for (&e, &c) in order.iter().zip(&colour) {
                out[c].push(e);
            }
            return EdgeColoring::from_classes(out, seed);
        }
        k += 1;
    }
}

/// Greedy plus alternating-path repair. `at[v][c]` holds the neighbour joined
/// to `v` by colour `c`.
fn try_colour(n: usize, order: &[(usize, usize)], k: usize) -> Option<Vec<usize>> {
    let mut at = vec![vec![usize::MAX; k]; n];
    for &(u, v) in order {
        let common = (0..k).find(|&c| at[u][c] == usize::MAX && at[v][c] == usize::MAX);
        let c = match common {
            Some(c) => c,
            None => {
                let a = (0..k).find(|&c| at[u][c] == usize::MAX)?;
                let b = (0..k).find(|&c| at[v][c] == usize::MAX)?;
                // walk the a/b path from v and swap its colours
                let mut path = vec![v];
                let mut cur = v;
                let mut want = a;
                while at[cur][want] != usize::MAX {
                    cur = at[cur][want];
                    if cur == u {
                        return None;
                    }
                    path.push(cur);
                    want = if want == a { b } else { a };
                }
                let mut edges = Vec::new();
                for w in path.windows(2) {
                    let c = if at[w[0]][a] == w[1] { a } else { b };
                    edges.push((w[0], w[1], c));
                }
                for &(x, y, c) in &edges {
                    at[x][c] = usize::MAX;
                    at[y][c] = usize::MAX;
                }
                for &(x, y, c) in &edges {
                    let s = if c == a { b } else { a };
                    at[x][s] = y;
                    at[y][s] = x;
                }
                if at[u][a] != usize::MAX || at[v][a] != usize::MAX {
                    return None;
                }
                a
            }
        };
        at[u][c] = v;
        at[v][c] = u;
    }
    Some(
        order
            .iter()
            .map(|&(u, v)| (0..k).find(|&c| at[u][c] == v).expect("coloured edge"))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_valid(lat: &Lattice, col: &EdgeColoring) {
        assert!(col.covers(lat));
        for class in col.classes() {
            let mut seen = std::collections::HashSet::new();
            for &(a, b) in class {
                assert!(seen.insert(a) && seen.insert(b));
            }
        }
    }

    #[test]
    fn heavyhex_site_counts() {
        let counts: Vec<usize> = [(1, 1), (2, 2), (2, 3), (3, 2), (3, 3)]
            .iter()
            .map(|&(r, c)| build_heavyhex_lattice(r, c).unwrap().n_sites())
            .collect();
        assert_eq!(counts, vec![16, 39, 53, 53, 72]);
    }

    #[test]
    fn heavyhex_edge_counts_frozen() {
        let edges: Vec<usize> = [(1, 1), (2, 2), (3, 3)]
            .iter()
            .map(|&(r, c)| build_heavyhex_lattice(r, c).unwrap().edges().len())
            .collect();
        assert_eq!(edges, vec![16, 42, 80]);
    }

    #[test]
    fn smallest_cell_degree_and_connectivity() {
        let lat = build_heavyhex_lattice(1, 1).unwrap();
        assert_eq!(lat.coordination(), 3);
        assert!(lat.is_connected());
    }

    #[test]
    fn truncated_patches_are_connected() {
        for n in [12, 18, 63] {
            let lat = heavyhex_with_sites(n).unwrap();
            assert_eq!(lat.n_sites(), n);
            assert!(lat.is_connected());
            assert!(lat.coordination() <= 3);
        }
    }

    #[test]
    fn path_needs_two_colours() {
        let lat = Lattice::chain(4).unwrap();
        let col = color_edges(&lat, 2, 7).unwrap();
        assert_valid(&lat, &col);
        assert_eq!(col.n_classes(), 2);
    }

    #[test]
    fn heavyhex_three_colours_for_many_seeds() {
        let lat = build_heavyhex_lattice(3, 3).unwrap();
        for seed in 0..20 {
            let col = color_edges(&lat, 3, seed).unwrap();
            assert_valid(&lat, &col);
            assert_eq!(col.n_classes(), 3);
        }
    }

    #[test]
    fn colouring_is_deterministic() {
        let lat = heavyhex_with_sites(18).unwrap();
        assert_eq!(color_edges(&lat, 3, 5).unwrap(), color_edges(&lat, 3, 5).unwrap());
    }

    #[test]
    fn too_few_classes_is_an_error() {
        let lat = build_heavyhex_lattice(1, 1).unwrap();
        assert_eq!(
            color_edges(&lat, 2, 0).unwrap_err(),
            Error::InfeasibleColouring { classes: 2, degree: 3 }
        );
    }

    #[test]
    fn odd_cycle_gets_an_extra_colour() {
        let tri = Lattice::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let col = color_edges(&tri, 2, 0).unwrap();
        assert_valid(&tri, &col);
        assert_eq!(col.n_classes(), 3);
    }

    #[test]
    fn edge_list_roundtrip() {
        let lat = heavyhex_with_sites(12).unwrap();
        assert_eq!(Lattice::from_text(&lat.to_text()).unwrap(), lat);
    }

    #[test]
    fn labels_roundtrip() {
        for k in 0..6 {
            assert_eq!(parse_class_label(&class_label(k)), Some(k));
        }
    }
}

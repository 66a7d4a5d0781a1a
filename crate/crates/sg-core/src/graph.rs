use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde_json::json;
use thiserror::Error;

/// Largest graph level built by default; Γ_8 has 9843 vertices, which keeps
/// dense eigensolving tractable. Callers with other budgets can use the
/// `*_capped` builders.
pub const DEFAULT_MAX_LEVEL: u32 = 8;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("level {level} exceeds the configured maximum {max}")]
    LevelTooLarge { level: u32, max: u32 },
    #[error("the slit domain needs level >= 1 (level 0 has no structure below the top vertex)")]
    LevelZeroOmega,
}

/// Exact dyadic planar coordinate x = xn/2^k, y = yn/2^k, kept in lowest
/// terms so the same point built at different levels compares equal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Coord {
    xn: i64,
    yn: i64,
    k: u32,
}

impl Coord {
    pub fn new(mut xn: i64, mut yn: i64, mut k: u32) -> Self {
        while k > 0 && xn % 2 == 0 && yn % 2 == 0 {
            xn /= 2;
            yn /= 2;
            k -= 1;
        }
        Coord { xn, yn, k }
    }

    pub fn x_numer(&self) -> i64 {
        self.xn
    }

    pub fn y_numer(&self) -> i64 {
        self.yn
    }

    pub fn denom_log2(&self) -> u32 {
        self.k
    }

    pub fn x_f64(&self) -> f64 {
        self.xn as f64 / (1u64 << self.k) as f64
    }

    pub fn y_f64(&self) -> f64 {
        self.yn as f64 / (1u64 << self.k) as f64
    }

    pub fn on_bottom_line(&self) -> bool {
        self.yn == 0
    }

    pub fn midpoint(a: Coord, b: Coord) -> Coord {
        let k = a.k.max(b.k);
        let ax = a.xn << (k - a.k);
        let ay = a.yn << (k - a.k);
        let bx = b.xn << (k - b.k);
        let by = b.yn << (k - b.k);
        Coord::new(ax + bx, ay + by, k + 1)
    }

    /// The image under the left-right mirror (x, y) -> (1 - x, y).
    pub fn reflect(&self) -> Coord {
        Coord::new((1i64 << self.k) - self.xn, self.yn, self.k)
    }
}

impl Ord for Coord {
    fn cmp(&self, other: &Self) -> Ordering {
        // y descending, then x ascending: row-major from the top vertex down
        let k = self.k.max(other.k);
        let ya = self.yn << (k - self.k);
        let yb = other.yn << (k - other.k);
        let xa = self.xn << (k - self.k);
        let xb = other.xn << (k - other.k);
        yb.cmp(&ya).then(xa.cmp(&xb))
    }
}

impl PartialOrd for Coord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// Corner coordinates doubled, so they are integers: q0=(1/2,1), q1=(0,0),
// q2=(1,0) become (1,2), (0,0), (2,0) over denominator 2.
const CORNER2: [(i64, i64); 3] = [(1, 2), (0, 0), (2, 0)];

/// Exact corners of the cell addressed by `word` (digits 0,1,2; outermost
/// map first). Corner `i` is the image of the top/left/right corner `q_i`.
pub fn cell_corners(word: &[u8]) -> [Coord; 3] {
    let m = word.len() as u32;
    // F_w(q) = q/2^m + sum_j q_{w_j}/2^j, written over denominator 2^{m+1}
    let mut sx = 0i64;
    let mut sy = 0i64;
    for (j, &d) in word.iter().enumerate() {
        let (cx, cy) = CORNER2[d as usize];
        let shift = m - 1 - j as u32;
        sx += cx << shift;
        sy += cy << shift;
    }
    std::array::from_fn(|i| {
        let (cx, cy) = CORNER2[i];
        Coord::new(cx + sx, cy + sy, m + 1)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphKind {
    Gamma,
    Omega,
}

impl std::fmt::Display for GraphKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GraphKind::Gamma => write!(f, "gamma"),
            GraphKind::Omega => write!(f, "omega"),
        }
    }
}

/// One level of the graph approximation: the full gasket graph Γ_m, or the
/// slit-domain graph Ω_m (Γ_m with every vertex on the bottom line removed).
/// Vertices are sorted top-down, left-to-right; all index lists refer to
/// that order.
#[derive(Clone, Debug)]
pub struct GraphApprox {
    pub level: u32,
    pub kind: GraphKind,
    pub vertices: Vec<Coord>,
    pub adjacency: Vec<Vec<usize>>,
    pub edges: Vec<(usize, usize)>,
    pub boundary: Vec<usize>,
    pub interior: Vec<usize>,
    /// Chain q0, F1 q0, F1^2 q0, ..., F1^m q0 down the left side.
    pub skeleton: Vec<usize>,
    is_boundary: Vec<bool>,
}

pub fn build_gamma(m: u32) -> Result<GraphApprox, GraphError> {
    build_gamma_capped(m, DEFAULT_MAX_LEVEL)
}

pub fn build_gamma_capped(m: u32, max_level: u32) -> Result<GraphApprox, GraphError> {
    if m > max_level {
        return Err(GraphError::LevelTooLarge { level: m, max: max_level });
    }
    Ok(build(m, GraphKind::Gamma))
}

pub fn build_omega(m: u32) -> Result<GraphApprox, GraphError> {
    build_omega_capped(m, DEFAULT_MAX_LEVEL)
}

pub fn build_omega_capped(m: u32, max_level: u32) -> Result<GraphApprox, GraphError> {
    if m == 0 {
        return Err(GraphError::LevelZeroOmega);
    }
    if m > max_level {
        return Err(GraphError::LevelTooLarge { level: m, max: max_level });
    }
    Ok(build(m, GraphKind::Omega))
}

fn build(m: u32, kind: GraphKind) -> GraphApprox {
    let drop_bottom = kind == GraphKind::Omega;
    let mut coords = BTreeSet::new();
    let mut apexes = BTreeSet::new();
    let mut word = vec![0u8; m as usize];
    let mut corner_lists = Vec::with_capacity(3usize.pow(m));
    loop {
        let corners = cell_corners(&word);
        for (i, c) in corners.iter().enumerate() {
            if drop_bottom && c.on_bottom_line() {
                continue;
            }
            coords.insert(*c);
            // apex of a bottom-row cell: all letters in {1,2}, top corner
            if i == 0 && word.iter().all(|&d| d != 0) {
                apexes.insert(*c);
            }
        }
        corner_lists.push(corners);
        // advance the base-3 counter over cell words; stop after the last
        let mut advanced = false;
        for pos in (0..word.len()).rev() {
            if word[pos] < 2 {
                word[pos] += 1;
                word[pos + 1..].fill(0);
                advanced = true;
                break;
            }
        }
        if !advanced {
            break;
        }
    }

    let vertices: Vec<Coord> = coords.into_iter().collect();
    let index: BTreeMap<Coord, usize> =
        vertices.iter().enumerate().map(|(i, c)| (*c, i)).collect();

    let mut edge_set = BTreeSet::new();
    for corners in &corner_lists {
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            if let (Some(&ia), Some(&ib)) = (index.get(&corners[a]), index.get(&corners[b])) {
                edge_set.insert((ia.min(ib), ia.max(ib)));
            }
        }
    }
    let edges: Vec<(usize, usize)> = edge_set.into_iter().collect();
    let mut adjacency = vec![Vec::new(); vertices.len()];
    for &(a, b) in &edges {
        adjacency[a].push(b);
        adjacency[b].push(a);
    }
    for nbrs in &mut adjacency {
        nbrs.sort_unstable();
    }

    let boundary: Vec<usize> = match kind {
        GraphKind::Gamma => {
            let mut b: Vec<usize> = cell_corners(&[]).iter().map(|c| index[c]).collect();
            b.sort_unstable();
            b
        }
        GraphKind::Omega => {
            let mut b: Vec<usize> = apexes.iter().map(|c| index[c]).collect();
            let q0 = Coord::new(1, 2, 1);
            b.push(index[&q0]);
            b.sort_unstable();
            b.dedup();
            b
        }
    };
    let mut is_boundary = vec![false; vertices.len()];
    for &i in &boundary {
        is_boundary[i] = true;
    }
    let interior: Vec<usize> = (0..vertices.len()).filter(|i| !is_boundary[*i]).collect();

    let skeleton: Vec<usize> = (0..=m)
        .map(|i| index[&Coord::new(1, 2, i + 1)])
        .collect();

    GraphApprox {
        level: m,
        kind,
        vertices,
        adjacency,
        edges,
        boundary,
        interior,
        skeleton,
        is_boundary,
    }
}

impl GraphApprox {
    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn index_of(&self, c: &Coord) -> Option<usize> {
        self.vertices.binary_search(c).ok()
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        self.is_boundary[i]
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    /// The permutation of vertex indices induced by the mirror symmetry
    /// (x, y) -> (1 - x, y). The mirror is an automorphism of both graph
    /// kinds, so every image exists.
    pub fn reflection_permutation(&self) -> Vec<usize> {
        self.vertices
            .iter()
            .map(|c| {
                self.index_of(&c.reflect())
                    .expect("mirror image of a vertex must be a vertex")
            })
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let verts: Vec<serde_json::Value> = self
            .vertices
            .iter()
            .map(|c| json!([c.x_numer(), c.y_numer(), 1i64 << c.denom_log2()]))
            .collect();
        let edges: Vec<serde_json::Value> =
            self.edges.iter().map(|&(a, b)| json!([a, b])).collect();
        json!({
            "level": self.level,
            "kind": self.kind.to_string(),
            "vertices": verts,
            "edges": edges,
            "boundary": self.boundary,
            "skeleton": self.skeleton,
        })
    }
}

/// Interior vertex count of the slit domain at level m.
pub fn omega_interior_count(m: u32) -> usize {
    ((3usize.pow(m + 1) - 1) / 2) - 2usize.pow(m + 1)
}

/// Total vertex count of the slit domain at level m.
pub fn omega_vertex_count(m: u32) -> usize {
    ((3usize.pow(m + 1) + 1) / 2) - 2usize.pow(m)
}

/// Total vertex count of the gasket graph at level m.
pub fn gamma_vertex_count(m: u32) -> usize {
    3 * (3usize.pow(m) + 1) / 2
}

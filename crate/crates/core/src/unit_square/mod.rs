//! Diameter-Δ decision for axis-aligned unit-square intersection graphs.
//!
//! Squares are given by their centers; two squares intersect iff the L∞
//! distance of their centers is at most 1. The algorithm grids the plane into
//! unit cells and, for every nonempty cell, checks that every point of the
//! cell reaches every point of the instance by a chain of Δ intersecting
//! squares. Each such "partite" check is a b-way divide and conquer on the
//! fractional parts of x-coordinates, in which chains crossing a cut are
//! encoded by dominance between high-dimensional vectors computed with
//! range-minimum sweeps.
//!
//! Exactness: the grid uses half-open cells `[i, i+1)`, fractional parts are
//! computed as `x - floor(x)` (exact in floating point), and every region
//! test is a half-open or closed comparison, so ties need no perturbation.
//! The L∞ relation is the closed test `|Δx| ≤ 1 ∧ |Δy| ≤ 1` without
//! tolerance.

mod range;

use std::collections::HashMap;
use std::time::Instant;

use crate::error::{GeoError, Result};
use crate::geometry::Point;
use range::{linf_join, linf_max, linf_max_multi, linf_min, linf_min_multi, LevelIndex};

/// Level sets `P_0, …, P_Δ` of a partite chain problem.
///
/// A chain is a sequence `p_0 ∈ P_0, …, p_Δ ∈ P_Δ` of pairwise consecutive
/// intersecting squares. `cell` is the unit grid cell that contains `P_0`
/// (required by the high-dimensional mapping and the recursion).
#[derive(Clone, Debug)]
pub struct PartiteInstance {
    levels: Vec<Vec<Point>>,
    cell: (i64, i64),
}

impl PartiteInstance {
    /// Instance whose base cell is `[0,1)²`.
    pub fn new(levels: Vec<Vec<Point>>) -> Result<Self> {
        Self::with_cell(levels, (0, 0))
    }

    /// Instance with an explicit base cell `[cx, cx+1) × [cy, cy+1)`.
    pub fn with_cell(levels: Vec<Vec<Point>>, cell: (i64, i64)) -> Result<Self> {
        if levels.len() < 2 {
            return Err(GeoError::Parameter("a partite instance needs Δ ≥ 1".into()));
        }
        if levels.iter().flatten().any(|p| !p.is_finite()) {
            return Err(GeoError::Parameter("non-finite coordinate".into()));
        }
        Ok(PartiteInstance { levels, cell })
    }

    /// Chain length Δ.
    pub fn delta(&self) -> usize {
        self.levels.len() - 1
    }

    /// The level sets.
    pub fn levels(&self) -> &[Vec<Point>] {
        &self.levels
    }

    /// The base cell.
    pub fn cell(&self) -> (i64, i64) {
        self.cell
    }

    fn check_base_cell(&self) -> Result<()> {
        let (cx, cy) = self.cell;
        if self.levels[0]
            .iter()
            .any(|p| p.x.floor() as i64 != cx || p.y.floor() as i64 != cy)
        {
            return Err(GeoError::Parameter(format!(
                "P_0 must lie inside the base cell [{cx},{}) x [{cy},{})",
                cx + 1,
                cy + 1
            )));
        }
        Ok(())
    }
}

/// Scalar mappings on `P_0` and `P_Δ`; a chain of the requested kind exists
/// for `(p_0, p_Δ)` iff `phi[p_0] ≤ psi[p_Δ]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarMapPair {
    /// One value per point of `P_0` (`+∞` when no suitable chain prefix).
    pub phi: Vec<f64>,
    /// One value per point of `P_Δ` (`-∞` when no suitable chain suffix).
    pub psi: Vec<f64>,
}

/// Vector mappings on `P_0` and `P_Δ` stored row-major.
///
/// Component order is lexicographic in `(α_x, α_y, j, variant)` with
/// `α ∈ [-Δ, Δ]²` relative to the base cell, `j ∈ 0..Δ` and variant `1..=4`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorMapPair {
    /// Number of components, `4·Δ·(2Δ+1)²`.
    pub dim: usize,
    /// `|P_0| × dim` values.
    pub phi: Vec<f64>,
    /// `|P_Δ| × dim` values.
    pub psi: Vec<f64>,
}

impl VectorMapPair {
    /// Vector of the `i`-th point of `P_0`.
    pub fn phi_row(&self, i: usize) -> &[f64] {
        &self.phi[i * self.dim..(i + 1) * self.dim]
    }

    /// Vector of the `i`-th point of `P_Δ`.
    pub fn psi_row(&self, i: usize) -> &[f64] {
        &self.psi[i * self.dim..(i + 1) * self.dim]
    }

    /// True when `phi(p_0)` dominates `psi(p_Δ)` strictly in every component,
    /// i.e. no chain crossing the cut exists.
    pub fn dominates(&self, i0: usize, id: usize) -> bool {
        dominates(self.phi_row(i0), self.psi_row(id))
    }
}

/// Strict componentwise dominance `a > b`; vacuously true in dimension 0.
#[inline]
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x > y)
}

/// Region of the plane used to trigger chain weights, relative to the
/// cut value `μ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    /// `[col + μ, col + 1) × [row, row + 1)`.
    High {
        /// Grid column.
        col: i64,
        /// Grid row.
        row: i64,
    },
    /// `([col, col + μ) ∪ [col + 1, col + 1 + μ)) × [row_lo, row_lo + 2)`.
    Low {
        /// Left grid column.
        col: i64,
        /// Lower grid row.
        row_lo: i64,
    },
}

/// Cell coordinates and fractional x of a point.
#[derive(Clone, Copy, Debug)]
struct CellPos {
    cx: i64,
    cy: i64,
    fx: f64,
}

impl CellPos {
    fn of(p: Point) -> Self {
        let fx0 = p.x.floor();
        CellPos {
            cx: fx0 as i64,
            cy: p.y.floor() as i64,
            fx: p.x - fx0,
        }
    }
}

impl Region {
    fn contains_pos(&self, c: CellPos, mu: f64) -> bool {
        match *self {
            Region::High { col, row } => c.cx == col && c.cy == row && c.fx >= mu,
            Region::Low { col, row_lo } => {
                (c.cx == col || c.cx == col + 1) && (c.cy == row_lo || c.cy == row_lo + 1) && c.fx < mu
            }
        }
    }

    /// Membership test for a point.
    pub fn contains(&self, p: Point, mu: f64) -> bool {
        self.contains_pos(CellPos::of(p), mu)
    }

    /// The four (R_j, R_{j+1}, sign) variants for grid offset `alpha`
    /// (absolute cell coordinates).
    pub fn variants(alpha: (i64, i64)) -> [(Region, Region, f64); 4] {
        let (ax, ay) = alpha;
        let low = Region::Low {
            col: ax,
            row_lo: ay - 1,
        };
        let high = Region::High { col: ax, row: ay };
        let high_below = Region::High { col: ax, row: ay - 1 };
        [
            (high, low, 1.0),
            (high_below, low, -1.0),
            (low, high, -1.0),
            (low, high_below, 1.0),
        ]
    }
}

/// Level sets with their sweep indices and cell positions.
struct Prepared {
    idx: Vec<LevelIndex>,
    pos: Vec<Vec<CellPos>>,
    occupied: Vec<HashMap<(i64, i64), Vec<u32>>>,
}

impl Prepared {
    fn new(levels: &[Vec<Point>]) -> Self {
        let idx = levels.iter().map(|l| LevelIndex::new(l.clone())).collect();
        let pos: Vec<Vec<CellPos>> = levels
            .iter()
            .map(|l| l.iter().map(|p| CellPos::of(*p)).collect())
            .collect();
        let occupied = pos
            .iter()
            .map(|l| {
                let mut m: HashMap<(i64, i64), Vec<u32>> = HashMap::new();
                for (i, c) in l.iter().enumerate() {
                    m.entry((c.cx, c.cy)).or_default().push(i as u32);
                }
                m
            })
            .collect();
        Prepared { idx, pos, occupied }
    }

    fn delta(&self) -> usize {
        self.idx.len() - 1
    }

    /// True when some point of `level` lies in `region`.
    fn region_nonempty(&self, level: usize, region: Region, mu: f64) -> bool {
        let cells: &[(i64, i64)] = &match region {
            Region::High { col, row } => vec![(col, row)],
            Region::Low { col, row_lo } => vec![
                (col, row_lo),
                (col + 1, row_lo),
                (col, row_lo + 1),
                (col + 1, row_lo + 1),
            ],
        };
        cells.iter().any(|c| {
            self.occupied[level].get(c).is_some_and(|ids| {
                ids.iter()
                    .any(|&i| region.contains_pos(self.pos[level][i as usize], mu))
            })
        })
    }

    /// Forward/backward weight propagation for one `(j, R_j, R_{j+1}, s)`.
    ///
    /// With `skip_dead` the backward pass is skipped when no forward value is
    /// finite (the comparison is then false for every pair regardless of ψ).
    fn mapping(&self, j: usize, mu: f64, rj: Region, rj1: Region, s: f64, skip_dead: bool) -> ScalarMapPair {
        let delta = self.delta();
        let n0 = self.idx[0].len();
        let nd = self.idx[delta].len();
        let mut w: Vec<f64> = self.idx[j]
            .pts
            .iter()
            .zip(&self.pos[j])
            .map(|(p, c)| if rj.contains_pos(*c, mu) { s * p.y } else { f64::INFINITY })
            .collect();
        for i in (0..j).rev() {
            if w.iter().all(|v| *v == f64::INFINITY) {
                w = vec![f64::INFINITY; self.idx[i].len()];
                continue;
            }
            w = linf_min(&self.idx[i + 1], &w, &self.idx[i]);
        }
        let phi = if w.len() == n0 { w } else { vec![f64::INFINITY; n0] };
        if skip_dead && phi.iter().all(|v| *v == f64::INFINITY) {
            return ScalarMapPair {
                phi,
                psi: vec![f64::NEG_INFINITY; nd],
            };
        }
        let mut v: Vec<f64> = self.idx[j + 1]
            .pts
            .iter()
            .zip(&self.pos[j + 1])
            .map(|(p, c)| {
                if rj1.contains_pos(*c, mu) {
                    s * p.y
                } else {
                    f64::NEG_INFINITY
                }
            })
            .collect();
        for i in j + 2..=delta {
            if v.iter().all(|x| *x == f64::NEG_INFINITY) {
                v = vec![f64::NEG_INFINITY; self.idx[i].len()];
                continue;
            }
            v = linf_max(&self.idx[i - 1], &v, &self.idx[i]);
        }
        // ψ carries the "+1" offset; -∞ stays absorbing.
        let psi = v.into_iter().map(|x| x + 1.0).collect();
        ScalarMapPair { phi, psi }
    }

    /// All `(α, j, variant)` components for cut `mu` around `base`.
    ///
    /// Components sharing the same step `j` are propagated together in one
    /// batched sweep per level; components whose trigger regions are empty
    /// keep their sentinel values.
    fn highdim(&self, base: (i64, i64), mu: f64) -> VectorMapPair {
        let delta = self.delta();
        let d = delta as i64;
        let dim = 4 * delta * (2 * delta + 1) * (2 * delta + 1);
        let n0 = self.idx[0].len();
        let nd = self.idx[delta].len();
        let mut phi = vec![f64::INFINITY; n0 * dim];
        let mut psi = vec![f64::NEG_INFINITY; nd * dim];
        // Live components per step j: (component index, R_j, R_{j+1}, sign).
        let mut by_step: Vec<Vec<(usize, Region, Region, f64)>> = vec![Vec::new(); delta];
        let mut comp = 0usize;
        for ax in -d..=d {
            for ay in -d..=d {
                let alpha = (base.0 + ax, base.1 + ay);
                for (j, step) in by_step.iter_mut().enumerate() {
                    for (rj, rj1, s) in Region::variants(alpha) {
                        if self.region_nonempty(j, rj, mu) && self.region_nonempty(j + 1, rj1, mu) {
                            step.push((comp, rj, rj1, s));
                        }
                        comp += 1;
                    }
                }
            }
        }
        for (j, comps) in by_step.iter().enumerate() {
            if comps.is_empty() {
                continue;
            }
            // Forward: weights on P_j, propagated down to P_0.
            let k = comps.len();
            let mut w = Vec::with_capacity(self.idx[j].len() * k);
            for (p, c) in self.idx[j].pts.iter().zip(&self.pos[j]) {
                w.extend(comps.iter().map(|&(_, rj, _, s)| {
                    if rj.contains_pos(*c, mu) {
                        s * p.y
                    } else {
                        f64::INFINITY
                    }
                }));
            }
            for i in (0..j).rev() {
                w = linf_min_multi(&self.idx[i + 1], &w, k, &self.idx[i]);
            }
            // Components with no finite φ are never satisfiable; skip their
            // backward pass.
            let alive: Vec<usize> = (0..k)
                .filter(|&c| (0..n0).any(|i| w[i * k + c] != f64::INFINITY))
                .collect();
            for &c in &alive {
                let col = comps[c].0;
                for i in 0..n0 {
                    phi[i * dim + col] = w[i * k + c];
                }
            }
            if alive.is_empty() {
                continue;
            }
            // Backward: weights on P_{j+1}, propagated up to P_Δ.
            let ka = alive.len();
            let mut v = Vec::with_capacity(self.idx[j + 1].len() * ka);
            for (p, cp) in self.idx[j + 1].pts.iter().zip(&self.pos[j + 1]) {
                v.extend(alive.iter().map(|&c| {
                    let (_, _, rj1, s) = comps[c];
                    if rj1.contains_pos(*cp, mu) {
                        s * p.y
                    } else {
                        f64::NEG_INFINITY
                    }
                }));
            }
            for i in j + 2..=delta {
                v = linf_max_multi(&self.idx[i - 1], &v, ka, &self.idx[i]);
            }
            for (a, &c) in alive.iter().enumerate() {
                let col = comps[c].0;
                for i in 0..nd {
                    psi[i * dim + col] = v[i * ka + a] + 1.0;
                }
            }
        }
        VectorMapPair { dim, phi, psi }
    }
}

/// Scalar mapping for chains whose step `j → j+1` moves from
/// `R_j = cell + [μ,1) × [0,1)` to `R_{j+1} = cell + ([0,μ) ∪ [1,1+μ)) × [-1,1)`
/// (the first variant at the base cell).
///
/// Postcondition: such a chain exists for `(p_0, p_Δ)` iff `phi ≤ psi`.
pub fn chain_mapping_1d(inst: &PartiteInstance, j: usize, mu: f64) -> Result<ScalarMapPair> {
    let (rj, rj1, s) = Region::variants(inst.cell)[0];
    chain_mapping_regions(inst, j, mu, rj, rj1, s)
}

/// Scalar mapping for an arbitrary pair of trigger regions and weight sign.
///
/// Forward weights `s·y` on `P_j ∩ R_j` (else `+∞`) are propagated by L∞
/// range minima down to `P_0`; backward weights `s·y` on `P_{j+1} ∩ R_{j+1}`
/// (else `-∞`) by range maxima up to `P_Δ`, then offset by `+1`.
pub fn chain_mapping_regions(
    inst: &PartiteInstance,
    j: usize,
    mu: f64,
    rj: Region,
    rj1: Region,
    s: f64,
) -> Result<ScalarMapPair> {
    if j >= inst.delta() {
        return Err(GeoError::Parameter(format!(
            "j = {j} out of range 0..{}",
            inst.delta()
        )));
    }
    if !(mu > 0.0 && mu < 1.0) {
        return Err(GeoError::Parameter(format!("mu = {mu} not in (0,1)")));
    }
    Ok(Prepared::new(&inst.levels).mapping(j, mu, rj, rj1, s, false))
}

/// Vector mapping encoding every chain with a step whose fractional x-parts
/// lie on different sides of `μ`: such a chain exists iff `phi(p_0)` does not
/// dominate `psi(p_Δ)`.
pub fn chain_mapping_highdim(inst: &PartiteInstance, mu: f64) -> Result<VectorMapPair> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(GeoError::Parameter(format!("mu = {mu} not in (0,1)")));
    }
    inst.check_base_cell()?;
    Ok(Prepared::new(&inst.levels).highdim(inst.cell, mu))
}

/// How the branching factor `b` of the divide and conquer is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BranchFactor {
    /// A fixed `b ≥ 2`.
    Fixed(usize),
    /// `⌈2^√(Δ³·log₂n·log₂log₂n)⌉` clamped to `[2, n]`.
    Asymptotic,
}

/// Strategy for finding a dominating pair between two vector sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DominanceStrategy {
    /// Scan all pairs.
    Reference,
    /// Per-column sorted lists; candidates from the most selective column.
    Sorted,
    /// `Reference` for small products, `Sorted` otherwise.
    Auto,
}

/// Tuning knobs of the unit-square algorithm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitSquareConfig {
    /// Branching factor of the recursion.
    pub branch: BranchFactor,
    /// Recursion stops when `|P_0|` is at most this size.
    pub leaf_size: usize,
    /// Dominance-pair detection strategy.
    pub dominance: DominanceStrategy,
}

impl Default for UnitSquareConfig {
    fn default() -> Self {
        UnitSquareConfig {
            branch: BranchFactor::Fixed(2),
            leaf_size: 64,
            dominance: DominanceStrategy::Auto,
        }
    }
}

impl BranchFactor {
    /// Resolves the factor for an instance of `n` points and chain length Δ.
    pub fn resolve(self, n: usize, delta: usize) -> usize {
        match self {
            BranchFactor::Fixed(b) => b.max(2),
            BranchFactor::Asymptotic => {
                let n = n.max(4) as f64;
                let lg = n.log2();
                let e = ((delta as f64).powi(3) * lg * lg.log2()).sqrt();
                let b = if e >= 63.0 { f64::MAX } else { 2f64.powf(e).ceil() };
                (b as usize).clamp(2, (n as usize).max(2))
            }
        }
    }
}

/// Row-major matrix of per-point vectors.
#[derive(Clone, Debug, Default)]
struct Rows {
    dim: usize,
    data: Vec<f64>,
}

impl Rows {
    fn empty() -> Self {
        Rows::default()
    }

    fn from_vecs(v: &[Vec<f64>]) -> Result<Self> {
        let dim = v.first().map_or(0, Vec::len);
        if v.iter().any(|r| r.len() != dim) {
            return Err(GeoError::Parameter("ragged vector map".into()));
        }
        Ok(Rows {
            dim,
            data: v.iter().flatten().copied().collect(),
        })
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }


    /// Rows `ids` extended by selected columns of row-major sources
    /// `(data, source dimension, kept columns)` indexed by the original
    /// point ids.
    fn select_extend(&self, ids: &[u32], extra: &[(&[f64], usize, &[usize])]) -> Rows {
        let add: usize = extra.iter().map(|e| e.2.len()).sum();
        let dim = self.dim + add;
        let mut data = Vec::with_capacity(ids.len() * dim);
        for &i in ids {
            let i = i as usize;
            data.extend_from_slice(self.row(i));
            for &(src, sdim, cols) in extra {
                let row = &src[i * sdim..(i + 1) * sdim];
                data.extend(cols.iter().map(|&c| row[c]));
            }
        }
        Rows { dim, data }
    }
}

/// Counters collected during one run, for diagnostics and benchmarks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct UnitSquareStats {
    /// Recursion nodes visited.
    pub nodes: usize,
    /// Nodes solved by layered reachability.
    pub leaves: usize,
    /// High-dimensional mappings computed.
    pub mappings: usize,
    /// Largest vector dimension after column pruning.
    pub max_dim: usize,
    /// Time spent computing vector mappings (ns).
    pub mapping_nanos: u128,
    /// Time spent in dominance-pair detection (ns).
    pub dominance_nanos: u128,
    /// Time spent in leaf reachability (ns).
    pub leaf_nanos: u128,
}

/// A node of the divide and conquer: level sets plus the vectors `f` on
/// `P_0` and `g` on `P_Δ` (equal dimension `D`).
///
/// The node asks: for all `(p_0, p_Δ)` with `f(p_0)` dominating `g(p_Δ)`, is
/// there a chain through the node's level sets?
#[derive(Clone, Debug)]
pub struct RecursionNode {
    /// Level sets; `P_0` must lie in the base cell.
    pub instance: PartiteInstance,
    /// One vector per point of `P_0`.
    pub f: Vec<Vec<f64>>,
    /// One vector per point of `P_Δ`.
    pub g: Vec<Vec<f64>>,
}

impl RecursionNode {
    /// Node with trivial (zero-dimensional) `f` and `g`.
    pub fn trivial(instance: PartiteInstance) -> Self {
        let n0 = instance.levels[0].len();
        let nd = instance.levels[instance.delta()].len();
        RecursionNode {
            instance,
            f: vec![Vec::new(); n0],
            g: vec![Vec::new(); nd],
        }
    }

    /// Cut values `μ_1 < … < μ_{b-1}` (strictly inside `(0,1)`) splitting the
    /// distinct fractional x-parts of the node's points into `b` groups;
    /// `μ_0 = 0` and `μ_b = 1` are implicit.
    pub fn quantiles(&self, b: usize) -> Vec<f64> {
        quantiles_of(&self.instance.levels, b)
    }
}

fn quantiles_of(levels: &[Vec<Point>], b: usize) -> Vec<f64> {
    let mut fr: Vec<f64> = levels.iter().flatten().map(|p| CellPos::of(*p).fx).collect();
    fr.sort_by(f64::total_cmp);
    fr.dedup();
    let u = fr.len();
    let mut cuts = Vec::new();
    if u < 2 {
        return cuts;
    }
    // A cut at the smallest value would leave an empty lower group; with
    // u ≥ 2 the last cut index is ≥ 1, so every group loses a value.
    for k in 1..b {
        let v = fr[(k * u) / b];
        if v > fr[0] && cuts.last().is_none_or(|l: &f64| v > *l) {
            cuts.push(v);
        }
    }
    cuts
}

/// Decides the node's question by b-way divide and conquer.
///
/// Steps: (1) cut values from the fractional x-parts; (2) one vector mapping
/// per cut; (3) for every group `k`, reject if some `p_0` in the group and
/// `p_Δ` outside it have `f ⊕ φ⁽ᵏ⁾ ⊕ φ⁽ᵏ⁺¹⁾` dominating
/// `g ⊕ ψ⁽ᵏ⁾ ⊕ ψ⁽ᵏ⁺¹⁾`; (4) recurse into each group with the extended
/// vectors.
pub fn partite_all_connected(node: &RecursionNode, b: usize) -> Result<bool> {
    let cfg = UnitSquareConfig {
        branch: BranchFactor::Fixed(b),
        ..UnitSquareConfig::default()
    };
    partite_all_connected_with(node, &cfg, &mut UnitSquareStats::default())
}

/// [`partite_all_connected`] with explicit configuration and statistics.
pub fn partite_all_connected_with(
    node: &RecursionNode,
    cfg: &UnitSquareConfig,
    stats: &mut UnitSquareStats,
) -> Result<bool> {
    if let BranchFactor::Fixed(b) = cfg.branch {
        if b < 2 {
            return Err(GeoError::Parameter("b must be at least 2".into()));
        }
    }
    node.instance.check_base_cell()?;
    let f = Rows::from_vecs(&node.f)?;
    let g = Rows::from_vecs(&node.g)?;
    if node.f.len() != node.instance.levels[0].len() || node.g.len() != node.instance.levels[node.instance.delta()].len() {
        return Err(GeoError::Parameter("f/g must have one vector per point".into()));
    }
    let (fd, gd) = (
        if node.f.is_empty() { None } else { Some(f.dim) },
        if node.g.is_empty() { None } else { Some(g.dim) },
    );
    if let (Some(a), Some(b)) = (fd, gd) {
        if a != b {
            return Err(GeoError::Parameter(format!(
                "dimension mismatch: f has {a}, g has {b}"
            )));
        }
    }
    let dim = fd.or(gd).unwrap_or(0);
    let f = Rows { dim, data: f.data };
    let g = Rows { dim, data: g.data };
    let n = node.instance.levels.iter().map(Vec::len).sum::<usize>();
    let b = cfg.branch.resolve(n, node.instance.delta());
    solve(&node.instance.levels, node.instance.cell, f, g, b, cfg, stats)
}

/// Columns in which some `f` row is at most some `g` row; the others never
/// break dominance. Scans row by row for cache locality.
fn useful_columns(dim: usize, f_rows: &[&[f64]], g_rows: &[&[f64]]) -> Vec<usize> {
    let mut fmin = vec![f64::INFINITY; dim];
    for r in f_rows {
        for (m, v) in fmin.iter_mut().zip(r.iter()) {
            *m = m.min(*v);
        }
    }
    let mut gmax = vec![f64::NEG_INFINITY; dim];
    for r in g_rows {
        for (m, v) in gmax.iter_mut().zip(r.iter()) {
            *m = m.max(*v);
        }
    }
    (0..dim).filter(|&c| fmin[c] <= gmax[c]).collect()
}

/// Drops columns where every `f` exceeds every `g` (they never break
/// dominance).
fn prune_columns(f: &Rows, nf: usize, g: &Rows, ng: usize) -> (Rows, Rows) {
    let dim = f.dim;
    let f_rows: Vec<&[f64]> = (0..nf).map(|i| f.row(i)).collect();
    let g_rows: Vec<&[f64]> = (0..ng).map(|i| g.row(i)).collect();
    let keep = useful_columns(dim, &f_rows, &g_rows);
    if keep.len() == dim {
        return (f.clone(), g.clone());
    }
    let pick = |rows: &[&[f64]]| {
        let mut data = Vec::with_capacity(rows.len() * keep.len());
        for r in rows {
            data.extend(keep.iter().map(|&c| r[c]));
        }
        Rows {
            dim: keep.len(),
            data,
        }
    };
    (pick(&f_rows), pick(&g_rows))
}

/// Finds `(i, j)` with `f_i` strictly dominating `g_j`, restricted to the
/// given row subsets.
fn find_dominating_pair(
    f: &Rows,
    fi: &[u32],
    g: &Rows,
    gj: &[u32],
    strategy: DominanceStrategy,
) -> Option<(u32, u32)> {
    dominance_scan(f, fi, g, gj, strategy, true).into_iter().next()
}

/// For each row `i ∈ fi` (in order) that strictly dominates some `g_j`,
/// `j ∈ gj`, one such pair; stops after the first pair when `first_only`.
fn dominance_scan(
    f: &Rows,
    fi: &[u32],
    g: &Rows,
    gj: &[u32],
    strategy: DominanceStrategy,
    first_only: bool,
) -> Vec<(u32, u32)> {
    let mut hits = Vec::new();
    if fi.is_empty() || gj.is_empty() {
        return hits;
    }
    let dim = f.dim;
    if dim == 0 {
        let take = if first_only { 1 } else { fi.len() };
        return fi.iter().take(take).map(|&i| (i, gj[0])).collect();
    }
    let use_sorted = match strategy {
        DominanceStrategy::Reference => false,
        DominanceStrategy::Sorted => true,
        DominanceStrategy::Auto => fi.len() * gj.len() > 4096,
    };
    if !use_sorted {
        for &i in fi {
            let a = f.row(i as usize);
            if let Some(&j) = gj.iter().find(|&&j| dominates(a, g.row(j as usize))) {
                hits.push((i, j));
                if first_only {
                    break;
                }
            }
        }
        return hits;
    }
    // Per column: g values sorted ascending with their row ids.
    let cols: Vec<Vec<(f64, u32)>> = (0..dim)
        .map(|c| {
            let mut v: Vec<(f64, u32)> = gj.iter().map(|&j| (g.row(j as usize)[c], j)).collect();
            v.sort_by(|x, y| x.0.total_cmp(&y.0));
            v
        })
        .collect();
    for &i in fi {
        let a = f.row(i as usize);
        // The most selective column bounds the candidate set.
        let mut best: Option<(usize, usize)> = None;
        for (c, col) in cols.iter().enumerate() {
            let cnt = col.partition_point(|&(v, _)| v < a[c]);
            if cnt == 0 {
                best = None;
                break;
            }
            if best.is_none_or(|(bc, _)| cnt < bc) {
                best = Some((cnt, c));
            }
        }
        if let Some((cnt, c)) = best {
            if let Some(&(_, j)) = cols[c][..cnt].iter().find(|&&(_, j)| dominates(a, g.row(j as usize))) {
                hits.push((i, j));
                if first_only {
                    break;
                }
            }
        }
    }
    hits
}

/// Recursive worker over explicit level sets.
fn solve(
    levels: &[Vec<Point>],
    cell: (i64, i64),
    f: Rows,
    g: Rows,
    b: usize,
    cfg: &UnitSquareConfig,
    stats: &mut UnitSquareStats,
) -> Result<bool> {
    stats.nodes += 1;
    let delta = levels.len() - 1;
    let n0 = levels[0].len();
    let nd = levels[delta].len();
    if n0 == 0 || nd == 0 {
        return Ok(true);
    }
    let (f, g) = prune_columns(&f, n0, &g, nd);
    stats.max_dim = stats.max_dim.max(f.dim);
    let cuts = quantiles_of(levels, b);
    if cuts.is_empty() || n0 <= cfg.leaf_size {
        stats.leaves += 1;
        let t = Instant::now();
        let ok = brute_force_node(levels, &f, &g, cfg.dominance);
        stats.leaf_nanos += t.elapsed().as_nanos();
        return Ok(ok);
    }
    let t = Instant::now();
    let prep = Prepared::new(levels);
    let maps: Vec<VectorMapPair> = cuts
        .iter()
        .map(|&mu| {
            stats.mappings += 1;
            prep.highdim(cell, mu)
        })
        .collect();
    stats.mapping_nanos += t.elapsed().as_nanos();
    let groups_of = |lvl: &[Vec<Point>], i: usize| -> Vec<usize> {
        lvl[i]
            .iter()
            .map(|p| cuts.partition_point(|&c| c <= CellPos::of(*p).fx))
            .collect()
    };
    let g0 = groups_of(levels, 0);
    let gd = groups_of(levels, delta);
    let nb = cuts.len() + 1;
    for k in 0..nb {
        // Cuts bounding group k: cut k-1 (value μ_k) and cut k (value μ_{k+1}).
        let bounding: Vec<&VectorMapPair> = [k.checked_sub(1), (k < cuts.len()).then_some(k)]
            .into_iter()
            .flatten()
            .map(|c| &maps[c])
            .collect();
        let in0: Vec<u32> = (0..n0 as u32).filter(|&i| g0[i as usize] == k).collect();
        if in0.is_empty() {
            continue;
        }
        // A mapping component whose φ over the group's P_0 always exceeds
        // every ψ can never break dominance: drop it before copying.
        let kept: Vec<Vec<usize>> = bounding
            .iter()
            .map(|m| {
                let rows0: Vec<&[f64]> = in0.iter().map(|&i| m.phi_row(i as usize)).collect();
                let rowsd: Vec<&[f64]> = (0..nd).map(|i| m.psi_row(i)).collect();
                useful_columns(m.dim, &rows0, &rowsd)
            })
            .collect();
        let phi_extra: Vec<(&[f64], usize, &[usize])> =
            bounding.iter().zip(&kept).map(|(m, c)| (&m.phi[..], m.dim, &c[..])).collect();
        let psi_extra: Vec<(&[f64], usize, &[usize])> =
            bounding.iter().zip(&kept).map(|(m, c)| (&m.psi[..], m.dim, &c[..])).collect();
        let outd: Vec<u32> = (0..nd as u32).filter(|&i| gd[i as usize] != k).collect();
        let fk = f.select_extend(&in0, &phi_extra);
        let all_d: Vec<u32> = (0..nd as u32).collect();
        let gk_all = g.select_extend(&all_d, &psi_extra);
        let local0: Vec<u32> = (0..in0.len() as u32).collect();
        let t = Instant::now();
        let hit = find_dominating_pair(&fk, &local0, &gk_all, &outd, cfg.dominance);
        stats.dominance_nanos += t.elapsed().as_nanos();
        if hit.is_some() {
            return Ok(false);
        }
        // Recurse into group k.
        let sub_levels: Vec<Vec<Point>> = (0..=delta)
            .map(|i| {
                let gi = groups_of(levels, i);
                levels[i]
                    .iter()
                    .zip(gi)
                    .filter(|(_, gr)| *gr == k)
                    .map(|(p, _)| *p)
                    .collect()
            })
            .collect();
        let ind: Vec<u32> = (0..nd as u32).filter(|&i| gd[i as usize] == k).collect();
        let gk = gk_all.select_extend(&ind, &[]);
        if !solve(&sub_levels, cell, fk, gk, b, cfg, stats)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Layered reachability within the node: every dominated pair must be
/// connected. Reachable `P_0` sets are propagated as bitsets.
fn brute_force_node(levels: &[Vec<Point>], f: &Rows, g: &Rows, strategy: DominanceStrategy) -> bool {
    let delta = levels.len() - 1;
    let n0 = levels[0].len();
    let nd = levels[delta].len();
    let all_d: Vec<u32> = (0..nd as u32).collect();
    let all_0: Vec<u32> = (0..n0 as u32).collect();
    let sources: Vec<usize> = dominance_scan(f, &all_0, g, &all_d, strategy, false)
        .into_iter()
        .map(|(i, _)| i as usize)
        .collect();
    if sources.is_empty() {
        return true;
    }
    let idx: Vec<LevelIndex> = levels.iter().map(|l| LevelIndex::new(l.clone())).collect();
    let words = sources.len().div_ceil(64);
    let mut w = vec![0u64; n0 * words];
    for (b, &i) in sources.iter().enumerate() {
        w[i * words + b / 64] |= 1 << (b % 64);
    }
    for l in 1..=delta {
        w = linf_join(&idx[l - 1], &w, words, &idx[l]);
    }
    let empty: &[f64] = &[];
    for (b, &i) in sources.iter().enumerate() {
        let a = if f.dim == 0 { empty } else { f.row(i) };
        for q in 0..nd {
            let bq = if g.dim == 0 { empty } else { g.row(q) };
            if w[q * words + b / 64] & (1 << (b % 64)) == 0 && dominates(a, bq) {
                return false;
            }
        }
    }
    true
}

/// Decides whether the unit-square graph on `points` has diameter ≤ `delta`.
///
/// Convention: `delta = 0` answers `n == 1`.
pub fn unit_square_diam_at_most(points: &[Point], delta: usize) -> Result<bool> {
    unit_square_diam_at_most_with(points, delta, &UnitSquareConfig::default(), &mut UnitSquareStats::default())
}

/// [`unit_square_diam_at_most`] with explicit configuration and statistics.
pub fn unit_square_diam_at_most_with(
    points: &[Point],
    delta: usize,
    cfg: &UnitSquareConfig,
    stats: &mut UnitSquareStats,
) -> Result<bool> {
    if points.is_empty() {
        return Err(GeoError::Parameter("no points".into()));
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(GeoError::Parameter("non-finite coordinate".into()));
    }
    if points.len() == 1 {
        return Ok(true);
    }
    if delta == 0 {
        return Ok(false);
    }
    let pos: Vec<CellPos> = points.iter().map(|p| CellPos::of(*p)).collect();
    let d = delta as i64;
    let (minx, maxx) = pos.iter().fold((i64::MAX, i64::MIN), |(a, b), c| (a.min(c.cx), b.max(c.cx)));
    let (miny, maxy) = pos.iter().fold((i64::MAX, i64::MIN), |(a, b), c| (a.min(c.cy), b.max(c.cy)));
    // A chain of Δ steps from a cell reaches only cells within offset Δ.
    if maxx - minx > d || maxy - miny > d {
        return Ok(false);
    }
    let mut cells: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, c) in pos.iter().enumerate() {
        cells.entry((c.cx, c.cy)).or_default().push(i);
    }
    let mut keys: Vec<(i64, i64)> = cells.keys().copied().collect();
    keys.sort_unstable();
    let n = points.len();
    let b = cfg.branch.resolve(n, delta);
    for key in keys {
        let levels: Vec<Vec<Point>> = (0..=d)
            .map(|i| {
                if i == 0 {
                    cells[&key].iter().map(|&k| points[k]).collect()
                } else {
                    points
                        .iter()
                        .zip(&pos)
                        .filter(|(_, c)| {
                            (c.cx - key.0).abs() <= i && (c.cy - key.1).abs() <= i
                        })
                        .map(|(p, _)| *p)
                        .collect()
                }
            })
            .collect();
        if !solve(&levels, key, Rows::empty(), Rows::empty(), b, cfg, stats)? {
            return Ok(false);
        }
    }
    Ok(true)
}

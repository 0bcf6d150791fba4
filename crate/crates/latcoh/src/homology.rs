//! Sublevel-set cubical cohomology of weight rectangles, graded Z[U]-module
//! assembly, Euler characteristics, minimal-path invariants and the
//! Seiberg-Witten output.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num::{BigRational, Zero};

use crate::arith::{self, rat};
use crate::laufer::{self, BadVertexSet};
use crate::plumbing::{DualCycle, Lattice};
use crate::reduction::{self, WeightRectangle};
use crate::{Error, Result};

/// Direct sum decomposition of one cohomological degree: an infinite tail
/// T+_{2m} (degree 0 only) plus finite pieces T_{2Nb}(n).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedZuModule {
    pub q: usize,
    pub tplus_degree: Option<i64>,
    /// (2*Nb, length), sorted
    pub pieces: Vec<(i64, i64)>,
}

impl GradedZuModule {
    pub fn reduced_rank(&self) -> i64 {
        self.pieces.iter().map(|(_, n)| n).sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "q": self.q,
            "tplus": self.tplus_degree,
            "pieces": self.pieces.iter().map(|(b, n)| vec![*b, *n]).collect::<Vec<_>>(),
        })
    }

    /// Render in T-notation, e.g. `T+(-10) + T(-2,1) + T(0,1)`.
    pub fn display(&self) -> String {
        let mut parts = Vec::new();
        if let Some(d) = self.tplus_degree {
            parts.push(format!("T+({d})"));
        }
        let mut counted: BTreeMap<(i64, i64), usize> = BTreeMap::new();
        for &p in &self.pieces {
            *counted.entry(p).or_insert(0) += 1;
        }
        for ((b, n), mult) in counted {
            if mult == 1 {
                parts.push(format!("T({b},{n})"));
            } else {
                parts.push(format!("T({b},{n})^{mult}"));
            }
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }
}

fn sorted_weights(rect: &WeightRectangle) -> Vec<i64> {
    rect.weights.iter().copied().collect::<BTreeSet<_>>().into_iter().collect()
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn union(&mut self, keep: usize, absorb: usize) {
        let rk = self.find(keep);
        let ra = self.find(absorb);
        self.parent[ra] = rk;
    }
}

/// H^0 as a graded Z[U]-module: union-find merge pass over increasing
/// levels; the component of the lexicographically smallest global-minimum
/// point carries the infinite tail, elder rule on merges.
pub fn h0_module(rect: &WeightRectangle) -> GradedZuModule {
    let points = rect.points();
    let n = points.len();
    let m_w = rect.min_weight();

    // edges with activation level = max endpoint weight
    let mut edges: Vec<(i64, usize, usize)> = Vec::new();
    for (pi, p) in points.iter().enumerate() {
        for k in 0..rect.nu {
            if p[k] < rect.bound[k] {
                let mut q = p.clone();
                q[k] += 1;
                let qi = rect.index(&q);
                edges.push((rect.w0(p).max(rect.w0(&q)), pi, qi));
            }
        }
    }
    edges.sort();
    let mut point_order: Vec<usize> = (0..n).collect();
    point_order.sort_by_key(|&i| (rect.weights[i], i));

    let levels = sorted_weights(rect);
    let mut uf = UnionFind::new(n);
    // root -> (birth level, anchor flat index)
    let mut birth: HashMap<usize, (i64, usize)> = HashMap::new();
    let mut pieces: Vec<(i64, i64)> = Vec::new();
    let (mut pe, mut ee) = (0usize, 0usize);
    for &level in &levels {
        while pe < n && rect.weights[point_order[pe]] == level {
            let i = point_order[pe];
            birth.insert(i, (level, i));
            pe += 1;
        }
        while ee < edges.len() && edges[ee].0 == level {
            let (_, a, b) = edges[ee];
            ee += 1;
            let ra = uf.find(a);
            let rb = uf.find(b);
            if ra == rb {
                continue;
            }
            let ba = birth[&ra];
            let bb = birth[&rb];
            let (survivor, dying) = if ba <= bb { (ra, rb) } else { (rb, ra) };
            let (bd, _) = birth[&dying];
            if level > bd {
                pieces.push((2 * bd, level - bd));
            }
            let surv_birth = birth[&survivor];
            birth.remove(&dying);
            birth.remove(&survivor);
            uf.union(survivor, dying);
            birth.insert(uf.find(survivor), surv_birth);
        }
    }
    debug_assert_eq!(birth.len(), 1, "rectangle must end connected");
    pieces.sort_unstable();
    GradedZuModule { q: 0, tplus_degree: Some(2 * m_w), pieces }
}

/// Per-level data of the planar complement-region tracking.
struct RegionLevels {
    levels: Vec<i64>,
    counts: Vec<usize>,
    /// parents[li][r]: bounded region of level li-1 containing region r of
    /// level li (None if it sits in the unbounded region)
    parents: Vec<Vec<Option<usize>>>,
}

/// Bounded complementary regions of the sublevel complex inside the frame;
/// returns (count, cell -> region id with -1 outside and -2 inside S).
fn planar_regions(rect: &WeightRectangle, level: i64) -> (usize, Vec<i64>) {
    debug_assert_eq!(rect.nu, 2);
    let (bi, bj) = (rect.bound[0], rect.bound[1]);
    let vcount = ((bi + 1) * (bj + 1)) as usize;
    let hcount = (bi * (bj + 1)) as usize;
    let vecount = ((bi + 1) * bj) as usize;
    let scount = (bi * bj) as usize;
    let vid = |i: i64, j: i64| (i * (bj + 1) + j) as usize;
    let hid = |i: i64, j: i64| vcount + (i * (bj + 1) + j) as usize;
    let veid = |i: i64, j: i64| vcount + hcount + (i * bj + j) as usize;
    let sid = |i: i64, j: i64| vcount + hcount + vecount + (i * bj + j) as usize;
    let total = vcount + hcount + vecount + scount;
    let outside = total;

    let w = |i: i64, j: i64| rect.w0(&[i, j]);
    let in_vertex = |i: i64, j: i64| w(i, j) <= level;
    let in_hedge = |i: i64, j: i64| w(i, j).max(w(i + 1, j)) <= level;
    let in_vedge = |i: i64, j: i64| w(i, j).max(w(i, j + 1)) <= level;
    let in_square =
        |i: i64, j: i64| w(i, j).max(w(i + 1, j)).max(w(i, j + 1)).max(w(i + 1, j + 1)) <= level;

    let mut uf = UnionFind::new(total + 1);
    for i in 0..=bi {
        for j in 0..=bj {
            if in_vertex(i, j) {
                continue;
            }
            if i == 0 || i == bi || j == 0 || j == bj {
                uf.union(outside, vid(i, j));
            }
            if i < bi && !in_hedge(i, j) {
                uf.union(vid(i, j), hid(i, j));
            }
            if i > 0 && !in_hedge(i - 1, j) {
                uf.union(vid(i, j), hid(i - 1, j));
            }
            if j < bj && !in_vedge(i, j) {
                uf.union(vid(i, j), veid(i, j));
            }
            if j > 0 && !in_vedge(i, j - 1) {
                uf.union(vid(i, j), veid(i, j - 1));
            }
        }
    }
    for i in 0..bi {
        for j in 0..=bj {
            if in_hedge(i, j) {
                continue;
            }
            if j < bj && !in_square(i, j) {
                uf.union(hid(i, j), sid(i, j));
            }
            if j > 0 && !in_square(i, j - 1) {
                uf.union(hid(i, j), sid(i, j - 1));
            }
            if j == 0 || j == bj {
                uf.union(outside, hid(i, j));
            }
        }
    }
    for i in 0..=bi {
        for j in 0..bj {
            if in_vedge(i, j) {
                continue;
            }
            if i < bi && !in_square(i, j) {
                uf.union(veid(i, j), sid(i, j));
            }
            if i > 0 && !in_square(i - 1, j) {
                uf.union(veid(i, j), sid(i - 1, j));
            }
            if i == 0 || i == bi {
                uf.union(outside, veid(i, j));
            }
        }
    }

    let cell_in_s = |c: usize| -> bool {
        if c < vcount {
            let i = c as i64 / (bj + 1);
            let j = c as i64 % (bj + 1);
            in_vertex(i, j)
        } else if c < vcount + hcount {
            let k = (c - vcount) as i64;
            in_hedge(k / (bj + 1), k % (bj + 1))
        } else if c < vcount + hcount + vecount {
            let k = (c - vcount - hcount) as i64;
            in_vedge(k / bj, k % bj)
        } else {
            let k = (c - vcount - hcount - vecount) as i64;
            in_square(k / bj, k % bj)
        }
    };
    let out_root = uf.find(outside);
    let mut region_of_cell: Vec<i64> = vec![-2; total];
    let mut ids: BTreeMap<usize, usize> = BTreeMap::new();
    for c in 0..total {
        if cell_in_s(c) {
            continue;
        }
        let r = uf.find(c);
        if r == out_root {
            region_of_cell[c] = -1;
        } else {
            let next = ids.len();
            let id = *ids.entry(r).or_insert(next);
            region_of_cell[c] = id as i64;
        }
    }
    (ids.len(), region_of_cell)
}

fn region_levels(rect: &WeightRectangle) -> RegionLevels {
    let levels = sorted_weights(rect);
    let per: Vec<(usize, Vec<i64>)> =
        crate::par::map_indexed(levels.len(), |i| planar_regions(rect, levels[i]));
    let counts: Vec<usize> = per.iter().map(|(c, _)| *c).collect();
    let mut parents: Vec<Vec<Option<usize>>> = vec![vec![]; levels.len()];
    for li in 1..levels.len() {
        let mut parent = vec![None; counts[li]];
        let mut seen = vec![false; counts[li]];
        for (cell, &r) in per[li].1.iter().enumerate() {
            if r >= 0 {
                let r = r as usize;
                if !seen[r] {
                    seen[r] = true;
                    let up = per[li - 1].1[cell];
                    debug_assert!(up != -2, "complement must shrink as the level grows");
                    parent[r] = if up >= 0 { Some(up as usize) } else { None };
                }
            }
        }
        parents[li] = parent;
    }
    RegionLevels { levels, counts, parents }
}

/// H^1 for nu = 2 via bounded complementary regions tracked across levels;
/// interval multiplicities come from the rank function of the tracking maps.
pub fn h1_module(rect: &WeightRectangle) -> Result<GradedZuModule> {
    if rect.nu != 2 {
        return Err(Error::Unsupported(
            "degree-1 module structure needs nu = 2; use ranks_only".into(),
        ));
    }
    let rl = region_levels(rect);
    let k = rl.levels.len();
    let rank = |lo: usize, hi: usize| -> usize {
        if lo > hi {
            return 0;
        }
        let mut cur: Vec<Option<usize>> = (0..rl.counts[hi]).map(Some).collect();
        let mut li = hi;
        while li > lo {
            for a in cur.iter_mut() {
                if let Some(r) = *a {
                    *a = rl.parents[li][r];
                }
            }
            li -= 1;
        }
        cur.into_iter().flatten().collect::<BTreeSet<_>>().len()
    };
    let mut pieces = Vec::new();
    for b in 0..k {
        for d in b..k {
            let m = rank(b, d) as i64
                - if b > 0 { rank(b - 1, d) as i64 } else { 0 }
                - if d + 1 < k { rank(b, d + 1) as i64 } else { 0 }
                + if b > 0 && d + 1 < k { rank(b - 1, d + 1) as i64 } else { 0 };
            debug_assert!(m >= 0);
            if m > 0 {
                assert!(d + 1 < k, "a hole must die before the top level");
                let birth = rl.levels[b];
                let death = rl.levels[d + 1];
                for _ in 0..m {
                    pieces.push((2 * birth, death - birth));
                }
            }
        }
    }
    pieces.sort_unstable();
    Ok(GradedZuModule { q: 1, tplus_degree: None, pieces })
}

/// Finite degree-0 generators with their birth anchors (for rendering).
pub fn h0_generators(rect: &WeightRectangle) -> Vec<(i64, i64, Vec<i64>)> {
    let points = rect.points();
    let n = points.len();
    let mut edges: Vec<(i64, usize, usize)> = Vec::new();
    for (pi, p) in points.iter().enumerate() {
        for k in 0..rect.nu {
            if p[k] < rect.bound[k] {
                let mut q = p.clone();
                q[k] += 1;
                edges.push((rect.w0(p).max(rect.w0(&q)), pi, rect.index(&q)));
            }
        }
    }
    edges.sort();
    let mut point_order: Vec<usize> = (0..n).collect();
    point_order.sort_by_key(|&i| (rect.weights[i], i));
    let levels = sorted_weights(rect);
    let mut uf = UnionFind::new(n);
    let mut birth: HashMap<usize, (i64, usize)> = HashMap::new();
    let mut out = Vec::new();
    let (mut pe, mut ee) = (0usize, 0usize);
    for &level in &levels {
        while pe < n && rect.weights[point_order[pe]] == level {
            let i = point_order[pe];
            birth.insert(i, (level, i));
            pe += 1;
        }
        while ee < edges.len() && edges[ee].0 == level {
            let (_, a, b) = edges[ee];
            ee += 1;
            let ra = uf.find(a);
            let rb = uf.find(b);
            if ra == rb {
                continue;
            }
            let ba = birth[&ra];
            let bb = birth[&rb];
            let (survivor, dying) = if ba <= bb { (ra, rb) } else { (rb, ra) };
            let (bd, anchor) = birth[&dying];
            if level > bd {
                out.push((bd, level - bd, points[anchor].clone()));
            }
            let surv_birth = birth[&survivor];
            birth.remove(&dying);
            birth.remove(&survivor);
            uf.union(survivor, dying);
            birth.insert(uf.find(survivor), surv_birth);
        }
    }
    out.sort();
    out
}

/// Freshly born holes per level with cell bounding boxes (for rendering);
/// nu = 2 only.
pub fn h1_generators(rect: &WeightRectangle) -> Result<Vec<(i64, (i64, i64, i64, i64))>> {
    if rect.nu != 2 {
        return Err(Error::Unsupported("hole rendering needs nu = 2".into()));
    }
    let levels = sorted_weights(rect);
    let (bi, bj) = (rect.bound[0], rect.bound[1]);
    let vcount = ((bi + 1) * (bj + 1)) as usize;
    let hcount = (bi * (bj + 1)) as usize;
    let vecount = ((bi + 1) * bj) as usize;
    // approximate cell center in grid coordinates, for bounding boxes
    let cell_box = |c: usize| -> (i64, i64, i64, i64) {
        if c < vcount {
            let i = c as i64 / (bj + 1);
            let j = c as i64 % (bj + 1);
            (i, j, i, j)
        } else if c < vcount + hcount {
            let k = (c - vcount) as i64;
            let (i, j) = (k / (bj + 1), k % (bj + 1));
            (i, j, i + 1, j)
        } else if c < vcount + hcount + vecount {
            let k = (c - vcount - hcount) as i64;
            let (i, j) = (k / bj, k % bj);
            (i, j, i, j + 1)
        } else {
            let k = (c - vcount - hcount - vecount) as i64;
            let (i, j) = (k / bj, k % bj);
            (i, j, i + 1, j + 1)
        }
    };
    let mut prev_map: Option<Vec<i64>> = None;
    let mut out = Vec::new();
    for &level in &levels {
        let (count, map) = planar_regions(rect, level);
        // fresh hole: bounded region whose cells sat in the unbounded region
        // (or nothing bounded) one level down
        for r in 0..count {
            let fresh = match &prev_map {
                None => true,
                Some(pm) => {
                    let mut parent_bounded = false;
                    for (cell, &cr) in map.iter().enumerate() {
                        if cr == r as i64 && pm[cell] >= 0 {
                            parent_bounded = true;
                            break;
                        }
                    }
                    !parent_bounded
                }
            };
            if fresh {
                let mut bb = (i64::MAX, i64::MAX, i64::MIN, i64::MIN);
                for (cell, &cr) in map.iter().enumerate() {
                    if cr == r as i64 {
                        let (x0, y0, x1, y1) = cell_box(cell);
                        bb = (bb.0.min(x0), bb.1.min(y0), bb.2.max(x1), bb.3.max(y1));
                    }
                }
                out.push((level, bb));
            }
        }
        prev_map = Some(map);
    }
    Ok(out)
}

/// Rank table of one sublevel complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelRanks {
    pub level: i64,
    pub ranks: Vec<usize>,
    pub torsion_free: bool,
}

/// Cubical complex of a sublevel set: (base flat index, coordinate mask)
/// per dimension.
struct Complex {
    cubes: Vec<Vec<(usize, u32)>>,
}

fn build_complex(rect: &WeightRectangle, level: i64) -> Complex {
    let points = rect.points();
    let mut cubes: Vec<Vec<(usize, u32)>> = vec![Vec::new(); rect.nu + 1];
    for p in &points {
        for mask in 0u32..(1 << rect.nu) {
            let q = mask.count_ones() as usize;
            let fits = (0..rect.nu).all(|k| mask & (1 << k) == 0 || p[k] < rect.bound[k]);
            if fits && rect.cube_weight(p, mask) <= level {
                cubes[q].push((rect.index(p), mask));
            }
        }
    }
    Complex { cubes }
}

fn strides(rect: &WeightRectangle) -> Vec<usize> {
    let mut s = vec![1usize; rect.nu];
    for k in (0..rect.nu.saturating_sub(1)).rev() {
        s[k] = s[k + 1] * (rect.bound[k + 1] + 1) as usize;
    }
    s
}

/// Boundary of each q-cube as (face index in dimension q-1, sign).
fn boundary_matrix(rect: &WeightRectangle, cx: &Complex, q: usize) -> Vec<Vec<(usize, i64)>> {
    if q == 0 {
        return vec![Vec::new(); cx.cubes[0].len()];
    }
    let lower: HashMap<(usize, u32), usize> =
        cx.cubes[q - 1].iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let st = strides(rect);
    cx.cubes[q]
        .iter()
        .map(|&(base, mask)| {
            let dims: Vec<usize> = (0..rect.nu).filter(|k| mask & (1 << k) != 0).collect();
            let mut faces = Vec::new();
            for (pos, &k) in dims.iter().enumerate() {
                let sign = if pos % 2 == 0 { 1i64 } else { -1 };
                let sub = mask & !(1 << k);
                faces.push((lower[&(base + st[k], sub)], sign));
                faces.push((lower[&(base, sub)], -sign));
            }
            faces
        })
        .collect()
}

/// Rank of a sparse integer matrix (columns given by sparse entries) with a
/// torsion certificate: true when elimination only ever used +-1 pivots.
fn int_rank(cols: &[Vec<(usize, i64)>]) -> (usize, bool) {
    let mut m: Vec<BTreeMap<usize, BigRational>> = cols
        .iter()
        .map(|c| {
            let mut row: BTreeMap<usize, BigRational> = BTreeMap::new();
            for &(r, v) in c {
                let e = row.entry(r).or_insert_with(BigRational::zero);
                *e += rat(v);
            }
            row.retain(|_, v| !v.is_zero());
            row
        })
        .collect();
    let ncols = m.len();
    let mut rank = 0usize;
    let mut used = vec![false; ncols];
    let mut torsion_free = true;
    loop {
        let mut pick: Option<(usize, usize)> = None;
        for (ci, row) in m.iter().enumerate() {
            if used[ci] || row.is_empty() {
                continue;
            }
            if let Some((&r, _)) =
                row.iter().find(|(_, v)| v.numer().magnitude() == v.denom().magnitude())
            {
                pick = Some((ci, r));
                break;
            }
            if pick.is_none() {
                let (&r, _) = row.iter().next().unwrap();
                pick = Some((ci, r));
            }
        }
        let Some((pc, pr)) = pick else { break };
        used[pc] = true;
        rank += 1;
        let pivot = m[pc][&pr].clone();
        if pivot.numer().magnitude() != pivot.denom().magnitude() {
            torsion_free = false;
        }
        let prow = m[pc].clone();
        for (ci, row) in m.iter_mut().enumerate() {
            if ci == pc || used[ci] {
                continue;
            }
            if let Some(f) = row.get(&pr).cloned() {
                let factor = f / pivot.clone();
                for (&r, v) in &prow {
                    let delta = &factor * v;
                    let e = row.entry(r).or_insert_with(BigRational::zero);
                    *e -= delta;
                }
                row.retain(|_, v| !v.is_zero());
            }
        }
    }
    (rank, torsion_free)
}

/// Ranks via exact matrix reduction; reference path for any nu, used
/// directly for nu >= 3 and as a cross-check of the planar fast path.
pub fn sublevel_ranks_matrix(rect: &WeightRectangle, level: i64) -> LevelRanks {
    let cx = build_complex(rect, level);
    let dims: Vec<usize> = cx.cubes.iter().map(|c| c.len()).collect();
    let mut rank_d = vec![0usize; rect.nu + 2];
    let mut torsion_free = true;
    for q in 1..=rect.nu {
        if dims[q] == 0 {
            continue;
        }
        let cols = boundary_matrix(rect, &cx, q);
        let (r, tf) = int_rank(&cols);
        rank_d[q] = r;
        torsion_free &= tf;
    }
    let ranks: Vec<usize> =
        (0..=rect.nu).map(|q| if dims[q] == 0 { 0 } else { dims[q] - rank_d[q] - rank_d[q + 1] }).collect();
    LevelRanks { level, ranks, torsion_free }
}

/// Number of connected components of the sublevel complex (vertices and
/// edges suffice).
fn component_count(rect: &WeightRectangle, level: i64) -> usize {
    let points = rect.points();
    let n = points.len();
    let mut uf = UnionFind::new(n);
    let mut alive = vec![false; n];
    for (pi, p) in points.iter().enumerate() {
        if rect.w0(p) > level {
            continue;
        }
        alive[pi] = true;
        for k in 0..rect.nu {
            if p[k] < rect.bound[k] {
                let mut q = p.clone();
                q[k] += 1;
                if rect.w0(&q) <= level {
                    uf.union(pi, rect.index(&q));
                }
            }
        }
    }
    let mut roots = BTreeSet::new();
    for (pi, &a) in alive.iter().enumerate() {
        if a {
            roots.insert(uf.find(pi));
        }
    }
    roots.len()
}

/// Alternating cell count V - E + F ... of the sublevel complex.
fn cell_euler(rect: &WeightRectangle, level: i64) -> i64 {
    let points = rect.points();
    let mut chi = 0i64;
    for p in &points {
        for mask in 0u32..(1 << rect.nu) {
            let q = mask.count_ones();
            let fits = (0..rect.nu).all(|k| mask & (1 << k) == 0 || p[k] < rect.bound[k]);
            if fits && rect.cube_weight(p, mask) <= level {
                chi += if q % 2 == 0 { 1 } else { -1 };
            }
        }
    }
    chi
}

/// Ranks of integral cohomology of the sublevel complex at `level`, degrees
/// 0..=nu. Planar complexes (nu <= 2) take a combinatorial route (connected
/// components, complement regions, Euler count) and are torsion-free; higher
/// nu runs the integer matrix reduction with a torsion certificate.
pub fn sublevel_ranks(rect: &WeightRectangle, level: i64) -> LevelRanks {
    match rect.nu {
        1 => {
            let b0 = component_count(rect, level);
            let chi = cell_euler(rect, level);
            let b1 = b0 as i64 - chi;
            assert!(b1 == 0, "a subcomplex of a segment is a forest");
            LevelRanks { level, ranks: vec![b0, 0], torsion_free: true }
        }
        2 => {
            let b0 = component_count(rect, level);
            let (b1, _) = planar_regions(rect, level);
            let chi = cell_euler(rect, level);
            let b2 = chi - b0 as i64 + b1 as i64;
            assert_eq!(b2, 0, "planar sublevel complexes have no top cohomology");
            LevelRanks { level, ranks: vec![b0, b1, 0], torsion_free: true }
        }
        _ => sublevel_ranks_matrix(rect, level),
    }
}

/// Per-level rank table for all degrees over the realized weight values.
pub fn ranks_only(rect: &WeightRectangle) -> Vec<LevelRanks> {
    let levels = sorted_weights(rect);
    crate::par::map_indexed(levels.len(), |i| sublevel_ranks(rect, levels[i]))
}

/// Sequential twin of `ranks_only` for benchmarking.
pub fn ranks_only_seq(rect: &WeightRectangle) -> Vec<LevelRanks> {
    let levels = sorted_weights(rect);
    crate::par::map_indexed_seq(levels.len(), |i| sublevel_ranks(rect, levels[i]))
}

/// Rank of the restriction map H^q(S_next) -> H^q(S_level) over Q, for
/// U-action data in the general-nu fallback.
pub fn restriction_rank(rect: &WeightRectangle, level: i64, next: i64, q: usize) -> usize {
    let big_cx = build_complex(rect, next);
    let small_cx = build_complex(rect, level);
    let nq_big = big_cx.cubes[q].len();
    let nq_small = small_cx.cubes[q].len();
    if nq_big == 0 || nq_small == 0 {
        return 0;
    }
    // cocycles of the big complex: z with z(boundary c) = 0 for all
    // (q+1)-cubes c
    let upper = if q + 1 <= rect.nu { big_cx.cubes[q + 1].len() } else { 0 };
    let mut a = arith::QMat::zero(upper, nq_big);
    if q + 1 <= rect.nu {
        for (ci, faces) in boundary_matrix(rect, &big_cx, q + 1).iter().enumerate() {
            for &(r, v) in faces {
                a[(ci, r)] = a[(ci, r)].clone() + rat(v);
            }
        }
    }
    let cocycles = kernel_basis(&a);
    let small_index: HashMap<(usize, u32), usize> =
        small_cx.cubes[q].iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let restricted: Vec<Vec<BigRational>> = cocycles
        .iter()
        .map(|z| {
            let mut out = vec![BigRational::zero(); nq_small];
            for (bi, cube) in big_cx.cubes[q].iter().enumerate() {
                if let Some(&si) = small_index.get(cube) {
                    out[si] = z[bi].clone();
                }
            }
            out
        })
        .collect();
    // coboundaries of the small complex: delta(phi)(c) = phi(boundary c)
    let mut cob: Vec<Vec<BigRational>> = Vec::new();
    if q > 0 {
        let d_small = boundary_matrix(rect, &small_cx, q);
        let n_lower = small_cx.cubes[q - 1].len();
        for low in 0..n_lower {
            let mut col = vec![BigRational::zero(); nq_small];
            for (ci, faces) in d_small.iter().enumerate() {
                for &(r, v) in faces {
                    if r == low {
                        col[ci] = col[ci].clone() + rat(v);
                    }
                }
            }
            cob.push(col);
        }
    }
    let pack = |rows: &[Vec<BigRational>]| -> arith::QMat {
        let mut m = arith::QMat::zero(rows.len().max(1), nq_small);
        for (i, r) in rows.iter().enumerate() {
            for (j, v) in r.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    };
    let rank_cob = if cob.is_empty() { 0 } else { pack(&cob).rank() };
    let mut all = cob;
    all.extend(restricted);
    let rank_all = pack(&all).rank();
    rank_all - rank_cob
}

/// Kernel basis of a rational matrix (columns = unknowns).
fn kernel_basis(a: &arith::QMat) -> Vec<Vec<BigRational>> {
    let rows = a.rows;
    let cols = a.cols;
    let mut m = a.clone();
    let mut pivots: Vec<usize> = Vec::new();
    let mut rank = 0usize;
    for col in 0..cols {
        let p = (rank..rows).find(|&r| !m[(r, col)].is_zero());
        let Some(p) = p else { continue };
        for j in 0..cols {
            let x = m[(p, j)].clone();
            let y = m[(rank, j)].clone();
            m[(p, j)] = y;
            m[(rank, j)] = x;
        }
        let pv = m[(rank, col)].clone();
        for r in 0..rows {
            if r != rank && !m[(r, col)].is_zero() {
                let f = &m[(r, col)] / &pv;
                for j in 0..cols {
                    let sub = &f * &m[(rank, j)];
                    m[(r, j)] -= sub;
                }
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == rows {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::new();
    for &f in &free {
        let mut v = vec![BigRational::zero(); cols];
        v[f] = rat(1);
        for (ri, &pc) in pivots.iter().enumerate() {
            let pv = m[(ri, pc)].clone();
            v[pc] = -&m[(ri, f)] / &pv;
        }
        basis.push(v);
    }
    basis
}

/// Normalized Euler characteristic -m_w + sum_q (-1)^q rank H^q_red, reduced
/// ranks accumulated over integer levels.
pub fn euler_characteristic(rect: &WeightRectangle) -> i64 {
    let table = ranks_only(rect);
    let levels = sorted_weights(rect);
    let m_w = rect.min_weight();
    let mut eu = -m_w;
    for (li, lr) in table.iter().enumerate() {
        let mult = if li + 1 < levels.len() { levels[li + 1] - levels[li] } else { 1 };
        let mut alt = (lr.ranks[0] as i64 - 1) * mult;
        for (q, &r) in lr.ranks.iter().enumerate().skip(1) {
            let sign = if q % 2 == 0 { 1 } else { -1 };
            alt += sign * r as i64 * mult;
        }
        eu += alt;
    }
    eu
}

/// Monotone lattice path inside the rectangle.
#[derive(Clone, Debug)]
pub struct MonotonePath {
    pub steps: Vec<Vec<i64>>,
}

/// -w0(x0) + sum max(0, w0(x_n) - w0(x_{n+1})) along the path.
pub fn path_eu(rect: &WeightRectangle, path: &MonotonePath) -> Result<i64> {
    for p in &path.steps {
        if p.len() != rect.nu || p.iter().zip(&rect.bound).any(|(c, b)| *c < 0 || c > b) {
            return Err(Error::Unsupported("path leaves the rectangle".into()));
        }
    }
    let mut eu = -rect.w0(&path.steps[0]);
    for w in path.steps.windows(2) {
        eu += (rect.w0(&w[0]) - rect.w0(&w[1])).max(0);
    }
    Ok(eu)
}

fn min_path_table(rect: &WeightRectangle) -> (Vec<i64>, Vec<Option<usize>>) {
    let points = rect.points();
    let mut best: Vec<i64> = vec![i64::MAX; points.len()];
    let mut prev: Vec<Option<usize>> = vec![None; points.len()];
    let origin = vec![0i64; rect.nu];
    best[rect.index(&origin)] = -rect.w0(&origin);
    // lexicographic point order dominates the coordinatewise order
    for p in &points {
        let pi = rect.index(p);
        let cur = best[pi];
        if cur == i64::MAX {
            continue;
        }
        for k in 0..rect.nu {
            if p[k] < rect.bound[k] {
                let mut q = p.clone();
                q[k] += 1;
                let cost = cur + (rect.w0(p) - rect.w0(&q)).max(0);
                let qi = rect.index(&q);
                if cost < best[qi] {
                    best[qi] = cost;
                    prev[qi] = Some(pi);
                }
            }
        }
    }
    (best, prev)
}

/// Minimum of `path_eu` over monotone paths 0 -> far corner by dynamic
/// programming; exact because the objective is additive over steps.
pub fn min_path_eu(rect: &WeightRectangle) -> i64 {
    let (best, _) = min_path_table(rect);
    best[rect.index(&rect.bound.clone())]
}

/// One minimizing monotone path (for rendering).
pub fn min_path(rect: &WeightRectangle) -> MonotonePath {
    let (_, prev) = min_path_table(rect);
    let points = rect.points();
    let mut path = Vec::new();
    let mut cur = rect.index(&rect.bound.clone());
    loop {
        path.push(points[cur].clone());
        match prev[cur] {
            Some(p) => cur = p,
            None => break,
        }
    }
    path.reverse();
    MonotonePath { steps: path }
}

/// Full Seiberg-Witten report for one class.
#[derive(Clone, Debug)]
pub struct SwReport {
    pub eu: i64,
    /// ((k_can + 2 r_h)^2 + |V|)/8
    pub normalization: BigRational,
    pub sw: BigRational,
}

/// sw = -eu - ((k_can + 2 r_h)^2 + |V|)/8 with eu the normalized Euler
/// characteristic of the reduced rectangle of the class; the bad set
/// defaults to the (validated) node set.
pub fn sw_invariant(
    lat: &Lattice,
    l_prime: &DualCycle,
    bad: Option<BadVertexSet>,
) -> Result<SwReport> {
    let bad = match bad {
        Some(b) => b,
        None => BadVertexSet::new(lat.graph.nodes()),
    };
    if !laufer::validate_bad_vertices(lat, &bad)? {
        return Err(Error::InvalidBadSet("candidate set fails the rationality test".into()));
    }
    let class = laufer::spinc_class(lat, l_prime)?;
    let eu = if bad.nu() == 0 {
        0
    } else {
        let rect = reduction::weight_rectangle(lat, &bad, &class, None)?;
        euler_characteristic(&rect)
    };
    let shifted = lat.k_can.add(&class.r_h.scale(&rat(2)));
    let normalization = (lat.pair(&shifted, &shifted) + rat(lat.size() as i64)) / rat(8);
    let sw = -rat(eu) - normalization.clone();
    Ok(SwReport { eu, normalization, sw })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plumbing::parse_graph;
    use crate::reduction::{two_node_data, two_node_weights};

    fn lat(text: &str) -> Lattice {
        Lattice::new(parse_graph(text).unwrap()).unwrap()
    }

    fn g621_rect() -> WeightRectangle {
        let l = lat("vertex n1 -1\nvertex n2 -1\nvertex m -11\n\
             vertex l1 -5\nvertex l2 -5\nvertex l3 -5\n\
             vertex r1 -5\nvertex r2 -5\nvertex r3 -5\n\
             edge n1 m\nedge m n2\nedge n1 l1\nedge n1 l2\nedge n1 l3\n\
             edge n2 r1\nedge n2 r2\nedge n2 r3\n");
        let d = two_node_data(&l).unwrap();
        two_node_weights(&l, &d, (7, 7))
    }

    #[test]
    fn one_dim_halved_abs() {
        // w0(n) = floor(|n|/2) on the symmetric window: every sublevel is a
        // segment, so the module is the bare tail
        let weights: Vec<i64> = (-9i64..=9).map(|n| n.abs() / 2).collect();
        let rect = WeightRectangle::from_weights(vec![18], weights);
        let m = h0_module(&rect);
        assert_eq!(m.tplus_degree, Some(0));
        assert!(m.pieces.is_empty());
        for lr in ranks_only(&rect) {
            assert_eq!(lr.ranks[0], 1);
            assert_eq!(lr.ranks[1], 0);
        }
    }

    #[test]
    fn one_dim_spiky() {
        // w0(n) = floor(n/2) + 4 frac(n/2) on 0..=9: one new component per
        // level 1..=4, each dying one level later
        let weights: Vec<i64> = (0..=9).map(|n| n / 2 + 2 * (n % 2)).collect();
        let rect = WeightRectangle::from_weights(vec![9], weights);
        let m = h0_module(&rect);
        assert_eq!(m.tplus_degree, Some(0));
        assert_eq!(m.pieces, vec![(2, 1), (4, 1), (6, 1), (8, 1)]);
    }

    #[test]
    fn g621_modules() {
        let rect = g621_rect();
        let h0 = h0_module(&rect);
        assert_eq!(h0.tplus_degree, Some(-10));
        assert_eq!(h0.pieces, vec![(-2, 1), (0, 1)]);
        let h1 = h1_module(&rect).unwrap();
        assert_eq!(h1.pieces, vec![(0, 1)]);
        assert_eq!(euler_characteristic(&rect), 6);
        assert_eq!(-(-5) + h0.reduced_rank(), 7);
    }

    #[test]
    fn g621_min_path() {
        // the monotone minimum here sits strictly between eu(H^*) = 6 and
        // nothing smaller is reachable even with +- steps in the rectangle
        let rect = g621_rect();
        assert_eq!(min_path_eu(&rect), 7);
        let p = min_path(&rect);
        assert_eq!(path_eu(&rect, &p).unwrap(), 7);
    }

    #[test]
    fn vanishing_top_degree_g621() {
        let rect = g621_rect();
        for lr in ranks_only(&rect) {
            assert_eq!(lr.ranks[2], 0, "H^2 must vanish at level {}", lr.level);
            assert!(lr.torsion_free);
        }
    }

    #[test]
    fn planar_fast_path_matches_matrix_ranks() {
        let rect = g621_rect();
        for lr in ranks_only(&rect) {
            let reference = sublevel_ranks_matrix(&rect, lr.level);
            assert_eq!(lr.ranks, reference.ranks, "level {}", lr.level);
            assert!(reference.torsion_free);
        }
    }

    #[test]
    fn euler_3d_contractible() {
        let rect = WeightRectangle::from_weights(vec![1, 1, 1], vec![0; 8]);
        let lr = sublevel_ranks(&rect, 0);
        assert_eq!(lr.ranks, vec![1, 0, 0, 0]);
        assert_eq!(euler_characteristic(&rect), 0);
    }

    #[test]
    fn ranks_3d_hollow_box() {
        // 3x3x3 grid with the center vertex blocked at level 0: the level-0
        // complex deformation retracts to a 2-sphere
        let rect0 = WeightRectangle::from_weights(vec![2, 2, 2], vec![0; 27]);
        let center = rect0.index(&[1, 1, 1]);
        let mut weights = vec![0i64; 27];
        weights[center] = 2;
        let rect = WeightRectangle::from_weights(vec![2, 2, 2], weights);
        let lr = sublevel_ranks(&rect, 0);
        assert_eq!(lr.ranks, vec![1, 0, 1, 0]);
        assert!(lr.torsion_free);
        let lr2 = sublevel_ranks(&rect, 2);
        assert_eq!(lr2.ranks, vec![1, 0, 0, 0]);
    }

    #[test]
    fn restriction_rank_h0() {
        // two components at level 0 merging at level 1
        let rect = WeightRectangle::from_weights(vec![2], vec![0, 1, 0]);
        assert_eq!(restriction_rank(&rect, 0, 1, 0), 1);
        let t = ranks_only(&rect);
        assert_eq!(t[0].ranks[0], 2);
        assert_eq!(t[1].ranks[0], 1);
    }

    #[test]
    fn g621_level_minus_one_components() {
        let rect = g621_rect();
        let lr = sublevel_ranks(&rect, -1);
        assert_eq!(lr.ranks[0], 2);
    }

    #[test]
    fn path_eu_no_drops_is_minus_initial_weight() {
        let rect = WeightRectangle::from_weights(vec![3], vec![2, 2, 3, 5]);
        let path = MonotonePath { steps: (0..=3).map(|i| vec![i]).collect() };
        assert_eq!(path_eu(&rect, &path).unwrap(), -2);
    }

    #[test]
    fn path_eu_constant_decreasing() {
        // strictly decreasing weights: eu = -w0(0)
        let rect = WeightRectangle::from_weights(vec![3], vec![5, 4, 3, 2]);
        let path = MonotonePath { steps: (0..=3).map(|i| vec![i]).collect() };
        assert_eq!(path_eu(&rect, &path).unwrap(), -5 + 3);
        // each step drops by one: sum of positive drops = 3
        assert_eq!(min_path_eu(&rect), -2);
    }
}

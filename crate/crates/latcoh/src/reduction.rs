//! Reduced weight tables over the bad-vertex lattice, closed-form two-node
//! weights and the finite bounding rectangle.

use num::{BigInt, BigRational, Integer, One, Signed, Zero};

use crate::arith::{self, big, ceil_div, chain_det, rat};
use crate::laufer::{BadVertexSet, XCycleEngine};
use crate::plumbing::{Cycle, DualCycle, Lattice, SpinCClass};
use crate::{par, Error, Result};

/// One leg of a star-shaped subgraph: normalized pair with the vertex chain
/// listed from the node outwards.
#[derive(Clone, Debug)]
pub struct Leg {
    pub alpha: BigInt,
    pub omega: BigInt,
    pub vertices: Vec<usize>,
}

/// Star-shaped data at a node: decoration, normalized legs and the orbifold
/// Euler number e = b0 + sum omega/alpha (all adjacent chains included).
#[derive(Clone, Debug)]
pub struct SeifertData {
    pub node: usize,
    pub b0: BigInt,
    pub legs: Vec<Leg>,
    pub e: BigRational,
}

impl SeifertData {
    pub fn leg_count(&self) -> usize {
        self.legs.len()
    }

    /// lcm of the leg determinants.
    pub fn alpha_lcm(&self) -> BigInt {
        self.legs.iter().fold(BigInt::one(), |acc, l| arith::lcm_big(&acc, &l.alpha))
    }
}

/// Normalized Seifert pair of a chain read from the node outwards.
fn leg_data(lat: &Lattice, chain: &[usize]) -> Result<Leg> {
    let ks: Vec<BigInt> = chain.iter().map(|&v| -lat.graph.euler[v].clone()).collect();
    if ks.iter().any(|k| k < &big(2)) {
        let id = lat.graph.ids[chain[0]].clone();
        return Err(Error::LegNotChain(id));
    }
    let alpha = chain_det(&ks);
    let omega = chain_det(&ks[1..]);
    assert!(omega.is_positive() && omega < alpha && alpha.gcd(&omega).is_one());
    Ok(Leg { alpha, omega, vertices: chain.to_vec() })
}

/// Walk a chain away from `node` starting with `first`; errors if a branch
/// point is met.
fn walk_chain(lat: &Lattice, node: usize, first: usize) -> Result<Vec<usize>> {
    let mut chain = vec![first];
    let mut prev = node;
    let mut cur = first;
    loop {
        let next: Vec<usize> =
            lat.graph.neighbors(cur).iter().copied().filter(|&w| w != prev).collect();
        match next.len() {
            0 => return Ok(chain),
            1 => {
                prev = cur;
                cur = next[0];
                chain.push(cur);
            }
            _ => return Err(Error::LegNotChain(lat.graph.ids[first].clone())),
        }
    }
}

/// Star-shaped data at `node`: every component of the graph minus the node
/// hanging at it must be a chain (for two-node graphs the connecting chain,
/// truncated at the far node, is handled by `two_node_data`).
pub fn seifert_data(lat: &Lattice, node: usize) -> Result<SeifertData> {
    let mut legs = Vec::new();
    for &w in lat.graph.neighbors(node) {
        let chain = walk_chain(lat, node, w)?;
        legs.push(leg_data(lat, &chain)?);
    }
    legs.sort_by(|a, b| a.vertices.cmp(&b.vertices));
    let b0 = lat.graph.euler[node].clone();
    let mut e = BigRational::from_integer(b0.clone());
    for l in &legs {
        e += BigRational::new(l.omega.clone(), l.alpha.clone());
    }
    assert!(e.is_negative(), "orbifold Euler number must be negative");
    Ok(SeifertData { node, b0, legs, e })
}

/// Data of a two-node graph: the two maximal star-shaped subgraphs and the
/// connecting chain invariants.
#[derive(Clone, Debug)]
pub struct TwoNodeData {
    /// star data at the left node; `legs` excludes the connector
    pub left: SeifertData,
    pub right: SeifertData,
    /// connecting chain from left to right (nodes excluded)
    pub chain: Vec<usize>,
    pub alpha0: BigInt,
    pub omega0: BigInt,
    pub omega0t: BigInt,
    pub tau: BigInt,
    pub epsilon: BigRational,
}

impl TwoNodeData {
    pub fn e(&self) -> &BigRational {
        &self.left.e
    }

    pub fn et(&self) -> &BigRational {
        &self.right.e
    }
}

pub fn two_node_data(lat: &Lattice) -> Result<TwoNodeData> {
    let nodes = lat.graph.nodes();
    if nodes.len() != 2 {
        return Err(Error::WrongNodeCount { expected: 2, found: nodes.len() });
    }
    let (n1, n2) = (nodes[0], nodes[1]);
    let path = lat.graph.path(n1, n2);
    let chain: Vec<usize> = path[1..path.len() - 1].to_vec();
    let chain_ks: Vec<BigInt> = chain.iter().map(|&v| -lat.graph.euler[v].clone()).collect();
    if chain_ks.iter().any(|k| k < &big(2)) {
        return Err(Error::LegNotChain("connecting chain".into()));
    }
    let alpha0 = chain_det(&chain_ks);
    let omega0 = chain_det(&chain_ks[1..]);
    let omega0t = chain_det(&chain_ks[..chain_ks.len() - 1]);
    let tau = if chain_ks.len() >= 2 {
        chain_det(&chain_ks[1..chain_ks.len() - 1])
    } else {
        big(0)
    };
    assert_eq!(&omega0 * &omega0t, &alpha0 * &tau + 1);

    let star = |node: usize, towards: usize| -> Result<SeifertData> {
        let mut legs = Vec::new();
        let mut e = BigRational::from_integer(lat.graph.euler[node].clone());
        for &w in lat.graph.neighbors(node) {
            if w == towards {
                continue;
            }
            let chain = walk_chain(lat, node, w)?;
            let leg = leg_data(lat, &chain)?;
            e += BigRational::new(leg.omega.clone(), leg.alpha.clone());
            legs.push(leg);
        }
        legs.sort_by(|a, b| a.vertices.cmp(&b.vertices));
        Ok(SeifertData { node, b0: lat.graph.euler[node].clone(), legs, e })
    };
    let first_on_chain = path[1];
    let last_on_chain = path[path.len() - 2];
    let mut left = star(n1, first_on_chain)?;
    let mut right = star(n2, last_on_chain)?;
    left.e += BigRational::new(omega0.clone(), alpha0.clone());
    right.e += BigRational::new(omega0t.clone(), alpha0.clone());
    assert!(left.e.is_negative() && right.e.is_negative());

    let epsilon = &left.e * &right.e - BigRational::new(BigInt::one(), &alpha0 * &alpha0);
    assert!(epsilon.is_positive(), "orbifold determinant must be positive");

    // det(G) = epsilon * alpha0 * prod(alpha_i) * prod(alpha~_j)
    let mut expect = epsilon.clone() * BigRational::from_integer(alpha0.clone());
    for l in left.legs.iter().chain(&right.legs) {
        expect *= BigRational::from_integer(l.alpha.clone());
    }
    assert_eq!(arith::to_integer(&expect), *lat.det());

    Ok(TwoNodeData { left, right, chain, alpha0, omega0, omega0t, tau, epsilon })
}

/// Coefficients of x(i,j) for the canonical class by the ceiling recursions
/// along the connector and down each leg.
pub fn two_node_x_coeffs(lat: &Lattice, d: &TwoNodeData, i: i64, j: i64) -> Cycle {
    assert!(i >= 0 && j >= 0);
    let n = lat.size();
    let mut coeffs = vec![BigInt::zero(); n];
    coeffs[d.left.node] = big(i);
    coeffs[d.right.node] = big(j);
    // connector: m_v = ceil((m_{v-1} n_{v+1,s} + j) / n_{v,s})
    let ks: Vec<BigInt> = d.chain.iter().map(|&v| -lat.graph.euler[v].clone()).collect();
    let s = ks.len();
    let mut mv = big(i);
    for v in 0..s {
        let n_v = chain_det(&ks[v..]);
        let n_v1 = chain_det(&ks[v + 1..]);
        mv = ceil_div(&(&mv * &n_v1 + big(j)), &n_v);
        coeffs[d.chain[v]] = mv.clone();
    }
    // legs: m_v = ceil(m_{v-1} n_{v+1,s} / n_{v,s})
    let mut fill_leg = |leg: &Leg, seed: i64| {
        let ks: Vec<BigInt> = leg.vertices.iter().map(|&v| -lat.graph.euler[v].clone()).collect();
        let mut mv = big(seed);
        for v in 0..ks.len() {
            let n_v = chain_det(&ks[v..]);
            let n_v1 = chain_det(&ks[v + 1..]);
            mv = ceil_div(&(&mv * &n_v1), &n_v);
            coeffs[leg.vertices[v]] = mv.clone();
        }
    };
    for leg in &d.left.legs {
        fill_leg(leg, i);
    }
    for leg in &d.right.legs {
        fill_leg(leg, j);
    }
    Cycle { coeffs }
}

/// Reduced weight table on a finite rectangle.
#[derive(Clone, Debug)]
pub struct WeightRectangle {
    pub nu: usize,
    pub bound: Vec<i64>,
    /// row major, first index slowest
    pub weights: Vec<i64>,
    pub class: Option<SpinCClass>,
}

impl WeightRectangle {
    pub fn from_weights(bound: Vec<i64>, weights: Vec<i64>) -> Self {
        let nu = bound.len();
        let cells: i64 = bound.iter().map(|b| b + 1).product();
        assert_eq!(cells as usize, weights.len());
        WeightRectangle { nu, bound, weights, class: None }
    }

    pub fn index(&self, i: &[i64]) -> usize {
        let mut idx = 0usize;
        for (k, &c) in i.iter().enumerate() {
            debug_assert!(0 <= c && c <= self.bound[k]);
            idx = idx * (self.bound[k] + 1) as usize + c as usize;
        }
        idx
    }

    pub fn w0(&self, i: &[i64]) -> i64 {
        self.weights[self.index(i)]
    }

    /// Max vertex weight over the cube (i, set); `set` is a bitmask over
    /// coordinates.
    pub fn cube_weight(&self, i: &[i64], set: u32) -> i64 {
        let mut best = i64::MIN;
        let dims: Vec<usize> = (0..self.nu).filter(|k| set & (1 << k) != 0).collect();
        let mut corner = i.to_vec();
        for sub in 0..(1u32 << dims.len()) {
            for (b, &k) in dims.iter().enumerate() {
                corner[k] = i[k] + ((sub >> b) & 1) as i64;
            }
            best = best.max(self.w0(&corner));
        }
        best
    }

    pub fn min_weight(&self) -> i64 {
        *self.weights.iter().min().expect("nonempty rectangle")
    }

    pub fn points(&self) -> Vec<Vec<i64>> {
        let mut out = Vec::with_capacity(self.weights.len());
        let mut cur = vec![0i64; self.nu];
        loop {
            out.push(cur.clone());
            let mut k = self.nu;
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                cur[k] += 1;
                if cur[k] <= self.bound[k] {
                    break;
                }
                cur[k] = 0;
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "nu": self.nu,
            "bound": self.bound,
            "weights": self.weights,
        })
    }
}

fn delta_sum(i: i64, num: impl Fn(i64) -> BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for q in 0..i {
        acc += num(q);
    }
    acc
}

/// Forward difference of the two-node canonical weight in the first
/// coordinate.
pub fn delta1(d: &TwoNodeData, i: i64, j: i64) -> BigInt {
    let alpha = &d.alpha0;
    let mut v = big(1) - big(i) * &d.left.b0 - ceil_div(&(big(i) * &d.omega0 + big(j)), alpha);
    for l in &d.left.legs {
        v -= ceil_div(&(big(i) * &l.omega), &l.alpha);
    }
    v
}

/// Forward difference in the second coordinate.
pub fn delta2(d: &TwoNodeData, i: i64, j: i64) -> BigInt {
    let alpha = &d.alpha0;
    let mut v = big(1) - big(j) * &d.right.b0 - ceil_div(&(big(i) + big(j) * &d.omega0t), alpha);
    for l in &d.right.legs {
        v -= ceil_div(&(big(j) * &l.omega), &l.alpha);
    }
    v
}

/// Closed-form canonical weight at (i,j).
pub fn two_node_weight(d: &TwoNodeData, i: i64, j: i64) -> BigInt {
    // climb the j-axis first, then across in i
    let up = delta_sum(j, |q| delta2(d, 0, q));
    let across = delta_sum(i, |q| delta1(d, q, j));
    up + across
}

fn canonical_class_of(lat: &Lattice) -> SpinCClass {
    SpinCClass {
        label: lat.class_of(&DualCycle::zero(lat.size())),
        k_r: lat.k_can.clone(),
        l_k: DualCycle::zero(lat.size()),
        r_h: DualCycle::zero(lat.size()),
    }
}

fn fill_two_node(lat: &Lattice, d: &TwoNodeData, bound: (i64, i64), seq: bool) -> WeightRectangle {
    let (im, jm) = bound;
    let row = |iu: usize| {
        let i = iu as i64;
        let mut row = Vec::with_capacity((jm + 1) as usize);
        let mut w = two_node_weight(d, i, 0);
        row.push(to_i64(&w));
        for j in 0..jm {
            w += delta2(d, i, j);
            row.push(to_i64(&w));
        }
        row
    };
    let rows = if seq {
        par::map_indexed_seq((im + 1) as usize, row)
    } else {
        par::map_indexed((im + 1) as usize, row)
    };
    let weights: Vec<i64> = rows.into_iter().flatten().collect();
    let mut rect = WeightRectangle::from_weights(vec![im, jm], weights);
    rect.class = Some(canonical_class_of(lat));
    rect
}

/// Fill the full rectangle of canonical weights via the closed double sum.
pub fn two_node_weights(lat: &Lattice, d: &TwoNodeData, bound: (i64, i64)) -> WeightRectangle {
    fill_two_node(lat, d, bound, false)
}

/// Sequential twin of `two_node_weights` for benchmarking.
pub fn two_node_weights_seq(lat: &Lattice, d: &TwoNodeData, bound: (i64, i64)) -> WeightRectangle {
    fill_two_node(lat, d, bound, true)
}

fn to_i64(v: &BigInt) -> i64 {
    i64::try_from(v.clone()).expect("weight fits in i64")
}

fn d_left(d: &TwoNodeData, i: i64) -> BigRational {
    // d(i) = 1 - i(b0 + omega/alpha) - sum ceil(i omega_l / alpha_l)
    let mut v = rat(1)
        - rat(i)
            * (BigRational::from_integer(d.left.b0.clone())
                + BigRational::new(d.omega0.clone(), d.alpha0.clone()));
    for l in &d.left.legs {
        v -= BigRational::from_integer(ceil_div(&(big(i) * &l.omega), &l.alpha));
    }
    v
}

fn d_right(d: &TwoNodeData, j: i64) -> BigRational {
    let mut v = rat(1)
        - rat(j)
            * (BigRational::from_integer(d.right.b0.clone())
                + BigRational::new(d.omega0t.clone(), d.alpha0.clone()));
    for l in &d.right.legs {
        v -= BigRational::from_integer(ceil_div(&(big(j) * &l.omega), &l.alpha));
    }
    v
}

/// Membership in the solution set of strictly decreasing far-face
/// differences.
pub fn sol_contains(d: &TwoNodeData, i: i64, j: i64) -> bool {
    if i < 1 || j < 1 {
        return false;
    }
    delta1(d, i - 1, j).is_negative() && delta2(d, i, j - 1).is_negative()
}

fn in_sol(d: &TwoNodeData, i: i64, j: i64) -> bool {
    sol_contains(d, i, j)
}

/// Maximum of the finite solution set of strictly decreasing far-face
/// differences; the rectangle it bounds carries the whole cohomology.
/// Errors with `Unsupported` when the set is empty (caller falls back to the
/// general bound).
pub fn bound_two_node(d: &TwoNodeData) -> Result<(i64, i64)> {
    let alpha = BigRational::from_integer(d.alpha0.clone());
    let a_left = d.left.alpha_lcm();
    let a_right = d.right.alpha_lcm();
    let al = to_i64(&a_left);
    let ar = to_i64(&a_right);
    let mut best: Option<(i64, i64)> = None;
    for i0 in 0..al {
        for j0 in 0..ar {
            // theta bounds for the residue (i0, j0)
            let di = d_left(d, i0 - 1);
            let dj = d_right(d, j0 - 1);
            let e = d.e();
            let et = d.et();
            let denom_q = &alpha * &alpha * BigRational::from_integer(a_left.clone()) * &d.epsilon;
            let num_q = &alpha * &alpha * et.clone() * &di
                - &alpha * (et.clone() * rat(j0 - 1) + dj.clone())
                + rat(i0 - 1);
            let denom_qt =
                &alpha * &alpha * BigRational::from_integer(a_right.clone()) * &d.epsilon;
            let num_qt = &alpha * &alpha * e.clone() * &dj
                - &alpha * (e.clone() * rat(i0 - 1) + di.clone())
                + rat(j0 - 1);
            let theta = arith::floor_rat(&(num_q / denom_q));
            let theta_t = arith::floor_rat(&(num_qt / denom_qt));
            if theta.is_negative() || theta_t.is_negative() {
                continue;
            }
            let tmax = to_i64(&theta);
            let ttmax = to_i64(&theta_t);
            for q in 0..=tmax {
                for qt in 0..=ttmax {
                    let i = al * q + i0;
                    let j = ar * qt + j0;
                    if in_sol(d, i, j) {
                        best = Some(match best {
                            None => (i, j),
                            Some((bi, bj)) => (bi.max(i), bj.max(j)),
                        });
                    }
                }
            }
        }
    }
    let Some((i, j)) = best else {
        return Err(Error::Unsupported("empty solution set".into()));
    };
    // the componentwise max of solutions is again a solution
    assert!(in_sol(d, i, j));
    Ok((i, j))
}

/// General bound for an arbitrary validated bad set: the floor of the bad
/// coordinates of -k_r clamped at zero, extended outwards while any far-face
/// forward difference stays negative.
pub fn bound_general(lat: &Lattice, bad: &BadVertexSet, class: &SpinCClass) -> Result<Vec<i64>> {
    let nu = bad.nu();
    let mut eng = XCycleEngine::new(lat, bad.clone(), class.clone());
    let mut bound: Vec<i64> = bad
        .vertices
        .iter()
        .map(|&v| {
            let c = -class.k_r.coeffs[v].clone();
            to_i64(&arith::floor_rat(&c)).max(0)
        })
        .collect();
    // grow while some far face still decreases outward
    loop {
        let mut grew = false;
        for k in 0..nu {
            if face_decreases(&mut eng, &bound, k)? {
                bound[k] += 1;
                grew = true;
            }
        }
        if !grew {
            return Ok(bound);
        }
    }
}

/// Does any point on the far face i_k = bound[k] have a negative forward
/// difference in direction k?
fn face_decreases(eng: &mut XCycleEngine, bound: &[i64], k: usize) -> Result<bool> {
    let nu = bound.len();
    let mut cur = vec![0i64; nu];
    cur[k] = bound[k];
    loop {
        let here = eng.weight(&cur)?;
        let mut step = cur.clone();
        step[k] += 1;
        if eng.weight(&step)? < here {
            return Ok(true);
        }
        // advance over the face coordinates
        let mut t = nu;
        loop {
            if t == 0 {
                return Ok(false);
            }
            t -= 1;
            if t == k {
                continue;
            }
            cur[t] += 1;
            if cur[t] <= bound[t] {
                break;
            }
            cur[t] = 0;
        }
    }
}

/// Weight rectangle for an arbitrary bad set and class via the generalized
/// Laufer engine.
pub fn weight_rectangle_general(
    lat: &Lattice,
    bad: &BadVertexSet,
    class: &SpinCClass,
    bound: &[i64],
) -> Result<WeightRectangle> {
    let mut eng = XCycleEngine::new(lat, bad.clone(), class.clone());
    let cells: i64 = bound.iter().map(|b| b + 1).product();
    let mut weights = Vec::with_capacity(cells as usize);
    let mut cur = vec![0i64; bound.len()];
    loop {
        weights.push(to_i64(&eng.weight(&cur)?));
        let mut k = bound.len();
        loop {
            if k == 0 {
                let mut rect = WeightRectangle::from_weights(bound.to_vec(), weights);
                rect.class = Some(class.clone());
                return Ok(rect);
            }
            k -= 1;
            cur[k] += 1;
            if cur[k] <= bound[k] {
                break;
            }
            cur[k] = 0;
        }
    }
}

/// Dispatch: canonical two-node classes use the closed form and the optimal
/// two-node bound; everything else goes through the general engine.
pub fn weight_rectangle(
    lat: &Lattice,
    bad: &BadVertexSet,
    class: &SpinCClass,
    bound_override: Option<Vec<i64>>,
) -> Result<WeightRectangle> {
    let is_canonical = class.l_k.coeffs.iter().all(|c| c.is_zero());
    let nodes = lat.graph.nodes();
    let two_node_canonical = is_canonical && nodes.len() == 2 && bad.vertices == nodes;
    if two_node_canonical {
        if let Ok(d) = two_node_data(lat) {
            let bound = match bound_override {
                Some(b) => (b[0], b[1]),
                None => match bound_two_node(&d) {
                    Ok(b) => b,
                    Err(_) => {
                        let b = bound_general(lat, bad, class)?;
                        (b[0], b[1])
                    }
                },
            };
            let mut rect = two_node_weights(lat, &d, bound);
            rect.class = Some(class.clone());
            return Ok(rect);
        }
    }
    let bound = match bound_override {
        Some(b) => b,
        None => bound_general(lat, bad, class)?,
    };
    weight_rectangle_general(lat, bad, class, &bound)
}

//! Plumbing graphs, the intersection lattice, its dual, the discriminant
//! group and the Riemann-Roch weight function.

use std::collections::BTreeMap;

use num::{BigInt, BigRational, Integer, One, Signed, Zero};

use crate::arith::{self, IMat, QMat};
use crate::{Error, Result};

/// Decorated tree: vertices carry Euler numbers, edges are unordered pairs.
#[derive(Clone, Debug)]
pub struct PlumbingGraph {
    pub ids: Vec<String>,
    pub euler: Vec<BigInt>,
    pub edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl PlumbingGraph {
    pub fn new(vertices: Vec<(String, BigInt)>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let ids: Vec<String> = vertices.iter().map(|(id, _)| id.clone()).collect();
        let euler: Vec<BigInt> = vertices.into_iter().map(|(_, e)| e).collect();
        let n = ids.len();
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let g = PlumbingGraph { ids, euler, edges, adj };
        if !g.is_tree() {
            return Err(Error::NotATree);
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn valency(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Vertices of valency >= 3.
    pub fn nodes(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.valency(v) >= 3).collect()
    }

    /// Vertices of valency 1.
    pub fn ends(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.valency(v) == 1).collect()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    fn is_tree(&self) -> bool {
        let n = self.len();
        if n == 0 || self.edges.len() != n - 1 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == n
    }

    /// Unique path between two vertices, endpoints included.
    pub fn path(&self, from: usize, to: usize) -> Vec<usize> {
        let n = self.len();
        let mut parent = vec![usize::MAX; n];
        let mut stack = vec![from];
        parent[from] = from;
        while let Some(v) = stack.pop() {
            if v == to {
                break;
            }
            for &w in &self.adj[v] {
                if parent[w] == usize::MAX {
                    parent[w] = v;
                    stack.push(w);
                }
            }
        }
        let mut path = vec![to];
        let mut cur = to;
        while cur != from {
            cur = parent[cur];
            path.push(cur);
        }
        path.reverse();
        path
    }

    /// Euler decorations restricted to a vertex subset, keeping input order
    /// of `keep`; edges induced.
    pub fn induced(&self, keep: &[usize]) -> (Vec<BigInt>, Vec<(usize, usize)>) {
        let pos: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let euler = keep.iter().map(|&v| self.euler[v].clone()).collect();
        let mut edges = Vec::new();
        for &(a, b) in &self.edges {
            if let (Some(&x), Some(&y)) = (pos.get(&a), pos.get(&b)) {
                edges.push((x, y));
            }
        }
        (euler, edges)
    }
}

/// Parse the line-oriented graph file format:
/// `# comment`, `vertex <id> <euler>`, `edge <id> <id>`.
pub fn parse_graph(text: &str) -> Result<PlumbingGraph> {
    let mut vertices: Vec<(String, BigInt)> = Vec::new();
    let mut edge_ids: Vec<(String, String, usize)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let s = raw.trim();
        if s.is_empty() || s.starts_with('#') {
            continue;
        }
        let mut it = s.split_whitespace();
        match it.next() {
            Some("vertex") => {
                let id = it
                    .next()
                    .ok_or(Error::Parse { line, msg: "vertex needs an id".into() })?;
                if !id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                    return Err(Error::Parse { line, msg: format!("invalid id `{id}`") });
                }
                let euler: BigInt = it
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or(Error::Parse { line, msg: "vertex needs an integer euler number".into() })?;
                if vertices.iter().any(|(v, _)| v == id) {
                    return Err(Error::DuplicateVertex { id: id.to_string(), line });
                }
                vertices.push((id.to_string(), euler));
            }
            Some("edge") => {
                let a = it.next().ok_or(Error::Parse { line, msg: "edge needs two ids".into() })?;
                let b = it.next().ok_or(Error::Parse { line, msg: "edge needs two ids".into() })?;
                edge_ids.push((a.to_string(), b.to_string(), line));
            }
            Some(tok) => {
                return Err(Error::Parse { line, msg: format!("unknown directive `{tok}`") });
            }
            None => {}
        }
        if let Some(extra) = it.next() {
            return Err(Error::Parse { line, msg: format!("trailing token `{extra}`") });
        }
    }
    let mut edges = Vec::new();
    for (a, b, line) in edge_ids {
        let ia = vertices
            .iter()
            .position(|(v, _)| *v == a)
            .ok_or(Error::UnknownVertex { id: a.clone(), line })?;
        let ib = vertices
            .iter()
            .position(|(v, _)| *v == b)
            .ok_or(Error::UnknownVertex { id: b.clone(), line })?;
        edges.push((ia, ib));
    }
    PlumbingGraph::new(vertices, edges)
}

/// Integral cycle in the E-basis.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cycle {
    pub coeffs: Vec<BigInt>,
}

impl Cycle {
    pub fn zero(n: usize) -> Self {
        Cycle { coeffs: vec![BigInt::zero(); n] }
    }

    pub fn basis(n: usize, j: usize) -> Self {
        let mut c = Cycle::zero(n);
        c.coeffs[j] = BigInt::one();
        c
    }

    pub fn to_dual(&self) -> DualCycle {
        DualCycle { coeffs: self.coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect() }
    }

    pub fn le(&self, other: &Cycle) -> bool {
        self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a <= b)
    }
}

/// Rational cycle in the E-basis; members of L' have denominators dividing
/// det(G).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DualCycle {
    pub coeffs: Vec<BigRational>,
}

impl DualCycle {
    pub fn zero(n: usize) -> Self {
        DualCycle { coeffs: vec![BigRational::zero(); n] }
    }

    pub fn add(&self, other: &DualCycle) -> DualCycle {
        DualCycle {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &DualCycle) -> DualCycle {
        DualCycle {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, f: &BigRational) -> DualCycle {
        DualCycle { coeffs: self.coeffs.iter().map(|a| a * f).collect() }
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(arith::is_integer)
    }

    pub fn to_cycle(&self) -> Cycle {
        Cycle { coeffs: self.coeffs.iter().map(arith::to_integer).collect() }
    }

    pub fn ge_zero(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }

    pub fn le(&self, other: &DualCycle) -> bool {
        self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a <= b)
    }

    pub fn ge(&self, other: &DualCycle) -> bool {
        self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a >= b)
    }
}

/// Symmetric intersection matrix with exact negative-definiteness check.
#[derive(Clone, Debug)]
pub struct IntersectionForm {
    pub size: usize,
    pub entries: IMat,
    pub det: BigInt,
}

pub fn intersection_form(g: &PlumbingGraph) -> Result<IntersectionForm> {
    let n = g.len();
    let mut m = IMat::zero(n, n);
    for v in 0..n {
        m[(v, v)] = g.euler[v].clone();
    }
    for &(a, b) in &g.edges {
        m[(a, b)] = BigInt::one();
        m[(b, a)] = BigInt::one();
    }
    // leading principal minors of -I must all be positive; one elimination
    // pass without row swaps yields them as prefix products of the pivots
    let neg = neg_mat(&m);
    let mut work = neg.to_qmat();
    let mut det = BigRational::one();
    for k in 0..n {
        let pivot = work[(k, k)].clone();
        if !pivot.is_positive() {
            return Err(Error::NotNegativeDefinite);
        }
        det *= &pivot;
        for r in k + 1..n {
            if work[(r, k)].is_zero() {
                continue;
            }
            let f = &work[(r, k)] / &pivot;
            for c in k..n {
                let sub = &f * &work[(k, c)];
                work[(r, c)] -= sub;
            }
        }
    }
    let det = arith::to_integer(&det);
    Ok(IntersectionForm { size: n, entries: m, det })
}

fn neg_mat(m: &IMat) -> IMat {
    let mut out = IMat::zero(m.rows, m.cols);
    for i in 0..m.rows {
        for j in 0..m.cols {
            out[(i, j)] = -m[(i, j)].clone();
        }
    }
    out
}

/// Class label in H = L'/L: residues of the Smith transform.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassLabel(pub Vec<BigInt>);

/// H = L'/L with its invariant factors and class labelling.
#[derive(Clone, Debug)]
pub struct DiscriminantGroup {
    pub order: BigInt,
    pub factors: Vec<BigInt>,
    /// left Smith transform of -I (labels are u*y mod factors, y in dual
    /// coordinates)
    u: IMat,
    all_factors: Vec<BigInt>,
}

impl DiscriminantGroup {
    /// Class of l' from its dual coordinates y_v = -(l', E_v).
    pub fn class_of_dual_coords(&self, y: &[BigInt]) -> ClassLabel {
        let uy = self.u.mul_vec(y);
        let mut label = Vec::new();
        for (i, d) in self.all_factors.iter().enumerate() {
            if !d.is_one() {
                label.push(uy[i].mod_floor(d));
            }
        }
        ClassLabel(label)
    }
}

/// The intersection lattice of a plumbing graph with every derived exact
/// datum needed downstream.
#[derive(Clone, Debug)]
pub struct Lattice {
    pub graph: PlumbingGraph,
    pub form: IntersectionForm,
    pub duals: Vec<DualCycle>,
    pub k_can: DualCycle,
    pub disc: DiscriminantGroup,
    inv_neg: QMat,
}

impl Lattice {
    pub fn new(graph: PlumbingGraph) -> Result<Self> {
        let form = intersection_form(&graph)?;
        let n = form.size;
        let neg = neg_mat(&form.entries).to_qmat();
        let inv_neg = neg.inverse().ok_or(Error::NotNegativeDefinite)?;
        // E*_j coefficients are the columns of (-I)^{-1}
        let duals: Vec<DualCycle> = (0..n)
            .map(|j| DualCycle { coeffs: inv_neg.col(j) })
            .collect();
        for d in &duals {
            for c in &d.coeffs {
                assert!(c.is_positive(), "dual basis entry must be strictly positive");
            }
        }
        // adjunction: (k, E_j) = -b_j - 2
        let rhs: Vec<BigRational> = (0..n)
            .map(|j| BigRational::from_integer(-&graph.euler[j] - 2))
            .collect();
        let kc = form.entries.to_qmat().solve(&rhs).ok_or(Error::NotNegativeDefinite)?;
        let k_can = DualCycle { coeffs: kc };
        let (u, all_factors) = arith::smith_normal_form(&neg_mat(&form.entries));
        let factors: Vec<BigInt> = all_factors.iter().filter(|d| !d.is_one()).cloned().collect();
        let order: BigInt = all_factors.iter().product();
        assert_eq!(order, form.det);
        let disc = DiscriminantGroup { order, factors, u, all_factors };
        Ok(Lattice { graph, form, duals, k_can, disc, inv_neg })
    }

    pub fn size(&self) -> usize {
        self.form.size
    }

    pub fn det(&self) -> &BigInt {
        &self.form.det
    }

    /// Intersection pairing of two rational cycles (E-basis coefficients).
    pub fn pair(&self, a: &DualCycle, b: &DualCycle) -> BigRational {
        let mut acc = BigRational::zero();
        for i in 0..self.size() {
            if a.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..self.size() {
                if b.coeffs[j].is_zero() {
                    continue;
                }
                acc += &a.coeffs[i]
                    * &b.coeffs[j]
                    * BigRational::from_integer(self.form.entries[(i, j)].clone());
            }
        }
        acc
    }

    /// (l', E_v) without building a full cycle.
    pub fn pair_basis(&self, a: &DualCycle, v: usize) -> BigRational {
        let mut acc = BigRational::zero();
        for i in 0..self.size() {
            if !a.coeffs[i].is_zero() {
                acc += &a.coeffs[i] * BigRational::from_integer(self.form.entries[(i, v)].clone());
            }
        }
        acc
    }

    pub fn dual(&self, v: usize) -> &DualCycle {
        &self.duals[v]
    }

    /// (E*_v, E*_w) = I^{-1}_{vw}.
    pub fn dual_pair(&self, v: usize, w: usize) -> BigRational {
        -self.inv_neg[(v, w)].clone()
    }

    /// Riemann-Roch weight chi_k(l) = -(l, l+k)/2.
    pub fn chi(&self, k: &DualCycle, l: &DualCycle) -> BigRational {
        -self.pair(l, &l.add(k)) / arith::rat(2)
    }

    /// chi with the canonical class.
    pub fn chi_can(&self, l: &DualCycle) -> BigRational {
        self.chi(&self.k_can, l)
    }

    /// Dual coordinates of l': y_v = -(l', E_v); integral exactly on L'.
    pub fn dual_coords(&self, l: &DualCycle) -> Vec<BigInt> {
        (0..self.size()).map(|v| arith::to_integer(&-self.pair_basis(l, v))).collect()
    }

    /// Build l' = sum_v y_v E*_v from dual coordinates.
    pub fn from_dual_coords(&self, y: &[BigInt]) -> DualCycle {
        let mut out = DualCycle::zero(self.size());
        for (v, c) in y.iter().enumerate() {
            if !c.is_zero() {
                out = out.add(&self.dual(v).scale(&BigRational::from_integer(c.clone())));
            }
        }
        out
    }

    pub fn class_of(&self, l: &DualCycle) -> ClassLabel {
        self.disc.class_of_dual_coords(&self.dual_coords(l))
    }

    /// Componentwise fractional part: the unique box representative of [l'].
    pub fn r_representative(&self, l: &DualCycle) -> DualCycle {
        DualCycle { coeffs: l.coeffs.iter().map(arith::fract_rat).collect() }
    }

    /// Is l' in the Lipman cone, (l', E_v) <= 0 for all v?
    pub fn in_lipman_cone(&self, l: &DualCycle) -> bool {
        (0..self.size()).all(|v| !self.pair_basis(l, v).is_positive())
    }

    /// Enumerate one representative per class of H (dual coordinates in a
    /// Smith fundamental domain).
    pub fn class_representatives(&self) -> Vec<DualCycle> {
        // y = U^{-1} z with z ranging over the fundamental box of the
        // invariant factors; equivalently solve U y = z over Z.
        let n = self.size();
        let u = self.disc.u.to_qmat();
        let uinv = u.inverse().expect("unimodular");
        let mut reps = Vec::new();
        let mut z = vec![BigInt::zero(); n];
        loop {
            let zq: Vec<BigRational> =
                z.iter().map(|v| BigRational::from_integer(v.clone())).collect();
            let y = uinv.mul_vec(&zq);
            let yi: Vec<BigInt> = y.iter().map(arith::to_integer).collect();
            reps.push(self.from_dual_coords(&yi));
            // increment mixed-radix counter over all_factors
            let mut k = n;
            loop {
                if k == 0 {
                    return reps;
                }
                k -= 1;
                z[k] += 1;
                if z[k] < self.disc.all_factors[k] {
                    break;
                }
                z[k] = BigInt::zero();
            }
        }
    }
}

/// k_can^2 + |V| computed both by the closed combinatorial formula and the
/// direct pairing; panics if the two disagree.
pub fn k_squared_plus_s(lat: &Lattice) -> BigRational {
    let n = lat.size();
    let direct = lat.pair(&lat.k_can, &lat.k_can) + arith::rat(n as i64);
    let mut closed = arith::rat(3 * n as i64 + 2);
    for v in 0..n {
        closed += BigRational::from_integer(lat.graph.euler[v].clone());
    }
    for v in 0..n {
        let dv = arith::rat(2 - lat.graph.valency(v) as i64);
        if dv.is_zero() {
            continue;
        }
        for w in 0..n {
            let dw = arith::rat(2 - lat.graph.valency(w) as i64);
            if dw.is_zero() {
                continue;
            }
            closed += dv.clone() * dw * lat.dual_pair(v, w);
        }
    }
    assert_eq!(direct, closed, "k^2+s closed form disagrees with direct pairing");
    direct
}

/// -|H| (E*_v, E*_w) equals the determinant of the graph with the v..w path
/// removed; returns whether the identity holds.
pub fn subgraph_determinant_identity(lat: &Lattice, v: usize, w: usize) -> bool {
    assert_ne!(v, w);
    let path = lat.graph.path(v, w);
    let keep: Vec<usize> = (0..lat.size()).filter(|x| !path.contains(x)).collect();
    let (euler, edges) = lat.graph.induced(&keep);
    let k = keep.len();
    let mut m = IMat::zero(k, k);
    for i in 0..k {
        m[(i, i)] = -euler[i].clone();
    }
    for (a, b) in edges {
        m[(a, b)] = -BigInt::one();
        m[(b, a)] = -BigInt::one();
    }
    let minor = m.det();
    let lhs = -BigRational::from_integer(lat.det().clone()) * lat.dual_pair(v, w);
    lhs == BigRational::from_integer(minor)
}

/// Distinguished spin-c data of a class: k_r = k_can + 2 l_k with l_k the
/// minimal Lipman representative, plus the box representative r_h.
#[derive(Clone, Debug)]
pub struct SpinCClass {
    pub label: ClassLabel,
    pub k_r: DualCycle,
    pub l_k: DualCycle,
    pub r_h: DualCycle,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{big, rat, ratio};

    pub(crate) fn tref() -> Lattice {
        let text = "vertex a -1\nvertex b -2\nvertex c -3\nvertex d -7\nedge a b\nedge a c\nedge a d\n";
        Lattice::new(parse_graph(text).unwrap()).unwrap()
    }

    #[test]
    fn parse_single() {
        let g = parse_graph("vertex a -1\n").unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.euler[0], big(-1));
    }

    #[test]
    fn parse_tref() {
        let lat = tref();
        assert_eq!(lat.size(), 4);
        assert_eq!(lat.graph.edges.len(), 3);
        assert_eq!(*lat.det(), big(1));
    }

    #[test]
    fn parse_cycle_rejected() {
        let text = "vertex a -2\nvertex b -2\nvertex c -2\nedge a b\nedge b c\nedge c a\n";
        assert!(matches!(parse_graph(text), Err(Error::NotATree)));
    }

    #[test]
    fn parse_duplicate_and_unknown() {
        assert!(matches!(
            parse_graph("vertex a -1\nvertex a -2\n"),
            Err(Error::DuplicateVertex { .. })
        ));
        assert!(matches!(
            parse_graph("vertex a -1\nedge a b\n"),
            Err(Error::UnknownVertex { .. })
        ));
    }

    #[test]
    fn not_negative_definite_rejected() {
        let g = parse_graph("vertex a 1\n").unwrap();
        assert!(matches!(Lattice::new(g), Err(Error::NotNegativeDefinite)));
    }

    #[test]
    fn lens_23_det() {
        let g = parse_graph("vertex a -2\nvertex b -3\nedge a b\n").unwrap();
        let lat = Lattice::new(g).unwrap();
        assert_eq!(*lat.det(), big(5));
        assert_eq!(lat.disc.factors, vec![big(5)]);
    }

    #[test]
    fn tref_dual_basis() {
        let lat = tref();
        let e0 = lat.dual(0);
        let expect = [42, 21, 14, 6];
        for (c, e) in e0.coeffs.iter().zip(expect) {
            assert_eq!(*c, rat(e));
        }
        // -I * duals = identity
        for j in 0..4 {
            for v in 0..4 {
                let p = lat.pair_basis(lat.dual(j), v);
                assert_eq!(p, if v == j { rat(-1) } else { rat(0) });
            }
        }
    }

    #[test]
    fn canonical_cycle_cases() {
        // ADE chain: k_can = 0
        let g = parse_graph("vertex a -2\nvertex b -2\nvertex c -2\nedge a b\nedge b c\n").unwrap();
        let lat = Lattice::new(g).unwrap();
        assert!(lat.k_can.coeffs.iter().all(|c| c.is_zero()));
        // single (-1): k_can = E
        let lat1 = Lattice::new(parse_graph("vertex a -1\n").unwrap()).unwrap();
        assert_eq!(lat1.k_can.coeffs, vec![rat(1)]);
        // trefoil: adjunction relations hold
        let lat = tref();
        for j in 0..4 {
            let lhs = lat.pair_basis(&lat.k_can, j);
            let rhs = BigRational::from_integer(-&lat.graph.euler[j] - 2);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn chi_values() {
        let lat1 = Lattice::new(parse_graph("vertex a -1\n").unwrap()).unwrap();
        // chi(nE) = n(n+1)/2
        for n in -3i64..=5 {
            let l = DualCycle { coeffs: vec![rat(n)] };
            assert_eq!(lat1.chi_can(&l), ratio(n * (n + 1), 2));
        }
        let lat = tref();
        assert_eq!(lat.chi_can(&DualCycle::zero(4)), rat(0));
    }

    #[test]
    fn k_squared_examples() {
        // ADE chain of length 3: k_can = 0, so k^2+s = 3
        let g = parse_graph("vertex a -2\nvertex b -2\nvertex c -2\nedge a b\nedge b c\n").unwrap();
        let lat = Lattice::new(g).unwrap();
        assert_eq!(k_squared_plus_s(&lat), rat(3));
        // lens [2,3] -> (p-1)/(2p) - 3 s(q,p) times 4 with p=5, q=3
        let g = parse_graph("vertex a -2\nvertex b -3\nedge a b\n").unwrap();
        let lat = Lattice::new(g).unwrap();
        let s = arith::dedekind_sum(&big(3), &big(5));
        let expect = (ratio(4, 10) - rat(3) * s) * rat(4);
        assert_eq!(k_squared_plus_s(&lat), expect);
    }

    #[test]
    fn discriminant_and_classes() {
        let lat = tref();
        assert!(lat.disc.factors.is_empty());
        let g = parse_graph("vertex a -2\nvertex b -3\nedge a b\n").unwrap();
        let lat = Lattice::new(g).unwrap();
        // coset invariance
        let l = lat.dual(0).clone();
        let shifted = l.add(&Cycle::basis(2, 1).to_dual());
        assert_eq!(lat.class_of(&l), lat.class_of(&shifted));
        assert_eq!(lat.class_representatives().len(), 5);
    }

    #[test]
    fn r_representative_props() {
        let lat = tref();
        let l = lat.dual(0).clone();
        let r = lat.r_representative(&l);
        assert!(r.coeffs.iter().all(|c| !c.is_negative() && c < &rat(1)));
        assert!(l.sub(&r).is_integral());
    }

    #[test]
    fn subgraph_det_small() {
        // chain of length 2: complementary graph empty, det 1
        let g = parse_graph("vertex a -2\nvertex b -3\nedge a b\n").unwrap();
        let lat = Lattice::new(g).unwrap();
        assert!(subgraph_determinant_identity(&lat, 0, 1));
        // trefoil (E*_1, E*_3): remaining (-3) vertex
        let lat = tref();
        assert_eq!(lat.dual_pair(1, 3), rat(-3));
        for v in 0..4 {
            for w in 0..4 {
                if v != w {
                    assert!(subgraph_determinant_identity(&lat, v, w));
                }
            }
        }
    }
}

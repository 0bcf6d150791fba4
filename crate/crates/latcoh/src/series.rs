//! The topological Poincare series, its equivariant decomposition, counting
//! functions, node reduction and periodic constants (one-variable, one-node
//! and two-node affine-monoid forms).

use std::collections::BTreeMap;

use num::{BigInt, BigRational, Integer, One, Signed, Zero};

use crate::arith::{self, big, floor_div, floor_rat, rat, to_integer};
use crate::plumbing::{ClassLabel, DualCycle, Lattice};
use crate::reduction::{SeifertData, TwoNodeData, WeightRectangle};
use crate::{Error, Result};

pub use crate::arith::dedekind_sum;

/// Signed monomial numerator over a product of (1 - t^{a_i}) factors; all
/// exponents live in L' (E-basis coefficients).
#[derive(Clone, Debug)]
pub struct SeriesRep {
    pub numerator: Vec<(BigInt, DualCycle)>,
    pub denominator: Vec<DualCycle>,
}

impl SeriesRep {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "numerator": self
                .numerator
                .iter()
                .map(|(c, e)| {
                    serde_json::json!([c.to_string(),
                        e.coeffs.iter().map(|x| x.to_string()).collect::<Vec<_>>()])
                })
                .collect::<Vec<_>>(),
            "denominator": self
                .denominator
                .iter()
                .map(|e| e.coeffs.iter().map(|x| x.to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }
}

/// Z(t) = prod_v (1 - t^{E*_v})^{valency - 2}, expanded into a signed
/// numerator over the end factors.
pub fn z_series(lat: &Lattice) -> SeriesRep {
    let mut numerator: Vec<(BigInt, DualCycle)> =
        vec![(BigInt::one(), DualCycle::zero(lat.size()))];
    let mut denominator = Vec::new();
    for v in 0..lat.size() {
        let d = lat.graph.valency(v) as i64 - 2;
        match d.cmp(&0) {
            std::cmp::Ordering::Less => {
                for _ in 0..(-d) {
                    denominator.push(lat.dual(v).clone());
                }
            }
            std::cmp::Ordering::Equal => {}
            std::cmp::Ordering::Greater => {
                // multiply the numerator by (1 - t^{E*_v})^d
                let mut binom: Vec<(BigInt, DualCycle)> = Vec::new();
                let mut coeff = BigInt::one();
                for k in 0..=d {
                    let exp = lat.dual(v).scale(&rat(k));
                    binom.push((coeff.clone(), exp));
                    coeff = -coeff * big(d - k) / big(k + 1);
                }
                let mut next = Vec::new();
                for (c1, e1) in &numerator {
                    for (c2, e2) in &binom {
                        next.push((c1 * c2, e1.add(e2)));
                    }
                }
                numerator = next;
            }
        }
    }
    denominator.sort();
    SeriesRep { numerator, denominator }
}

/// Sparse box expansion: exponent (det-scaled integer coordinates) ->
/// coefficient, over all exponents <= bound componentwise.
pub type Expansion = BTreeMap<Vec<BigInt>, BigInt>;

fn scale_key(lat: &Lattice, e: &DualCycle) -> Vec<BigInt> {
    e.coeffs
        .iter()
        .map(|c| to_integer(&(c * BigRational::from_integer(lat.det().clone()))))
        .collect()
}

pub fn key_to_dual(lat: &Lattice, key: &[BigInt]) -> DualCycle {
    DualCycle {
        coeffs: key.iter().map(|k| BigRational::new(k.clone(), lat.det().clone())).collect(),
    }
}

/// Expand the series inside the box {l' : l' <= bound}.
pub fn expand_box(lat: &Lattice, s: &SeriesRep, bound: &DualCycle) -> Expansion {
    let mut out = Expansion::new();
    let ends = &s.denominator;
    for (coeff, base) in &s.numerator {
        let mut stack: Vec<(usize, DualCycle)> = vec![(0, base.clone())];
        while let Some((depth, cur)) = stack.pop() {
            if !cur.le(bound) {
                continue;
            }
            if depth == ends.len() {
                let key = scale_key(lat, &cur);
                let e = out.entry(key.clone()).or_insert_with(BigInt::zero);
                *e += coeff;
                if e.is_zero() {
                    out.remove(&key);
                }
                continue;
            }
            // strictly positive coordinates keep the recursion finite
            let mut x = cur.clone();
            loop {
                if !x.le(bound) {
                    break;
                }
                stack.push((depth + 1, x.clone()));
                x = x.add(&ends[depth]);
            }
        }
    }
    out
}

/// Restrict an expansion to one class of H.
pub fn class_decompose(lat: &Lattice, ex: &Expansion, h: &ClassLabel) -> Expansion {
    ex.iter()
        .filter(|(k, _)| &lat.class_of(&key_to_dual(lat, k)) == h)
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect()
}

/// Scaled-integer enumeration state shared by the counting functions: the
/// denominator exponents as det-scaled coordinate rows plus their class
/// residues, so the hot loops stay in machine integers.
struct FastSeries {
    factors: Vec<i128>,
    /// scaled coordinates of each denominator exponent on the tracked rows
    cols: Vec<Vec<i128>>,
    /// class residues of each denominator exponent
    col_res: Vec<Vec<i128>>,
    /// scaled coordinates, class residues and coefficient per numerator term
    terms: Vec<(Vec<i128>, Vec<i128>, BigInt)>,
}

fn scaled_rows(lat: &Lattice, e: &DualCycle, rows: &[usize]) -> Vec<i128> {
    rows.iter()
        .map(|&v| {
            let scaled = e.coeffs[v].clone() * BigRational::from_integer(lat.det().clone());
            i128::try_from(to_integer(&scaled)).expect("scaled coordinate fits i128")
        })
        .collect()
}

fn label_res(lat: &Lattice, e: &DualCycle) -> Vec<i128> {
    lat.class_of(e).0.iter().map(|r| i128::try_from(r.clone()).unwrap()).collect()
}

impl FastSeries {
    fn new(lat: &Lattice, s: &SeriesRep, rows: &[usize]) -> Self {
        let factors: Vec<i128> =
            lat.disc.factors.iter().map(|f| i128::try_from(f.clone()).unwrap()).collect();
        let cols = s.denominator.iter().map(|a| scaled_rows(lat, a, rows)).collect();
        let col_res = s.denominator.iter().map(|a| label_res(lat, a)).collect();
        let terms = s
            .numerator
            .iter()
            .map(|(c, b)| (scaled_rows(lat, b, rows), label_res(lat, b), c.clone()))
            .collect();
        FastSeries { factors, cols, col_res, terms }
    }

    /// Visit every support point whose tracked coordinates do not dominate
    /// the target and whose class residues hit the target residues.
    fn count(
        &self,
        target_rows: &[i128],
        target_res: &[i128],
        mut visit: impl FnMut(&[i128], &BigInt),
    ) {
        let nres = self.factors.len();
        let depthmax = self.cols.len();
        for (base, base_res, coeff) in &self.terms {
            let want: Vec<i128> = target_res
                .iter()
                .zip(base_res)
                .zip(&self.factors)
                .map(|((t, b), f)| (t - b).rem_euclid(*f))
                .collect();
            let mut partial: Vec<Vec<i128>> = vec![vec![0; target_rows.len()]; depthmax + 1];
            partial[0] = base.clone();
            let mut residues: Vec<Vec<i128>> = vec![vec![0; nres]; depthmax + 1];
            self.count_rec(target_rows, &want, &mut partial, &mut residues, 0, coeff, &mut visit);
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn count_rec(
        &self,
        l: &[i128],
        want: &[i128],
        partial: &mut Vec<Vec<i128>>,
        residues: &mut Vec<Vec<i128>>,
        depth: usize,
        coeff: &BigInt,
        visit: &mut impl FnMut(&[i128], &BigInt),
    ) {
        let nrows = l.len();
        if depth == self.cols.len() {
            if (0..nrows).any(|v| partial[depth][v] < l[v]) && residues[depth] == want {
                visit(&partial[depth], coeff);
            }
            return;
        }
        let mut xv: i128 = 0;
        loop {
            for v in 0..nrows {
                partial[depth + 1][v] = partial[depth][v] + xv * self.cols[depth][v];
            }
            if (0..nrows).all(|v| partial[depth + 1][v] >= l[v]) {
                break;
            }
            for (k, f) in self.factors.iter().enumerate() {
                residues[depth + 1][k] =
                    (residues[depth][k] + xv.rem_euclid(*f) * self.col_res[depth][k])
                        .rem_euclid(*f);
            }
            self.count_rec(l, want, partial, residues, depth + 1, coeff, visit);
            xv += 1;
        }
    }
}

/// Q_h(l') = sum of coefficients over exponents not >= l' in class h,
/// enumerated over the finitely many support points with scaled integers.
pub fn counting_function(
    lat: &Lattice,
    s: &SeriesRep,
    h: &ClassLabel,
    l_prime: &DualCycle,
) -> BigInt {
    let rows: Vec<usize> = (0..lat.size()).collect();
    let fast = FastSeries::new(lat, s, &rows);
    let target = scaled_rows(lat, l_prime, &rows);
    let target_res: Vec<i128> = h.0.iter().map(|r| i128::try_from(r.clone()).unwrap()).collect();
    let mut total = BigInt::zero();
    fast.count(&target, &target_res, |_, c| total += c);
    total
}

/// Reference enumeration over exact rational exponents, independent of the
/// scaled fast path (oracle for tests).
pub fn counting_function_reference(
    lat: &Lattice,
    s: &SeriesRep,
    h: &ClassLabel,
    l_prime: &DualCycle,
) -> BigInt {
    let ends = &s.denominator;
    let mut total = BigInt::zero();
    for (coeff, base) in &s.numerator {
        let mut stack: Vec<(usize, DualCycle)> = vec![(0, base.clone())];
        while let Some((depth, cur)) = stack.pop() {
            if cur.ge(l_prime) {
                continue;
            }
            if depth == ends.len() {
                if &lat.class_of(&cur) == h {
                    total += coeff;
                }
                continue;
            }
            let mut x = cur;
            loop {
                if x.ge(l_prime) {
                    break;
                }
                stack.push((depth + 1, x.clone()));
                x = x.add(&ends[depth]);
            }
        }
    }
    total
}

/// Class-h series reduced to the node variables: sparse coefficient table
/// keyed by the node coordinates of the exponent, shifted by the node
/// coordinates of `h_shift` (the class representative).
pub fn reduce_to_nodes(
    lat: &Lattice,
    s: &SeriesRep,
    h_shift: &DualCycle,
    box_bound: &[i64],
) -> BTreeMap<Vec<i64>, BigInt> {
    let nodes = lat.graph.nodes();
    assert_eq!(nodes.len(), box_bound.len());
    let fast = FastSeries::new(lat, s, &nodes);
    let shift = scaled_rows(lat, h_shift, &nodes);
    let target_res = label_res(lat, h_shift);
    let det = i128::try_from(lat.det().clone()).unwrap();
    // dominated once every node coordinate exceeds the box
    let target: Vec<i128> =
        box_bound.iter().zip(&shift).map(|(b, s)| s + det * (*b as i128 + 1)).collect();
    let mut out: BTreeMap<Vec<i64>, BigInt> = BTreeMap::new();
    fast.count(&target, &target_res, |coords, c| {
        let key: Option<Vec<i64>> = coords
            .iter()
            .zip(&shift)
            .map(|(x, s)| {
                let diff = x - s;
                if diff >= 0 && diff % det == 0 {
                    Some((diff / det) as i64)
                } else {
                    None
                }
            })
            .collect();
        if let Some(key) = key {
            if key.iter().zip(box_bound).all(|(k, b)| k <= b) {
                let e = out.entry(key.clone()).or_insert_with(BigInt::zero);
                *e += c;
                if e.is_zero() {
                    out.remove(&key);
                }
            }
        }
    });
    out
}

/// Counting function of the node-reduced class series at a node-lattice
/// point (shifted as in `reduce_to_nodes`).
pub fn counting_function_nodes(
    lat: &Lattice,
    s: &SeriesRep,
    h_shift: &DualCycle,
    target: &[i64],
) -> BigInt {
    let nodes = lat.graph.nodes();
    let fast = FastSeries::new(lat, s, &nodes);
    let shift = scaled_rows(lat, h_shift, &nodes);
    let target_res = label_res(lat, h_shift);
    let det = i128::try_from(lat.det().clone()).unwrap();
    let target_rows: Vec<i128> =
        target.iter().zip(&shift).map(|(t, s)| s + det * (*t as i128)).collect();
    let mut total = BigInt::zero();
    fast.count(&target_rows, &target_res, |_, c| total += c);
    total
}

/// Coefficients of the reduced series out of cube weights:
/// coeff(i) = sum over coordinate subsets of (-1)^{|I|+1} cube-weight(i, I).
pub fn reduced_series_from_weights(
    rect: &WeightRectangle,
    box_bound: &[i64],
) -> Result<BTreeMap<Vec<i64>, BigInt>> {
    for k in 0..rect.nu {
        if box_bound[k] + 1 > rect.bound[k] {
            return Err(Error::Unsupported(
                "weight rectangle too small for the requested box (needs +1 margin)".into(),
            ));
        }
    }
    let mut out = BTreeMap::new();
    let mut cur = vec![0i64; rect.nu];
    loop {
        let mut coeff = BigInt::zero();
        for mask in 0u32..(1 << rect.nu) {
            let sign = if mask.count_ones() % 2 == 1 { 1 } else { -1 };
            coeff += big(sign) * big(rect.cube_weight(&cur, mask));
        }
        if !coeff.is_zero() {
            out.insert(cur.clone(), coeff);
        }
        let mut k = rect.nu;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            cur[k] += 1;
            if cur[k] <= box_bound[k] {
                break;
            }
            cur[k] = 0;
        }
    }
}

/// One-variable series with rational exponents.
#[derive(Clone, Debug)]
pub struct Series1 {
    pub numerator: Vec<(BigInt, BigRational)>,
    pub denominator: Vec<BigRational>,
}

/// Periodic constant of a one-variable series: write it as C(t) + D(t)/A(t)
/// with deg(D/A) < 0; the answer is C(1). Rational exponents are cleared by
/// the substitution t -> t^N first.
pub fn pc_one_variable(s: &Series1) -> Result<BigInt> {
    let mut n = BigInt::one();
    for (_, e) in &s.numerator {
        n = arith::lcm_big(&n, e.denom());
    }
    for e in &s.denominator {
        n = arith::lcm_big(&n, e.denom());
        if !e.is_positive() {
            return Err(Error::Unsupported("denominator exponents must be positive".into()));
        }
    }
    let scale =
        |e: &BigRational| -> BigInt { to_integer(&(e * BigRational::from_integer(n.clone()))) };
    let mut num: BTreeMap<BigInt, BigInt> = BTreeMap::new();
    for (c, e) in &s.numerator {
        let k = scale(e);
        if k.is_negative() {
            return Err(Error::Unsupported("numerator exponents must be nonnegative".into()));
        }
        *num.entry(k).or_insert_with(BigInt::zero) += c;
    }
    num.retain(|_, v| !v.is_zero());
    // A(t) = prod (1 - t^{a_i}) has leading coefficient +-1
    let mut den: BTreeMap<BigInt, BigInt> = BTreeMap::new();
    den.insert(BigInt::zero(), BigInt::one());
    for e in &s.denominator {
        let a = scale(e);
        let mut next: BTreeMap<BigInt, BigInt> = BTreeMap::new();
        for (k, c) in &den {
            *next.entry(k.clone()).or_insert_with(BigInt::zero) += c;
            *next.entry(k + &a).or_insert_with(BigInt::zero) -= c;
        }
        next.retain(|_, v| !v.is_zero());
        den = next;
    }
    let deg_a = den.keys().max().cloned().unwrap_or_else(BigInt::zero);
    let lead_a = den.get(&deg_a).cloned().unwrap_or_else(BigInt::one);
    let mut c_at_one = BigInt::zero();
    let mut rem = num;
    loop {
        let Some(deg_b) = rem.keys().max().cloned() else { break };
        if deg_b < deg_a {
            break;
        }
        let q = &rem[&deg_b] / &lead_a;
        let shift = &deg_b - &deg_a;
        for (k, c) in den.clone() {
            let e = rem.entry(k + &shift).or_insert_with(BigInt::zero);
            *e -= &q * c;
        }
        rem.retain(|_, v| !v.is_zero());
        c_at_one += q;
    }
    Ok(c_at_one)
}

/// Counting integer N_c(l) = 1 + c0 - l b0 + sum floor((c_i - w_i l)/a_i)
/// of a star-shaped graph; `lift` = (c0, c_1, ..., c_d) aligned with the
/// sorted legs.
pub fn seifert_n(d: &SeifertData, lift: &[BigInt], ell: &BigInt) -> BigInt {
    assert_eq!(lift.len(), d.legs.len() + 1);
    let mut n = BigInt::one() + &lift[0] - ell * &d.b0;
    for (i, leg) in d.legs.iter().enumerate() {
        n += floor_div(&(&lift[i + 1] - &leg.omega * ell), &leg.alpha);
    }
    n
}

/// Central coefficient of the lift: (c0 + sum c_i/alpha_i) / |e|.
pub fn seifert_ctilde(d: &SeifertData, lift: &[BigInt]) -> BigRational {
    let mut a = BigRational::from_integer(lift[0].clone());
    for (i, leg) in d.legs.iter().enumerate() {
        a += BigRational::new(lift[i + 1].clone(), leg.alpha.clone());
    }
    a / (-d.e.clone())
}

/// pc of the class part of the one-node series: the finite sum over
/// l >= -ctilde of max(0, -N_c(l)); tail certified by
/// N_c(l) >= 1 - d + |e|(l + ctilde).
pub fn seifert_pc(d: &SeifertData, lift: &[BigInt]) -> BigInt {
    let ctilde = seifert_ctilde(d, lift);
    let lo = arith::ceil_rat(&(-ctilde.clone()));
    let hi_rat = rat(d.legs.len() as i64 - 1) / (-d.e.clone()) - &ctilde;
    let hi = arith::ceil_rat(&hi_rat) + 1;
    let mut pc = BigInt::zero();
    let mut ell = lo;
    while ell <= hi {
        let n = seifert_n(d, lift, &ell);
        if n.is_negative() {
            pc += -n;
        }
        ell += 1;
    }
    pc
}

/// Non-equivariant one-node pc: (1/2) sum over leg residues of
/// floor(S) floor(S - 1) with S = sum x_i/alpha_i.
pub fn seifert_pc_ne(d: &SeifertData) -> BigInt {
    let alphas: Vec<i64> =
        d.legs.iter().map(|l| i64::try_from(l.alpha.clone()).expect("alpha fits i64")).collect();
    let mut total = BigInt::zero();
    let mut x = vec![0i64; alphas.len()];
    loop {
        let mut s = BigRational::zero();
        for (i, &a) in alphas.iter().enumerate() {
            s += arith::ratio(x[i], a);
        }
        let f = floor_rat(&s);
        total += &f * (&f - 1);
        let mut k = alphas.len();
        loop {
            if k == 0 {
                assert!((&total % big(2)).is_zero());
                return total / big(2);
            }
            k -= 1;
            x[k] += 1;
            if x[k] < alphas[k] {
                break;
            }
            x[k] = 0;
        }
    }
}

/// Reduced-transform lift for a two-node graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoNodeLift {
    pub c0: BigInt,
    pub c0t: BigInt,
    pub cbar: BigInt,
    pub ci: Vec<BigInt>,
    pub cjt: Vec<BigInt>,
}

impl TwoNodeLift {
    pub fn zero(d: &TwoNodeData) -> Self {
        TwoNodeLift {
            c0: BigInt::zero(),
            c0t: BigInt::zero(),
            cbar: BigInt::zero(),
            ci: vec![BigInt::zero(); d.left.legs.len()],
            cjt: vec![BigInt::zero(); d.right.legs.len()],
        }
    }

    /// Reduced transform of a raw element of L'.
    pub fn from_raw(lat: &Lattice, d: &TwoNodeData, l_prime: &DualCycle) -> Self {
        let y = lat.dual_coords(l_prime);
        let chain_ks: Vec<BigInt> = d.chain.iter().map(|&v| -lat.graph.euler[v].clone()).collect();
        let s = d.chain.len();
        let mut c0 = y[d.left.node].clone();
        let mut cbar = BigInt::zero();
        for k in 0..s {
            let n1 = arith::chain_det(&chain_ks[0..k]);
            let n2 = if k == 0 { BigInt::zero() } else { arith::chain_det(&chain_ks[1..k]) };
            cbar += &y[d.chain[k]] * n1;
            c0 -= &y[d.chain[k]] * n2;
        }
        let leg_sum = |legs: &[crate::reduction::Leg]| -> Vec<BigInt> {
            legs.iter()
                .map(|leg| {
                    let ks: Vec<BigInt> =
                        leg.vertices.iter().map(|&v| -lat.graph.euler[v].clone()).collect();
                    let mut c = BigInt::zero();
                    for (pos, &v) in leg.vertices.iter().enumerate() {
                        c += &y[v] * arith::chain_det(&ks[pos + 1..]);
                    }
                    c
                })
                .collect()
        };
        TwoNodeLift {
            c0,
            c0t: y[d.right.node].clone(),
            cbar,
            ci: leg_sum(&d.left.legs),
            cjt: leg_sum(&d.right.legs),
        }
    }

    fn a_pair(&self, d: &TwoNodeData) -> (BigRational, BigRational) {
        let mut a = BigRational::from_integer(self.c0.clone())
            + BigRational::new(&d.omega0 * &self.cbar, d.alpha0.clone());
        for (i, leg) in d.left.legs.iter().enumerate() {
            a += BigRational::new(self.ci[i].clone(), leg.alpha.clone());
        }
        let mut at = BigRational::from_integer(self.c0t.clone())
            + BigRational::new(self.cbar.clone(), d.alpha0.clone());
        for (j, leg) in d.right.legs.iter().enumerate() {
            at += BigRational::new(self.cjt[j].clone(), leg.alpha.clone());
        }
        (a, at)
    }

    /// Node coefficients (c, ct) of the lifted class.
    pub fn c_pair(&self, d: &TwoNodeData) -> (BigRational, BigRational) {
        let (a, at) = self.a_pair(d);
        let inv_a0 = BigRational::new(BigInt::one(), d.alpha0.clone());
        let c = (-d.et().clone() * &a + &inv_a0 * &at) / &d.epsilon;
        let ct = (inv_a0 * &a - d.e().clone() * &at) / &d.epsilon;
        (c, ct)
    }

    fn add_e0(&mut self, d: &TwoNodeData, times: &BigInt) {
        self.c0 += -&d.left.b0 * times;
        self.cbar += -times;
        for (i, leg) in d.left.legs.iter().enumerate() {
            self.ci[i] += -&leg.omega * times;
        }
    }

    fn add_e0t(&mut self, d: &TwoNodeData, times: &BigInt) {
        self.c0 += &d.tau * times;
        self.c0t += -&d.right.b0 * times;
        self.cbar += -&d.omega0t * times;
        for (j, leg) in d.right.legs.iter().enumerate() {
            self.cjt[j] += -&leg.omega * times;
        }
    }

    /// Shift by node base elements until both node coefficients lie in [0,1).
    pub fn normalized(&self, d: &TwoNodeData) -> TwoNodeLift {
        let mut lift = self.clone();
        let (c, ct) = lift.c_pair(d);
        lift.add_e0(d, &-floor_rat(&c));
        lift.add_e0t(d, &-floor_rat(&ct));
        let (c, ct) = lift.c_pair(d);
        assert!(!c.is_negative() && c < rat(1) && !ct.is_negative() && ct < rat(1));
        lift
    }

    /// N_c(l, lt); integral exactly on the congruence class of the lift.
    pub fn n(&self, d: &TwoNodeData, l: &BigInt, lt: &BigInt) -> BigRational {
        let mut v = BigRational::from_integer(self.c0.clone())
            + BigRational::new(&d.omega0 * &self.cbar, d.alpha0.clone())
            - (BigRational::from_integer(d.left.b0.clone())
                + BigRational::new(d.omega0.clone(), d.alpha0.clone()))
                * BigRational::from_integer(l.clone())
            - BigRational::new(lt.clone(), d.alpha0.clone());
        for (i, leg) in d.left.legs.iter().enumerate() {
            v += BigRational::from_integer(floor_div(&(&self.ci[i] - &leg.omega * l), &leg.alpha));
        }
        v
    }

    pub fn nt(&self, d: &TwoNodeData, l: &BigInt, lt: &BigInt) -> BigRational {
        let mut v = BigRational::from_integer(self.c0t.clone())
            + BigRational::new(self.cbar.clone(), d.alpha0.clone())
            - (BigRational::from_integer(d.right.b0.clone())
                + BigRational::new(d.omega0t.clone(), d.alpha0.clone()))
                * BigRational::from_integer(lt.clone())
            - BigRational::new(l.clone(), d.alpha0.clone());
        for (j, leg) in d.right.legs.iter().enumerate() {
            v += BigRational::from_integer(floor_div(&(&self.cjt[j] - &leg.omega * lt), &leg.alpha));
        }
        v
    }

    /// Congruence defining Z^2(c): l + omega0t lt = cbar (mod alpha0).
    pub fn congruent(&self, d: &TwoNodeData, l: &BigInt, lt: &BigInt) -> bool {
        ((l + &d.omega0t * lt - &self.cbar) % &d.alpha0).is_zero()
    }
}

/// Membership data of the two-node monoid structure and the pc witness.
#[derive(Clone, Debug)]
pub struct TwoNodeMonoid {
    pub lift: TwoNodeLift,
    pub c: BigRational,
    pub ct: BigRational,
    pub v1: (BigInt, BigInt),
    pub v2: (BigInt, BigInt),
    /// fundamental-box points with negative N resp. Nt
    pub sminus1: Vec<(BigInt, BigInt)>,
    pub sminus2: Vec<(BigInt, BigInt)>,
    pub n1: Vec<BigInt>,
    pub n2: Vec<BigInt>,
    /// monomials of the polynomial part, exponents including the (c, ct)
    /// offset
    pub fplus: Vec<(BigInt, (BigRational, BigRational))>,
}

impl TwoNodeMonoid {
    /// Membership predicate of the monoid module.
    pub fn contains(&self, d: &TwoNodeData, l: &BigInt, lt: &BigInt) -> bool {
        self.lift.congruent(d, l, lt)
            && !self.lift.n(d, l, lt).is_negative()
            && !self.lift.nt(d, l, lt).is_negative()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let pts = |v: &Vec<(BigInt, BigInt)>| {
            v.iter().map(|(a, b)| vec![a.to_string(), b.to_string()]).collect::<Vec<_>>()
        };
        serde_json::json!({
            "c": self.c.to_string(),
            "ct": self.ct.to_string(),
            "v1": [self.v1.0.to_string(), self.v1.1.to_string()],
            "v2": [self.v2.0.to_string(), self.v2.1.to_string()],
            "sminus1": pts(&self.sminus1),
            "sminus2": pts(&self.sminus2),
            "fplus": self
                .fplus
                .iter()
                .map(|(k, (a, b))| vec![k.to_string(), a.to_string(), b.to_string()])
                .collect::<Vec<_>>(),
        })
    }
}

fn primitive_ray(x: &BigRational, y: &BigRational) -> (BigInt, BigInt) {
    let l = arith::lcm_big(x.denom(), y.denom());
    let a = to_integer(&(x * BigRational::from_integer(l.clone())));
    let b = to_integer(&(y * BigRational::from_integer(l.clone())));
    let g = a.gcd(&b);
    (a / &g, b / &g)
}

/// Integer points of the half-open box spanned by v1, v2 shifted by
/// -(c, ct), restricted to the congruence class of the lift.
fn box_points(
    d: &TwoNodeData,
    lift: &TwoNodeLift,
    c: &BigRational,
    ct: &BigRational,
    v1: &(BigInt, BigInt),
    v2: &(BigInt, BigInt),
) -> Vec<(BigInt, BigInt)> {
    let det = BigRational::from_integer(&v1.0 * &v2.1 - &v1.1 * &v2.0);
    assert!(!det.is_zero());
    let max_x = &v1.0 + &v2.0;
    let max_y = &v1.1 + &v2.1;
    let mut out = Vec::new();
    let mut l = BigInt::zero();
    while l <= max_x {
        let mut lt = BigInt::zero();
        while lt <= max_y {
            if lift.congruent(d, &l, &lt) {
                let px = BigRational::from_integer(l.clone()) + c;
                let py = BigRational::from_integer(lt.clone()) + ct;
                let q1 = (&px * BigRational::from_integer(v2.1.clone())
                    - &py * BigRational::from_integer(v2.0.clone()))
                    / &det;
                let q2 = (&py * BigRational::from_integer(v1.0.clone())
                    - &px * BigRational::from_integer(v1.1.clone()))
                    / &det;
                let ok = |q: &BigRational| !q.is_negative() && q < &rat(1);
                if ok(&q1) && ok(&q2) {
                    out.push((l.clone(), lt.clone()));
                }
            }
            lt += 1;
        }
        l += 1;
    }
    out
}

/// Box conditions of a candidate generator pair.
fn v_pair_ok(
    d: &TwoNodeData,
    lift: &TwoNodeLift,
    c: &BigRational,
    ct: &BigRational,
    v1: &(BigInt, BigInt),
    v2: &(BigInt, BigInt),
) -> bool {
    let zero = TwoNodeLift::zero(d);
    if zero.n(d, &v2.0, &v2.1).is_negative() || zero.nt(d, &v1.0, &v1.1).is_negative() {
        return false;
    }
    for (l, lt) in box_points(d, lift, c, ct, v1, v2) {
        if lift.n(d, &(&l + &v2.0), &(&lt + &v2.1)).is_negative() {
            return false;
        }
        if lift.nt(d, &(&l + &v1.0), &(&lt + &v1.1)).is_negative() {
            return false;
        }
    }
    true
}

const V_SEARCH_CAP: u64 = 10_000;

/// Multiples of the primitive ray direction passing the divisibility and
/// congruence filters of the translation-invariance conditions.
fn v_candidates(d: &TwoNodeData, first_ray: bool, take: usize) -> Vec<(BigInt, BigInt)> {
    let dir = if first_ray {
        primitive_ray(&BigRational::new(BigInt::one(), d.alpha0.clone()), &(-d.e().clone()))
    } else {
        primitive_ray(&(-d.et().clone()), &BigRational::new(BigInt::one(), d.alpha0.clone()))
    };
    let zero = TwoNodeLift::zero(d);
    let mut out = Vec::new();
    for m in 1..=V_SEARCH_CAP {
        if out.len() >= take {
            break;
        }
        let v = (&dir.0 * big(m as i64), &dir.1 * big(m as i64));
        if !zero.congruent(d, &v.0, &v.1) {
            continue;
        }
        let divisible = if first_ray {
            d.left.legs.iter().all(|leg| (&v.0 % &leg.alpha).is_zero())
        } else {
            d.right.legs.iter().all(|leg| (&v.1 % &leg.alpha).is_zero())
        };
        if !divisible {
            continue;
        }
        // translation invariance is exact on the ray
        let own = if first_ray { zero.n(d, &v.0, &v.1) } else { zero.nt(d, &v.0, &v.1) };
        assert!(own.is_zero());
        out.push(v);
    }
    out
}

/// pc of the class part of the two-node series with the monoid witness; an
/// explicit generator pair (validated against the box conditions) pins the
/// decomposition, otherwise the first admissible pair is used.
pub fn two_node_pc(
    d: &TwoNodeData,
    lift_in: &TwoNodeLift,
    v_override: Option<((BigInt, BigInt), (BigInt, BigInt))>,
) -> Result<(BigInt, TwoNodeMonoid)> {
    let lift = lift_in.normalized(d);
    let (c, ct) = lift.c_pair(d);
    let (v1, v2) = match v_override {
        Some((v1, v2)) => {
            if !v_pair_ok(d, &lift, &c, &ct, &v1, &v2) {
                return Err(Error::Unsupported(
                    "generator pair fails the box conditions".into(),
                ));
            }
            (v1, v2)
        }
        None => {
            let c1 = v_candidates(d, true, 64);
            let c2 = v_candidates(d, false, 64);
            if c1.is_empty() || c2.is_empty() {
                return Err(Error::VSearchCapExceeded);
            }
            let mut found = None;
            'search: for total in 0..c1.len() + c2.len() {
                for i in 0..=total.min(c1.len() - 1) {
                    let j = total - i;
                    if j >= c2.len() {
                        continue;
                    }
                    if v_pair_ok(d, &lift, &c, &ct, &c1[i], &c2[j]) {
                        found = Some((c1[i].clone(), c2[j].clone()));
                        break 'search;
                    }
                }
            }
            found.ok_or(Error::VSearchCapExceeded)?
        }
    };
    let pts = box_points(d, &lift, &c, &ct, &v1, &v2);
    let mut sminus1 = Vec::new();
    let mut sminus2 = Vec::new();
    let mut n1 = Vec::new();
    let mut n2 = Vec::new();
    let mut fplus: Vec<(BigInt, (BigRational, BigRational))> = Vec::new();
    let mut pc = BigInt::zero();
    for (l, lt) in &pts {
        let neg_n = lift.n(d, l, lt).is_negative();
        let neg_nt = lift.nt(d, l, lt).is_negative();
        if neg_n {
            let k = floor_div(l, &v1.0);
            for j in 1..=i64::try_from(k.clone()).unwrap() {
                fplus.push((
                    BigInt::one(),
                    (
                        BigRational::from_integer(l - &v1.0 * big(j)) + &c,
                        BigRational::from_integer(lt - &v1.1 * big(j)) + &ct,
                    ),
                ));
            }
            pc += &k;
            sminus1.push((l.clone(), lt.clone()));
            n1.push(k);
        }
        if neg_nt {
            let k = floor_div(lt, &v2.1);
            for j in 1..=i64::try_from(k.clone()).unwrap() {
                fplus.push((
                    BigInt::one(),
                    (
                        BigRational::from_integer(l - &v2.0 * big(j)) + &c,
                        BigRational::from_integer(lt - &v2.1 * big(j)) + &ct,
                    ),
                ));
            }
            pc += &k;
            sminus2.push((l.clone(), lt.clone()));
            n2.push(k);
        }
        if neg_n && neg_nt {
            fplus.push((
                BigInt::one(),
                (
                    BigRational::from_integer(l.clone()) + &c,
                    BigRational::from_integer(lt.clone()) + &ct,
                ),
            ));
            pc += 1;
        }
    }
    let witness = TwoNodeMonoid { lift, c, ct, v1, v2, sminus1, sminus2, n1, n2, fplus };
    Ok((pc, witness))
}

/// Non-equivariant two-node pc: the closed triple sum over leg residues.
pub fn two_node_pc_ne(d: &TwoNodeData) -> BigInt {
    let residue_sums = |legs: &[crate::reduction::Leg]| -> Vec<BigRational> {
        let mut acc = vec![BigRational::zero()];
        for leg in legs {
            let a = i64::try_from(leg.alpha.clone()).unwrap();
            let mut next = Vec::with_capacity(acc.len() * a as usize);
            for s in &acc {
                for x in 0..a {
                    next.push(s + arith::ratio(x, a));
                }
            }
            acc = next;
        }
        acc
    };
    let svals = residue_sums(&d.left.legs);
    let stvals = residue_sums(&d.right.legs);
    let alpha0 = BigRational::from_integer(d.alpha0.clone());
    let mut total = BigInt::zero();
    for s in &svals {
        let s_int = floor_rat(s);
        let s_rat = s - BigRational::from_integer(s_int.clone());
        for st in &stvals {
            let st_int = floor_rat(st);
            let st_rat = st - BigRational::from_integer(st_int.clone());
            total += &s_int * &st_int;
            let mut k = BigInt::zero();
            while k < s_int {
                let v = -d.et().clone() * &alpha0 * (BigRational::from_integer(k.clone()) + &s_rat)
                    + &st_rat;
                total += floor_rat(&v);
                k += 1;
            }
            let mut kt = BigInt::zero();
            while kt < st_int {
                let v = -d.e().clone() * &alpha0 * (BigRational::from_integer(kt.clone()) + &st_rat)
                    + &s_rat;
                total += floor_rat(&v);
                kt += 1;
            }
        }
    }
    total
}

/// Two-variable sparse polynomial with rational exponents.
pub type Poly2 = BTreeMap<(BigRational, BigRational), BigInt>;

pub fn poly2_add(p: &mut Poly2, key: (BigRational, BigRational), c: BigInt) {
    let e = p.entry(key.clone()).or_insert_with(BigInt::zero);
    *e += c;
    if e.is_zero() {
        p.remove(&key);
    }
}

/// Multiply a sparse polynomial by (1 - t^a).
pub fn poly2_mul_factor(p: &Poly2, a: &(BigRational, BigRational)) -> Poly2 {
    let mut out = Poly2::new();
    for (k, v) in p {
        poly2_add(&mut out, k.clone(), v.clone());
        poly2_add(&mut out, (&k.0 + &a.0, &k.1 + &a.1), -v.clone());
    }
    out
}

/// Decomposition of a two-variable rational function with denominator
/// (1 - t^{a1})(1 - t^{a2}): a polynomial part plus remainder terms whose
/// chamber periodic constant vanishes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyPart2 {
    pub fplus: Poly2,
    /// numerator supported in the fundamental box, over both factors
    pub box_part: Poly2,
    /// numerator supported in the a1-strip, over (1 - t^{a1})
    pub strip1: Poly2,
    /// numerator supported in the a2-strip, over (1 - t^{a2})
    pub strip2: Poly2,
}

impl PolyPart2 {
    /// pc of the original function over the chamber: fplus evaluated at 1.
    pub fn pc(&self) -> BigInt {
        self.fplus.values().cloned().sum()
    }

    /// Recompose to the numerator over the common denominator.
    pub fn recompose(
        &self,
        a1: &(BigRational, BigRational),
        a2: &(BigRational, BigRational),
    ) -> Poly2 {
        let mut out = self.box_part.clone();
        for (k, v) in poly2_mul_factor(&self.strip1, a2) {
            poly2_add(&mut out, k, v);
        }
        for (k, v) in poly2_mul_factor(&self.strip2, a1) {
            poly2_add(&mut out, k, v);
        }
        for (k, v) in poly2_mul_factor(&poly2_mul_factor(&self.fplus, a1), a2) {
            poly2_add(&mut out, k, v);
        }
        out
    }
}

/// Split (sum iota t^{b_k}) / (1-t^{a1})(1-t^{a2}) into its polynomial part
/// and a remainder with vanishing chamber pc; the second exponent must sit
/// clockwise of the first (negative determinant).
pub fn polynomial_part_2var(
    numerator: &Poly2,
    a1: &(BigRational, BigRational),
    a2: &(BigRational, BigRational),
) -> Result<PolyPart2> {
    let det = &a1.0 * &a2.1 - &a1.1 * &a2.0;
    if !det.is_negative() {
        return Err(Error::Unsupported(
            "factor order must put the second exponent clockwise of the first".into(),
        ));
    }
    let mut parts = PolyPart2 {
        fplus: Poly2::new(),
        box_part: Poly2::new(),
        strip1: Poly2::new(),
        strip2: Poly2::new(),
    };
    for (b, iota) in numerator {
        // b = b' + k1 a1 + k2 a2 with b' in the half-open box
        let q1 = (&b.0 * &a2.1 - &b.1 * &a2.0) / &det;
        let q2 = (&b.1 * &a1.0 - &b.0 * &a1.1) / &det;
        let k1 = floor_rat(&q1);
        let k2 = floor_rat(&q2);
        let bp = (
            &b.0 - &a1.0 * BigRational::from_integer(k1.clone())
                - &a2.0 * BigRational::from_integer(k2.clone()),
            &b.1 - &a1.1 * BigRational::from_integer(k1.clone())
                - &a2.1 * BigRational::from_integer(k2.clone()),
        );
        poly2_add(&mut parts.box_part, bp.clone(), iota.clone());
        // t^b - t^{b'} = t^{b'+k2 a2}(t^{k1 a1} - 1) + t^{b'}(t^{k2 a2} - 1);
        // the collapsed geometric factor cancels one denominator factor, so
        // the first group lives over (1 - t^{a2}) and the second over
        // (1 - t^{a1})
        let shifted = (
            &bp.0 + &a2.0 * BigRational::from_integer(k2.clone()),
            &bp.1 + &a2.1 * BigRational::from_integer(k2.clone()),
        );
        for (c, expo) in geometric_terms(iota, &shifted, a1, &k1) {
            reduce_to_strip(&mut parts.strip2, &mut parts.fplus, &c, &expo, a2, 1);
        }
        for (c, expo) in geometric_terms(iota, &bp, a2, &k2) {
            reduce_to_strip(&mut parts.strip1, &mut parts.fplus, &c, &expo, a1, 0);
        }
    }
    Ok(parts)
}

/// iota t^{base} (t^{k a} - 1)/(1 - t^{a}) written as signed monomials over
/// the single factor.
fn geometric_terms(
    iota: &BigInt,
    base: &(BigRational, BigRational),
    a: &(BigRational, BigRational),
    k: &BigInt,
) -> Vec<(BigInt, (BigRational, BigRational))> {
    let mut terms = Vec::new();
    if k.is_positive() {
        let kk = i64::try_from(k.clone()).unwrap();
        for j in 0..kk {
            terms.push((-iota.clone(), (&base.0 + &a.0 * rat(j), &base.1 + &a.1 * rat(j))));
        }
    } else if k.is_negative() {
        let kk = i64::try_from(-k.clone()).unwrap();
        for j in 1..=kk {
            terms.push((iota.clone(), (&base.0 - &a.0 * rat(j), &base.1 - &a.1 * rat(j))));
        }
    }
    terms
}

/// Reduce t^{expo} over (1 - t^a) so the axis coordinate of the exponent
/// lies in [0, a_axis), peeling polynomial monomials off the difference.
fn reduce_to_strip(
    strip: &mut Poly2,
    fplus: &mut Poly2,
    c: &BigInt,
    expo: &(BigRational, BigRational),
    a: &(BigRational, BigRational),
    axis: usize,
) {
    let (num, den) = if axis == 0 { (&expo.0, &a.0) } else { (&expo.1, &a.1) };
    assert!(den.is_positive());
    let m = floor_rat(&(num / den));
    let reduced = (
        &expo.0 - &a.0 * BigRational::from_integer(m.clone()),
        &expo.1 - &a.1 * BigRational::from_integer(m.clone()),
    );
    poly2_add(strip, reduced.clone(), c.clone());
    // (t^{expo} - t^{reduced})/(1 - t^a) telescopes into signed monomials
    if m.is_positive() {
        let mm = i64::try_from(m).unwrap();
        for j in 0..mm {
            poly2_add(fplus, (&reduced.0 + &a.0 * rat(j), &reduced.1 + &a.1 * rat(j)), -c.clone());
        }
    } else if m.is_negative() {
        let mm = i64::try_from(-m).unwrap();
        for j in 1..=mm {
            poly2_add(fplus, (&reduced.0 - &a.0 * rat(j), &reduced.1 - &a.1 * rat(j)), c.clone());
        }
    }
}

/// Per-class lens space record.
#[derive(Clone, Debug)]
pub struct LensClassData {
    pub a: i64,
    pub chi_s: BigRational,
    pub chi_r: BigRational,
    pub sw: BigRational,
}

/// Lens space L(p,q) invariants; the closed formulas are asserted against
/// the direct lattice computation.
pub struct LensInvariants {
    pub p: BigInt,
    pub q: BigInt,
    pub k2s: BigRational,
    pub classes: Vec<LensClassData>,
}

pub fn lens_invariants(lat: &Lattice, p: &BigInt, q: &BigInt) -> Result<LensInvariants> {
    let s = lat.size();
    let mut qp = BigInt::one();
    while !((&qp * q - BigInt::one()) % p).is_zero() {
        qp += 1;
    }
    let k2s = crate::plumbing::k_squared_plus_s(lat);
    let expect = (BigRational::new(p - 1, big(2) * p) - rat(3) * dedekind_sum(q, p)) * rat(4);
    assert_eq!(k2s, expect);
    let mut classes = Vec::new();
    let g_s = lat.dual(s - 1).clone();
    let mut sum_chi_r = BigRational::zero();
    let mut a = BigInt::zero();
    while &a < p {
        let l = g_s.scale(&BigRational::from_integer(a.clone()));
        let s_h = crate::laufer::minimal_representative(lat, &l)?;
        let r_h = lat.r_representative(&l);
        let chi_s = lat.chi_can(&s_h);
        let chi_r = lat.chi_can(&r_h);
        let mut closed = BigRational::new(&a * (BigInt::one() - p), big(2) * p);
        let mut j = BigInt::one();
        while j <= a {
            closed += arith::fract_rat(&BigRational::new(&j * &qp, p.clone()));
            j += 1;
        }
        assert_eq!(chi_s, closed, "closed chi(s_h) formula at a = {a}");
        assert_eq!(chi_r, chi_s);
        let sw = -&k2s / rat(8) + &chi_r;
        sum_chi_r += &chi_r;
        classes.push(LensClassData { a: i64::try_from(a.clone()).unwrap(), chi_s, chi_r, sw });
        a += 1;
    }
    let expect_sum =
        BigRational::new(p - 1, big(4)) - BigRational::from_integer(p.clone()) * dedekind_sum(q, p);
    assert_eq!(sum_chi_r, expect_sum);
    Ok(LensInvariants { p: p.clone(), q: q.clone(), k2s, classes })
}

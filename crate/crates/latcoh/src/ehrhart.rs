//! Equivariant lattice-point counting in the dilated non-convex polytopes
//! cut out by the dual basis, reciprocity checks, quasipolynomial fitting on
//! rays and the node-coefficient identities.

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::arith::{self, big, rat, to_integer, QMat};
use crate::plumbing::{ClassLabel, DualCycle, Lattice};
use crate::reduction::SeifertData;
use crate::{Error, Result};

/// Union-of-simplices description: one column per denominator exponent, one
/// inequality row per vertex; all entries integer after clearing the common
/// denominator.
#[derive(Clone, Debug)]
pub struct PolytopeSpec {
    /// columns[i][v]: v-th coordinate of the i-th exponent, scaled
    pub columns: Vec<Vec<i128>>,
    /// common denominator cleared from the rational coordinates
    pub scale: BigInt,
    /// vertex positions of the columns inside the ambient graph (ends), for
    /// class evaluation; empty for synthetic specs
    pub ends: Vec<usize>,
}

impl PolytopeSpec {
    /// One column per denominator factor of the associated series: the dual
    /// basis vector of a vertex appears 2 - valency times, scaled by det(G).
    pub fn from_lattice(lat: &Lattice) -> Self {
        let mut ends = Vec::new();
        for v in 0..lat.size() {
            for _ in lat.graph.valency(v)..2 {
                ends.push(v);
            }
        }
        let det = lat.det().clone();
        let columns = ends
            .iter()
            .map(|&e| {
                (0..lat.size())
                    .map(|v| {
                        let scaled = lat.dual(e).coeffs[v].clone()
                            * BigRational::from_integer(det.clone());
                        i128::try_from(to_integer(&scaled)).expect("scaled entry fits i128")
                    })
                    .collect()
            })
            .collect();
        PolytopeSpec { columns, scale: det, ends }
    }

    /// Synthetic spec from integer columns (identity scale, no class data).
    pub fn from_columns(columns: Vec<Vec<i128>>) -> Self {
        PolytopeSpec { columns, scale: BigInt::one(), ends: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    /// Scale a rational dilation vector to the integer grid of the spec.
    pub fn scale_dilation(&self, l: &DualCycle) -> Vec<i128> {
        l.coeffs
            .iter()
            .map(|c| {
                let scaled = c * BigRational::from_integer(self.scale.clone());
                i128::try_from(to_integer(&scaled)).expect("scaled dilation fits i128")
            })
            .collect()
    }
}

/// Which boundary strata count: `TRemoved` drops the non-coordinate facets
/// (strict inequality on the constraint side, closed coordinate facets);
/// `FMinusT` keeps them and drops the coordinate facets instead.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FacetConvention {
    TRemoved,
    FMinusT,
}

/// Count lattice points of the union polytope at the given (scaled)
/// dilation, optionally restricted to one class of H.
pub fn count_points(
    spec: &PolytopeSpec,
    dilation: &[i128],
    convention: FacetConvention,
    class: Option<(&Lattice, &ClassLabel)>,
) -> BigInt {
    let d = spec.dim();
    let nv = dilation.len();
    assert!(spec.columns.iter().all(|c| c.len() == nv));
    for col in &spec.columns {
        assert!(col.iter().all(|&e| e > 0), "polytope must be bounded");
    }
    // modular fast path for the class filter: the class of a point is a
    // linear function of its coordinates
    let filter = class.map(|(lat, h)| {
        let factors: Vec<i128> = lat
            .disc
            .factors
            .iter()
            .map(|f| i128::try_from(f.clone()).expect("invariant factor fits i128"))
            .collect();
        let col_res: Vec<Vec<i128>> = spec
            .ends
            .iter()
            .map(|&e| {
                let mut y = vec![BigInt::zero(); lat.size()];
                y[e] = BigInt::one();
                lat.disc
                    .class_of_dual_coords(&y)
                    .0
                    .iter()
                    .map(|r| i128::try_from(r.clone()).unwrap())
                    .collect()
            })
            .collect();
        let target: Vec<i128> = h.0.iter().map(|r| i128::try_from(r.clone()).unwrap()).collect();
        ClassFilter { factors, col_res, target }
    });
    let mut x = vec![0i128; d];
    let mut partial = vec![vec![0i128; nv]; d + 1];
    let nres = filter.as_ref().map_or(0, |f| f.factors.len());
    let mut residues = vec![vec![0i128; nres]; d + 1];
    let strict_pos = convention == FacetConvention::FMinusT;
    let mut total = BigInt::zero();
    count_rec(
        spec,
        dilation,
        convention,
        filter.as_ref(),
        &mut x,
        &mut partial,
        &mut residues,
        0,
        strict_pos,
        &mut total,
    );
    total
}

struct ClassFilter {
    factors: Vec<i128>,
    col_res: Vec<Vec<i128>>,
    target: Vec<i128>,
}

#[allow(clippy::too_many_arguments)]
fn count_rec(
    spec: &PolytopeSpec,
    l: &[i128],
    convention: FacetConvention,
    class: Option<&ClassFilter>,
    x: &mut Vec<i128>,
    partial: &mut Vec<Vec<i128>>,
    residues: &mut Vec<Vec<i128>>,
    depth: usize,
    strict_pos: bool,
    total: &mut BigInt,
) {
    let d = spec.dim();
    let nv = l.len();
    if depth == d - 1 && class.is_none() {
        // closed form over the innermost coordinate
        let col = &spec.columns[depth];
        let mut best: Option<i128> = None;
        for v in 0..nv {
            let diff = l[v] - partial[depth][v];
            let bound = match convention {
                // number of x >= 0 with partial + x a < l_v
                FacetConvention::TRemoved => {
                    diff.div_euclid(col[v]) + i128::from(diff.rem_euclid(col[v]) > 0)
                }
                // number of x >= 1 with partial + x a <= l_v
                FacetConvention::FMinusT => diff.div_euclid(col[v]),
            };
            best = Some(best.map_or(bound, |b| b.max(bound)));
        }
        *total += BigInt::from(best.unwrap_or(0).max(0));
        return;
    }
    let last = depth == d - 1;
    let lo: i128 = if strict_pos { 1 } else { 0 };
    let mut xv = lo;
    loop {
        for v in 0..nv {
            partial[depth + 1][v] = partial[depth][v] + xv * spec.columns[depth][v];
        }
        // prune once the partial point dominates the dilation
        let dominated = match convention {
            FacetConvention::TRemoved => (0..nv).all(|v| partial[depth + 1][v] >= l[v]),
            FacetConvention::FMinusT => (0..nv).all(|v| partial[depth + 1][v] > l[v]),
        };
        if dominated {
            break;
        }
        x[depth] = xv;
        if let Some(f) = class {
            for (k, fac) in f.factors.iter().enumerate() {
                residues[depth + 1][k] =
                    (residues[depth][k] + xv.rem_euclid(*fac) * f.col_res[depth][k]).rem_euclid(*fac);
            }
        }
        if last {
            let keep = match convention {
                FacetConvention::TRemoved => (0..nv).any(|v| partial[depth + 1][v] < l[v]),
                FacetConvention::FMinusT => (0..nv).any(|v| partial[depth + 1][v] <= l[v]),
            };
            if keep {
                let f = class.expect("leaf iteration only with a class filter");
                if residues[depth + 1] == f.target {
                    *total += 1;
                }
            }
        } else {
            count_rec(
                spec, l, convention, class, x, partial, residues, depth + 1, strict_pos, total,
            );
        }
        xv += 1;
    }
}

/// Quasipolynomial on a ray: per-residue polynomial coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RayFit {
    pub period: i64,
    pub degree: usize,
    /// coeffs[r][k]: coefficient of lambda^k on the residue class r
    pub coeffs: Vec<Vec<BigRational>>,
}

impl RayFit {
    pub fn eval(&self, lambda: i64) -> BigRational {
        let r = lambda.rem_euclid(self.period) as usize;
        let mut acc = BigRational::zero();
        let mut pw = BigRational::one();
        for c in &self.coeffs[r] {
            acc += c * &pw;
            pw *= rat(lambda);
        }
        acc
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "period": self.period,
            "degree": self.degree,
            "coefficients": self
                .coeffs
                .iter()
                .map(|cs| cs.iter().map(|c| c.to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }
}

/// Exact interpolation of a counting function on a ray: degree+1 samples per
/// residue plus two residual checks.
pub fn fit_ray(counter: impl Fn(i64) -> BigInt, degree: usize, period: i64) -> Result<RayFit> {
    assert!(period >= 1);
    let mut coeffs = Vec::new();
    for r in 0..period {
        let samples: Vec<i64> = (1..=degree as i64 + 3).map(|m| r + period * m).collect();
        let mut a = QMat::zero(degree + 1, degree + 1);
        let mut rhs = Vec::new();
        for (row, &lam) in samples.iter().take(degree + 1).enumerate() {
            let mut pw = BigRational::one();
            for k in 0..=degree {
                a[(row, k)] = pw.clone();
                pw *= rat(lam);
            }
            rhs.push(BigRational::from_integer(counter(lam)));
        }
        let sol =
            a.solve(&rhs).ok_or_else(|| Error::FitResidual("singular sample matrix".into()))?;
        for &lam in &samples[degree + 1..] {
            let mut acc = BigRational::zero();
            let mut pw = BigRational::one();
            for c in &sol {
                acc += c * &pw;
                pw *= rat(lam);
            }
            if acc != BigRational::from_integer(counter(lam)) {
                return Err(Error::FitResidual(format!(
                    "residue {r}, sample {lam} (wall crossing or wrong degree)"
                )));
            }
        }
        coeffs.push(sol);
    }
    Ok(RayFit { period, degree, coeffs })
}

/// Fit the counting function along lambda * direction for one facet
/// convention and optional class.
pub fn fit_ray_quasipolynomial(
    lat: &Lattice,
    direction: &DualCycle,
    degree: usize,
    period: i64,
    convention: FacetConvention,
    class: Option<&ClassLabel>,
) -> Result<RayFit> {
    if !lat.in_lipman_cone(direction) {
        return Err(Error::Unsupported("ray must lie in the anti-nef cone".into()));
    }
    let spec = PolytopeSpec::from_lattice(lat);
    let counter = |lambda: i64| {
        let l = direction.scale(&rat(lambda));
        count_points(&spec, &spec.scale_dilation(&l), convention, class.map(|h| (lat, h)))
    };
    fit_ray(counter, degree, period)
}

/// Class of the negated representative, the partner class in reciprocity.
pub fn negate_class(lat: &Lattice, h_rep: &DualCycle) -> ClassLabel {
    lat.class_of(&DualCycle::zero(lat.size()).sub(h_rep))
}

/// Coefficient-level reciprocity between the two fitted quasipolynomials:
/// Q_T,h(lambda) = (-1)^d Q_{F-T,-h}(-lambda).
pub fn reciprocity_holds(open: &RayFit, closed: &RayFit, degree: usize) -> bool {
    let sign_d = if degree % 2 == 0 { rat(1) } else { rat(-1) };
    let p = open.period;
    for r in 0..p {
        let rp = (-r).rem_euclid(p) as usize;
        for k in 0..=degree {
            let sign_k = if k % 2 == 0 { rat(1) } else { rat(-1) };
            let lhs = open.coeffs[r as usize][k].clone();
            let rhs = &sign_d * &sign_k * &closed.coeffs[rp][k];
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

/// Fit both facet conventions on a sampled ray and verify reciprocity as
/// abstract quasipolynomials.
pub fn reciprocity_check(
    lat: &Lattice,
    direction: &DualCycle,
    h_rep: &DualCycle,
    degree: usize,
    period: i64,
) -> Result<bool> {
    let h = lat.class_of(h_rep);
    let neg_h = negate_class(lat, h_rep);
    let open =
        fit_ray_quasipolynomial(lat, direction, degree, period, FacetConvention::TRemoved, Some(&h))?;
    let closed = fit_ray_quasipolynomial(
        lat,
        direction,
        degree,
        period,
        FacetConvention::FMinusT,
        Some(&neg_h),
    )?;
    Ok(reciprocity_holds(&open, &closed, degree))
}

/// Synthetic reciprocity over plain integer columns (trivial class group).
pub fn reciprocity_check_columns(
    spec: &PolytopeSpec,
    direction: &[i128],
    degree: usize,
    period: i64,
) -> Result<bool> {
    let counter = |conv: FacetConvention| {
        move |lambda: i64| {
            let l: Vec<i128> = direction.iter().map(|&c| c * lambda as i128).collect();
            count_points(spec, &l, conv, None)
        }
    };
    let open = fit_ray(counter(FacetConvention::TRemoved), degree, period)?;
    let closed = fit_ray(counter(FacetConvention::FMinusT), degree, period)?;
    Ok(reciprocity_holds(&open, &closed, degree))
}

/// Multi-index list of total degree <= d over n variables.
fn multi_indices(n: usize, d: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for m in &out {
            let used: usize = m.iter().sum();
            for k in 0..=(d - used) {
                let mut m2 = m.clone();
                m2.push(k);
                next.push(m2);
            }
        }
        out = next;
    }
    out
}

/// Exact multivariate polynomial fit: solve on a leading subset and demand
/// zero residual on every remaining sample.
pub fn fit_multipoly(
    samples: &[(Vec<i64>, BigInt)],
    n: usize,
    degree: usize,
) -> Result<Vec<(Vec<usize>, BigRational)>> {
    let monos = multi_indices(n, degree);
    assert!(samples.len() >= monos.len());
    let eval_mono = |m: &[usize], pt: &[i64]| -> BigRational {
        let mut acc = BigRational::one();
        for (k, &e) in m.iter().enumerate() {
            for _ in 0..e {
                acc *= rat(pt[k]);
            }
        }
        acc
    };
    let mut a = QMat::zero(samples.len(), monos.len());
    let mut rhs = Vec::new();
    for (row, (pt, val)) in samples.iter().enumerate() {
        for (col, m) in monos.iter().enumerate() {
            a[(row, col)] = eval_mono(m, pt);
        }
        rhs.push(BigRational::from_integer(val.clone()));
    }
    let sol = a
        .solve_overdetermined(&rhs)
        .ok_or_else(|| Error::FitResidual("degenerate grid or nonzero residual".into()))?;
    Ok(monos.into_iter().zip(sol).collect())
}

/// Fitted node-variable Ehrhart data and the checked coefficient identities.
#[derive(Clone, Debug)]
pub struct NodeCoefficients {
    pub nodes: Vec<usize>,
    pub stride: i64,
    /// normalized coefficients a_m = (prod m_k!) c_m, keyed by multi-index
    pub coefficients: Vec<(Vec<usize>, BigRational)>,
    /// J_nm = -(E*_n, E*_m)
    pub j_matrix: Vec<Vec<BigRational>>,
    pub top_identities: bool,
    pub linear_identities: bool,
    /// pc extracted from the constant block
    pub pc: BigRational,
}

/// Fit the counting function of the denominator polytope in the node
/// dilation variables and check the coefficient identities; needs a trivial
/// class group.
pub fn node_coefficients(lat: &Lattice) -> Result<NodeCoefficients> {
    if !lat.det().is_one() {
        return Err(Error::Unsupported("node coefficients need det(G) = 1".into()));
    }
    let nodes = lat.graph.nodes();
    if nodes.len() < 2 {
        return Err(Error::WrongNodeCount { expected: 2, found: nodes.len() });
    }
    let nn = nodes.len();
    let degree = lat.graph.ends().len();
    let spec = PolytopeSpec::from_lattice(lat);
    let count = |lambda: &[i64]| -> BigInt {
        let mut l = DualCycle::zero(lat.size());
        for (k, &n) in nodes.iter().enumerate() {
            l = l.add(&lat.dual(n).scale(&rat(lambda[k])));
        }
        count_points(&spec, &spec.scale_dilation(&l), FacetConvention::TRemoved, None)
    };
    // adaptive sampling stride: a residual failure means the integer grid
    // cut across a quasiperiod, so coarsen and retry
    let alpha_lcm: BigInt = nodes.iter().fold(BigInt::one(), |acc, &n| {
        match crate::reduction::seifert_data(lat, n) {
            Ok(d) => arith::lcm_big(&acc, &d.alpha_lcm()),
            Err(_) => acc,
        }
    });
    let mut strides: Vec<i64> = vec![1, 2, 3, 6];
    if let Ok(a) = i64::try_from(alpha_lcm) {
        strides.push(a);
    }
    strides.sort_unstable();
    strides.dedup();
    let mut fitted = None;
    let mut stride_used = 1;
    for &q in &strides {
        let side = (degree + 3) as i64;
        let mut samples = Vec::new();
        let mut mu = vec![1i64; nn];
        'grid: loop {
            let pt: Vec<i64> = mu.iter().map(|&m| m * q).collect();
            samples.push((pt.clone(), count(&pt)));
            let mut k = nn;
            loop {
                if k == 0 {
                    break 'grid;
                }
                k -= 1;
                mu[k] += 1;
                if mu[k] <= side {
                    break;
                }
                mu[k] = 1;
            }
        }
        match fit_multipoly(&samples, nn, degree) {
            Ok(f) => {
                fitted = Some(f);
                stride_used = q;
                break;
            }
            Err(_) => continue,
        }
    }
    let fitted = fitted.ok_or_else(|| Error::FitResidual("no admissible sampling stride".into()))?;

    let coefficients: Vec<(Vec<usize>, BigRational)> = fitted
        .into_iter()
        .map(|(m, c)| {
            let fact: i64 = m.iter().map(|&k| (1..=k as i64).product::<i64>()).product();
            (m, c * rat(fact))
        })
        .collect();
    let coeff = |m: &[usize]| -> BigRational {
        coefficients
            .iter()
            .find(|(mm, _)| mm == m)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(BigRational::zero)
    };
    let j_matrix: Vec<Vec<BigRational>> =
        nodes.iter().map(|&n| nodes.iter().map(|&m| -lat.dual_pair(n, m)).collect()).collect();
    let deltas: Vec<usize> = nodes.iter().map(|&n| lat.graph.valency(n)).collect();

    let mut top = true;
    for a in 0..nn {
        let mut m: Vec<usize> = deltas.iter().map(|&d| d - 2).collect();
        m[a] = deltas[a];
        if coeff(&m) != j_matrix[a][a] {
            top = false;
        }
        for b in a + 1..nn {
            let mut m: Vec<usize> = deltas.iter().map(|&d| d - 2).collect();
            m[a] = deltas[a] - 1;
            m[b] = deltas[b] - 1;
            if coeff(&m) != j_matrix[a][b] {
                top = false;
            }
        }
    }
    let mut linear = true;
    for a in 0..nn {
        let mut m: Vec<usize> = deltas.iter().map(|&d| d - 2).collect();
        m[a] = deltas[a] - 1;
        let mut expect = -lat.pair(&lat.k_can, lat.dual(nodes[a])) / rat(2);
        for b in 0..nn {
            expect += rat(deltas[b] as i64 - 2) * &j_matrix[a][b] / rat(2);
        }
        if coeff(&m) != expect {
            linear = false;
        }
    }
    let m0: Vec<usize> = deltas.iter().map(|&d| d - 2).collect();
    let mut pc = coeff(&m0);
    for a in 0..nn {
        pc += rat(deltas[a] as i64 - 2) * lat.pair(&lat.k_can, lat.dual(nodes[a])) / rat(4);
        pc -= rat((deltas[a] as i64 - 2) * (3 * deltas[a] as i64 - 7)) * &j_matrix[a][a] / rat(24);
        for b in 0..nn {
            if b != a {
                pc -=
                    rat((deltas[a] as i64 - 2) * (deltas[b] as i64 - 2)) * &j_matrix[a][b] / rat(8);
            }
        }
    }
    Ok(NodeCoefficients {
        nodes,
        stride: stride_used,
        coefficients,
        j_matrix,
        top_identities: top,
        linear_identities: linear,
        pc,
    })
}

/// Non-equivariant one-node ray coefficients: the closed identities for the
/// two leading terms and the pc extracted from the third.
#[derive(Clone, Debug)]
pub struct SeifertNeCoefficients {
    pub fit: RayFit,
    pub leading_ok: bool,
    pub subleading_ok: bool,
    pub pc: BigRational,
}

pub fn seifert_ne_coefficients(lat: &Lattice, d: &SeifertData) -> Result<SeifertNeCoefficients> {
    let nodes = lat.graph.nodes();
    if nodes.len() != 1 {
        return Err(Error::WrongNodeCount { expected: 1, found: nodes.len() });
    }
    let degree = d.legs.len();
    // sampling period: the order of the node class, alpha * |e|
    let alpha = d.alpha_lcm();
    let o = to_integer(&(BigRational::from_integer(alpha.clone()) * -d.e.clone()));
    let period = i64::try_from(o).expect("period fits i64").max(1);
    let fit = fit_ray_quasipolynomial(
        lat,
        lat.dual(d.node),
        degree,
        period,
        FacetConvention::TRemoved,
        None,
    )?;
    let c = &fit.coeffs[0];
    let prod_alpha: BigRational = d
        .legs
        .iter()
        .fold(BigRational::one(), |a, l| a * BigRational::from_integer(l.alpha.clone()));
    let fact = |k: usize| -> BigRational { rat((1..=k as i64).product::<i64>()) };
    let leading_ok = c[degree].clone() * fact(degree) == prod_alpha;
    let alpha_term = -BigRational::new(BigInt::one(), alpha.clone())
        + d.legs
            .iter()
            .fold(BigRational::zero(), |a, l| a + BigRational::new(BigInt::one(), l.alpha.clone()));
    let subleading_ok =
        c[degree - 1].clone() * fact(degree - 1) == prod_alpha.clone() * &alpha_term / rat(2);
    let dd = degree as i64;
    let correction = prod_alpha.clone()
        * (-rat((dd - 2) * (3 * dd - 5)) / rat(24) + rat(dd - 2) / rat(4) * &alpha_term);
    let pc = c[degree - 2].clone() * fact(degree - 2) - correction;
    Ok(SeifertNeCoefficients { fit, leading_ok, subleading_ok, pc })
}

/// Brute-force reference count over the bounding box, for oracle tests.
pub fn count_points_reference(
    spec: &PolytopeSpec,
    dilation: &[i128],
    convention: FacetConvention,
) -> BigInt {
    let d = spec.dim();
    let nv = dilation.len();
    let mut bounds = vec![0i128; d];
    for i in 0..d {
        let mut hi = 0i128;
        for v in 0..nv {
            hi = hi.max(dilation[v].div_euclid(spec.columns[i][v]) + 2);
        }
        bounds[i] = hi;
    }
    let mut x = vec![0i128; d];
    let mut total = BigInt::zero();
    loop {
        let mut sums = vec![0i128; nv];
        for v in 0..nv {
            for i in 0..d {
                sums[v] += x[i] * spec.columns[i][v];
            }
        }
        let keep = match convention {
            FacetConvention::TRemoved => (0..nv).any(|v| sums[v] < dilation[v]),
            FacetConvention::FMinusT => {
                x.iter().all(|&c| c >= 1) && (0..nv).any(|v| sums[v] <= dilation[v])
            }
        };
        if keep {
            total += 1;
        }
        let mut k = d;
        loop {
            if k == 0 {
                return total;
            }
            k -= 1;
            x[k] += 1;
            if x[k] <= bounds[k] {
                break;
            }
            x[k] = 0;
        }
    }
}

/// Inclusion-exclusion count over the union of per-vertex open simplices,
/// the second independent counting route.
pub fn count_union_inclusion_exclusion(spec: &PolytopeSpec, dilation: &[i128]) -> BigInt {
    let nv = dilation.len();
    let d = spec.dim();
    let mut total = BigInt::zero();
    for mask in 1u64..(1 << nv) {
        let members: Vec<usize> = (0..nv).filter(|v| mask & (1 << v) != 0).collect();
        let mut bounds = vec![i128::MAX; d];
        for i in 0..d {
            for &v in &members {
                bounds[i] = bounds[i].min(dilation[v].div_euclid(spec.columns[i][v]) + 1);
            }
        }
        let mut x = vec![0i128; d];
        let mut cnt = 0i64;
        'outer: loop {
            let inside = members.iter().all(|&v| {
                let s: i128 = (0..d).map(|i| x[i] * spec.columns[i][v]).sum();
                s < dilation[v]
            });
            if inside {
                cnt += 1;
            }
            let mut k = d;
            loop {
                if k == 0 {
                    break 'outer;
                }
                k -= 1;
                x[k] += 1;
                if x[k] <= bounds[k] {
                    break;
                }
                x[k] = 0;
            }
        }
        let sign = if members.len() % 2 == 1 { 1 } else { -1 };
        total += big(sign * cnt);
    }
    total
}

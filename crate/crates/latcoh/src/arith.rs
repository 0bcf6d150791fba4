//! Exact integer/rational helpers: floor divisions, dense rational linear
//! algebra, Smith normal form, continued fractions and Dedekind sums.

use num::bigint::Sign;
use num::{BigInt, BigRational, Integer, One, Signed, Zero};

pub fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(big(n))
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(big(n), big(d))
}

/// Floor of a/b for exact integers, b != 0.
pub fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

/// Ceiling of a/b for exact integers, b != 0.
pub fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -(-a).div_floor(b)
}

pub fn floor_rat(r: &BigRational) -> BigInt {
    r.floor().to_integer()
}

pub fn ceil_rat(r: &BigRational) -> BigInt {
    r.ceil().to_integer()
}

/// Fractional part in [0,1).
pub fn fract_rat(r: &BigRational) -> BigRational {
    r - BigRational::from_integer(floor_rat(r))
}

pub fn is_integer(r: &BigRational) -> bool {
    r.denom().is_one()
}

pub fn to_integer(r: &BigRational) -> BigInt {
    assert!(is_integer(r), "expected integer, got {}", r);
    r.numer().clone()
}

/// Dense matrix over the rationals, row major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<BigRational>,
}

impl QMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        QMat { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMat::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigRational::one();
        }
        m
    }

    pub fn from_int_rows(rows: &[Vec<BigInt>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut m = QMat::zero(r, c);
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = BigRational::from_integer(v.clone());
            }
        }
        m
    }

    pub fn col(&self, j: usize) -> Vec<BigRational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = BigRational::zero();
                for j in 0..self.cols {
                    if !self[(i, j)].is_zero() && !v[j].is_zero() {
                        acc += &self[(i, j)] * &v[j];
                    }
                }
                acc
            })
            .collect()
    }

    /// Gaussian elimination; returns (rank, det of the leading square part if
    /// square, echelon form).
    fn eliminate(mut self) -> (usize, BigRational, QMat) {
        let mut det = BigRational::one();
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let pivot = (rank..self.rows).find(|&r| !self[(r, col)].is_zero());
            let Some(p) = pivot else {
                det = BigRational::zero();
                continue;
            };
            if p != rank {
                for j in 0..self.cols {
                    let a = self[(p, j)].clone();
                    let b = self[(rank, j)].clone();
                    self[(p, j)] = b;
                    self[(rank, j)] = a;
                }
                det = -det;
            }
            let pv = self[(rank, col)].clone();
            det *= &pv;
            for r in 0..self.rows {
                if r != rank && !self[(r, col)].is_zero() {
                    let f = &self[(r, col)] / &pv;
                    for j in col..self.cols {
                        let sub = &f * &self[(rank, j)];
                        self[(r, j)] -= sub;
                    }
                }
            }
            rank += 1;
        }
        (rank, det, self)
    }

    pub fn rank(&self) -> usize {
        self.clone().eliminate().0
    }

    pub fn det(&self) -> BigRational {
        assert_eq!(self.rows, self.cols);
        if self.rows == 0 {
            return BigRational::one();
        }
        let (rank, det, _) = self.clone().eliminate();
        if rank < self.rows {
            BigRational::zero()
        } else {
            det
        }
    }

    /// Solve self * x = rhs exactly; None if singular/inconsistent.
    pub fn solve(&self, rhs: &[BigRational]) -> Option<Vec<BigRational>> {
        assert_eq!(self.rows, self.cols);
        assert_eq!(self.rows, rhs.len());
        let n = self.rows;
        let mut aug = QMat::zero(n, n + 1);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n)] = rhs[i].clone();
        }
        let (_, _, ech) = aug.eliminate();
        let mut x = vec![BigRational::zero(); n];
        for i in 0..n {
            let lead = (0..n).find(|&j| !ech[(i, j)].is_zero());
            match lead {
                Some(j) => x[j] = &ech[(i, n)] / &ech[(i, j)],
                None if !ech[(i, n)].is_zero() => return None,
                None => {}
            }
        }
        // reject underdetermined systems
        let check = self.mul_vec(&x);
        if check.iter().zip(rhs).all(|(a, b)| a == b) {
            Some(x)
        } else {
            None
        }
    }

    /// Unique solution of an overdetermined consistent system; None when the
    /// coefficient matrix is rank deficient or the system is inconsistent.
    pub fn solve_overdetermined(&self, rhs: &[BigRational]) -> Option<Vec<BigRational>> {
        assert_eq!(self.rows, rhs.len());
        let n = self.rows;
        let m = self.cols;
        let mut aug = QMat::zero(n, m + 1);
        for i in 0..n {
            for j in 0..m {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, m)] = rhs[i].clone();
        }
        let (_, _, ech) = aug.eliminate();
        let mut x = vec![BigRational::zero(); m];
        let mut pivots = 0usize;
        for i in 0..n {
            let lead = (0..m).find(|&j| !ech[(i, j)].is_zero());
            match lead {
                Some(j) => {
                    x[j] = &ech[(i, m)] / &ech[(i, j)];
                    pivots += 1;
                }
                None if !ech[(i, m)].is_zero() => return None,
                None => {}
            }
        }
        if pivots < m {
            return None;
        }
        let check = self.mul_vec(&x);
        if check.iter().zip(rhs).all(|(a, b)| a == b) {
            Some(x)
        } else {
            None
        }
    }

    pub fn inverse(&self) -> Option<QMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = QMat::zero(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = BigRational::one();
        }
        let (rank, _, ech) = aug.eliminate();
        if rank < n {
            return None;
        }
        // normalize pivots
        let mut inv = QMat::zero(n, n);
        for i in 0..n {
            let j = (0..n).find(|&j| !ech[(i, j)].is_zero()).unwrap();
            let pv = ech[(i, j)].clone();
            for k in 0..n {
                let v = &ech[(i, n + k)] / &pv;
                inv[(j, k)] = v;
            }
        }
        Some(inv)
    }
}

impl std::ops::Index<(usize, usize)> for QMat {
    type Output = BigRational;
    fn index(&self, (i, j): (usize, usize)) -> &BigRational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigRational {
        &mut self.data[i * self.cols + j]
    }
}

/// Dense integer matrix, row major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<BigInt>,
}

impl IMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IMat { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IMat::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn to_qmat(&self) -> QMat {
        let mut q = QMat::zero(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                q[(i, j)] = BigRational::from_integer(self[(i, j)].clone());
            }
        }
        q
    }

    pub fn det(&self) -> BigInt {
        to_integer(&self.to_qmat().det())
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = BigInt::zero();
                for j in 0..self.cols {
                    acc += &self[(i, j)] * &v[j];
                }
                acc
            })
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for IMat {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

/// Smith normal form: returns (u, d) with u unimodular and u*a*v = diag(d)
/// for some unimodular v; d[i] divides d[i+1]. Only the left transform is
/// returned since cokernel class labels need u alone.
pub fn smith_normal_form(a: &IMat) -> (IMat, Vec<BigInt>) {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut m = a.clone();
    let mut u = IMat::identity(n);

    fn swap_rows(m: &mut IMat, u: &mut IMat, a: usize, b: usize) {
        for j in 0..m.cols {
            m.data.swap(a * m.cols + j, b * m.cols + j);
        }
        for j in 0..u.cols {
            u.data.swap(a * u.cols + j, b * u.cols + j);
        }
    }
    fn swap_cols(m: &mut IMat, a: usize, b: usize) {
        for i in 0..m.rows {
            m.data.swap(i * m.cols + a, i * m.cols + b);
        }
    }
    fn add_row(m: &mut IMat, u: &mut IMat, src: usize, dst: usize, f: &BigInt) {
        for j in 0..m.cols {
            let v = &m[(src, j)] * f;
            m[(dst, j)] += v;
        }
        for j in 0..u.cols {
            let v = &u[(src, j)] * f;
            u[(dst, j)] += v;
        }
    }
    fn add_col(m: &mut IMat, src: usize, dst: usize, f: &BigInt) {
        for i in 0..m.rows {
            let v = &m[(i, src)] * f;
            m[(i, dst)] += v;
        }
    }

    for k in 0..n {
        loop {
            // locate a nonzero entry of least absolute value in the corner
            let mut best: Option<(usize, usize)> = None;
            for i in k..n {
                for j in k..n {
                    if !m[(i, j)].is_zero() {
                        let better = match &best {
                            None => true,
                            Some((bi, bj)) => m[(i, j)].abs() < m[(*bi, *bj)].abs(),
                        };
                        if better {
                            best = Some((i, j));
                        }
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            if pi != k {
                swap_rows(&mut m, &mut u, pi, k);
            }
            if pj != k {
                swap_cols(&mut m, k, pj);
            }
            let mut dirty = false;
            for i in k + 1..n {
                if !m[(i, k)].is_zero() {
                    let f = -floor_div(&m[(i, k)], &m[(k, k)]);
                    add_row(&mut m, &mut u, k, i, &f);
                    if !m[(i, k)].is_zero() {
                        dirty = true;
                    }
                }
            }
            for j in k + 1..n {
                if !m[(k, j)].is_zero() {
                    let f = -floor_div(&m[(k, j)], &m[(k, k)]);
                    add_col(&mut m, k, j, &f);
                    if !m[(k, j)].is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue;
            }
            // ensure divisibility of the remaining block
            let piv = m[(k, k)].clone();
            let mut fixed = true;
            'outer: for i in k + 1..n {
                for j in k + 1..n {
                    if !(&m[(i, j)] % &piv).is_zero() {
                        add_row(&mut m, &mut u, i, k, &BigInt::one());
                        fixed = false;
                        break 'outer;
                    }
                }
            }
            if fixed {
                break;
            }
        }
    }
    let mut d: Vec<BigInt> = (0..n).map(|i| m[(i, i)].abs()).collect();
    // sign normalization: diag entries nonnegative
    for (i, v) in d.iter_mut().enumerate() {
        if m[(i, i)].sign() == Sign::Minus {
            for j in 0..n {
                let neg = -u[(i, j)].clone();
                u[(i, j)] = neg;
            }
        }
        *v = v.abs();
    }
    (u, d)
}

/// Negative continued fraction expansion: p/q = [k1,...,ks] with all ki >= 2,
/// p > q >= 1, gcd(p,q)=1.
pub fn neg_cont_frac(p: &BigInt, q: &BigInt) -> Vec<BigInt> {
    assert!(p > q && q > &BigInt::zero());
    let mut out = Vec::new();
    let mut a = p.clone();
    let mut b = q.clone();
    while !b.is_zero() {
        let k = ceil_div(&a, &b);
        let r = &k * &b - &a;
        out.push(k);
        a = b;
        b = r;
    }
    out
}

/// Numerator of the continued fraction [k1,...,ks]; determinant of the
/// corresponding chain. Empty chain has determinant 1.
pub fn chain_det(ks: &[BigInt]) -> BigInt {
    // n_i = k_i n_{i+1} - n_{i+2}, computed from the tail
    let mut n1 = BigInt::one();
    let mut n2 = BigInt::zero();
    for k in ks.iter().rev() {
        let n0 = k * &n1 - &n2;
        n2 = n1;
        n1 = n0;
    }
    n1
}

/// Sawtooth function ((x)).
pub fn sawtooth(x: &BigRational) -> BigRational {
    if is_integer(x) {
        BigRational::zero()
    } else {
        fract_rat(x) - ratio(1, 2)
    }
}

/// Dedekind sum s(q,p) = sum_l ((l/p))((ql/p)).
pub fn dedekind_sum(q: &BigInt, p: &BigInt) -> BigRational {
    assert!(p > &BigInt::zero());
    let mut s = BigRational::zero();
    let mut l = BigInt::one();
    while &l < p {
        let a = BigRational::new(l.clone(), p.clone());
        let b = BigRational::new(q * &l, p.clone());
        s += sawtooth(&a) * sawtooth(&b);
        l += 1;
    }
    s
}

pub fn lcm_big(a: &BigInt, b: &BigInt) -> BigInt {
    if a.is_zero() || b.is_zero() {
        return BigInt::zero();
    }
    (a * b).abs() / a.gcd(b)
}

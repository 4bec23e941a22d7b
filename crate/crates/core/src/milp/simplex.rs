//! Dense bounded-variable primal simplex, generic over the number type so the same
//! code runs in floating point for branch-and-bound and exactly for polishing.

use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use super::Sense;

pub trait Scalar: Clone + Debug + PartialOrd {
    const EXACT: bool;
    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool {
        self.neg().is_pos()
    }
}

const EPS: f64 = 1e-9;

impl Scalar for f64 {
    const EXACT: bool = false;
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        self.abs() <= EPS
    }
    fn is_pos(&self) -> bool {
        *self > EPS
    }
}

/// Exact conversion of a finite float.
pub fn rational(x: f64) -> BigRational {
    <BigRational as FromPrimitive>::from_f64(x).expect("finite value")
}

impl Scalar for BigRational {
    const EXACT: bool = true;
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_f64(x: f64) -> Self {
        rational(x)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_pos(&self) -> bool {
        Signed::is_positive(self)
    }
    fn is_neg(&self) -> bool {
        Signed::is_negative(self)
    }
}

#[cfg(test)]
pub fn big(x: i64) -> BigRational {
    BigRational::from_integer(num_bigint::BigInt::from(x))
}

/// `min c.x` subject to rows and `lb <= x <= ub`; `None` bounds are infinite.
#[derive(Debug, Clone)]
pub struct LpProblem<F> {
    pub lb: Vec<Option<F>>,
    pub ub: Vec<Option<F>>,
    pub rows: Vec<(Vec<(usize, F)>, Sense, F)>,
    pub cost: Vec<F>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<F> {
    Optimal { x: Vec<F>, objective: F },
    Infeasible,
    Unbounded,
    IterationLimit,
}

/// How an original column is expressed through internal non-negative columns.
enum ColMap<F> {
    /// x = shift + y
    Up(usize, F),
    /// x = shift - y
    Down(usize, F),
    /// x = y1 - y2
    Split(usize, usize),
}

struct Tableau<F> {
    m: usize,
    n: usize,
    /// m rows of B^-1 A, each of length n.
    a: Vec<Vec<F>>,
    /// Current values of basic variables.
    beta: Vec<F>,
    basis: Vec<usize>,
    at_upper: Vec<bool>,
    upper: Vec<Option<F>>,
    /// Reduced costs.
    d: Vec<F>,
    iterations: usize,
}

enum Step {
    Optimal,
    Unbounded,
    Limit,
}

impl<F: Scalar> Tableau<F> {
    fn set_costs(&mut self, c: &[F]) {
        let mut d = c.to_vec();
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = &c[b];
            if cb.is_zero() {
                continue;
            }
            for (j, dj) in d.iter_mut().enumerate() {
                let v = &self.a[r][j];
                if !v.is_zero() {
                    *dj = dj.sub(&cb.mul(v));
                }
            }
        }
        self.d = d;
    }

    fn objective(&self, c: &[F]) -> F {
        let mut z = F::zero();
        for (r, &b) in self.basis.iter().enumerate() {
            z = z.add(&c[b].mul(&self.beta[r]));
        }
        for j in 0..self.n {
            if self.at_upper[j] {
                if let Some(u) = &self.upper[j] {
                    z = z.add(&c[j].mul(u));
                }
            }
        }
        z
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let p = self.a[r][j].clone();
        let row: Vec<F> = self.a[r].iter().map(|v| v.div(&p)).collect();
        let nz: Vec<usize> = (0..self.n).filter(|&k| !row[k].is_zero()).collect();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.a[i][j].clone();
            if f.is_zero() {
                continue;
            }
            for &k in &nz {
                self.a[i][k] = self.a[i][k].sub(&f.mul(&row[k]));
            }
            if !F::EXACT {
                self.a[i][j] = F::zero();
            }
        }
        let f = self.d[j].clone();
        if !f.is_zero() {
            for &k in &nz {
                self.d[k] = self.d[k].sub(&f.mul(&row[k]));
            }
            if !F::EXACT {
                self.d[j] = F::zero();
            }
        }
        self.a[r] = row;
        self.basis[r] = j;
    }

    fn run(&mut self, blocked: &[bool], limit: usize) -> Step {
        let mut degenerate = 0usize;
        loop {
            if self.iterations >= limit {
                return Step::Limit;
            }
            let bland = F::EXACT || degenerate > 50;
            let in_basis = {
                let mut v = vec![false; self.n];
                for &b in &self.basis {
                    v[b] = true;
                }
                v
            };
            let mut enter: Option<(usize, F)> = None;
            for j in 0..self.n {
                if in_basis[j] || blocked[j] {
                    continue;
                }
                let dj = &self.d[j];
                let fixed = matches!(&self.upper[j], Some(u) if u.is_zero());
                let ok = if self.at_upper[j] { dj.is_pos() } else { dj.is_neg() && !fixed };
                if !ok {
                    continue;
                }
                let score = if dj.is_neg() { dj.neg() } else { dj.clone() };
                match &enter {
                    None => enter = Some((j, score)),
                    Some((_, s)) if !bland && score > *s => enter = Some((j, score)),
                    _ => {}
                }
                if bland && enter.is_some() {
                    break;
                }
            }
            let Some((j, _)) = enter else { return Step::Optimal };
            let dir_up = !self.at_upper[j];
            // ratio test
            let mut theta: Option<F> = self.upper[j].clone();
            let mut leave: Option<(usize, bool)> = None;
            for r in 0..self.m {
                let alpha = &self.a[r][j];
                if alpha.is_zero() {
                    continue;
                }
                // basic value moves by -alpha * t when entering increases
                let dec = if dir_up { alpha.is_pos() } else { alpha.is_neg() };
                let mag = if alpha.is_pos() { alpha.clone() } else { alpha.neg() };
                let (limit_t, to_upper) = if dec {
                    let v = self.beta[r].clone();
                    let v = if v.is_neg() { F::zero() } else { v };
                    (v.div(&mag), false)
                } else {
                    match &self.upper[self.basis[r]] {
                        Some(u) => {
                            let room = u.sub(&self.beta[r]);
                            let room = if room.is_neg() { F::zero() } else { room };
                            (room.div(&mag), true)
                        }
                        None => continue,
                    }
                };
                let better = match &theta {
                    None => true,
                    Some(t) => {
                        limit_t < *t
                            || (bland && limit_t == *t && leave.map_or(false, |(lr, _)| self.basis[r] < self.basis[lr]))
                    }
                };
                if better {
                    theta = Some(limit_t);
                    leave = Some((r, to_upper));
                }
            }
            let Some(t) = theta else { return Step::Unbounded };
            self.iterations += 1;
            if t.is_zero() {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            let signed = if dir_up { t.clone() } else { t.neg() };
            for r in 0..self.m {
                let alpha = self.a[r][j].clone();
                if !alpha.is_zero() {
                    self.beta[r] = self.beta[r].sub(&alpha.mul(&signed));
                }
            }
            match leave {
                None => {
                    self.at_upper[j] = dir_up;
                }
                Some((r, to_upper)) => {
                    let entering_value = if dir_up {
                        t
                    } else {
                        self.upper[j].clone().expect("at upper implies finite upper").sub(&t)
                    };
                    let old = self.basis[r];
                    self.at_upper[old] = to_upper;
                    self.pivot(r, j);
                    self.beta[r] = entering_value;
                    self.at_upper[j] = false;
                }
            }
        }
    }
}

/// Solves the LP; `limit` caps the number of pivots.
pub fn solve_lp<F: Scalar>(p: &LpProblem<F>, limit: usize) -> LpOutcome<F> {
    let n0 = p.lb.len();
    let mut maps = Vec::with_capacity(n0);
    let mut upper: Vec<Option<F>> = Vec::new();
    for j in 0..n0 {
        match (&p.lb[j], &p.ub[j]) {
            (Some(l), u) => {
                if let Some(u) = u {
                    if u.sub(l).is_neg() {
                        return LpOutcome::Infeasible;
                    }
                }
                maps.push(ColMap::Up(upper.len(), l.clone()));
                upper.push(u.as_ref().map(|u| u.sub(l)));
            }
            (None, Some(u)) => {
                maps.push(ColMap::Down(upper.len(), u.clone()));
                upper.push(None);
            }
            (None, None) => {
                maps.push(ColMap::Split(upper.len(), upper.len() + 1));
                upper.push(None);
                upper.push(None);
            }
        }
    }
    let n_struct = upper.len();
    let m = p.rows.len();
    // internal rows: coefficients over structural columns, rhs
    let mut rows: Vec<Vec<(usize, F)>> = Vec::with_capacity(m);
    let mut rhs: Vec<F> = Vec::with_capacity(m);
    for (coeffs, _, b) in &p.rows {
        let mut r = Vec::new();
        let mut b = b.clone();
        for (j, a) in coeffs {
            match &maps[*j] {
                ColMap::Up(k, s) => {
                    b = b.sub(&a.mul(s));
                    r.push((*k, a.clone()));
                }
                ColMap::Down(k, s) => {
                    b = b.sub(&a.mul(s));
                    r.push((*k, a.neg()));
                }
                ColMap::Split(k1, k2) => {
                    r.push((*k1, a.clone()));
                    r.push((*k2, a.neg()));
                }
            }
        }
        rows.push(r);
        rhs.push(b);
    }
    let n_slack = p.rows.iter().filter(|r| r.1 != Sense::Eq).count();
    // slack coefficient per row after making the rhs non-negative
    let mut slack_sign: Vec<Option<bool>> = Vec::with_capacity(m);
    for i in 0..m {
        let flip = rhs[i].is_neg() || (F::EXACT && rhs[i] < F::zero());
        if flip {
            rhs[i] = rhs[i].neg();
        }
        slack_sign.push(match p.rows[i].1 {
            Sense::Eq => None,
            Sense::Le => Some(!flip),
            Sense::Ge => Some(flip),
        });
        if flip {
            for (_, v) in rows[i].iter_mut() {
                *v = v.neg();
            }
        }
    }
    let needs_art: Vec<bool> = slack_sign.iter().map(|s| *s != Some(true)).collect();
    let n_art = needs_art.iter().filter(|&&b| b).count();
    let art0 = n_struct + n_slack;
    let n = art0 + n_art;
    let mut a = vec![vec![F::zero(); n]; m];
    let mut basis = Vec::with_capacity(m);
    let mut slack = n_struct;
    let mut art = art0;
    for i in 0..m {
        for (k, v) in &rows[i] {
            a[i][*k] = a[i][*k].add(v);
        }
        if let Some(pos) = slack_sign[i] {
            a[i][slack] = if pos { F::one() } else { F::one().neg() };
            upper.push(None);
            if pos {
                basis.push(slack);
            }
            slack += 1;
        }
        if needs_art[i] {
            a[i][art] = F::one();
            basis.push(art);
            art += 1;
        }
    }
    for _ in 0..n_art {
        upper.push(None);
    }
    let mut t = Tableau {
        m,
        n,
        a,
        beta: rhs,
        basis,
        at_upper: vec![false; n],
        upper,
        d: vec![],
        iterations: 0,
    };
    let mut c1 = vec![F::zero(); n];
    for c in c1.iter_mut().skip(art0) {
        *c = F::one();
    }
    t.set_costs(&c1);
    let none = vec![false; n];
    match t.run(&none, limit) {
        Step::Limit => return LpOutcome::IterationLimit,
        Step::Unbounded => return LpOutcome::Infeasible,
        Step::Optimal => {}
    }
    let infeas = t.objective(&c1);
    if infeas.is_pos() || (F::EXACT && !infeas.is_zero()) {
        return LpOutcome::Infeasible;
    }
    // Phase 2: artificials pinned at zero.
    for j in art0..n {
        t.upper[j] = Some(F::zero());
        t.at_upper[j] = false;
    }
    let mut blocked = vec![false; n];
    for b in blocked.iter_mut().skip(art0) {
        *b = true;
    }
    let mut c2 = vec![F::zero(); n];
    for (j, c) in p.cost.iter().enumerate() {
        match &maps[j] {
            ColMap::Up(k, _) => c2[*k] = c2[*k].add(c),
            ColMap::Down(k, _) => c2[*k] = c2[*k].sub(c),
            ColMap::Split(k1, k2) => {
                c2[*k1] = c2[*k1].add(c);
                c2[*k2] = c2[*k2].sub(c);
            }
        }
    }
    t.set_costs(&c2);
    match t.run(&blocked, limit) {
        Step::Limit => return LpOutcome::IterationLimit,
        Step::Unbounded => return LpOutcome::Unbounded,
        Step::Optimal => {}
    }
    let mut y: Vec<F> = (0..n).map(|j| if t.at_upper[j] { t.upper[j].clone().unwrap_or(F::zero()) } else { F::zero() }).collect();
    for (r, &b) in t.basis.iter().enumerate() {
        y[b] = t.beta[r].clone();
    }
    let x: Vec<F> = maps
        .iter()
        .map(|mp| match mp {
            ColMap::Up(k, s) => s.add(&y[*k]),
            ColMap::Down(k, s) => s.sub(&y[*k]),
            ColMap::Split(k1, k2) => y[*k1].sub(&y[*k2]),
        })
        .collect();
    let mut objective = F::zero();
    for (j, c) in p.cost.iter().enumerate() {
        objective = objective.add(&c.mul(&x[j]));
    }
    LpOutcome::Optimal { x, objective }
}

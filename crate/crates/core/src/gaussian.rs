//! Exact second-order description of the jointly Gaussian inner-bound system
//! and log-determinant evaluation of the mutual-information terms.
//!
//! Everything here is computed from the generator loadings directly, without
//! reference to the printed closed forms, so it can serve as their oracle.
//!
//! Determinants use symmetric elimination with diagonal pivoting. Pivots below
//! `RANK_EPS * max(1, max diagonal)` are dropped, which turns the determinant
//! into a pseudo-determinant: a constant variable carries no information
//! instead of producing `0/0`. When a set is a deterministic linear function of
//! another (joint rank below the sum of marginal ranks), the mutual information
//! between them is reported as `+inf`.

use std::f64::consts::LN_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ChannelConfig, HelperStrategy, RatePair};

pub const DIM: usize = 9;

/// Relative pivot threshold for rank decisions.
pub const RANK_EPS: f64 = 1e-12;

/// Negative mutual information tolerated (and clamped) before it counts as an
/// internal inconsistency.
pub const NEGATIVE_MI_SLACK: f64 = 1e-9;

/// Canonical variable order of the joint covariance.
///
/// `U` and `V` are the auxiliaries scaled by `eta1` and `eta2`, which leaves
/// every information quantity unchanged and keeps them defined at zero gain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    U,
    V,
    X0,
    X1,
    X2,
    S1,
    S2,
    Y1,
    Y2,
}

impl Var {
    pub const ALL: [Var; DIM] = [
        Var::U,
        Var::V,
        Var::X0,
        Var::X1,
        Var::X2,
        Var::S1,
        Var::S2,
        Var::Y1,
        Var::Y2,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::U => "U",
            Var::V => "V",
            Var::X0 => "X0",
            Var::X1 => "X1",
            Var::X2 => "X2",
            Var::S1 => "S1",
            Var::S2 => "S2",
            Var::Y1 => "Y1",
            Var::Y2 => "Y2",
        }
    }
}

/// A subset of the canonical variables.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct VariableSet(u16);

impl VariableSet {
    pub const EMPTY: VariableSet = VariableSet(0);

    pub fn of(vars: &[Var]) -> Self {
        VariableSet(vars.iter().fold(0, |m, v| m | (1 << v.index())))
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, v: Var) -> bool {
        self.0 & (1 << v.index()) != 0
    }

    pub fn union(self, other: VariableSet) -> Self {
        VariableSet(self.0 | other.0)
    }

    pub fn is_disjoint(self, other: VariableSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        (0..DIM).filter(move |i| self.0 & (1 << i) != 0)
    }
}

impl fmt::Debug for VariableSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<_> = Var::ALL
            .iter()
            .filter(|v| self.contains(**v))
            .map(|v| v.name())
            .collect();
        write!(f, "{{{}}}", names.join(","))
    }
}

/// Number of independent generators behind the canonical variables.
const GENERATORS: usize = 8;

type Factor = [[f64; GENERATORS]; DIM];

/// Symmetric covariance over `(U, V, X0, X1, X2, S1, S2, Y1, Y2)`.
///
/// Matrices built from a strategy also keep a square-root factor (loadings on
/// independent generators scaled by their standard deviations). Information
/// quantities are then computed by orthogonalizing factor rows, which avoids
/// the loss of precision of eliminating on the matrix itself when conditional
/// variances are tiny.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceMatrix {
    entries: [[f64; DIM]; DIM],
    #[serde(skip)]
    factor: Option<Factor>,
}

impl CovarianceMatrix {
    /// Wraps a matrix, symmetrizing it.
    pub fn from_entries(mut entries: [[f64; DIM]; DIM]) -> Self {
        for i in 0..DIM {
            for j in 0..i {
                let m = 0.5 * (entries[i][j] + entries[j][i]);
                entries[i][j] = m;
                entries[j][i] = m;
            }
        }
        CovarianceMatrix {
            entries,
            factor: None,
        }
    }

    pub fn entries(&self) -> &[[f64; DIM]; DIM] {
        &self.entries
    }

    pub fn get(&self, a: Var, b: Var) -> f64 {
        self.entries[a.index()][b.index()]
    }

    /// Scales variable `v` by `c` (row and column).
    pub fn scaled(&self, v: Var, c: f64) -> Self {
        let mut e = self.entries;
        let k = v.index();
        for i in 0..DIM {
            e[k][i] *= c;
            e[i][k] *= c;
        }
        let factor = self.factor.map(|mut f| {
            f[k].iter_mut().for_each(|x| *x *= c);
            f
        });
        CovarianceMatrix { entries: e, factor }
    }

    /// Checks positive semidefiniteness by pivoted elimination; every pivot
    /// must be at least `-tol`.
    pub fn is_psd(&self, tol: f64) -> bool {
        let all: Vec<usize> = (0..DIM).collect();
        let mut block = Block::new(self, &all);
        block.rows = None;
        let mut live: Vec<usize> = (0..DIM).collect();
        while !live.is_empty() {
            let (pos, &c) = live
                .iter()
                .enumerate()
                .max_by(|a, b| block.a[*a.1][*a.1].total_cmp(&block.a[*b.1][*b.1]))
                .unwrap();
            let pivot = block.a[c][c];
            if pivot < -tol {
                return false;
            }
            live.swap_remove(pos);
            if pivot <= tol {
                // Remaining column must vanish for a PSD matrix.
                if live.iter().any(|&i| block.a[i][c].abs() > tol.sqrt()) {
                    return false;
                }
                continue;
            }
            block.pivot(c, &live);
        }
        true
    }
}

/// Row loadings of one canonical variable on the independent generators
/// `(X01', X02', X1, X2, S1, S2, Z1, Z2)`.
type Loading = [f64; GENERATORS];

fn loadings(cfg: &ChannelConfig, s: &HelperStrategy) -> [Loading; DIM] {
    use crate::model::User::{One, Two};
    let (e1, e2) = (cfg.eta(One), cfg.eta(Two));
    let x0 = [1.0, 1.0, 0.0, 0.0, s.beta1, s.beta2, 0.0, 0.0];
    let mut y1 = x0.map(|v| e1 * v);
    y1[2] += 1.0;
    y1[4] += 1.0;
    y1[6] += 1.0;
    let mut y2 = x0.map(|v| e2 * v);
    y2[3] += 1.0;
    y2[5] += 1.0;
    y2[7] += 1.0;
    [
        [e1, 0.0, 0.0, 0.0, s.alpha11, s.alpha12, 0.0, 0.0],
        [e2 * s.alpha20, e2, 0.0, 0.0, s.alpha21, s.alpha22, 0.0, 0.0],
        x0,
        [0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0],
        y1,
        y2,
    ]
}

pub(crate) fn generator_variances(cfg: &ChannelConfig, s: &HelperStrategy) -> [f64; GENERATORS] {
    use crate::model::User::{One, Two};
    let p0p = s.p0_prime(cfg);
    [
        s.gamma * p0p,
        s.gamma_bar() * p0p,
        cfg.p(One),
        cfg.p(Two),
        cfg.q(One),
        cfg.q(Two),
        1.0,
        1.0,
    ]
}

/// Generator loadings, exposed for sampling the same linear system.
pub(crate) fn generator_loadings(cfg: &ChannelConfig, s: &HelperStrategy) -> Factor {
    loadings(cfg, s)
}

/// Builds the joint covariance of the Gaussian inner-bound construction.
pub fn build_joint_covariance(
    cfg: &ChannelConfig,
    strat: &HelperStrategy,
) -> Result<CovarianceMatrix> {
    strat.validate(cfg)?;
    let l = loadings(cfg, strat);
    let d = generator_variances(cfg, strat);
    let mut entries = [[0.0; DIM]; DIM];
    for i in 0..DIM {
        for j in 0..=i {
            let v: f64 = (0..GENERATORS).map(|g| l[i][g] * l[j][g] * d[g]).sum();
            entries[i][j] = v;
            entries[j][i] = v;
        }
    }
    let sd = d.map(|v| v.max(0.0).sqrt());
    let factor = l.map(|row| std::array::from_fn(|g| row[g] * sd[g]));
    Ok(CovarianceMatrix {
        entries,
        factor: Some(factor),
    })
}

/// Working copy of a principal sub-block, indexed by local positions.
#[derive(Clone)]
struct Block {
    a: [[f64; DIM]; DIM],
    rows: Option<Factor>,
    tol: f64,
}

impl Block {
    fn new(cov: &CovarianceMatrix, idx: &[usize]) -> Self {
        let mut a = [[0.0; DIM]; DIM];
        let mut scale: f64 = 1.0;
        for (p, &i) in idx.iter().enumerate() {
            for (q, &j) in idx.iter().enumerate() {
                a[p][q] = cov.entries[i][j];
            }
            scale = scale.max(cov.entries[i][i].abs());
        }
        let rows = cov.factor.map(|f| {
            let mut rows = [[0.0; GENERATORS]; DIM];
            for (p, &i) in idx.iter().enumerate() {
                rows[p] = f[i];
            }
            rows
        });
        Block {
            a,
            rows,
            tol: RANK_EPS * scale,
        }
    }

    /// Current (conditional) variance at position `i`.
    fn diag(&self, i: usize) -> f64 {
        match &self.rows {
            Some(r) => dot(&r[i], &r[i]),
            None => self.a[i][i],
        }
    }

    /// Conditions the positions in `rest` on position `c`: a Schur-complement
    /// update of the matrix, or a projection of the factor rows.
    fn pivot(&mut self, c: usize, rest: &[usize]) {
        if let Some(rows) = &mut self.rows {
            let u = rows[c];
            let n = dot(&u, &u);
            // projecting twice keeps the rows orthogonal to working precision
            for _ in 0..2 {
                for &i in rest {
                    let f = dot(&rows[i], &u) / n;
                    rows[i].iter_mut().zip(&u).for_each(|(w, x)| *w -= f * x);
                }
            }
            return;
        }
        let p = self.a[c][c];
        for &i in rest {
            let f = self.a[i][c] / p;
            if f == 0.0 {
                continue;
            }
            for &j in rest {
                self.a[i][j] -= f * self.a[c][j];
            }
        }
    }

    /// Eliminates positions in `cands` (largest pivot first), updating every
    /// position in `cands ∪ others`. Returns `(log pseudo-determinant, rank)`
    /// of the eliminated block in nats.
    fn eliminate(&mut self, cands: &[usize], others: &[usize]) -> (f64, usize) {
        let mut live: Vec<usize> = cands.to_vec();
        let mut rest: Vec<usize> = cands.iter().chain(others).copied().collect();
        let mut logdet = 0.0;
        let mut rank = 0;
        while !live.is_empty() {
            let (pos, &c) = live
                .iter()
                .enumerate()
                .max_by(|x, y| self.diag(*x.1).total_cmp(&self.diag(*y.1)))
                .unwrap();
            let pivot = self.diag(c);
            if pivot <= self.tol {
                break;
            }
            logdet += pivot.ln();
            rank += 1;
            live.swap_remove(pos);
            rest.retain(|&r| r != c);
            self.pivot(c, &rest);
        }
        (logdet, rank)
    }

    fn log_pdet(&self, pos: &[usize]) -> (f64, usize) {
        self.clone().eliminate(pos, &[])
    }
}

fn dot(a: &[f64; GENERATORS], b: &[f64; GENERATORS]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_sets(a: VariableSet, b: VariableSet) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    if !a.is_disjoint(b) {
        return Err(Error::OverlappingSets);
    }
    Ok(())
}

/// Mutual information between position groups `pa`, `pb` of a block, in bits.
fn block_mi(block: &Block, pa: &[usize], pb: &[usize]) -> Result<f64> {
    let pab: Vec<usize> = pa.iter().chain(pb).copied().collect();
    let (la, ra) = block.log_pdet(pa);
    let (lb, rb) = block.log_pdet(pb);
    let (lab, rab) = block.log_pdet(&pab);
    if rab < ra + rb {
        return Ok(f64::INFINITY);
    }
    let bits = 0.5 * (la + lb - lab) / LN_2;
    clamp_information(bits)
}

fn clamp_information(bits: f64) -> Result<f64> {
    if bits < -NEGATIVE_MI_SLACK || bits.is_nan() {
        return Err(Error::NegativeInformation(bits));
    }
    Ok(bits.max(0.0))
}

/// `I(A; B)` in bits for the Gaussian vector described by `cov`.
pub fn gaussian_mi(cov: &CovarianceMatrix, a: VariableSet, b: VariableSet) -> Result<f64> {
    check_sets(a, b)?;
    let idx: Vec<usize> = a.union(b).indices().collect();
    let block = Block::new(cov, &idx);
    let pa: Vec<usize> = positions(&idx, a);
    let pb: Vec<usize> = positions(&idx, b);
    block_mi(&block, &pa, &pb)
}

/// `I(A; B | C)` in bits, via the Schur complement of the covariance on `C`.
pub fn gaussian_cmi(
    cov: &CovarianceMatrix,
    a: VariableSet,
    b: VariableSet,
    c: VariableSet,
) -> Result<f64> {
    check_sets(a, b)?;
    if !a.is_disjoint(c) || !b.is_disjoint(c) {
        return Err(Error::OverlappingSets);
    }
    if c.is_empty() {
        return gaussian_mi(cov, a, b);
    }
    let idx: Vec<usize> = a.union(b).union(c).indices().collect();
    let mut block = Block::new(cov, &idx);
    let pa = positions(&idx, a);
    let pb = positions(&idx, b);
    let pc = positions(&idx, c);
    let keep: Vec<usize> = pa.iter().chain(&pb).copied().collect();
    block.eliminate(&pc, &keep);
    block_mi(&block, &pa, &pb)
}

fn positions(idx: &[usize], set: VariableSet) -> Vec<usize> {
    idx.iter()
        .enumerate()
        .filter(|(_, i)| set.0 & (1 << **i) != 0)
        .map(|(p, _)| p)
        .collect()
}

/// The four unclamped Remark-1 terms for one strategy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SequentialTerms {
    /// `I(U,X1;Y1) - I(U;S1,S2)`
    pub f1: f64,
    /// `I(X1;Y1|U)`
    pub g1: f64,
    /// `I(V,X2;Y2) - I(V;U,S1,S2)`
    pub f2: f64,
    /// `I(X2;Y2|V)`
    pub g2: f64,
}

impl SequentialTerms {
    pub fn unclamped(&self) -> RatePair {
        RatePair::new(self.f1.min(self.g1), self.f2.min(self.g2))
    }

    pub fn rates(&self) -> RatePair {
        let u = self.unclamped();
        RatePair::new(u.r1.max(0.0), u.r2.max(0.0))
    }
}

fn set(v: &[Var]) -> VariableSet {
    VariableSet::of(v)
}

pub fn sequential_terms(cfg: &ChannelConfig, strat: &HelperStrategy) -> Result<SequentialTerms> {
    use Var::*;
    let cov = build_joint_covariance(cfg, strat)?;
    let mi = |a: &[Var], b: &[Var]| gaussian_mi(&cov, set(a), set(b));
    let cmi = |a: &[Var], b: &[Var], c: &[Var]| gaussian_cmi(&cov, set(a), set(b), set(c));
    Ok(SequentialTerms {
        f1: mi(&[U, X1], &[Y1])? - mi(&[U], &[S1, S2])?,
        g1: cmi(&[X1], &[Y1], &[U])?,
        f2: mi(&[V, X2], &[Y2])? - mi(&[V], &[U, S1, S2])?,
        g2: cmi(&[X2], &[Y2], &[V])?,
    })
}

/// Rate pair of the sequential (Marton-ordered) region for one strategy,
/// clamped at zero.
pub fn sequential_rates(cfg: &ChannelConfig, strat: &HelperStrategy) -> Result<RatePair> {
    Ok(sequential_terms(cfg, strat)?.rates())
}

/// Individual and sum-rate bounds of the discrete memoryless inner bound,
/// evaluated for the Gaussian construction (unclamped).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointBounds {
    pub b1: f64,
    pub b2: f64,
    pub bsum: f64,
}

pub fn joint_bounds(cfg: &ChannelConfig, strat: &HelperStrategy) -> Result<JointBounds> {
    use Var::*;
    let cov = build_joint_covariance(cfg, strat)?;
    let mi = |a: &[Var], b: &[Var]| gaussian_mi(&cov, set(a), set(b));
    let cmi = |a: &[Var], b: &[Var], c: &[Var]| gaussian_cmi(&cov, set(a), set(b), set(c));
    let gp1 = mi(&[U, X1], &[Y1])? - mi(&[U], &[S1, S2])?;
    let gp2 = mi(&[V, X2], &[Y2])? - mi(&[V], &[S1, S2])?;
    let g1 = cmi(&[X1], &[Y1], &[U])?;
    let g2 = cmi(&[X2], &[Y2], &[V])?;
    let coupling = cmi(&[V], &[U], &[S1, S2])?;
    Ok(JointBounds {
        b1: gp1.min(g1),
        b2: gp2.min(g2),
        bsum: (gp1 + gp2 - coupling).min(g1 + g2),
    })
}

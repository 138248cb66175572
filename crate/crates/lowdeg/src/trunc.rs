//! The truncation calculus: the subgraph weight Phi, bad/admissible
//! predicates, the good event on the parent graph, the minimizing bad part
//! D(S), the repaired family A(S) with its Lambda coefficients, the
//! truncated basis psi', the admissible projection of a polynomial, and the
//! admissible class census.
//!
//! Everything is computed in natural-log space: log Phi(H) = a|V(H)| +
//! b|E(H)| with a = (1+4/d) ln n + 20 ln d and b = ln q + 6 ln d; H is bad
//! when log Phi(H) < -ln ln n.

use std::collections::HashMap;

use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::exact::{QCtx, QExt};
use crate::graph::LabeledGraph;
use crate::iso;
use crate::model::ModelParams;
use crate::poly::{psi_eval, psi_eval_exact, PolyCoeffs};

#[derive(Debug, Error, PartialEq)]
pub enum TruncError {
    #[error("n={0} too small: the bad threshold -ln ln n needs n >= 3")]
    SmallN(u32),
    #[error("q={0} outside (0,1)")]
    BadQ(f64),
    #[error("d={0} must be >= 1")]
    BadD(u32),
    #[error("{what} supports at most {limit}, got {got}")]
    ScanBudget {
        what: &'static str,
        limit: usize,
        got: usize,
    },
    #[error("subset search exceeded {budget} nodes (subset size {k})")]
    SearchBudget { budget: u64, k: usize },
    #[error("k_cap={k_cap} must lie in 1..=min(d^2, n)={max}")]
    BadCap { k_cap: u32, max: u32 },
    #[error("H is not in the admissible family of S")]
    NotInFamily,
    #[error(transparent)]
    Iso(#[from] iso::IsoError),
}

/// Log-space weights of the subgraph functional. Every subgraph H scores
/// log Phi(H) = a|V(H)| + b|E(H)| and is bad below `threshold` = -ln ln n.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhiParams {
    n: u32,
    d: u32,
    q: f64,
    a: f64,
    b: f64,
    threshold: f64,
}

impl PhiParams {
    pub fn new(n: u32, q: f64, d: u32) -> Result<PhiParams, TruncError> {
        if n < 3 {
            return Err(TruncError::SmallN(n));
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(TruncError::BadQ(q));
        }
        if d < 1 {
            return Err(TruncError::BadD(d));
        }
        let (nf, df) = (n as f64, d as f64);
        let a = (1.0 + 4.0 / df) * nf.ln() + 20.0 * df.ln();
        let b = q.ln() + 6.0 * df.ln();
        Ok(PhiParams {
            n,
            d,
            q,
            a,
            b,
            threshold: -nf.ln().ln(),
        })
    }

    /// Injected (a, b), for exercising the calculus at parameters the
    /// closed forms cannot reach; q is back-solved from b = ln q + 6 ln d
    /// and may fall outside (0,1).
    pub fn with_log_weights(n: u32, d: u32, a: f64, b: f64) -> Result<PhiParams, TruncError> {
        if n < 3 {
            return Err(TruncError::SmallN(n));
        }
        if d < 1 {
            return Err(TruncError::BadD(d));
        }
        let q = (b - 6.0 * (d as f64).ln()).exp();
        Ok(PhiParams {
            n,
            d,
            q,
            a,
            b,
            threshold: -(n as f64).ln().ln(),
        })
    }

    pub fn from_model(params: &ModelParams) -> Result<PhiParams, TruncError> {
        PhiParams::new(params.n(), params.q(), params.d())
    }

    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn d(&self) -> u32 {
        self.d
    }
    pub fn q(&self) -> f64 {
        self.q
    }
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn threshold(&self) -> f64 {
        self.threshold
    }
}

pub fn log_phi(s: &LabeledGraph, pp: &PhiParams) -> f64 {
    pp.a * s.vertex_count() as f64 + pp.b * s.edge_count() as f64
}

pub fn is_bad(s: &LabeledGraph, pp: &PhiParams) -> bool {
    log_phi(s, pp) < pp.threshold
}

const VERTEX_SCAN_LIMIT: usize = 20;
const EDGE_SCAN_LIMIT: usize = 22;

/// True when no subgraph of S (edge subset, isolated vertices dropped) is
/// bad. Scan strategy: trivially true when a, b >= 0; vertex-subset scan
/// when b < 0 (edge-maximal subgraphs minimize Phi on a fixed support);
/// full edge-subset scan when a < 0.
pub fn is_admissible(s: &LabeledGraph, pp: &PhiParams) -> Result<bool, TruncError> {
    if pp.a >= 0.0 && pp.b >= 0.0 {
        return Ok(true);
    }
    if pp.a < 0.0 {
        return edge_subset_scan(s, pp).map(|min| min >= pp.threshold);
    }
    let verts: Vec<u32> = s.vertex_set().into_iter().collect();
    let nv = verts.len();
    if nv > VERTEX_SCAN_LIMIT {
        return Err(TruncError::ScanBudget {
            what: "vertex-subset admissibility scan",
            limit: VERTEX_SCAN_LIMIT,
            got: nv,
        });
    }
    let mut adj = vec![0u32; nv];
    for &(u, v) in s.edges() {
        let (iu, iv) = (
            verts.binary_search(&u).unwrap(),
            verts.binary_search(&v).unwrap(),
        );
        adj[iu] |= 1 << iv;
        adj[iv] |= 1 << iu;
    }
    for mask in 1u32..(1u32 << nv) {
        let mut edges = 0u32;
        let mut covered = 0u32;
        for i in 0..nv {
            if mask >> i & 1 == 0 {
                continue;
            }
            let hits = adj[i] & mask;
            if hits != 0 {
                covered += 1;
            }
            edges += hits.count_ones();
        }
        let score = pp.a * covered as f64 + pp.b * (edges / 2) as f64;
        if score < pp.threshold {
            return Ok(false);
        }
    }
    Ok(true)
}

// Minimum of log_phi over all nonempty edge subsets (isolated dropped).
fn edge_subset_scan(s: &LabeledGraph, pp: &PhiParams) -> Result<f64, TruncError> {
    let ne = s.edge_count();
    if ne > EDGE_SCAN_LIMIT {
        return Err(TruncError::ScanBudget {
            what: "edge-subset scan",
            limit: EDGE_SCAN_LIMIT,
            got: ne,
        });
    }
    let verts: Vec<u32> = s.vertex_set().into_iter().collect();
    let vmask: Vec<u64> = s
        .edges()
        .iter()
        .map(|&(u, v)| {
            (1u64 << verts.binary_search(&u).unwrap()) | (1u64 << verts.binary_search(&v).unwrap())
        })
        .collect();
    let mut best = f64::INFINITY;
    for mask in 1u64..(1u64 << ne) {
        let mut cover = 0u64;
        for (i, vm) in vmask.iter().enumerate() {
            if mask >> i & 1 == 1 {
                cover |= vm;
            }
        }
        let score = pp.a * cover.count_ones() as f64 + pp.b * mask.count_ones() as f64;
        best = best.min(score);
    }
    Ok(best)
}

/// e(k): the edge count at which a k-vertex subgraph turns bad.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeThreshold {
    Finite(u64),
    /// No edge count suffices (b >= 0 and a k >= threshold).
    Never,
}

impl EdgeThreshold {
    pub fn finite(self) -> Option<u64> {
        match self {
            EdgeThreshold::Finite(v) => Some(v),
            EdgeThreshold::Never => None,
        }
    }
}

/// Smallest k' >= 0 with a k + b k' < threshold.
pub fn e_threshold(k: u32, pp: &PhiParams) -> EdgeThreshold {
    let base = pp.a * k as f64;
    if base < pp.threshold {
        return EdgeThreshold::Finite(0);
    }
    if pp.b >= 0.0 {
        return EdgeThreshold::Never;
    }
    // strict inequality: k' > (a k - tau)/(-b); integer boundary goes up
    let t = (base - pp.threshold) / (-pp.b);
    let k_prime = t.floor() as u64 + 1;
    EdgeThreshold::Finite(k_prime)
}

const EVENT_G_CORE_LIMIT: usize = 64;
const EVENT_G_NODE_BUDGET: u64 = 20_000_000;

/// True iff no vertex subset W of G with |W| <= k_cap induces a bad
/// subgraph, i.e. |E(G[W])| < e(|W|) throughout. Exact: peel vertices of
/// degree < a/(-b) (their removal only improves a witness), then
/// branch-and-bound on the remaining core. Requires a >= 0.
pub fn check_event_g(g: &LabeledGraph, pp: &PhiParams, k_cap: u32) -> Result<bool, TruncError> {
    assert!(pp.a >= 0.0, "event check requires a >= 0");
    let max_cap = (pp.d as u64 * pp.d as u64).min(pp.n as u64) as u32;
    if k_cap < 1 || k_cap > max_cap {
        return Err(TruncError::BadCap { k_cap, max: max_cap });
    }
    if pp.b >= 0.0 {
        return Ok(true);
    }
    // peel: deg(v) < a/(-b) means a + b deg(v) > 0, so dropping v from any
    // witness W lowers log_phi (its W-degree is at most its G-degree);
    // some minimal witness therefore avoids every peeled vertex
    let mut verts: Vec<u32> = g.vertex_set().into_iter().collect();
    let mut edges: Vec<(u32, u32)> = g.edges().to_vec();
    loop {
        let mut deg: HashMap<u32, u32> = verts.iter().map(|&v| (v, 0)).collect();
        for &(u, v) in &edges {
            *deg.get_mut(&u).unwrap() += 1;
            *deg.get_mut(&v).unwrap() += 1;
        }
        let keep: Vec<u32> = verts
            .iter()
            .copied()
            .filter(|v| pp.a + pp.b * deg[v] as f64 <= 0.0)
            .collect();
        if keep.len() == verts.len() {
            break;
        }
        verts = keep;
        let kept: std::collections::HashSet<u32> = verts.iter().copied().collect();
        edges.retain(|(u, v)| kept.contains(u) && kept.contains(v));
    }
    if verts.is_empty() {
        return Ok(true);
    }
    let m = verts.len();
    if m > EVENT_G_CORE_LIMIT {
        return Err(TruncError::ScanBudget {
            what: "event core",
            limit: EVENT_G_CORE_LIMIT,
            got: m,
        });
    }
    // maximize f(W) = (-b) e(W) - a|W| over subsets of the core with
    // |W| <= k_cap; a bad witness exists iff max f > ln ln n
    let mut adj = vec![0u64; m];
    for &(u, v) in &edges {
        let (iu, iv) = (
            verts.binary_search(&u).unwrap(),
            verts.binary_search(&v).unwrap(),
        );
        adj[iu] |= 1 << iv;
        adj[iv] |= 1 << iu;
    }
    // order by degree descending so the optimistic bound tightens early
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(adj[i].count_ones()));
    let gain_cap: Vec<f64> = order
        .iter()
        .map(|&i| (-pp.b) * adj[i].count_ones() as f64 - pp.a)
        .collect();
    // suffix sums of positive optimistic gains
    let mut suffix: Vec<f64> = vec![0.0; m + 1];
    for i in (0..m).rev() {
        suffix[i] = suffix[i + 1] + gain_cap[i].max(0.0);
    }
    struct Bb<'x> {
        adj: &'x [u64],
        order: &'x [usize],
        gain_cap: &'x [f64],
        suffix: &'x [f64],
        b: f64,
        a: f64,
        target: f64,
        k_cap: u32,
        nodes: u64,
        found: bool,
        exhausted: bool,
    }
    impl Bb<'_> {
        fn dfs(&mut self, idx: usize, mask: u64, size: u32, f_cur: f64) {
            if self.found || self.exhausted {
                return;
            }
            self.nodes += 1;
            if self.nodes > EVENT_G_NODE_BUDGET {
                self.exhausted = true;
                return;
            }
            if f_cur > self.target {
                self.found = true;
                return;
            }
            if idx == self.order.len() || size == self.k_cap {
                return;
            }
            if f_cur + self.suffix[idx] <= self.target {
                return;
            }
            let v = self.order[idx];
            // include v
            let gain = (-self.b) * (self.adj[v] & mask).count_ones() as f64 - self.a;
            self.dfs(idx + 1, mask | 1 << v, size + 1, f_cur + gain);
            // the optimistic gain never exceeds gain_cap, so skipping is
            // also bounded by the suffix sum
            let _ = self.gain_cap;
            self.dfs(idx + 1, mask, size, f_cur);
        }
    }
    let mut bb = Bb {
        adj: &adj,
        order: &order,
        gain_cap: &gain_cap,
        suffix: &suffix,
        b: pp.b,
        a: pp.a,
        target: -pp.threshold,
        k_cap,
        nodes: 0,
        found: false,
        exhausted: false,
    };
    bb.dfs(0, 0, 0, 0.0);
    if bb.exhausted {
        return Err(TruncError::SearchBudget {
            budget: EVENT_G_NODE_BUDGET,
            k: k_cap as usize,
        });
    }
    Ok(!bb.found)
}

/// Literal-definition oracle for the event: scans every edge subset of G
/// with at most k_cap vertices. Exponential; test-scale inputs only.
pub fn event_g_exhaustive(g: &LabeledGraph, pp: &PhiParams, k_cap: u32) -> Result<bool, TruncError> {
    let ne = g.edge_count();
    if ne > EDGE_SCAN_LIMIT {
        return Err(TruncError::ScanBudget {
            what: "edge-subset scan",
            limit: EDGE_SCAN_LIMIT,
            got: ne,
        });
    }
    let verts: Vec<u32> = g.vertex_set().into_iter().collect();
    let vmask: Vec<u64> = g
        .edges()
        .iter()
        .map(|&(u, v)| {
            (1u64 << verts.binary_search(&u).unwrap()) | (1u64 << verts.binary_search(&v).unwrap())
        })
        .collect();
    for mask in 1u64..(1u64 << ne) {
        let mut cover = 0u64;
        for (i, vm) in vmask.iter().enumerate() {
            if mask >> i & 1 == 1 {
                cover |= vm;
            }
        }
        let v = cover.count_ones();
        if v > k_cap {
            continue;
        }
        if pp.a * v as f64 + pp.b * (mask.count_ones() as f64) < pp.threshold {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Union bound on the complement of the good event:
/// sum_{k=1}^{min(d^2,n)} C(n,k) P[Bin(C(k,2), p_edge) >= e(k)].
pub fn g_complement_union_bound(pp: &PhiParams, p_edge: f64) -> f64 {
    assert!(p_edge > 0.0 && p_edge < 1.0, "p_edge must lie in (0,1)");
    let k_max = (pp.d as u64 * pp.d as u64).min(pp.n as u64);
    let mut total = 0.0;
    for k in 1..=k_max {
        let m = k * (k - 1) / 2;
        let lo = match e_threshold(k as u32, pp) {
            EdgeThreshold::Never => continue,
            EdgeThreshold::Finite(e) => e,
        };
        if lo > m {
            continue;
        }
        let log_tail = log_binomial_tail_ge(m, lo, p_edge);
        let log_choose = ln_choose(pp.n as u64, k);
        total += (log_choose + log_tail).exp();
    }
    total
}

fn ln_choose(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

// log P[Bin(m, p) >= lo], exact summation in log space over the shorter
// tail side.
fn log_binomial_tail_ge(m: u64, lo: u64, p: f64) -> f64 {
    if lo == 0 {
        return 0.0;
    }
    if lo > m {
        return f64::NEG_INFINITY;
    }
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    let pmf = |j: u64| ln_choose(m, j) + j as f64 * lp + (m - j) as f64 * lq;
    let logsumexp = |terms: &[f64]| {
        let mx = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if mx == f64::NEG_INFINITY {
            return mx;
        }
        mx + terms.iter().map(|t| (t - mx).exp()).sum::<f64>().ln()
    };
    if m - lo + 1 <= lo {
        let terms: Vec<f64> = (lo..=m).map(pmf).collect();
        logsumexp(&terms)
    } else {
        // complement side is shorter
        let terms: Vec<f64> = (0..lo).map(pmf).collect();
        let log_cdf = logsumexp(&terms);
        if log_cdf >= 0.0 {
            f64::NEG_INFINITY
        } else {
            (-log_cdf.exp()).ln_1p()
        }
    }
}

/// D(S): empty when S is admissible, otherwise the log_phi-minimizing edge
/// subset; ties broken toward more edges, then lexicographically smaller
/// edge list.
pub fn dsub(s: &LabeledGraph, pp: &PhiParams) -> Result<LabeledGraph, TruncError> {
    if is_admissible(s, pp)? {
        return Ok(LabeledGraph::empty());
    }
    let ne = s.edge_count();
    if ne > EDGE_SCAN_LIMIT {
        return Err(TruncError::ScanBudget {
            what: "minimizer edge scan",
            limit: EDGE_SCAN_LIMIT,
            got: ne,
        });
    }
    let verts: Vec<u32> = s.vertex_set().into_iter().collect();
    let vmask: Vec<u64> = s
        .edges()
        .iter()
        .map(|&(u, v)| {
            (1u64 << verts.binary_search(&u).unwrap()) | (1u64 << verts.binary_search(&v).unwrap())
        })
        .collect();
    let mut best: Option<(f64, u32, u64)> = None; // (score, edges, mask)
    for mask in 1u64..(1u64 << ne) {
        let mut cover = 0u64;
        for (i, vm) in vmask.iter().enumerate() {
            if mask >> i & 1 == 1 {
                cover |= vm;
            }
        }
        let e = mask.count_ones();
        let score = pp.a * cover.count_ones() as f64 + pp.b * e as f64;
        let better = match best {
            None => true,
            Some((bs, be, bm)) => {
                score < bs
                    || (score == bs
                        && (e > be || (e == be && mask_edges(s, mask) < mask_edges(s, bm))))
            }
        };
        if better {
            best = Some((score, e, mask));
        }
    }
    let (_, _, mask) = best.expect("nonempty scan");
    Ok(LabeledGraph::from_normalized(mask_edges(s, mask)))
}

fn mask_edges(s: &LabeledGraph, mask: u64) -> Vec<(u32, u32)> {
    s.edges()
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, &e)| e)
        .collect()
}

const A_SET_EDGE_LIMIT: usize = 20;

/// The repaired family A(S) = { (S \ D(S)) union K : K subset of E(D(S)),
/// K admissible }, sorted. For admissible S this is {S}.
pub fn a_set(s: &LabeledGraph, pp: &PhiParams) -> Result<Vec<LabeledGraph>, TruncError> {
    let d_part = dsub(s, pp)?;
    let rest = s.difference(&d_part);
    let ne = d_part.edge_count();
    if ne > A_SET_EDGE_LIMIT {
        return Err(TruncError::ScanBudget {
            what: "repaired-family enumeration",
            limit: A_SET_EDGE_LIMIT,
            got: ne,
        });
    }
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << ne) {
        let k_part = LabeledGraph::from_normalized(mask_edges(&d_part, mask));
        if is_admissible(&k_part, pp)? {
            out.push(rest.union(&k_part));
        }
    }
    out.sort();
    Ok(out)
}

/// Lambda_S(H) = sqrt(q/(1-q))^{|E(S)|-|E(H)|} sum over J in A(S) with
/// H subset J of (-1)^{|E(S)|-|E(J)|}. Errors when H is not in A(S).
pub fn lambda_coeff(s: &LabeledGraph, h: &LabeledGraph, pp: &PhiParams, q: f64) -> Result<f64, TruncError> {
    let family = a_set(s, pp)?;
    if !family.contains(h) {
        return Err(TruncError::NotInFamily);
    }
    let es = s.edge_count() as i32;
    let mut signed: i64 = 0;
    for j in &family {
        if h.is_subgraph_of(j) {
            signed += if (es - j.edge_count() as i32) % 2 == 0 {
                1
            } else {
                -1
            };
        }
    }
    let gap = es - h.edge_count() as i32;
    Ok((q / (1.0 - q)).sqrt().powi(gap) * signed as f64)
}

/// Exact-arithmetic Lambda: integer signed sum times sqrt(q/(1-q))^gap.
pub fn lambda_coeff_exact(
    s: &LabeledGraph,
    h: &LabeledGraph,
    pp: &PhiParams,
    ctx: &QCtx,
) -> Result<QExt, TruncError> {
    let family = a_set(s, pp)?;
    if !family.contains(h) {
        return Err(TruncError::NotInFamily);
    }
    let es = s.edge_count() as i32;
    let mut signed: i64 = 0;
    for j in &family {
        if h.is_subgraph_of(j) {
            signed += if (es - j.edge_count() as i32) % 2 == 0 {
                1
            } else {
                -1
            };
        }
    }
    let gap = (es - h.edge_count() as i32) as u32;
    let pre = ctx.pow(&ctx.sqrt_q_over_1mq(), gap);
    Ok(pre.scale(&num::rational::BigRational::from(num::BigInt::from(signed))))
}

/// psi-hat: the monomial expansion of psi_S with inadmissible subsets
/// dropped: sum over admissible K subset of E(S) with K subset of X of
/// (-sqrt(q/(1-q)))^{|E(S)|-|E(K)|} (q(1-q))^{-|E(K)|/2}.
pub fn psi_hat_eval(s: &LabeledGraph, x: &LabeledGraph, pp: &PhiParams, q: f64) -> Result<f64, TruncError> {
    let ne = s.edge_count();
    if ne > A_SET_EDGE_LIMIT {
        return Err(TruncError::ScanBudget {
            what: "psi-hat expansion",
            limit: A_SET_EDGE_LIMIT,
            got: ne,
        });
    }
    let rq = (q / (1.0 - q)).sqrt();
    let rnorm = (q * (1.0 - q)).sqrt();
    let mut acc = 0.0;
    for mask in 0u64..(1u64 << ne) {
        let k_edges = mask_edges(s, mask);
        if !k_edges.iter().all(|&(u, v)| x.contains_edge(u, v)) {
            continue;
        }
        let k_part = LabeledGraph::from_normalized(k_edges);
        if !is_admissible(&k_part, pp)? {
            continue;
        }
        let gap = (ne - k_part.edge_count()) as i32;
        acc += (-rq).powi(gap) * rnorm.powi(-(k_part.edge_count() as i32));
    }
    Ok(acc)
}

fn psi_hat_eval_exact(
    s: &LabeledGraph,
    x: &LabeledGraph,
    pp: &PhiParams,
    ctx: &QCtx,
) -> Result<QExt, TruncError> {
    let ne = s.edge_count();
    if ne > A_SET_EDGE_LIMIT {
        return Err(TruncError::ScanBudget {
            what: "psi-hat expansion",
            limit: A_SET_EDGE_LIMIT,
            got: ne,
        });
    }
    let neg_rq = ctx.sqrt_q_over_1mq().neg();
    let r_inv = QExt {
        a: num::rational::BigRational::from(num::BigInt::from(0)),
        b: ctx.rr().recip(),
    };
    let mut acc = QExt::zero();
    for mask in 0u64..(1u64 << ne) {
        let k_edges = mask_edges(s, mask);
        if !k_edges.iter().all(|&(u, v)| x.contains_edge(u, v)) {
            continue;
        }
        let k_part = LabeledGraph::from_normalized(k_edges);
        if !is_admissible(&k_part, pp)? {
            continue;
        }
        let gap = (ne - k_part.edge_count()) as u32;
        let term = ctx.mul(
            &ctx.pow(&neg_rq, gap),
            &ctx.pow(&r_inv, k_part.edge_count() as u32),
        );
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// psi'_S = psi_{S \ D(S)} psi-hat_{D(S)}: agrees with psi_S on inputs
/// whose restriction to D(S) stays admissible, and with the Lambda
/// expansion everywhere.
pub fn psi_prime_eval(s: &LabeledGraph, x: &LabeledGraph, pp: &PhiParams, q: f64) -> Result<f64, TruncError> {
    let d_part = dsub(s, pp)?;
    let rest = s.difference(&d_part);
    Ok(psi_eval(&rest, x, q) * psi_hat_eval(&d_part, x, pp, q)?)
}

/// Exact-arithmetic psi'.
pub fn psi_prime_eval_exact(
    s: &LabeledGraph,
    x: &LabeledGraph,
    pp: &PhiParams,
    ctx: &QCtx,
) -> Result<QExt, TruncError> {
    let d_part = dsub(s, pp)?;
    let rest = s.difference(&d_part);
    Ok(ctx.mul(
        &psi_eval_exact(&rest, x, ctx),
        &psi_hat_eval_exact(&d_part, x, pp, ctx)?,
    ))
}

/// Replaces every phi_{S1,S2} in f by phi'_{S1,S2} expanded in the
/// admissible basis: phi' = sum_{H1, H2} Lambda_{S1}(H1) Lambda_{S2}(H2)
/// phi_{H1,H2}. Output is supported on admissible pairs, has null norm at
/// most 8x the input's, and evaluates identically to f on samples where
/// the good event holds.
pub fn project_admissible(f: &PolyCoeffs, pp: &PhiParams) -> Result<PolyCoeffs, TruncError> {
    let q = pp.q;
    let mut expansions: HashMap<LabeledGraph, Vec<(LabeledGraph, f64)>> = HashMap::new();
    let mut expand = |s: &LabeledGraph| -> Result<Vec<(LabeledGraph, f64)>, TruncError> {
        if let Some(v) = expansions.get(s) {
            return Ok(v.clone());
        }
        let mut terms = Vec::new();
        for h in a_set(s, pp)? {
            let lam = lambda_coeff(s, &h, pp, q)?;
            if lam != 0.0 {
                terms.push((h, lam));
            }
        }
        expansions.insert(s.clone(), terms.clone());
        Ok(terms)
    };
    let mut out = PolyCoeffs::new(f.degree());
    for (s1, s2, c) in f.iter() {
        for (h1, l1) in expand(s1)? {
            for (h2, l2) in expand(s2)? {
                out.add_term(&h1, &h2, c * l1 * l2);
            }
        }
    }
    Ok(out)
}

/// Number of admissible isomorphism classes with exactly N edges.
pub fn census_admissible(n_edges: u32, pp: &PhiParams) -> Result<u64, TruncError> {
    let classes = iso::enumerate_classes(n_edges as usize, None)?;
    let mut count = 0u64;
    for c in &classes[&n_edges] {
        if is_admissible(c.canon(), pp)? {
            count += 1;
        }
    }
    Ok(count)
}

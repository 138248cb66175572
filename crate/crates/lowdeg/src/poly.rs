//! The centered polynomial basis phi_{S1,S2}(A,B) = psi_{S1}(A) psi_{S2}(B),
//! its first moment under the correlated model, and the signal-to-noise
//! ratio of the optimal degree-d statistic.
//!
//! psi_S(X) = prod_{e in E(S)} (X_e - q)/sqrt(q(1-q)) is orthonormal under
//! the independent null, so E_Q-geometry reduces to coefficient algebra;
//! the planted first moment is rho^{|E|} Aut/(n)_v on diagonal class pairs
//! and zero elsewhere.

use std::collections::{BTreeMap, HashMap, HashSet};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::exact::{QCtx, QExt};
use crate::graph::LabeledGraph;
use crate::iso::{self, IsoClass};
use crate::model::ModelParams;

#[derive(Debug, Error, PartialEq)]
pub enum PolyError {
    #[error("{what} supports at most {limit}, got {got}")]
    CeilingExceeded {
        what: &'static str,
        limit: usize,
        got: usize,
    },
    #[error(transparent)]
    Iso(#[from] iso::IsoError),
    #[error(transparent)]
    Trunc(#[from] crate::trunc::TruncError),
}

// ---------------------------------------------------------------------------
// basis evaluation

/// psi_S(X) = prod over E(S) of (X_e - q)/sqrt(q(1-q)); empty product is 1.
pub fn psi_eval(s: &LabeledGraph, x: &LabeledGraph, q: f64) -> f64 {
    debug_assert!(q > 0.0 && q < 1.0, "q must lie in (0,1)");
    let norm = (q * (1.0 - q)).sqrt();
    let mut out = 1.0;
    for &(u, v) in s.edges() {
        let xe = x.contains_edge(u, v) as u8 as f64;
        out *= (xe - q) / norm;
    }
    out
}

pub fn phi_eval(s1: &LabeledGraph, s2: &LabeledGraph, a: &LabeledGraph, b: &LabeledGraph, q: f64) -> f64 {
    psi_eval(s1, a, q) * psi_eval(s2, b, q)
}

/// psi_S(X) in the quadratic extension, for exact identity checks.
pub fn psi_eval_exact(s: &LabeledGraph, x: &LabeledGraph, ctx: &QCtx) -> QExt {
    let mut out = QExt::one();
    for &(u, v) in s.edges() {
        out = ctx.mul(&out, &ctx.edge_factor(x.contains_edge(u, v)));
    }
    out
}

// ---------------------------------------------------------------------------
// first moments

/// A first moment represented exactly: coeff * rho^rho_pow with rational
/// coeff. Zero is normalized to (coeff 0, power 0).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactExpectation {
    pub rho_pow: u32,
    pub coeff: BigRational,
}

impl ExactExpectation {
    fn zero() -> Self {
        ExactExpectation {
            rho_pow: 0,
            coeff: BigRational::zero(),
        }
    }

    pub fn value(&self, rho: f64) -> f64 {
        self.coeff.to_f64().expect("coefficient in f64 range") * rho.powi(self.rho_pow as i32)
    }
}

fn falling_factorial(n: u64, v: u64) -> BigInt {
    let mut out = BigInt::one();
    for i in 0..v {
        out *= BigInt::from(n - i);
    }
    out
}

/// E_P[phi_{S1,S2}] in closed form: rho^{|E(S1)|} Aut(S1)/(n)_{|V(S1)|} when
/// S1 and S2 are isomorphic, else 0.
pub fn expect_phi_closed(s1: &LabeledGraph, s2: &LabeledGraph, params: &ModelParams) -> f64 {
    expect_phi_closed_exact(s1, s2, params.n()).value(params.rho())
}

/// Exact-rational version of [`expect_phi_closed`].
pub fn expect_phi_closed_exact(s1: &LabeledGraph, s2: &LabeledGraph, n: u32) -> ExactExpectation {
    let c1 = iso::canonical_form(s1);
    assert!(c1.v_count() <= n, "S1 does not fit in [n]");
    if *c1.canon() != iso::canonical_labeling(s2) {
        return ExactExpectation::zero();
    }
    ExactExpectation {
        rho_pow: c1.e_count(),
        coeff: BigRational::new(
            BigInt::from(c1.aut()),
            falling_factorial(n as u64, c1.v_count() as u64),
        ),
    }
}

/// How [`expect_phi_oracle`] averages over the hidden permutation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleMode {
    /// Iterate all n! permutations (n <= 9).
    FullPermutations,
    /// Count edge-onto bijections V(S1) -> V(S2) and multiply by (n-v)!/n!.
    Injections,
}

/// First moment by direct averaging over the hidden permutation:
/// E_P[phi_{S1,S2}] = rho^{|E(S1)|} #{pi : pi(S1) = S2}/n!. Shares no code
/// with the closed form.
pub fn expect_phi_oracle(
    s1: &LabeledGraph,
    s2: &LabeledGraph,
    n: u32,
    mode: OracleMode,
) -> Result<ExactExpectation, PolyError> {
    let e1 = s1.edge_count();
    if s2.edge_count() != e1 {
        return Ok(ExactExpectation::zero());
    }
    match mode {
        OracleMode::FullPermutations => {
            const FULL_SN_CEILING: u32 = 9;
            if n > FULL_SN_CEILING {
                return Err(PolyError::CeilingExceeded {
                    what: "full-permutation oracle n",
                    limit: FULL_SN_CEILING as usize,
                    got: n as usize,
                });
            }
            let max_label = s1
                .vertex_set()
                .iter()
                .chain(s2.vertex_set().iter())
                .max()
                .copied()
                .unwrap_or(0);
            assert!(max_label <= n, "graph labels exceed n");
            let target: Vec<(u32, u32)> = s2.edges().to_vec();
            let mut hits: u64 = 0;
            let mut total: u64 = 0;
            for_each_permutation(n as usize, &mut |image: &[u32]| {
                total += 1;
                let mut mapped: Vec<(u32, u32)> = s1
                    .edges()
                    .iter()
                    .map(|&(u, v)| {
                        let (a, b) = (image[u as usize - 1], image[v as usize - 1]);
                        (a.min(b), a.max(b))
                    })
                    .collect();
                mapped.sort_unstable();
                if mapped == target {
                    hits += 1;
                }
            });
            if hits == 0 {
                return Ok(ExactExpectation::zero());
            }
            Ok(ExactExpectation {
                rho_pow: e1 as u32,
                coeff: BigRational::new(BigInt::from(hits), BigInt::from(total)),
            })
        }
        OracleMode::Injections => {
            // #{pi : pi(S1)=S2} = (#edge-onto bijections V(S1)->V(S2)) (n-v)!
            let v = s1.vertex_count();
            if s2.vertex_count() != v {
                return Ok(ExactExpectation::zero());
            }
            let isos = edge_onto_bijections(s1, s2);
            if isos == 0 {
                return Ok(ExactExpectation::zero());
            }
            Ok(ExactExpectation {
                rho_pow: e1 as u32,
                coeff: BigRational::new(
                    BigInt::from(isos),
                    falling_factorial(n as u64, v as u64),
                ),
            })
        }
    }
}

fn for_each_permutation(n: usize, f: &mut impl FnMut(&[u32])) {
    fn heap(k: usize, arr: &mut [u32], f: &mut impl FnMut(&[u32])) {
        if k <= 1 {
            f(arr);
            return;
        }
        for i in 0..k {
            heap(k - 1, arr, f);
            if k % 2 == 0 {
                arr.swap(i, k - 1);
            } else {
                arr.swap(0, k - 1);
            }
        }
    }
    let mut arr: Vec<u32> = (1..=n as u32).collect();
    heap(n, &mut arr, f);
}

// Count bijections V(S1) -> V(S2) that map E(S1) onto E(S2).
fn edge_onto_bijections(s1: &LabeledGraph, s2: &LabeledGraph) -> u64 {
    let v1: Vec<u32> = s1.vertex_set().into_iter().collect();
    let v2: Vec<u32> = s2.vertex_set().into_iter().collect();
    if v1.len() != v2.len() {
        return 0;
    }
    if v1.is_empty() {
        return 1;
    }
    fn dfs(s1: &LabeledGraph, s2: &LabeledGraph, v1: &[u32], v2: &[u32], image: &mut Vec<u32>) -> u64 {
        let i = image.len();
        if i == v1.len() {
            return 1;
        }
        let mut total = 0;
        'cand: for &y in v2 {
            if image.contains(&y) {
                continue;
            }
            for (j, &img) in image.iter().enumerate() {
                if s1.contains_edge(v1[i], v1[j]) != s2.contains_edge(y, img) {
                    continue 'cand;
                }
            }
            image.push(y);
            total += dfs(s1, s2, v1, v2, image);
            image.pop();
        }
        total
    }
    dfs(s1, s2, &v1, &v2, &mut Vec::with_capacity(v1.len()))
}

// ---------------------------------------------------------------------------
// signal-to-noise ratio

/// Signal-to-noise report: snr^2 decomposes as a sum of per-class
/// contributions rho^{2|E|}, the empty class contributing 1.
#[derive(Clone, Debug)]
pub struct SnrReport {
    pub snr: f64,
    pub snr_squared: f64,
    /// snr^2 minus the empty-class constant, the part a centered statistic
    /// can actually use.
    pub snr_squared_centered: f64,
    pub per_class: BTreeMap<IsoClass, f64>,
    pub n: u32,
    pub q: f64,
    pub rho: f64,
    pub d: u32,
    /// Largest class edge count summed over.
    pub edge_cap: u32,
    pub admissible_only: bool,
}

fn snr_from_classes(
    classes: &BTreeMap<u32, Vec<IsoClass>>,
    params: &ModelParams,
    d: u32,
    edge_cap: u32,
    admissible_only: bool,
) -> SnrReport {
    let rho = params.rho();
    let mut per_class = BTreeMap::new();
    let mut snr_squared = 0.0;
    for (&k, list) in classes {
        let contribution = rho.powi(2 * k as i32);
        for c in list {
            per_class.insert(c.clone(), contribution);
            snr_squared += contribution;
        }
    }
    SnrReport {
        snr: snr_squared.sqrt(),
        snr_squared,
        snr_squared_centered: snr_squared - 1.0,
        per_class,
        n: params.n(),
        q: params.q(),
        rho,
        d,
        edge_cap,
        admissible_only,
    }
}

/// snr^2 of the optimal degree-d statistic: sum over isomorphism classes
/// with at most floor(d/2) edges of rho^{2|E|}. Total degree d splits as
/// |E(S1)|+|E(S2)| <= d with S1 and S2 isomorphic, hence the halving.
pub fn snr_exact(params: &ModelParams, d: u32) -> Result<SnrReport, PolyError> {
    let cap = d / 2;
    let classes = iso::enumerate_classes(cap as usize, None)?;
    Ok(snr_from_classes(&classes, params, d, cap, false))
}

/// Explicit ceiling 1 + (rho d)^2 exp((rho d)^2) dominating snr_exact^2.
pub fn snr_upper_bound(rho: f64, d: u32) -> f64 {
    assert!(rho >= 0.0, "rho must be nonnegative");
    let x = (rho * d as f64).powi(2);
    1.0 + x * x.exp()
}

/// Like [`snr_exact`] but summing admissible classes with up to d edges,
/// the quantity that survives truncation.
pub fn snr_admissible(params: &ModelParams, d: u32) -> Result<SnrReport, PolyError> {
    let phi = crate::trunc::PhiParams::from_model(params)?;
    // the enumeration ceiling keeps classes at <= 18 vertices, inside the
    // admissibility scan budget, so the per-class check cannot fail
    let keep = move |c: &IsoClass| {
        crate::trunc::is_admissible(c.canon(), &phi).expect("class within scan budget")
    };
    let classes = iso::enumerate_classes(d as usize, Some(&keep))?;
    Ok(snr_from_classes(&classes, params, d, d, true))
}

// ---------------------------------------------------------------------------
// polynomials in the basis

/// Sparse coefficient map in the phi basis. Graph keys are interned;
/// entries are keyed by intern indices. The squared null norm of the
/// polynomial equals the sum of squared coefficients.
#[derive(Clone, Debug, Default)]
pub struct PolyCoeffs {
    graphs: Vec<LabeledGraph>,
    index: HashMap<LabeledGraph, u32>,
    entries: BTreeMap<(u32, u32), f64>,
    degree: u32,
}

impl PolyCoeffs {
    pub fn new(degree: u32) -> Self {
        PolyCoeffs {
            degree,
            ..Default::default()
        }
    }

    fn intern(&mut self, g: &LabeledGraph) -> u32 {
        if let Some(&i) = self.index.get(g) {
            return i;
        }
        let i = self.graphs.len() as u32;
        self.graphs.push(g.clone());
        self.index.insert(g.clone(), i);
        i
    }

    /// Adds to the (S1,S2) coefficient. Panics if the pair exceeds the
    /// degree bound.
    pub fn add_term(&mut self, s1: &LabeledGraph, s2: &LabeledGraph, c: f64) {
        assert!(
            s1.edge_count() + s2.edge_count() <= self.degree as usize,
            "term degree exceeds bound"
        );
        let key = (self.intern(s1), self.intern(s2));
        *self.entries.entry(key).or_insert(0.0) += c;
    }

    pub fn get(&self, s1: &LabeledGraph, s2: &LabeledGraph) -> f64 {
        match (self.index.get(s1), self.index.get(s2)) {
            (Some(&i), Some(&j)) => self.entries.get(&(i, j)).copied().unwrap_or(0.0),
            _ => 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn iter(&self) -> impl Iterator<Item = (&LabeledGraph, &LabeledGraph, f64)> + '_ {
        self.entries
            .iter()
            .map(|(&(i, j), &c)| (&self.graphs[i as usize], &self.graphs[j as usize], c))
    }

    /// Squared null norm = sum of squared coefficients (orthonormal basis).
    pub fn norm_squared(&self) -> f64 {
        self.entries.values().map(|c| c * c).sum()
    }

    pub fn scaled(&self, alpha: f64) -> PolyCoeffs {
        let mut out = self.clone();
        for v in out.entries.values_mut() {
            *v *= alpha;
        }
        out
    }
}

/// All labeled subgraphs of K_n isomorphic to the class.
pub fn labeled_copies(c: &IsoClass, n: u32) -> Vec<LabeledGraph> {
    if c.e_count() == 0 {
        return vec![LabeledGraph::empty()];
    }
    if c.v_count() > n {
        return Vec::new();
    }
    let verts: Vec<u32> = c.canon().vertex_set().into_iter().collect();
    let mut out: HashSet<LabeledGraph> = HashSet::new();
    let mut image: Vec<u32> = Vec::with_capacity(verts.len());
    fn dfs(
        canon: &LabeledGraph,
        verts: &[u32],
        n: u32,
        image: &mut Vec<u32>,
        out: &mut HashSet<LabeledGraph>,
    ) {
        if image.len() == verts.len() {
            let edges: Vec<(u32, u32)> = canon
                .edges()
                .iter()
                .map(|&(u, v)| {
                    let iu = image[verts.binary_search(&u).unwrap()];
                    let iv = image[verts.binary_search(&v).unwrap()];
                    (iu.min(iv), iu.max(iv))
                })
                .collect();
            let mut edges = edges;
            edges.sort_unstable();
            out.insert(LabeledGraph::from_normalized(edges));
            return;
        }
        for cand in 1..=n {
            if !image.contains(&cand) {
                image.push(cand);
                dfs(canon, verts, n, image, out);
                image.pop();
            }
        }
    }
    dfs(c.canon(), &verts, n, &mut image, &mut out);
    let mut copies: Vec<LabeledGraph> = out.into_iter().collect();
    copies.sort();
    copies
}

/// Coefficients achieving the degree-d optimum: C_{S1,S2} proportional to
/// the first moment, i.e. C = expect_phi_closed on every diagonal class
/// pair of labeled copies.
pub fn optimal_coeffs(params: &ModelParams, d: u32) -> Result<PolyCoeffs, PolyError> {
    const N_CEILING: usize = 8;
    const D_CEILING: usize = 6;
    if params.n() as usize > N_CEILING {
        return Err(PolyError::CeilingExceeded {
            what: "optimal_coeffs n",
            limit: N_CEILING,
            got: params.n() as usize,
        });
    }
    if d as usize > D_CEILING {
        return Err(PolyError::CeilingExceeded {
            what: "optimal_coeffs degree",
            limit: D_CEILING,
            got: d as usize,
        });
    }
    let classes = iso::enumerate_classes((d / 2) as usize, None)?;
    let mut coeffs = PolyCoeffs::new(d);
    for list in classes.values() {
        for c in list {
            if c.v_count() > params.n() {
                continue;
            }
            let copies = labeled_copies(c, params.n());
            let coeff = ExactExpectation {
                rho_pow: c.e_count(),
                coeff: BigRational::new(
                    BigInt::from(c.aut()),
                    falling_factorial(params.n() as u64, c.v_count() as u64),
                ),
            }
            .value(params.rho());
            for s1 in &copies {
                for s2 in &copies {
                    coeffs.add_term(s1, s2, coeff);
                }
            }
        }
    }
    Ok(coeffs)
}

/// Evaluates sum C_{S1,S2} phi_{S1,S2}(A,B). psi factors are memoized per
/// interned graph.
pub fn eval_poly(coeffs: &PolyCoeffs, a: &LabeledGraph, b: &LabeledGraph, q: f64) -> f64 {
    let psi_a: Vec<f64> = coeffs.graphs.iter().map(|g| psi_eval(g, a, q)).collect();
    let psi_b: Vec<f64> = coeffs.graphs.iter().map(|g| psi_eval(g, b, q)).collect();
    coeffs
        .entries
        .iter()
        .map(|(&(i, j), &c)| c * psi_a[i as usize] * psi_b[j as usize])
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{sample_correlated, sample_null};

    fn g(edges: &[(u32, u32)]) -> LabeledGraph {
        LabeledGraph::from_edges(edges.iter().copied()).unwrap()
    }

    #[test]
    fn psi_plug_in_values() {
        let x = g(&[(1, 2)]);
        assert_eq!(psi_eval(&LabeledGraph::empty(), &x, 0.3), 1.0);
        // present edge at q = 1/2: (1 - 1/2)/(1/2) = 1
        assert!((psi_eval(&g(&[(1, 2)]), &x, 0.5) - 1.0).abs() < 1e-15);
        // absent edge: -sqrt(q/(1-q))
        let v = psi_eval(&g(&[(1, 3)]), &x, 0.3);
        assert!((v + (0.3f64 / 0.7).sqrt()).abs() < 1e-15);
        // phi splits as a product
        let a = g(&[(1, 2), (2, 3)]);
        let b = g(&[(1, 3)]);
        let s1 = g(&[(1, 2)]);
        let s2 = g(&[(1, 3), (2, 3)]);
        let split = psi_eval(&s1, &a, 0.3) * psi_eval(&s2, &b, 0.3);
        assert!((phi_eval(&s1, &s2, &a, &b, 0.3) - split).abs() < 1e-15);
        assert_eq!(
            phi_eval(&LabeledGraph::empty(), &LabeledGraph::empty(), &a, &b, 0.3),
            1.0
        );
    }

    #[test]
    fn exact_psi_matches_float() {
        let ctx = QCtx::from_ratio(3, 10);
        let a = g(&[(1, 2), (2, 3), (1, 4)]);
        for s in [g(&[(1, 2)]), g(&[(1, 3), (2, 3)]), g(&[(1, 2), (3, 4)])] {
            let exact = ctx.to_f64(&psi_eval_exact(&s, &a, &ctx));
            assert!((exact - psi_eval(&s, &a, 0.3)).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_known_values() {
        let m = ModelParams::new(4, 0.3, 0.5, 4).unwrap();
        let e = expect_phi_closed(&g(&[(1, 2)]), &g(&[(3, 4)]), &m);
        assert!((e - 1.0 / 12.0).abs() < 1e-15);
        let m5 = ModelParams::new(5, 0.3, 0.2, 4).unwrap();
        let tri = g(&[(1, 2), (2, 3), (1, 3)]);
        assert!((expect_phi_closed(&tri, &tri, &m5) - 8e-4).abs() < 1e-15);
        // different classes: exactly zero
        assert_eq!(expect_phi_closed(&g(&[(1, 2), (2, 3)]), &g(&[(1, 2), (3, 4)]), &m5), 0.0);
        // 2K2 diagonal: rho^2 * 8/(5*4*3*2)
        let m2 = canonical(&g(&[(1, 2), (3, 4)]));
        let e = expect_phi_closed(m2.canon(), &g(&[(1, 3), (2, 5)]), &m5);
        assert!((e - 0.2f64.powi(2) * 8.0 / 120.0).abs() < 1e-15);
    }

    fn canonical(s: &LabeledGraph) -> IsoClass {
        iso::canonical_form(s)
    }

    #[test]
    fn oracle_modes_agree_with_closed_form_exactly() {
        let classes = iso::enumerate_classes(3, None).unwrap();
        let reps: Vec<&LabeledGraph> = classes.values().flatten().map(|c| c.canon()).collect();
        for s1 in &reps {
            for s2 in &reps {
                let closed = expect_phi_closed_exact(s1, s2, 6);
                let full = expect_phi_oracle(s1, s2, 6, OracleMode::FullPermutations).unwrap();
                let inj = expect_phi_oracle(s1, s2, 6, OracleMode::Injections).unwrap();
                assert_eq!(closed, full, "full-Sn mismatch at {s1:?},{s2:?}");
                assert_eq!(closed, inj, "injection mismatch at {s1:?},{s2:?}");
            }
        }
        // relabeled rather than canonical arguments
        let s = g(&[(2, 5), (5, 6)]);
        let t = g(&[(1, 4), (1, 3)]);
        let closed = expect_phi_closed_exact(&s, &t, 6);
        assert_eq!(
            closed,
            expect_phi_oracle(&s, &t, 6, OracleMode::FullPermutations).unwrap()
        );
        assert!(!closed.coeff.is_zero());
    }

    #[test]
    fn oracle_rejects_large_n_in_full_mode() {
        let s = g(&[(1, 2)]);
        assert!(matches!(
            expect_phi_oracle(&s, &s, 10, OracleMode::FullPermutations),
            Err(PolyError::CeilingExceeded { .. })
        ));
        assert!(expect_phi_oracle(&s, &s, 200, OracleMode::Injections).is_ok());
    }

    #[test]
    fn labeled_pair_sum_collapses_to_rho_power() {
        // sum over copies S1,S2 of a class of E[phi]^2 = rho^{2e}:
        // copies = (n)_v/aut, each squared moment = rho^{2e} (aut/(n)_v)^2
        let n = 7u32;
        let classes = iso::enumerate_classes(3, None).unwrap();
        for c in classes.values().flatten() {
            let copies = iso::labeled_copy_count(c, n as u64);
            let coeff = BigRational::new(
                BigInt::from(c.aut()),
                falling_factorial(n as u64, c.v_count() as u64),
            );
            let total = BigRational::from(BigInt::from(copies.clone()))
                * BigRational::from(BigInt::from(copies))
                * &coeff
                * &coeff;
            assert!(total.is_one(), "collapse failed for {:?}", c.canon());
        }
    }

    #[test]
    fn orthonormality_exact_on_k4() {
        // Gram of psi over all subgraphs of K4 with <= 3 edges, by exact
        // summation over the 2^6 inputs with Bernoulli(q) weights; the
        // 2^12-point phi inner product is the A-side times B-side product.
        let ctx = QCtx::from_ratio(3, 10);
        let pairs: Vec<(u32, u32)> =
            vec![(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)];
        let mut graphs = Vec::new();
        for mask in 0u32..64 {
            if mask.count_ones() <= 3 {
                let edges: Vec<(u32, u32)> = pairs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &e)| e)
                    .collect();
                graphs.push(LabeledGraph::from_normalized(edges));
            }
        }
        assert_eq!(graphs.len(), 42);
        // weight of an input graph: q^{|E|} (1-q)^{6-|E|}
        let weights: Vec<BigRational> = (0u32..64)
            .map(|mask| {
                let k = mask.count_ones();
                let q = ctx.q().clone();
                let mut w = BigRational::one();
                for _ in 0..k {
                    w *= &q;
                }
                for _ in 0..6 - k {
                    w *= BigRational::one() - &q;
                }
                w
            })
            .collect();
        let inputs: Vec<LabeledGraph> = (0u32..64)
            .map(|mask| {
                let edges: Vec<(u32, u32)> = pairs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &e)| e)
                    .collect();
                LabeledGraph::from_normalized(edges)
            })
            .collect();
        let psi_table: Vec<Vec<QExt>> = graphs
            .iter()
            .map(|s| inputs.iter().map(|x| psi_eval_exact(s, x, &ctx)).collect())
            .collect();
        for i in 0..graphs.len() {
            for j in i..graphs.len() {
                let mut acc = QExt::zero();
                for m in 0..64 {
                    let term = ctx.mul(&psi_table[i][m], &psi_table[j][m]);
                    acc = acc.add(&term.scale(&weights[m]));
                }
                let expected = if i == j { QExt::one() } else { QExt::zero() };
                assert_eq!(acc, expected, "Gram defect at {:?},{:?}", graphs[i], graphs[j]);
            }
        }
    }

    #[test]
    fn snr_known_values() {
        let m = ModelParams::new(8, 0.3, 0.5, 4).unwrap();
        let r = snr_exact(&m, 4).unwrap();
        assert!((r.snr_squared - 1.375).abs() < 1e-12);
        assert!((r.snr - 1.375f64.sqrt()).abs() < 1e-12);
        assert!((r.snr_squared_centered - 0.375).abs() < 1e-12);
        assert_eq!(r.per_class.len(), 1 + 1 + 2);
        // d=2: 1 + rho^2
        let r2 = snr_exact(&m, 2).unwrap();
        assert!((r2.snr_squared - 1.25).abs() < 1e-12);
        // d=6: 1 + rho^2 + 2 rho^4 + 5 rho^6
        let r6 = snr_exact(&m, 6).unwrap();
        let expect = 1.0 + 0.25 + 2.0 * 0.25f64.powi(2) + 5.0 * 0.25f64.powi(3);
        assert!((r6.snr_squared - expect).abs() < 1e-12);
        // odd d truncates at floor(d/2)
        let r5 = snr_exact(&m, 5).unwrap();
        assert_eq!(r5.edge_cap, 2);
        assert!((r5.snr_squared - 1.375).abs() < 1e-12);
    }

    #[test]
    fn snr_bound_dominates_exact() {
        assert_eq!(snr_upper_bound(0.0, 5), 1.0);
        let v = snr_upper_bound(0.1, 4);
        assert!((v - (1.0 + 0.16 * 0.16f64.exp())).abs() < 1e-12);
        for &rho in &[0.05, 0.1, 0.3, 0.5, 0.9] {
            for d in [1u32, 2, 4, 8, 12] {
                let m = ModelParams::new(100, 0.3, rho, d.max(1)).unwrap();
                let exact = snr_exact(&m, d).unwrap().snr_squared;
                assert!(
                    exact <= snr_upper_bound(rho, d) + 1e-12,
                    "bound fails at rho={rho} d={d}"
                );
            }
        }
    }

    #[test]
    fn optimal_coeffs_recover_snr() {
        let m = ModelParams::new(8, 0.3, 0.5, 4).unwrap();
        let coeffs = optimal_coeffs(&m, 4).unwrap();
        let snr = snr_exact(&m, 4).unwrap();
        let from_coeffs = coeffs.norm_squared().sqrt();
        assert!(
            ((from_coeffs - snr.snr) / snr.snr).abs() < 1e-10,
            "{from_coeffs} vs {}",
            snr.snr
        );
        // d=0: a single constant entry
        let c0 = optimal_coeffs(&m, 0).unwrap();
        assert_eq!(c0.len(), 1);
        assert_eq!(c0.get(&LabeledGraph::empty(), &LabeledGraph::empty()), 1.0);
        assert!(optimal_coeffs(&ModelParams::new(9, 0.3, 0.5, 4).unwrap(), 4).is_err());
    }

    #[test]
    fn copies_count_matches_formula() {
        for c in iso::enumerate_classes(3, None).unwrap().values().flatten() {
            let copies = labeled_copies(c, 6);
            assert_eq!(
                BigRational::from(BigInt::from(copies.len())),
                BigRational::from(BigInt::from(iso::labeled_copy_count(c, 6)))
            );
            for s in &copies {
                assert_eq!(&iso::canonical_labeling(s), c.canon());
            }
        }
    }

    #[test]
    fn eval_poly_is_linear_and_centered() {
        let m = ModelParams::new(6, 0.3, 0.5, 4).unwrap();
        let coeffs = optimal_coeffs(&m, 4).unwrap();
        let (a, b) = sample_null(&m, 5);
        let v = eval_poly(&coeffs, &a, &b, m.q());
        let scaled = eval_poly(&coeffs.scaled(2.5), &a, &b, m.q());
        assert!((scaled - 2.5 * v).abs() < 1e-10 * v.abs().max(1.0));
        // constant polynomial
        let mut konst = PolyCoeffs::new(0);
        konst.add_term(&LabeledGraph::empty(), &LabeledGraph::empty(), 3.25);
        assert_eq!(eval_poly(&konst, &a, &b, m.q()), 3.25);
        // null mean equals the constant coefficient, small MC
        let trials = 4000u64;
        let mut acc = 0.0;
        let mut acc_sq = 0.0;
        for t in 0..trials {
            let (a, b) = sample_null(&m, 900_000 + t);
            let v = eval_poly(&coeffs, &a, &b, m.q());
            acc += v;
            acc_sq += v * v;
        }
        let mean = acc / trials as f64;
        let se = ((acc_sq / trials as f64 - mean * mean) / trials as f64).sqrt();
        let konst_coeff = coeffs.get(&LabeledGraph::empty(), &LabeledGraph::empty());
        assert!(
            (mean - konst_coeff).abs() < 4.0 * se + 1e-12,
            "null mean {mean} vs {konst_coeff}"
        );
    }

    #[test]
    fn correlated_mean_of_phi_matches_closed_form() {
        let m = ModelParams::new(8, 0.3, 0.5, 4).unwrap();
        let s1 = g(&[(1, 2)]);
        let s2 = g(&[(5, 6)]);
        let target = expect_phi_closed(&s1, &s2, &m);
        let trials = 30_000u64;
        let (mut acc, mut acc_sq) = (0.0, 0.0);
        for t in 0..trials {
            let s = sample_correlated(&m, 400_000 + t);
            let v = phi_eval(&s1, &s2, &s.a, &s.b, m.q());
            acc += v;
            acc_sq += v * v;
        }
        let mean = acc / trials as f64;
        let se = ((acc_sq / trials as f64 - mean * mean) / trials as f64).sqrt();
        assert!(
            (mean - target).abs() < 4.0 * se,
            "phi mean {mean} vs {target} (se {se})"
        );
    }
}

//! Named verification suites behind `verify --suite ...`. Each check pits a
//! closed form against an independent route (exhaustive enumeration, exact
//! rational arithmetic, or Monte Carlo with standard errors) and reports
//! pass/fail with the measured numbers. The integration tests rerun the
//! same checks at pinned budgets.

use num::rational::BigRational;
use num::{BigUint, One};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::bounds::{self, OverlapTriple};
use crate::exact::{QCtx, QExt};
use crate::graph::{LabeledGraph, Permutation};
use crate::iso;
use crate::model::{self, rng, ModelParams};
use crate::poly::{self, OracleMode, PolyCoeffs};
use crate::trunc::{self, PhiParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Suite {
    GraphFacts,
    Expectations,
    Orthonormality,
    Truncation,
    Bounds,
    All,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct CheckResult {
    pub suite: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(suite: &'static str, name: &'static str, passed: bool, detail: String) -> CheckResult {
        CheckResult {
            suite,
            name,
            passed,
            detail,
        }
    }
}

/// Runs one suite (or all of them). `instances` scales the randomized
/// checks; exact identities ignore it.
pub fn run_suite(suite: Suite, instances: usize, seed: u64) -> Vec<CheckResult> {
    let instances = instances.max(50);
    match suite {
        Suite::GraphFacts => graph_facts(instances, seed),
        Suite::Expectations => expectations(instances, seed),
        Suite::Orthonormality => orthonormality(instances, seed),
        Suite::Truncation => truncation(instances, seed),
        Suite::Bounds => bounds_suite(instances, seed),
        Suite::All => {
            let mut out = graph_facts(instances, seed);
            out.extend(expectations(instances, seed));
            out.extend(orthonormality(instances, seed));
            out.extend(truncation(instances, seed));
            out.extend(bounds_suite(instances, seed));
            out
        }
    }
}

fn random_graph(rng: &mut ChaCha8Rng, host: u32, p: f64) -> LabeledGraph {
    let mut edges = Vec::new();
    for u in 1..=host {
        for v in u + 1..=host {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    LabeledGraph::from_normalized(edges)
}

fn random_edge_subset(rng: &mut ChaCha8Rng, s: &LabeledGraph, keep: f64) -> LabeledGraph {
    LabeledGraph::from_normalized(
        s.edges()
            .iter()
            .copied()
            .filter(|_| rng.gen_bool(keep))
            .collect(),
    )
}

// ---------------------------------------------------------------------------
// graph facts

pub fn graph_facts(instances: usize, seed: u64) -> Vec<CheckResult> {
    let suite = "graph-facts";
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(rng::key(seed, 11, 0, 0));

    // (i) vertex subadditivity and edge modularity of union/intersection
    let mut violations = 0usize;
    for _ in 0..instances {
        let s = random_graph(&mut rng, 10, 0.35);
        let t = random_graph(&mut rng, 10, 0.35);
        let u = s.union(&t);
        let i = s.intersection(&t);
        let v_ok = u.vertex_count() + i.vertex_count() <= s.vertex_count() + t.vertex_count();
        let e_ok = u.edge_count() + i.edge_count() == s.edge_count() + t.edge_count();
        if !(v_ok && e_ok) {
            violations += 1;
        }
    }
    out.push(CheckResult::new(
        suite,
        "lattice vertex/edge counts",
        violations == 0,
        format!("{violations} violations over {instances} random pairs"),
    ));

    // (ii) log-phi submodularity under several weightings
    let mut violations = 0usize;
    let per_pp = instances.div_ceil(5);
    for _ in 0..5 {
        let a = rng.gen_range(0.0..3.0);
        let b = rng.gen_range(-2.0..2.0);
        let pp = PhiParams::with_log_weights(12, 4, a, b).unwrap();
        for _ in 0..per_pp {
            let s = random_graph(&mut rng, 10, 0.35);
            let t = random_graph(&mut rng, 10, 0.35);
            let lhs = trunc::log_phi(&s.union(&t), &pp) + trunc::log_phi(&s.intersection(&t), &pp);
            let rhs = trunc::log_phi(&s, &pp) + trunc::log_phi(&t, &pp);
            if lhs > rhs + 1e-9 {
                violations += 1;
            }
        }
    }
    out.push(CheckResult::new(
        suite,
        "log-phi submodularity",
        violations == 0,
        format!("{violations} violations over 5 weightings x {per_pp} pairs"),
    ));

    // (iii) automorphism growth under edge deletion:
    // Aut(S) <= Aut(T) |V(T)|^{2(|E(T)|-|E(S)|)}
    let mut violations = 0usize;
    for _ in 0..instances {
        let t = random_graph(&mut rng, 8, 0.4);
        if t.edge_count() == 0 || t.edge_count() > 14 {
            continue;
        }
        let s = random_edge_subset(&mut rng, &t, 0.6);
        let aut_s = iso::canonical_form(&s).aut() as u128;
        let aut_t = iso::canonical_form(&t).aut() as u128;
        let de = (t.edge_count() - s.edge_count()) as u32;
        let bound = aut_t * (t.vertex_count() as u128).pow(2 * de);
        if aut_s > bound {
            violations += 1;
        }
    }
    out.push(CheckResult::new(
        suite,
        "automorphism growth under deletion",
        violations == 0,
        format!("{violations} violations over {instances} nested pairs"),
    ));

    // (iv) supergraph counting: #{T in K_n : T contains S, k extra
    // vertices, l extra edges} <= n^k (|V(S)|+k)^{2l}
    let host = 8u32;
    let mut violations = 0usize;
    let cases = instances.div_ceil(10);
    for _ in 0..cases {
        let s = random_graph(&mut rng, 6, 0.3);
        let k = rng.gen_range(0..=2u32);
        let l = rng.gen_range(0..=3usize);
        let pool: Vec<(u32, u32)> = (1..=host)
            .flat_map(|u| (u + 1..=host).map(move |v| (u, v)))
            .filter(|&(u, v)| !s.contains_edge(u, v))
            .collect();
        let mut count = 0u128;
        let mut pick = vec![0usize; l];
        count_supergraphs(&s, &pool, &mut pick, 0, 0, k, &mut count);
        let bound = (host as u128).pow(k) * ((s.vertex_count() as u128) + k as u128).pow(2 * l as u32);
        if count > bound {
            violations += 1;
        }
    }
    out.push(CheckResult::new(
        suite,
        "supergraph count ceiling",
        violations == 0,
        format!("{violations} violations over {cases} exhaustive cases"),
    ));

    // (v) edge-subset counting at fixed deficit equals the binomial
    let mut violations = 0usize;
    for _ in 0..instances {
        let s = random_graph(&mut rng, 6, 0.4);
        let e = s.edge_count();
        if e == 0 || e > 12 {
            continue;
        }
        let k = rng.gen_range(1..=e);
        let mut count = 0u64;
        for mask in 0u64..(1 << e) {
            if mask.count_ones() as usize == e - k {
                count += 1;
            }
        }
        let binom = binomial(e as u64, k as u64);
        if count != binom || binom as u128 > (e as u128).pow(k as u32) {
            violations += 1;
        }
    }
    out.push(CheckResult::new(
        suite,
        "edge-subset deficit counts",
        violations == 0,
        format!("{violations} violations over {instances} draws"),
    ));

    out
}

fn count_supergraphs(
    s: &LabeledGraph,
    pool: &[(u32, u32)],
    pick: &mut [usize],
    depth: usize,
    start: usize,
    k: u32,
    count: &mut u128,
) {
    if depth == pick.len() {
        let mut edges: Vec<(u32, u32)> = s.edges().to_vec();
        edges.extend(pick.iter().map(|&i| pool[i]));
        edges.sort_unstable();
        let t = LabeledGraph::from_normalized(edges);
        if t.vertex_count() == s.vertex_count() + k as usize {
            *count += 1;
        }
        return;
    }
    for i in start..pool.len() {
        pick[depth] = i;
        count_supergraphs(s, pool, pick, depth + 1, i + 1, k, count);
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut out = 1u64;
    for i in 0..k {
        out = out * (n - i) / (i + 1);
    }
    out
}

// ---------------------------------------------------------------------------
// expectations

pub fn expectations(instances: usize, seed: u64) -> Vec<CheckResult> {
    let suite = "expectations";
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(rng::key(seed, 12, 0, 0));

    // closed form vs direct permutation averaging, exact rational equality
    let classes = iso::enumerate_classes(3, None).unwrap();
    let flat: Vec<&iso::IsoClass> = classes.values().flatten().collect();
    let n = 6u32;
    let mut mismatches = 0usize;
    let mut pairs = 0usize;
    for c1 in &flat {
        for c2 in &flat {
            let closed = poly::expect_phi_closed_exact(c1.canon(), c2.canon(), n);
            let oracle =
                poly::expect_phi_oracle(c1.canon(), c2.canon(), n, OracleMode::Injections).unwrap();
            if closed != oracle {
                mismatches += 1;
            }
            pairs += 1;
        }
    }
    // a sample of pairs against the slower all-permutations oracle
    for _ in 0..20 {
        let c1 = flat[rng.gen_range(0..flat.len())];
        let c2 = flat[rng.gen_range(0..flat.len())];
        let closed = poly::expect_phi_closed_exact(c1.canon(), c2.canon(), n);
        let oracle =
            poly::expect_phi_oracle(c1.canon(), c2.canon(), n, OracleMode::FullPermutations)
                .unwrap();
        if closed != oracle {
            mismatches += 1;
        }
        pairs += 1;
    }
    out.push(CheckResult::new(
        suite,
        "closed form vs permutation oracle",
        mismatches == 0,
        format!("{mismatches} mismatches over {pairs} class pairs at n={n}"),
    ));

    // copy-count identity: copies * aut = (n)_v, and copies equals the
    // exhaustive embedding count into the complete graph
    let classes4 = iso::enumerate_classes(4, None).unwrap();
    let mut failures = 0usize;
    let mut checked = 0usize;
    for host in 6..=9u32 {
        let kn = complete_graph(host);
        for c in classes4.values().flatten() {
            let copies = iso::labeled_copy_count(c, host as u64);
            let mut falling = BigUint::one();
            for i in 0..c.v_count() as u64 {
                falling *= BigUint::from((host as u64).saturating_sub(i));
            }
            if &copies * BigUint::from(c.aut()) != falling {
                failures += 1;
            }
            if host == 6 && copies != BigUint::from(iso::count_embeddings(c, &kn)) {
                failures += 1;
            }
            checked += 1;
        }
    }
    out.push(CheckResult::new(
        suite,
        "copy-count identity",
        failures == 0,
        format!("{failures} failures over {checked} (class, n) cases"),
    ));

    // pinned signal-to-noise values
    let m = ModelParams::new(30, 0.2, 0.5, 4).unwrap();
    let snr4 = poly::snr_exact(&m, 4).unwrap().snr_squared;
    let rho: f64 = 0.5;
    let snr6 = poly::snr_exact(&m, 6).unwrap().snr_squared;
    let expect6 = 1.0 + rho.powi(2) + 2.0 * rho.powi(4) + 5.0 * rho.powi(6);
    let ok = (snr4 - 1.375).abs() < 1e-12 && (snr6 - expect6).abs() < 1e-12;
    out.push(CheckResult::new(
        suite,
        "snr class sums",
        ok,
        format!("snr^2(d=4) = {snr4} (want 1.375), snr^2(d=6) = {snr6} (want {expect6})"),
    ));
    let _ = instances;
    out
}

fn complete_graph(n: u32) -> LabeledGraph {
    LabeledGraph::from_normalized(
        (1..=n)
            .flat_map(|u| (u + 1..=n).map(move |v| (u, v)))
            .collect(),
    )
}

// ---------------------------------------------------------------------------
// orthonormality

pub fn orthonormality(instances: usize, seed: u64) -> Vec<CheckResult> {
    let suite = "orthonormality";
    let mut out = Vec::new();

    // exact Gram matrix over all <=2-edge basis elements on 4 vertices
    let ctx = QCtx::from_ratio(3, 10);
    let pairs: Vec<(u32, u32)> = (1..=4u32)
        .flat_map(|u| (u + 1..=4).map(move |v| (u, v)))
        .collect();
    let mut basis = vec![LabeledGraph::empty()];
    for mask in 1u64..(1 << pairs.len()) {
        if mask.count_ones() <= 2 {
            basis.push(LabeledGraph::from_normalized(
                pairs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &e)| e)
                    .collect(),
            ));
        }
    }
    let q = BigRational::new(3.into(), 10.into());
    let one_minus_q = BigRational::one() - &q;
    let mut gram_defects = 0usize;
    for (i, s1) in basis.iter().enumerate() {
        for (j, s2) in basis.iter().enumerate() {
            let mut acc = QExt::zero();
            for mask in 0u64..(1 << pairs.len()) {
                let x = LabeledGraph::from_normalized(
                    pairs
                        .iter()
                        .enumerate()
                        .filter(|(b, _)| mask >> b & 1 == 1)
                        .map(|(_, &e)| e)
                        .collect(),
                );
                let mut weight = BigRational::one();
                for b in 0..pairs.len() {
                    weight *= if mask >> b & 1 == 1 { &q } else { &one_minus_q };
                }
                let term = ctx.mul(&poly::psi_eval_exact(s1, &x, &ctx), &poly::psi_eval_exact(s2, &x, &ctx));
                acc = acc.add(&term.scale(&weight));
            }
            let want = if i == j { QExt::one() } else { QExt::zero() };
            if !acc.sub(&want).is_zero() {
                gram_defects += 1;
            }
        }
    }
    out.push(CheckResult::new(
        suite,
        "exact Gram identity",
        gram_defects == 0,
        format!(
            "{gram_defects} defects in the {0}x{0} Gram matrix at q=3/10",
            basis.len()
        ),
    ));

    // Monte Carlo second moment of phi under the independent law. Kept to
    // bases with at most two edges per side: the product estimator's tails
    // grow like (1/q)^{edges} and would swamp the standard error.
    let params = ModelParams::new(10, 0.3, 0.3, 4).unwrap();
    let single = LabeledGraph::from_edges([(1, 2)]).unwrap();
    let path = LabeledGraph::from_edges([(1, 2), (2, 3)]).unwrap();
    let split = LabeledGraph::from_edges([(1, 2), (3, 4)]).unwrap();
    let bases = [
        (single.clone(), single.clone()),
        (path.clone(), single.clone()),
        (split.clone(), path.clone()),
        (single.clone(), LabeledGraph::empty()),
        (path.clone(), path.clone()),
    ];
    let mut worst: f64 = 0.0;
    let mut failures = 0usize;
    for (i, (s1, s2)) in bases.iter().enumerate() {
        let (mut sum, mut sum_sq) = (0.0f64, 0.0f64);
        for t in 0..instances {
            let (a, b) = model::sample_null(&params, rng::key(seed, 14, i as u64, t as u64));
            let v = poly::phi_eval(s1, s2, &a, &b, params.q());
            sum += v * v;
            sum_sq += v * v * v * v;
        }
        let nf = instances as f64;
        let mean = sum / nf;
        let se = ((sum_sq / nf - mean * mean).max(0.0) / nf).sqrt();
        let dev = (mean - 1.0).abs();
        worst = worst.max(dev / se.max(1e-12));
        if dev > 4.0 * se {
            failures += 1;
        }
    }
    out.push(CheckResult::new(
        suite,
        "unit second moment under the null",
        failures == 0,
        format!(
            "{failures} failures over {} bases x {instances} samples, worst z = {worst:.2}",
            bases.len()
        ),
    ));
    out
}

// ---------------------------------------------------------------------------
// truncation

/// Three parameter points with b < 0 where the complement of the good
/// event has tangible probability, used by the union-bound check. rho is
/// chosen so the parent density p lands at the target.
pub fn truncation_probability_points() -> Vec<ModelParams> {
    let mk = |n: u32, q: f64, p_target: f64, d: u32| {
        let rho = q * (1.0 / p_target - 1.0) / (1.0 - q);
        ModelParams::new(n, q, rho, d).unwrap()
    };
    vec![
        mk(16, 1e-22, 0.001, 2),
        mk(12, 1e-22, 0.005, 2),
        mk(20, 3.5e-29, 5e-4, 3),
    ]
}

pub fn truncation(instances: usize, seed: u64) -> Vec<CheckResult> {
    let suite = "truncation";
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(rng::key(seed, 15, 0, 0));

    // branch-and-bound event check against the literal subset scan
    let mut mismatches = 0usize;
    let mut tried = 0usize;
    for _ in 0..instances {
        let a = rng.gen_range(0.0..2.0);
        let b = rng.gen_range(-2.0..0.5);
        let pp = PhiParams::with_log_weights(10, 3, a, b).unwrap();
        let g = random_graph(&mut rng, 10, 0.3);
        if g.edge_count() > 20 {
            continue;
        }
        let k_cap = 9u32.min(pp.n());
        let fast = trunc::check_event_g(&g, &pp, k_cap).unwrap();
        let slow = trunc::event_g_exhaustive(&g, &pp, k_cap).unwrap();
        if fast != slow {
            mismatches += 1;
        }
        tried += 1;
    }
    out.push(CheckResult::new(
        suite,
        "event check vs exhaustive scan",
        mismatches == 0,
        format!("{mismatches} mismatches over {tried} random graphs"),
    ));

    // empirical bad-event rate is dominated by the union bound
    let mut failures = 0usize;
    let mut details = Vec::new();
    for (i, params) in truncation_probability_points().iter().enumerate() {
        let pp = PhiParams::from_model(params).unwrap();
        assert!(pp.b() < 0.0, "points must have negative edge weight");
        let k_cap = params.d().pow(2).min(params.n());
        let mut bad = 0usize;
        for t in 0..instances {
            let sample = model::sample_correlated(params, rng::key(seed, 16, i as u64, t as u64));
            if !trunc::check_event_g(&sample.g, &pp, k_cap).unwrap() {
                bad += 1;
            }
        }
        let rate = bad as f64 / instances as f64;
        let se = (rate * (1.0 - rate) / instances as f64).sqrt();
        let bound = trunc::g_complement_union_bound(&pp, params.p());
        if rate > bound + 4.0 * se {
            failures += 1;
        }
        details.push(format!("point {i}: rate {rate:.4} vs bound {bound:.4}"));
    }
    out.push(CheckResult::new(
        suite,
        "union bound dominates bad-event rate",
        failures == 0,
        details.join("; "),
    ));

    // repaired family: every member is admissible, contains the kept part,
    // and does not lose weight
    let pp = PhiParams::with_log_weights(16, 4, 0.3, -1.2).unwrap();
    let mut inadmissible_seen = 0usize;
    let mut violations = 0usize;
    while inadmissible_seen < (instances / 10).max(20) {
        let s = random_graph(&mut rng, 6, 0.5);
        if s.edge_count() > 12 || trunc::is_admissible(&s, &pp).unwrap() {
            continue;
        }
        inadmissible_seen += 1;
        let d_part = trunc::dsub(&s, &pp).unwrap();
        let rest = s.difference(&d_part);
        for h in trunc::a_set(&s, &pp).unwrap() {
            let ok = trunc::is_admissible(&h, &pp).unwrap()
                && trunc::log_phi(&h, &pp) >= trunc::log_phi(&s, &pp) - 1e-9
                && rest.is_subgraph_of(&h);
            if !ok {
                violations += 1;
            }
        }
    }
    out.push(CheckResult::new(
        suite,
        "repaired family contract",
        violations == 0,
        format!("{violations} violations over {inadmissible_seen} inadmissible graphs"),
    ));

    // truncated-basis expansion: psi' = sum of Lambda psi over the family,
    // with the coefficient bound |Lambda| <= (4 sqrt q)^gap
    let mut identity_defects = 0usize;
    let mut bound_defects = 0usize;
    let mut graphs_checked = 0usize;
    while graphs_checked < (instances / 20).max(10) {
        let s = random_graph(&mut rng, 5, 0.55);
        if s.edge_count() > 6 || trunc::is_admissible(&s, &pp).unwrap() {
            continue;
        }
        graphs_checked += 1;
        let family = trunc::a_set(&s, &pp).unwrap();
        let q = pp.q();
        let lambdas: Vec<f64> = family
            .iter()
            .map(|h| trunc::lambda_coeff(&s, h, &pp, q).unwrap())
            .collect();
        for (h, l) in family.iter().zip(&lambdas) {
            let gap = (s.edge_count() - h.edge_count()) as i32;
            if l.abs() > (4.0 * q.sqrt()).powi(gap) + 1e-12 {
                bound_defects += 1;
            }
        }
        let es = s.edge_count();
        for mask in 0u64..(1 << es) {
            let x = LabeledGraph::from_normalized(
                s.edges()
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &e)| e)
                    .collect(),
            );
            let lhs = trunc::psi_prime_eval(&s, &x, &pp, q).unwrap();
            let rhs: f64 = family
                .iter()
                .zip(&lambdas)
                .map(|(h, l)| l * poly::psi_eval(h, &x, q))
                .sum();
            if (lhs - rhs).abs() > 1e-9 * (1.0 + lhs.abs()) {
                identity_defects += 1;
            }
        }
    }
    out.push(CheckResult::new(
        suite,
        "truncated-basis expansion",
        identity_defects == 0 && bound_defects == 0,
        format!(
            "{identity_defects} identity defects, {bound_defects} coefficient-bound defects over {graphs_checked} graphs"
        ),
    ));

    // projection: norm inflation <= 8x and evaluation agreement on inputs
    // that satisfy the good event
    let mut norm_defects = 0usize;
    let mut eval_defects = 0usize;
    let vectors = (instances / 20).max(10);
    for _ in 0..vectors {
        let mut f = PolyCoeffs::new(6);
        for _ in 0..6 {
            let s1 = random_graph(&mut rng, 5, 0.5);
            let s2 = random_graph(&mut rng, 5, 0.5);
            if s1.edge_count() + s2.edge_count() > 6 {
                continue;
            }
            f.add_term(&s1, &s2, rng.gen_range(-1.0..1.0));
        }
        let fp = trunc::project_admissible(&f, &pp).unwrap();
        if fp.norm_squared() > 8.0 * f.norm_squared() + 1e-9 {
            norm_defects += 1;
        }
        let k_cap = 9u32.min(pp.n());
        let mut good_pairs = 0usize;
        while good_pairs < 3 {
            let a = random_graph(&mut rng, 6, 0.3);
            let b = random_graph(&mut rng, 6, 0.3);
            if !trunc::check_event_g(&a, &pp, k_cap).unwrap()
                || !trunc::check_event_g(&b, &pp, k_cap).unwrap()
            {
                continue;
            }
            good_pairs += 1;
            let va = poly::eval_poly(&f, &a, &b, pp.q());
            let vb = poly::eval_poly(&fp, &a, &b, pp.q());
            if (va - vb).abs() > 1e-9 * (1.0 + va.abs()) {
                eval_defects += 1;
            }
        }
    }
    out.push(CheckResult::new(
        suite,
        "admissible projection contract",
        norm_defects == 0 && eval_defects == 0,
        format!("{norm_defects} norm defects, {eval_defects} eval defects over {vectors} vectors"),
    ));

    // census: trivial regime matches the full class counts; growth product
    // stays within 10x of its first value; admissible classes obey the
    // density ceiling
    let pp_trivial = PhiParams::new(100, 0.3, 4).unwrap();
    let full = [1u64, 2, 5, 11, 26, 68];
    let mut census_ok = true;
    let mut products = Vec::new();
    for k in 1..=6u32 {
        let c = trunc::census_admissible(k, &pp_trivial).unwrap();
        if c != full[k as usize - 1] {
            census_ok = false;
        }
        products.push(c as f64 * (0.338f64 - 0.05).powi(k as i32));
    }
    let base = products[0];
    let growth_ok = products.iter().all(|&p| p <= 10.0 * base && p >= base / 10.0);
    let pp_regime = PhiParams::new(100, 1e-5, 4).unwrap();
    let mut density_ok = true;
    let classes5 = iso::enumerate_classes(5, None).unwrap();
    let ceiling = 1.0 + 8.0 / 4.0 + 0.1 / (10.0 * 4f64.ln());
    for c in classes5.values().flatten() {
        if trunc::is_admissible(c.canon(), &pp_regime).unwrap() {
            let dens = iso::max_edge_density(c);
            let dens = *dens.numer() as f64 / *dens.denom() as f64;
            if dens > ceiling {
                density_ok = false;
            }
        }
    }
    out.push(CheckResult::new(
        suite,
        "admissible census, growth, and density",
        census_ok && growth_ok && density_ok,
        format!(
            "counts ok: {census_ok}, growth products {products:?} within 10x: {growth_ok}, density <= {ceiling:.3}: {density_ok}"
        ),
    ));

    out
}

// ---------------------------------------------------------------------------
// bounds

pub fn bounds_suite(instances: usize, seed: u64) -> Vec<CheckResult> {
    let suite = "bounds";
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(rng::key(seed, 17, 0, 0));

    // closed-form plug-ins on the diagonal
    let m = ModelParams::new(30, 0.1, 0.5, 4).unwrap();
    let tri = LabeledGraph::from_edges([(1, 2), (2, 3), (1, 3)]).unwrap();
    let t = OverlapTriple::new(tri.clone(), tri.clone(), tri.clone()).unwrap();
    let rho_e = 0.5f64.powi(3);
    let ok = (bounds::l1_bound(&t, &m).value - rho_e).abs() < 1e-12
        && (bounds::vertex_bound(&t, &m).value - 4.0 * rho_e).abs() < 1e-12
        && (bounds::m_value(&t, &m).value - rho_e).abs() < 1e-12;
    out.push(CheckResult::new(
        suite,
        "diagonal plug-in values",
        ok,
        format!(
            "l1 {} vertex {} m {} at rho^e = {rho_e}",
            bounds::l1_bound(&t, &m).value,
            bounds::vertex_bound(&t, &m).value,
            bounds::m_value(&t, &m).value
        ),
    ));

    // exponent sweep across the pinned grid
    let mut live_failures = 0u64;
    let mut gated = 0u64;
    for ln_n in [1e3f64.ln(), 1e6f64.ln(), 1e9f64.ln()] {
        let s = bounds::min_bound_sweep(ln_n, -0.9 * ln_n, 100, instances as u64, seed);
        live_failures += s.case1_failures + s.case2_failures;
        gated += s.case2_gated;
    }
    out.push(CheckResult::new(
        suite,
        "min-bound exponent sweep",
        live_failures == 0,
        format!(
            "{live_failures} live violations, {gated} tuples gated on the small-q premise, {} tuples/grid point",
            instances
        ),
    ));

    // Monte Carlo vs the aligned-overlap bound
    let m = ModelParams::new(20, 0.1, 0.5, 4).unwrap();
    let id = Permutation::identity(20);
    let mut failures = 0usize;
    for _ in 0..5 {
        let s1 = random_graph(&mut rng, 4, 0.5);
        let s2 = random_graph(&mut rng, 4, 0.5);
        if s1.edge_count() == 0 || s2.edge_count() == 0 || s1.edge_count() + s2.edge_count() > 5 {
            continue;
        }
        let t = OverlapTriple::from_aligned(&s1, &s2, &id).unwrap();
        let est = bounds::mc_phi_truncated(&s1, &s2, &m, Some(&id), 10, instances as u64, rng.gen())
            .unwrap();
        if est.mean.abs() > 1.05 * bounds::l1_bound(&t, &m).value + 4.0 * est.se {
            failures += 1;
        }
    }
    out.push(CheckResult::new(
        suite,
        "aligned first moment within l1 bound",
        failures == 0,
        format!("{failures} violations over sampled overlap triples, {instances} trials each"),
    ));

    // Monte Carlo vs the summed expectation bound under a uniform hidden
    // permutation
    let m30 = ModelParams::new(30, 0.1, 0.5, 4).unwrap();
    let fixtures = [
        (vec![(1u32, 2u32)], vec![(1u32, 2u32)]),
        (vec![(1, 2)], vec![(3, 4)]),
        (vec![(1, 2), (2, 3)], vec![(1, 2), (1, 3)]),
    ];
    let mut failures = 0usize;
    for (i, (e1, e2)) in fixtures.iter().enumerate() {
        let s1 = LabeledGraph::from_edges(e1.iter().copied()).unwrap();
        let s2 = LabeledGraph::from_edges(e2.iter().copied()).unwrap();
        let est = bounds::mc_phi_truncated(&s1, &s2, &m30, None, 16, instances as u64, seed + i as u64)
            .unwrap();
        let bound = bounds::expectation_bound(&s1, &s2, &m30).unwrap();
        if est.mean.abs() > 1.1 * bound + 4.0 * est.se {
            failures += 1;
        }
    }
    out.push(CheckResult::new(
        suite,
        "uniform-permutation moment within summed bound",
        failures == 0,
        format!("{failures} violations over {} fixtures", fixtures.len()),
    ));

    out
}

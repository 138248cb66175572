//! Samplers for the correlated pair, the independent-pair null, and the
//! truncated law obtained by rejection on the good event.
//!
//! The correlated model on vertex set [n]: a hidden permutation pi* is
//! uniform; per unordered pair, I ~ Bern(p) and J, K ~ Bern(s) are
//! independent; G = I, A_e = I_e J_e, B_{pi*(e)} = I_e K_{pi*(e)}. Both A
//! and B are marginally Erdos-Renyi with edge density q = ps, and matched
//! edges have correlation rho = s(1-p)/(1-ps).

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{LabeledGraph, Permutation};

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("parameter {name}={value} violates {constraint}")]
    InvalidParam {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },
    #[error(
        "rejection sampling used up {rejects} rejects (acceptance rate about \
         {acceptance_estimate:.2e}); raise max_rejects or move parameters"
    )]
    TruncationExhausted {
        rejects: u64,
        acceptance_estimate: f64,
    },
    #[error(transparent)]
    Trunc(#[from] crate::trunc::TruncError),
}

/// Largest n the dense per-pair samplers accept.
pub const N_CEILING: u32 = 10_000;

/// Model parameters (n, q, rho, d) with the derived Bernoulli rates (p, s).
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct ModelParams {
    n: u32,
    q: f64,
    rho: f64,
    d: u32,
    p: f64,
    s: f64,
}

/// Inverts the reparameterization q = ps, rho = s(1-p)/(1-ps):
/// s = q + rho(1-q), p = q/s.
pub fn derive_ps(q: f64, rho: f64) -> Result<(f64, f64), ModelError> {
    if !(q > 0.0 && q < 1.0) {
        return Err(ModelError::InvalidParam {
            name: "q",
            value: q,
            constraint: "0 < q < 1",
        });
    }
    if !(0.0..1.0).contains(&rho) {
        return Err(ModelError::InvalidParam {
            name: "rho",
            value: rho,
            constraint: "0 <= rho < 1",
        });
    }
    let s = q + rho * (1.0 - q);
    Ok((q / s, s))
}

impl ModelParams {
    pub fn new(n: u32, q: f64, rho: f64, d: u32) -> Result<Self, ModelError> {
        let (p, s) = derive_ps(q, rho)?;
        Self::validate_nd(n, d)?;
        Ok(ModelParams { n, q, rho, d, p, s })
    }

    /// Construction from the raw Bernoulli rates. Unlike [`ModelParams::new`]
    /// this admits s = 1 (hence rho = 1), where A = G and B = pi*(G).
    pub fn from_ps(n: u32, p: f64, s: f64, d: u32) -> Result<Self, ModelError> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(ModelError::InvalidParam {
                name: "p",
                value: p,
                constraint: "0 < p <= 1",
            });
        }
        if !(s > 0.0 && s <= 1.0) {
            return Err(ModelError::InvalidParam {
                name: "s",
                value: s,
                constraint: "0 < s <= 1",
            });
        }
        let q = p * s;
        if q >= 1.0 {
            return Err(ModelError::InvalidParam {
                name: "q",
                value: q,
                constraint: "q = ps < 1",
            });
        }
        Self::validate_nd(n, d)?;
        let rho = (s - q) / (1.0 - q);
        Ok(ModelParams { n, q, rho, d, p, s })
    }

    fn validate_nd(n: u32, d: u32) -> Result<(), ModelError> {
        if n < 2 || n > N_CEILING {
            return Err(ModelError::InvalidParam {
                name: "n",
                value: n as f64,
                constraint: "2 <= n <= 10^4",
            });
        }
        if d < 1 {
            return Err(ModelError::InvalidParam {
                name: "d",
                value: d as f64,
                constraint: "d >= 1",
            });
        }
        Ok(())
    }

    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn q(&self) -> f64 {
        self.q
    }
    pub fn rho(&self) -> f64 {
        self.rho
    }
    pub fn d(&self) -> u32 {
        self.d
    }
    pub fn p(&self) -> f64 {
        self.p
    }
    pub fn s(&self) -> f64 {
        self.s
    }
}

/// One draw from the correlated model.
#[derive(Clone, Debug)]
pub struct CorrelatedSample {
    pub pi_star: Permutation,
    pub g: LabeledGraph,
    pub a: LabeledGraph,
    pub b: LabeledGraph,
}

// ---------------------------------------------------------------------------
// counter-based randomness: every Bernoulli draw is keyed by
// (seed, stream, pair), so sampling order and parallelism cannot change
// results

pub(crate) mod rng {
    pub const STREAM_I: u64 = 1;
    pub const STREAM_J: u64 = 2;
    pub const STREAM_K: u64 = 3;
    pub const STREAM_NULL_A: u64 = 4;
    pub const STREAM_NULL_B: u64 = 5;
    pub const STREAM_PI: u64 = 6;
    pub const STREAM_TRUNC: u64 = 7;
    pub const STREAM_TRIAL: u64 = 8;

    // splitmix64 finalizer
    pub fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn key(seed: u64, stream: u64, a: u64, b: u64) -> u64 {
        mix(mix(mix(seed ^ stream.wrapping_mul(0xA24B_AED4_963E_E407)) ^ a) ^ b)
    }

    /// Uniform in [0,1) with 53 random bits.
    pub fn unit(x: u64) -> f64 {
        (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn pair_unit(seed: u64, stream: u64, u: u32, v: u32) -> f64 {
        unit(key(seed, stream, u as u64, v as u64))
    }
}

fn uniform_permutation(n: u32, seed: u64) -> Permutation {
    let mut image: Vec<u32> = (1..=n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(rng::key(seed, rng::STREAM_PI, 0, 0));
    image.shuffle(&mut rng);
    Permutation::from_image(image).expect("shuffle preserves bijectivity")
}

/// Draws (pi*, G, A, B) from the correlated model. Deterministic in
/// (params, seed) and independent of evaluation order.
pub fn sample_correlated(params: &ModelParams, seed: u64) -> CorrelatedSample {
    let pi = uniform_permutation(params.n, seed);
    sample_correlated_given_pi(params, seed, pi)
}

/// Same model with pi* clamped to a given permutation; used by tests that
/// need matched pairs at known positions.
pub fn sample_correlated_given_pi(
    params: &ModelParams,
    seed: u64,
    pi_star: Permutation,
) -> CorrelatedSample {
    assert_eq!(pi_star.n(), params.n, "permutation size != n");
    let n = params.n;
    let mut g_edges = Vec::new();
    let mut a_edges = Vec::new();
    let mut b_edges = Vec::new();
    for u in 1..=n {
        for v in u + 1..=n {
            if rng::pair_unit(seed, rng::STREAM_I, u, v) >= params.p {
                continue;
            }
            g_edges.push((u, v));
            if rng::pair_unit(seed, rng::STREAM_J, u, v) < params.s {
                a_edges.push((u, v));
            }
            let iu = pi_star.apply(u).expect("u in domain");
            let iv = pi_star.apply(v).expect("v in domain");
            let (iu, iv) = (iu.min(iv), iu.max(iv));
            // K is indexed by the image pair: B_{pi(e)} = I_e K_{pi(e)}
            if rng::pair_unit(seed, rng::STREAM_K, iu, iv) < params.s {
                b_edges.push((iu, iv));
            }
        }
    }
    b_edges.sort_unstable();
    CorrelatedSample {
        pi_star,
        g: LabeledGraph::from_normalized(g_edges),
        a: LabeledGraph::from_normalized(a_edges),
        b: LabeledGraph::from_normalized(b_edges),
    }
}

/// A draw from the truncated law (the correlated model conditioned on the
/// good event) plus how many rejections it took.
#[derive(Clone, Debug)]
pub struct TruncatedSample {
    pub sample: CorrelatedSample,
    pub rejects: u64,
}

/// Rejection-samples the correlated model until the parent graph G passes
/// the good-event check restricted to subsets of at most k_cap vertices.
/// Makes max_rejects + 1 attempts before giving up.
pub fn sample_truncated(
    params: &ModelParams,
    seed: u64,
    k_cap: u32,
    max_rejects: u64,
) -> Result<TruncatedSample, ModelError> {
    let pp = crate::trunc::PhiParams::from_model(params)?;
    for t in 0..=max_rejects {
        let attempt_seed = rng::key(seed, rng::STREAM_TRUNC, t, 0);
        let sample = sample_correlated(params, attempt_seed);
        if crate::trunc::check_event_g(&sample.g, &pp, k_cap)? {
            return Ok(TruncatedSample { sample, rejects: t });
        }
    }
    Err(ModelError::TruncationExhausted {
        rejects: max_rejects + 1,
        // add-one estimate from (max_rejects + 1) straight failures
        acceptance_estimate: 1.0 / (max_rejects as f64 + 3.0),
    })
}

/// Draws two independent Erdos-Renyi graphs with edge density q.
pub fn sample_null(params: &ModelParams, seed: u64) -> (LabeledGraph, LabeledGraph) {
    let n = params.n;
    let mut a_edges = Vec::new();
    let mut b_edges = Vec::new();
    for u in 1..=n {
        for v in u + 1..=n {
            if rng::pair_unit(seed, rng::STREAM_NULL_A, u, v) < params.q {
                a_edges.push((u, v));
            }
            if rng::pair_unit(seed, rng::STREAM_NULL_B, u, v) < params.q {
                b_edges.push((u, v));
            }
        }
    }
    (
        LabeledGraph::from_normalized(a_edges),
        LabeledGraph::from_normalized(b_edges),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derive_ps_known_values() {
        let (p, s) = derive_ps(0.2, 0.5).unwrap();
        assert!((s - 0.6).abs() < 1e-15);
        assert!((p - 1.0 / 3.0).abs() < 1e-15);
        // rho = 0: s = q, p = 1
        let (p, s) = derive_ps(0.37, 0.0).unwrap();
        assert!((s - 0.37).abs() < 1e-15 && (p - 1.0).abs() < 1e-15);
        assert!(derive_ps(0.0, 0.5).is_err());
        assert!(derive_ps(1.0, 0.5).is_err());
        assert!(derive_ps(0.5, 1.0).is_err());
        assert!(derive_ps(0.5, -0.1).is_err());
    }

    #[test]
    fn params_roundtrip_identities() {
        for &(q, rho) in &[(0.3, 0.5), (0.01, 0.9), (0.8, 0.05)] {
            let m = ModelParams::new(50, q, rho, 4).unwrap();
            assert!((m.p() * m.s() - q).abs() / q < 1e-12);
            let back = m.s() * (1.0 - m.p()) / (1.0 - m.p() * m.s());
            assert!((back - rho).abs() < 1e-12 * rho.max(1.0));
            assert!(m.q() <= m.s() && m.s() <= 1.0);
            assert!(m.q() <= m.p() && m.p() <= 1.0);
        }
        assert!(ModelParams::new(1, 0.3, 0.5, 4).is_err());
        assert!(ModelParams::new(20_000, 0.3, 0.5, 4).is_err());
        assert!(ModelParams::new(50, 0.3, 0.5, 0).is_err());
    }

    #[test]
    fn from_ps_admits_the_degenerate_boundary() {
        let m = ModelParams::from_ps(10, 0.4, 1.0, 4).unwrap();
        assert_eq!(m.rho(), 1.0);
        assert_eq!(m.q(), 0.4);
        // s = 1 forces A = G and B = pi*(G) exactly
        let sample = sample_correlated(&m, 99);
        assert_eq!(sample.a, sample.g);
        assert_eq!(sample.b, sample.g.relabel(&sample.pi_star).unwrap());
        assert!(ModelParams::from_ps(10, 1.0, 1.0, 4).is_err());
    }

    #[test]
    fn samples_are_deterministic_and_nested() {
        let m = ModelParams::new(30, 0.3, 0.5, 4).unwrap();
        let s1 = sample_correlated(&m, 42);
        let s2 = sample_correlated(&m, 42);
        assert_eq!(s1.g, s2.g);
        assert_eq!(s1.a, s2.a);
        assert_eq!(s1.b, s2.b);
        assert_eq!(s1.pi_star.image(), s2.pi_star.image());
        assert_ne!(s1.g, sample_correlated(&m, 43).g);
        // A is a subgraph of G; every B edge is the image of a G edge
        assert!(s1.a.is_subgraph_of(&s1.g));
        let g_image = s1.g.relabel(&s1.pi_star).unwrap();
        assert!(s1.b.is_subgraph_of(&g_image));
    }

    #[test]
    fn marginals_and_covariance_match_the_model() {
        // modest trial count here; the acceptance suite reruns this at 1e5
        let m = ModelParams::new(12, 0.3, 0.5, 4).unwrap();
        let pairs = (12 * 11 / 2) as f64;
        let trials = 20_000u64;
        let (mut a_sum, mut b_sum, mut cov_sum, mut cov_sq) = (0f64, 0f64, 0f64, 0f64);
        for t in 0..trials {
            let s = sample_correlated(&m, 1000 + t);
            a_sum += s.a.edge_count() as f64;
            b_sum += s.b.edge_count() as f64;
            // align matched pairs through pi*
            let mut prod = 0f64;
            for u in 1..=12u32 {
                for v in u + 1..=12 {
                    let iu = s.pi_star.apply(u).unwrap();
                    let iv = s.pi_star.apply(v).unwrap();
                    let ae = s.a.contains_edge(u, v) as u8 as f64;
                    let be = s.b.contains_edge(iu, iv) as u8 as f64;
                    prod += (ae - 0.3) * (be - 0.3);
                }
            }
            cov_sum += prod / pairs;
            cov_sq += (prod / pairs) * (prod / pairs);
        }
        let nf = trials as f64;
        let a_freq = a_sum / (nf * pairs);
        let b_freq = b_sum / (nf * pairs);
        let se_edge = (0.3f64 * 0.7 / (nf * pairs)).sqrt();
        assert!((a_freq - 0.3).abs() < 4.0 * se_edge, "A freq {a_freq}");
        assert!((b_freq - 0.3).abs() < 4.0 * se_edge, "B freq {b_freq}");
        let cov = cov_sum / nf;
        let cov_se = ((cov_sq / nf - cov * cov) / nf).sqrt();
        let target = 0.5 * 0.3 * 0.7;
        assert!((cov - target).abs() < 4.0 * cov_se, "cov {cov} vs {target}");
    }

    #[test]
    fn unmatched_pairs_are_uncorrelated() {
        // pi* = identity; A_{12} against B_{13} should show no correlation
        let m = ModelParams::new(6, 0.3, 0.5, 4).unwrap();
        let id = Permutation::identity(6);
        let trials = 40_000u64;
        let (mut xy, mut x, mut y) = (0f64, 0f64, 0f64);
        for t in 0..trials {
            let s = sample_correlated_given_pi(&m, 7_000_000 + t, id.clone());
            let ae = s.a.contains_edge(1, 2) as u8 as f64;
            let be = s.b.contains_edge(1, 3) as u8 as f64;
            xy += ae * be;
            x += ae;
            y += be;
        }
        let nf = trials as f64;
        let cov = xy / nf - (x / nf) * (y / nf);
        let se = (0.3f64 * 0.7 * 0.3 * 0.7 / nf).sqrt();
        assert!(cov.abs() < 4.0 * se, "cross covariance {cov}");
    }

    #[test]
    fn truncation_accepts_immediately_when_nothing_is_bad() {
        // q d^6 >= 1 makes the per-edge log-weight nonnegative: no bad
        // subgraph exists and the first attempt is accepted
        let m = ModelParams::new(20, 0.5, 0.5, 2).unwrap();
        let out = sample_truncated(&m, 5, 4, 10).unwrap();
        assert_eq!(out.rejects, 0);
        // and the draw is deterministic in the seed
        let again = sample_truncated(&m, 5, 4, 10).unwrap();
        assert_eq!(out.sample.g, again.sample.g);
    }

    #[test]
    fn truncation_fails_cleanly_when_everything_is_bad() {
        // p = 1 makes G complete while q is small enough that one edge is
        // already bad; every attempt must be rejected
        let m = ModelParams::from_ps(10, 1.0, 1e-21, 2).unwrap();
        let err = sample_truncated(&m, 5, 4, 0).unwrap_err();
        match err {
            ModelError::TruncationExhausted {
                rejects,
                acceptance_estimate,
            } => {
                assert_eq!(rejects, 1);
                assert!(acceptance_estimate > 0.0 && acceptance_estimate < 1.0);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn truncated_samples_satisfy_the_event() {
        // q makes exactly the K4-or-denser shapes bad while p keeps the
        // chance of a K4 in G near 40%, so both branches get exercised
        let m = ModelParams::from_ps(12, 0.32, 1e-8, 2).unwrap();
        let pp = crate::trunc::PhiParams::from_model(&m).unwrap();
        let (mut accepts, mut saw_reject) = (0u32, false);
        for seed in 0..60u64 {
            match sample_truncated(&m, seed, 4, 50) {
                Ok(out) => {
                    assert!(crate::trunc::check_event_g(&out.sample.g, &pp, 4).unwrap());
                    accepts += 1;
                    saw_reject |= out.rejects > 0;
                }
                Err(ModelError::TruncationExhausted { .. }) => {}
                Err(other) => panic!("unexpected error {other:?}"),
            }
        }
        assert!(accepts > 30, "acceptance collapsed; test has no teeth");
        assert!(saw_reject, "parameters never rejected; test has no teeth");
    }

    #[test]
    fn null_pairs_are_independent_bernoulli() {
        let m = ModelParams::new(10, 0.25, 0.5, 4).unwrap();
        let pairs = (10 * 9 / 2) as f64;
        let trials = 20_000u64;
        let (mut a_sum, mut prod) = (0f64, 0f64);
        for t in 0..trials {
            let (a, b) = sample_null(&m, 31_000 + t);
            a_sum += a.edge_count() as f64;
            let ae = a.contains_edge(1, 2) as u8 as f64;
            let be = b.contains_edge(1, 2) as u8 as f64;
            prod += (ae - 0.25) * (be - 0.25);
        }
        let nf = trials as f64;
        let freq = a_sum / (nf * pairs);
        let se = (0.25f64 * 0.75 / (nf * pairs)).sqrt();
        assert!((freq - 0.25).abs() < 4.0 * se, "null freq {freq}");
        let cov = prod / nf;
        let cov_se = (0.25f64 * 0.75 * 0.25 * 0.75 / nf).sqrt();
        assert!(cov.abs() < 4.0 * cov_se, "null covariance {cov}");
    }
}

//! Isomorphism classes: canonical labelings, automorphism counts, class
//! enumeration, copy and embedding counts, and maximal edge density.
//!
//! Canonical form: each connected component is labeled to maximize its
//! upper-triangular adjacency bitstring (exact branch-and-bound with twin
//! pruning), components are sorted by (vertex count, edge count, edge list)
//! of their canonical forms, then relabeled into consecutive blocks. The
//! induced total order on classes is (v, e, canonical edge list).

use std::collections::{BTreeMap, HashMap, HashSet};

use num::bigint::BigUint;
use num::rational::Ratio;
use num::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::graph::LabeledGraph;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IsoError {
    #[error("{what} supports at most {limit}, got {got}")]
    CeilingExceeded {
        what: &'static str,
        limit: usize,
        got: usize,
    },
}

/// Hard ceiling for class enumeration by edge count. Counts grow fast
/// (k=8 already has 497 classes, k=9 has 1476); 8 is plenty for routine
/// use and 9 is needed only for the 10-vertex tree census.
pub const ENUM_EDGE_CEILING: usize = 9;

/// One isomorphism class, carried by its canonical representative on
/// labels 1..=v together with cached counts.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct IsoClass {
    canon: LabeledGraph,
    v_count: u32,
    e_count: u32,
    aut: u64,
}

impl IsoClass {
    pub fn canon(&self) -> &LabeledGraph {
        &self.canon
    }
    pub fn v_count(&self) -> u32 {
        self.v_count
    }
    pub fn e_count(&self) -> u32 {
        self.e_count
    }
    pub fn aut(&self) -> u64 {
        self.aut
    }
    pub fn is_tree(&self) -> bool {
        self.v_count >= 2 && self.e_count + 1 == self.v_count && self.canon.is_connected()
    }
}

// ---------------------------------------------------------------------------
// canonical labeling

// Max-bitstring labeling of one connected component given as adjacency
// bitmasks over local indices. Returns the canonical column string; column
// k holds the adjacency bits of label k+1 toward labels 1..k, most
// significant bit = label 1.
fn component_best_columns(adj: &[u64]) -> Vec<u64> {
    let m = adj.len();
    assert!(m <= 64, "component too large to canonicalize ({m} vertices)");
    struct Search<'a> {
        adj: &'a [u64],
        m: usize,
        placed: Vec<usize>,
        cols: Vec<u64>,
        used: u64,
        best: Option<Vec<u64>>,
    }
    impl Search<'_> {
        fn dfs(&mut self) {
            let depth = self.placed.len();
            if let Some(best) = &self.best {
                match self.cols[..depth].cmp(&best[..depth]) {
                    std::cmp::Ordering::Less => return,
                    std::cmp::Ordering::Equal | std::cmp::Ordering::Greater => {}
                }
            }
            if depth == self.m {
                if self.best.as_ref().map_or(true, |b| self.cols[..] > b[..]) {
                    self.best = Some(self.cols.clone());
                }
                return;
            }
            let mut cands: Vec<(u64, usize)> = Vec::new();
            let mut mx = 0u64;
            for x in 0..self.m {
                if self.used >> x & 1 == 1 {
                    continue;
                }
                let mut col = 0u64;
                for (j, &p) in self.placed.iter().enumerate() {
                    if self.adj[x] >> p & 1 == 1 {
                        col |= 1 << (depth - 1 - j);
                    }
                }
                if col > mx {
                    mx = col;
                }
                cands.push((col, x));
            }
            if let Some(best) = &self.best {
                if self.cols[..depth] == best[..depth] && mx < best[depth] {
                    return;
                }
            }
            // among the max-column candidates, skip twins of one already
            // chosen: swapping two vertices with identical adjacency away
            // from each other is an automorphism, so their subtrees tie
            let mut reps: Vec<usize> = Vec::new();
            'cand: for &(col, x) in &cands {
                if col != mx {
                    continue;
                }
                for &y in &reps {
                    let strip = !(1u64 << x) & !(1u64 << y);
                    if self.adj[x] & strip == self.adj[y] & strip {
                        continue 'cand;
                    }
                }
                reps.push(x);
            }
            for x in reps {
                self.placed.push(x);
                self.used |= 1 << x;
                self.cols.push(mx);
                self.dfs();
                self.placed.pop();
                self.used &= !(1 << x);
                self.cols.pop();
            }
        }
    }
    let mut s = Search {
        adj,
        m,
        placed: Vec::with_capacity(m),
        cols: Vec::with_capacity(m),
        used: 0,
        best: None,
    };
    s.dfs();
    s.best.expect("nonempty component always has a labeling")
}

fn columns_to_edges(cols: &[u64]) -> Vec<(u32, u32)> {
    let mut edges = Vec::new();
    for (k, &col) in cols.iter().enumerate() {
        for j in 0..k {
            if col >> (k - 1 - j) & 1 == 1 {
                edges.push((j as u32 + 1, k as u32 + 1));
            }
        }
    }
    edges
}

fn local_adjacency(comp: &LabeledGraph) -> Vec<u64> {
    let verts: Vec<u32> = comp.vertex_set().into_iter().collect();
    let idx: HashMap<u32, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut adj = vec![0u64; verts.len()];
    for &(u, v) in comp.edges() {
        let (a, b) = (idx[&u], idx[&v]);
        adj[a] |= 1 << b;
        adj[b] |= 1 << a;
    }
    adj
}

// Canonical forms of the connected components, sorted, with multiplicities.
fn canonical_components(s: &LabeledGraph) -> Vec<(LabeledGraph, u32)> {
    let mut canons: Vec<LabeledGraph> = s
        .components()
        .iter()
        .map(|comp| {
            let cols = component_best_columns(&local_adjacency(comp));
            LabeledGraph::from_normalized(columns_to_edges(&cols))
        })
        .collect();
    canons.sort_by_key(|c| (c.vertex_count(), c.edge_count(), c.clone()));
    let mut grouped: Vec<(LabeledGraph, u32)> = Vec::new();
    for c in canons {
        match grouped.last_mut() {
            Some((prev, mult)) if *prev == c => *mult += 1,
            _ => grouped.push((c, 1)),
        }
    }
    grouped
}

/// Canonical representative on labels 1..=|V|; isomorphic inputs map to the
/// same output. Cheaper than [`canonical_form`] (no automorphism count).
pub fn canonical_labeling(s: &LabeledGraph) -> LabeledGraph {
    let mut edges = Vec::with_capacity(s.edge_count());
    let mut offset = 0u32;
    for (canon, mult) in canonical_components(s) {
        let v = canon.vertex_count() as u32;
        for _ in 0..mult {
            edges.extend(canon.edges().iter().map(|&(a, b)| (a + offset, b + offset)));
            offset += v;
        }
    }
    LabeledGraph::from_normalized(edges)
}

// Automorphism count of a connected graph on labels 1..=m by backtracking
// over adjacency-preserving bijections.
fn connected_aut(adj: &[u64]) -> u64 {
    let m = adj.len();
    let deg: Vec<u32> = adj.iter().map(|a| a.count_ones()).collect();
    fn dfs(adj: &[u64], deg: &[u32], image: &mut Vec<usize>, used: &mut u64) -> u64 {
        let i = image.len();
        if i == adj.len() {
            return 1;
        }
        let mut total = 0;
        'cand: for x in 0..adj.len() {
            if *used >> x & 1 == 1 || deg[x] != deg[i] {
                continue;
            }
            for (j, &y) in image.iter().enumerate() {
                if (adj[i] >> j & 1) != (adj[x] >> y & 1) {
                    continue 'cand;
                }
            }
            image.push(x);
            *used |= 1 << x;
            total += dfs(adj, deg, image, used);
            image.pop();
            *used &= !(1 << x);
        }
        total
    }
    dfs(adj, &deg, &mut Vec::with_capacity(m), &mut 0)
}

fn factorial_u64(n: u32) -> u64 {
    (1..=n as u64).product::<u64>().max(1)
}

/// Canonical form with cached vertex/edge counts and the exact automorphism
/// count. Aut of a disconnected graph multiplies the per-component counts
/// by the factorials of the component-class multiplicities.
pub fn canonical_form(s: &LabeledGraph) -> IsoClass {
    let mut edges = Vec::with_capacity(s.edge_count());
    let mut offset = 0u32;
    let mut aut: u64 = 1;
    for (canon, mult) in canonical_components(s) {
        let v = canon.vertex_count() as u32;
        let comp_aut = connected_aut(&local_adjacency(&canon));
        aut *= comp_aut.pow(mult) * factorial_u64(mult);
        for _ in 0..mult {
            edges.extend(canon.edges().iter().map(|&(a, b)| (a + offset, b + offset)));
            offset += v;
        }
    }
    let canon = LabeledGraph::from_normalized(edges);
    IsoClass {
        v_count: canon.vertex_count() as u32,
        e_count: canon.edge_count() as u32,
        aut,
        canon,
    }
}

// ---------------------------------------------------------------------------
// class enumeration

/// Enumerates every isomorphism class with at most `k_max` edges (and no
/// isolated vertices), keyed by edge count, in deterministic order.
/// Edge count 0 is the single empty class. `filter` keeps only matching
/// classes in the output but does not prune the generation itself.
pub fn enumerate_classes(
    k_max: usize,
    filter: Option<&dyn Fn(&IsoClass) -> bool>,
) -> Result<BTreeMap<u32, Vec<IsoClass>>, IsoError> {
    if k_max > ENUM_EDGE_CEILING {
        return Err(IsoError::CeilingExceeded {
            what: "enumerate_classes edge count",
            limit: ENUM_EDGE_CEILING,
            got: k_max,
        });
    }
    let mut out: BTreeMap<u32, Vec<IsoClass>> = BTreeMap::new();
    let mut level: Vec<LabeledGraph> = vec![LabeledGraph::empty()];
    for k in 0..=k_max {
        let mut classes: Vec<IsoClass> = level.iter().map(canonical_form).collect();
        classes.sort();
        if let Some(f) = filter {
            classes.retain(|c| f(c));
        }
        out.insert(k as u32, classes);
        if k == k_max {
            break;
        }
        // children: add one edge in every way that keeps the graph
        // edge-induced: between existing vertices, to one new vertex,
        // or as a fresh disjoint edge
        let mut next: HashSet<LabeledGraph> = HashSet::new();
        for g in &level {
            let verts: Vec<u32> = g.vertex_set().into_iter().collect();
            let v = verts.len() as u32;
            let mut grown = |edge: (u32, u32)| {
                let mut es: Vec<(u32, u32)> = g.edges().to_vec();
                es.push(edge);
                next.insert(canonical_labeling(&LabeledGraph::from_normalized(es)));
            };
            for i in 0..verts.len() {
                for j in i + 1..verts.len() {
                    if !g.contains_edge(verts[i], verts[j]) {
                        grown((verts[i], verts[j]));
                    }
                }
                grown((verts[i].min(v + 1), verts[i].max(v + 1)));
            }
            grown((v + 1, v + 2));
        }
        let mut next: Vec<LabeledGraph> = next.into_iter().collect();
        next.sort();
        level = next;
    }
    Ok(out)
}

/// Unlabeled trees by vertex count, 2..=v_max, generated by leaf
/// attachment with canonical dedup.
pub fn enumerate_trees(v_max: usize) -> Result<BTreeMap<u32, Vec<IsoClass>>, IsoError> {
    const TREE_VERTEX_CEILING: usize = 12;
    if v_max > TREE_VERTEX_CEILING {
        return Err(IsoError::CeilingExceeded {
            what: "enumerate_trees vertex count",
            limit: TREE_VERTEX_CEILING,
            got: v_max,
        });
    }
    let mut out = BTreeMap::new();
    if v_max < 2 {
        return Ok(out);
    }
    let mut level: Vec<LabeledGraph> =
        vec![LabeledGraph::from_edges([(1, 2)]).expect("valid edge")];
    for v in 2..=v_max {
        let mut classes: Vec<IsoClass> = level.iter().map(canonical_form).collect();
        classes.sort();
        out.insert(v as u32, classes);
        if v == v_max {
            break;
        }
        let mut next: HashSet<LabeledGraph> = HashSet::new();
        for t in &level {
            for leaf_anchor in 1..=v as u32 {
                let mut es = t.edges().to_vec();
                es.push((leaf_anchor, v as u32 + 1));
                next.insert(canonical_labeling(&LabeledGraph::from_normalized(es)));
            }
        }
        let mut next: Vec<LabeledGraph> = next.into_iter().collect();
        next.sort();
        level = next;
    }
    Ok(out)
}

/// Unlabeled-tree counts for v = 1..=v_max. The single-vertex tree is not
/// representable as an edge-induced graph; its count (1) is included by
/// convention so the vector lines up with the standard sequence.
pub fn tree_census(v_max: usize) -> Result<Vec<u64>, IsoError> {
    let trees = enumerate_trees(v_max)?;
    let mut counts = Vec::with_capacity(v_max);
    for v in 1..=v_max {
        if v == 1 {
            counts.push(1);
        } else {
            counts.push(trees.get(&(v as u32)).map_or(0, |c| c.len()) as u64);
        }
    }
    Ok(counts)
}

// ---------------------------------------------------------------------------
// counting

/// Number of labeled copies of the class inside the complete graph on
/// [n]: n(n-1)...(n-v+1)/aut, exactly. Zero when n < v.
pub fn labeled_copy_count(c: &IsoClass, n: u64) -> BigUint {
    let v = c.v_count as u64;
    if n < v {
        return BigUint::zero();
    }
    let mut falling = BigUint::one();
    for i in 0..v {
        falling *= BigUint::from(n - i);
    }
    let aut = BigUint::from(c.aut);
    debug_assert!((&falling % &aut).is_zero());
    falling / aut
}

/// Number of subgraphs of `s` (edge subsets, isolated vertices dropped)
/// isomorphic to `h`: injective edge-preserving vertex maps divided by
/// aut(h).
pub fn count_embeddings(h: &IsoClass, s: &LabeledGraph) -> u64 {
    if h.e_count == 0 {
        return 1;
    }
    if h.e_count as usize > s.edge_count() {
        return 0;
    }
    let sverts: Vec<u32> = s.vertex_set().into_iter().collect();
    let mut neighbors: HashMap<u32, Vec<u32>> = sverts.iter().map(|&v| (v, vec![])).collect();
    for &(u, v) in s.edges() {
        neighbors.get_mut(&u).unwrap().push(v);
        neighbors.get_mut(&v).unwrap().push(u);
    }
    for nb in neighbors.values_mut() {
        nb.sort_unstable();
    }

    // order pattern vertices so each one after a component root has a
    // previously placed neighbor
    let hverts: Vec<u32> = h.canon.vertex_set().into_iter().collect();
    let hidx: HashMap<u32, usize> = hverts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let m = hverts.len();
    let mut hadj = vec![Vec::new(); m];
    for &(u, v) in h.canon.edges() {
        hadj[hidx[&u]].push(hidx[&v]);
        hadj[hidx[&v]].push(hidx[&u]);
    }
    let mut order: Vec<usize> = Vec::with_capacity(m);
    let mut seen = vec![false; m];
    loop {
        let root = match (0..m).filter(|&i| !seen[i]).max_by_key(|&i| hadj[i].len()) {
            Some(r) => r,
            None => break,
        };
        seen[root] = true;
        order.push(root);
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            for &y in &hadj[x] {
                if !seen[y] {
                    seen[y] = true;
                    order.push(y);
                    queue.push_back(y);
                }
            }
        }
    }
    // anchor[t] = position in `order` of a placed neighbor of order[t]
    let anchor: Vec<Option<usize>> = order
        .iter()
        .enumerate()
        .map(|(t, &hv)| {
            order[..t]
                .iter()
                .position(|&prev| hadj[hv].contains(&prev))
        })
        .collect();
    let hdeg: Vec<usize> = (0..m).map(|i| hadj[i].len()).collect();

    fn dfs(
        t: usize,
        order: &[usize],
        anchor: &[Option<usize>],
        hadj: &[Vec<usize>],
        hdeg: &[usize],
        neighbors: &HashMap<u32, Vec<u32>>,
        sverts: &[u32],
        image: &mut Vec<u32>,
    ) -> u64 {
        if t == order.len() {
            return 1;
        }
        let hv = order[t];
        let mut total = 0;
        let candidates: Vec<u32> = match anchor[t] {
            Some(a) => neighbors[&image[a]].clone(),
            None => sverts.to_vec(),
        };
        'cand: for cand in candidates {
            if image.contains(&cand) || neighbors[&cand].len() < hdeg[hv] {
                continue;
            }
            for (tp, &hprev) in order[..t].iter().enumerate() {
                if hadj[hv].contains(&hprev)
                    && neighbors[&image[tp]].binary_search(&cand).is_err()
                {
                    continue 'cand;
                }
            }
            image.push(cand);
            total += dfs(t + 1, order, anchor, hadj, hdeg, neighbors, sverts, image);
            image.pop();
        }
        total
    }
    let maps = dfs(
        0,
        &order,
        &anchor,
        &hadj,
        &hdeg,
        &neighbors,
        &sverts,
        &mut Vec::with_capacity(m),
    );
    debug_assert_eq!(maps % h.aut, 0);
    maps / h.aut
}

/// Max over nonempty subgraphs of |E|/|V|, exact. Exhaustive over vertex
/// subsets (sufficient: for a fixed vertex set the edge-maximal subgraph is
/// densest, and isolated vertices only hurt). Empty class: 0 by convention.
pub fn max_edge_density(c: &IsoClass) -> Ratio<u64> {
    let v = c.v_count as usize;
    assert!(v <= 16, "density scan supports at most 16 vertices");
    if c.e_count == 0 {
        return Ratio::zero();
    }
    let verts: Vec<u32> = c.canon.vertex_set().into_iter().collect();
    let mut best = Ratio::zero();
    for mask in 1u32..(1 << v) {
        let mut e = 0u64;
        for &(a, b) in c.canon.edges() {
            let (ia, ib) = (
                verts.binary_search(&a).unwrap(),
                verts.binary_search(&b).unwrap(),
            );
            if mask >> ia & 1 == 1 && mask >> ib & 1 == 1 {
                e += 1;
            }
        }
        if e == 0 {
            continue;
        }
        let density = Ratio::new(e, mask.count_ones() as u64);
        if density > best {
            best = density;
        }
    }
    best
}

// ---------------------------------------------------------------------------
// independent counting oracles

/// Counting routines that share no code with the generators above; used to
/// cross-check enumeration results.
pub mod census_oracles {
    use super::*;
    use num::rational::BigRational;
    use num::BigInt;

    /// Rooted and free unlabeled tree counts by the classic recurrences:
    /// r(n+1) = (1/n) sum_{k=1}^{n} (sum_{d|k} d r(d)) r(n+1-k);
    /// free trees via t(x) = r(x) - (r(x)^2 - r(x^2)) / 2.
    /// Returns free-tree counts for v = 1..=v_max.
    pub fn tree_counts_recurrence(v_max: usize) -> Vec<u64> {
        let mut r = vec![0u64; v_max + 1];
        if v_max >= 1 {
            r[1] = 1;
        }
        for n in 1..v_max {
            let mut acc = 0u64;
            for k in 1..=n {
                let mut dsum = 0u64;
                for d in 1..=k {
                    if k % d == 0 {
                        dsum += d as u64 * r[d];
                    }
                }
                acc += dsum * r[n + 1 - k];
            }
            assert_eq!(acc % n as u64, 0);
            r[n + 1] = acc / n as u64;
        }
        let mut t = vec![0u64; v_max + 1];
        for n in 1..=v_max {
            let mut conv = 0u64;
            for i in 1..n {
                conv += r[i] * r[n - i];
            }
            if n % 2 == 0 {
                conv -= r[n / 2];
            }
            assert_eq!(conv % 2, 0);
            t[n] = r[n] - conv / 2;
        }
        t[1..].to_vec()
    }

    fn partitions(m: usize) -> Vec<Vec<usize>> {
        fn go(rem: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if rem == 0 {
                out.push(cur.clone());
                return;
            }
            for part in (1..=rem.min(max)).rev() {
                cur.push(part);
                go(rem - part, part, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        go(m, m, &mut Vec::new(), &mut out);
        out
    }

    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }

    /// Number of isomorphism classes with exactly k edges and no isolated
    /// vertices, via the cycle index of the pair group of S_{2k}: such
    /// classes correspond one-to-one to unlabeled graphs on 2k vertex
    /// slots with k edges (pad with isolated slots).
    pub fn class_count_cycle_index(k: usize) -> BigUint {
        if k == 0 {
            return BigUint::one();
        }
        let m = 2 * k;
        let mut total = BigRational::zero();
        for lam in partitions(m) {
            // multiset of edge-orbit lengths under a permutation of type lam
            let mut orbit_lengths: Vec<usize> = Vec::new();
            for (i, &a) in lam.iter().enumerate() {
                for &b in &lam[i + 1..] {
                    let g = gcd(a, b);
                    for _ in 0..g {
                        orbit_lengths.push(a / g * b);
                    }
                }
                if a % 2 == 1 {
                    for _ in 0..(a - 1) / 2 {
                        orbit_lengths.push(a);
                    }
                } else {
                    for _ in 0..a / 2 - 1 {
                        orbit_lengths.push(a);
                    }
                    orbit_lengths.push(a / 2);
                }
            }
            // [x^k] of prod (1 + x^L)
            let mut poly = vec![BigUint::zero(); k + 1];
            poly[0] = BigUint::one();
            for l in orbit_lengths {
                if l > k {
                    continue;
                }
                for deg in (l..=k).rev() {
                    let add = poly[deg - l].clone();
                    poly[deg] += add;
                }
            }
            // z_lam = prod a^{mult_a} mult_a!
            let mut z = BigUint::one();
            let mut run = 1usize;
            for (i, &a) in lam.iter().enumerate() {
                z *= BigUint::from(a);
                if i + 1 < lam.len() && lam[i + 1] == a {
                    run += 1;
                } else {
                    for f in 1..=run {
                        z *= BigUint::from(f);
                    }
                    run = 1;
                }
            }
            total += BigRational::new(
                BigInt::from(poly[k].clone()),
                BigInt::from(z),
            );
        }
        assert!(total.is_integer());
        total.to_integer().try_into().expect("count is nonnegative")
    }

    /// Exhaustive class count: every k-subset of the edges of K_{2k},
    /// deduplicated by canonical labeling. Feasible for k <= 4.
    pub fn class_count_exhaustive(k: usize) -> u64 {
        assert!(k <= 4, "exhaustive census only feasible for k <= 4");
        if k == 0 {
            return 1;
        }
        let m = 2 * k as u32;
        let mut pairs = Vec::new();
        for u in 1..=m {
            for v in u + 1..=m {
                pairs.push((u, v));
            }
        }
        let mut seen: HashSet<LabeledGraph> = HashSet::new();
        let mut pick = vec![0usize; k];
        fn go(
            pairs: &[(u32, u32)],
            pick: &mut Vec<usize>,
            depth: usize,
            start: usize,
            seen: &mut HashSet<LabeledGraph>,
        ) {
            if depth == pick.len() {
                let edges: Vec<(u32, u32)> = pick.iter().map(|&i| pairs[i]).collect();
                seen.insert(canonical_labeling(&LabeledGraph::from_normalized(edges)));
                return;
            }
            for i in start..pairs.len() {
                pick[depth] = i;
                go(pairs, pick, depth + 1, i + 1, seen);
            }
        }
        go(&pairs, &mut pick, 0, 0, &mut seen);
        seen.len() as u64
    }
}

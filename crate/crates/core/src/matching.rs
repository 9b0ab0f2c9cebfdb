//! Minimum-weight perfect matching on complete graphs.
//!
//! [`exact_min_perfect_matching`] is a primal-dual blossom algorithm,
//! O(N^3), working on integer weights. Real weights are mapped to
//! `C - round(w * scale)` with `C` above every scaled weight, which turns
//! the problem into a maximum-weight matching with strictly positive
//! weights; on a complete graph with an even vertex count such a matching is
//! always perfect. The scale puts the largest weight near 2^40, so the
//! rounding error per edge is about `max_weight * 1e-12`.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symmetric non-negative weights on the complete graph over `0..n`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedCompleteGraph {
    n: usize,
    w: Vec<f64>,
}

impl WeightedCompleteGraph {
    /// All-zero graph.
    pub fn new(n: usize) -> Self {
        WeightedCompleteGraph { n, w: vec![0.0; n * n] }
    }

    /// Builds the graph from `f(i, j)` evaluated for `i < j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut g = Self::new(n);
        for i in 0..n {
            for j in i + 1..n {
                g.set(i, j, f(i, j))?;
            }
        }
        Ok(g)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut g = Self::new(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Parameter(format!("row {i} has {} weights, expected {n}", row.len())));
            }
            if row[i] != 0.0 {
                return Err(Error::Parameter(format!("diagonal weight ({i},{i}) must be 0")));
            }
            for j in 0..n {
                if row[j] != rows[j][i] {
                    return Err(Error::Parameter(format!("weights are asymmetric at ({i},{j})")));
                }
            }
            for j in i + 1..n {
                g.set(i, j, row[j])?;
            }
        }
        Ok(g)
    }

    pub fn set(&mut self, i: usize, j: usize, weight: f64) -> Result<()> {
        if i == j || i >= self.n || j >= self.n {
            return Err(Error::Parameter(format!("no edge ({i},{j}) in a graph on {} vertices", self.n)));
        }
        if !weight.is_finite() || weight < 0.0 {
            return Err(Error::Parameter(format!("edge weight {weight} is not a finite non-negative number")));
        }
        self.w[i * self.n + j] = weight;
        self.w[j * self.n + i] = weight;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.n + j]
    }

    fn max_weight(&self) -> f64 {
        self.w.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Matching {
    /// Pairs `(i, j)` with `i < j`, sorted.
    pub pairs: Vec<(usize, usize)>,
    pub total_weight: f64,
}

impl Matching {
    fn from_pairs(g: &WeightedCompleteGraph, mut pairs: Vec<(usize, usize)>) -> Self {
        for p in pairs.iter_mut() {
            if p.0 > p.1 {
                *p = (p.1, p.0);
            }
        }
        pairs.sort_unstable();
        let total_weight = pairs.iter().map(|&(i, j)| g.weight(i, j)).sum();
        Matching { pairs, total_weight }
    }

    /// Partner of every vertex, `None` if unmatched.
    pub fn mates(&self, n: usize) -> Vec<Option<usize>> {
        let mut m = vec![None; n];
        for &(i, j) in &self.pairs {
            m[i] = Some(j);
            m[j] = Some(i);
        }
        m
    }

    pub fn is_perfect(&self, n: usize) -> bool {
        self.pairs.len() * 2 == n && self.mates(n).iter().all(Option::is_some)
    }
}

fn ensure_even(g: &WeightedCompleteGraph) -> Result<()> {
    if g.len() % 2 == 1 {
        Err(Error::OddCardinality(g.len()))
    } else {
        Ok(())
    }
}

/// Minimum-weight perfect matching by the blossom algorithm.
pub fn exact_min_perfect_matching(g: &WeightedCompleteGraph) -> Result<Matching> {
    ensure_even(g)?;
    let n = g.len();
    if n == 0 {
        return Ok(Matching::default());
    }
    let max_w = g.max_weight();
    if max_w == 0.0 {
        return Ok(Matching::from_pairs(g, (0..n / 2).map(|k| (2 * k, 2 * k + 1)).collect()));
    }
    let scale = (1u64 << 40) as f64 / max_w;
    let ceiling = (max_w * scale).round() as i64 + 1;
    let stride = n + 1;
    let mut w = vec![0i64; stride * stride];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                w[(i + 1) * stride + (j + 1)] = ceiling - (g.weight(i, j) * scale).round() as i64;
            }
        }
    }
    let mut solver = Blossom::new(n, &w);
    let mate = solver.solve();
    let mut pairs = Vec::with_capacity(n / 2);
    for u in 1..=n {
        let v = mate[u];
        if v == 0 {
            return Err(Error::Internal(format!("blossom left vertex {} unmatched", u - 1)));
        }
        if u < v {
            pairs.push((u - 1, v - 1));
        }
    }
    Ok(Matching::from_pairs(g, pairs))
}

type Edge = (u32, u32);
const NO_EDGE: Edge = (0, 0);

/// Maximum-weight matching on a complete graph with positive integer
/// weights. Vertices are `1..=n`, blossoms `n+1..=2n`, 0 is a sentinel.
struct Blossom<'a> {
    n: usize,
    nx: usize,
    w: &'a [i64],
    /// Representative edge from blossom `b` to every other node.
    brow: Vec<Edge>,
    lab: Vec<i64>,
    mate: Vec<usize>,
    slack: Vec<usize>,
    st: Vec<usize>,
    pa: Vec<usize>,
    /// For blossom `b`, the direct child of `b` containing vertex `x`.
    flower_from: Vec<u32>,
    label: Vec<i8>,
    vis: Vec<u32>,
    stamp: u32,
    flower: Vec<Vec<usize>>,
    queue: VecDeque<usize>,
}

const FREE: i8 = -1;
const OUTER: i8 = 0;
const INNER: i8 = 1;

impl<'a> Blossom<'a> {
    fn new(n: usize, w: &'a [i64]) -> Self {
        let size = 2 * n + 1;
        Blossom {
            n,
            nx: n,
            w,
            brow: vec![NO_EDGE; n * size],
            lab: vec![0; size],
            mate: vec![0; size],
            slack: vec![0; size],
            st: vec![0; size],
            pa: vec![0; size],
            flower_from: vec![0; n * (n + 1)],
            label: vec![FREE; size],
            vis: vec![0; size],
            stamp: 0,
            flower: vec![Vec::new(); size],
            queue: VecDeque::new(),
        }
    }

    #[inline]
    fn get(&self, a: usize, b: usize) -> Edge {
        let size = 2 * self.n + 1;
        if a > self.n {
            self.brow[(a - self.n - 1) * size + b]
        } else if b > self.n {
            let e = self.brow[(b - self.n - 1) * size + a];
            (e.1, e.0)
        } else if a == b {
            NO_EDGE
        } else {
            (a as u32, b as u32)
        }
    }

    #[inline]
    fn set(&mut self, a: usize, b: usize, e: Edge) {
        let size = 2 * self.n + 1;
        if a > self.n {
            self.brow[(a - self.n - 1) * size + b] = e;
        }
        if b > self.n {
            self.brow[(b - self.n - 1) * size + a] = (e.1, e.0);
        }
    }

    #[inline]
    fn has_edge(e: Edge) -> bool {
        e.0 != 0
    }

    #[inline]
    fn delta(&self, e: Edge) -> i64 {
        let (u, v) = (e.0 as usize, e.1 as usize);
        self.lab[u] + self.lab[v] - 2 * self.w[u * (self.n + 1) + v]
    }

    #[inline]
    fn ff(&self, b: usize, x: usize) -> usize {
        if b > self.n {
            self.flower_from[(b - self.n - 1) * (self.n + 1) + x] as usize
        } else if b == x {
            b
        } else {
            0
        }
    }

    #[inline]
    fn set_ff(&mut self, b: usize, x: usize, v: usize) {
        self.flower_from[(b - self.n - 1) * (self.n + 1) + x] = v as u32;
    }

    fn update_slack(&mut self, u: usize, x: usize) {
        let s = self.slack[x];
        if s == 0 || self.delta(self.get(u, x)) < self.delta(self.get(s, x)) {
            self.slack[x] = u;
        }
    }

    fn set_slack(&mut self, x: usize) {
        self.slack[x] = 0;
        for u in 1..=self.n {
            let e = self.get(u, x);
            if Self::has_edge(e) && self.st[u] != x && self.label[self.st[u]] == OUTER {
                self.update_slack(u, x);
            }
        }
    }

    fn q_push(&mut self, x: usize) {
        if x <= self.n {
            self.queue.push_back(x);
        } else {
            for i in 0..self.flower[x].len() {
                let y = self.flower[x][i];
                self.q_push(y);
            }
        }
    }

    fn set_st(&mut self, x: usize, b: usize) {
        self.st[x] = b;
        if x > self.n {
            for i in 0..self.flower[x].len() {
                let y = self.flower[x][i];
                self.set_st(y, b);
            }
        }
    }

    fn get_pr(&mut self, b: usize, xr: usize) -> usize {
        let pr = self.flower[b].iter().position(|&x| x == xr).expect("child of blossom");
        if pr % 2 == 1 {
            self.flower[b][1..].reverse();
            self.flower[b].len() - pr
        } else {
            pr
        }
    }

    fn set_match(&mut self, u: usize, v: usize) {
        let e = self.get(u, v);
        self.mate[u] = e.1 as usize;
        if u > self.n {
            let xr = self.ff(u, e.0 as usize);
            let pr = self.get_pr(u, xr);
            for i in 0..pr {
                let (a, b) = (self.flower[u][i], self.flower[u][i ^ 1]);
                self.set_match(a, b);
            }
            self.set_match(xr, v);
            self.flower[u].rotate_left(pr);
        }
    }

    fn augment(&mut self, mut u: usize, mut v: usize) {
        loop {
            let xnv = self.st[self.mate[u]];
            self.set_match(u, v);
            if xnv == 0 {
                return;
            }
            let next = self.st[self.pa[xnv]];
            self.set_match(xnv, next);
            u = next;
            v = xnv;
        }
    }

    fn get_lca(&mut self, mut u: usize, mut v: usize) -> usize {
        self.stamp += 1;
        while u != 0 || v != 0 {
            if u != 0 {
                if self.vis[u] == self.stamp {
                    return u;
                }
                self.vis[u] = self.stamp;
                u = self.st[self.mate[u]];
                if u != 0 {
                    u = self.st[self.pa[u]];
                }
            }
            std::mem::swap(&mut u, &mut v);
        }
        0
    }

    fn add_blossom(&mut self, u: usize, lca: usize, v: usize) {
        let mut b = self.n + 1;
        while b <= self.nx && self.st[b] != 0 {
            b += 1;
        }
        if b > self.nx {
            self.nx += 1;
        }
        self.lab[b] = 0;
        self.label[b] = OUTER;
        self.mate[b] = self.mate[lca];
        let mut flower = vec![lca];
        let mut x = u;
        while x != lca {
            let y = self.st[self.mate[x]];
            flower.push(x);
            flower.push(y);
            self.q_push(y);
            x = self.st[self.pa[y]];
        }
        flower[1..].reverse();
        let mut x = v;
        while x != lca {
            let y = self.st[self.mate[x]];
            flower.push(x);
            flower.push(y);
            self.q_push(y);
            x = self.st[self.pa[y]];
        }
        self.flower[b] = flower;
        self.set_st(b, b);
        for x in 1..=self.nx {
            self.set(b, x, NO_EDGE);
        }
        for x in 1..=self.n {
            self.set_ff(b, x, 0);
        }
        for i in 0..self.flower[b].len() {
            let xs = self.flower[b][i];
            for x in 1..=self.nx {
                let cur = self.get(b, x);
                let cand = self.get(xs, x);
                if !Self::has_edge(cur) || (Self::has_edge(cand) && self.delta(cand) < self.delta(cur)) {
                    self.set(b, x, cand);
                }
            }
            for x in 1..=self.n {
                if self.ff(xs, x) != 0 {
                    self.set_ff(b, x, xs);
                }
            }
        }
        self.set_slack(b);
    }

    fn expand_blossom(&mut self, b: usize) {
        for i in 0..self.flower[b].len() {
            let c = self.flower[b][i];
            self.set_st(c, c);
        }
        let xr = self.ff(b, self.get(b, self.pa[b]).0 as usize);
        let pr = self.get_pr(b, xr);
        let mut i = 0;
        while i < pr {
            let xs = self.flower[b][i];
            let xns = self.flower[b][i + 1];
            self.pa[xs] = self.get(xns, xs).0 as usize;
            self.label[xs] = INNER;
            self.label[xns] = OUTER;
            self.slack[xs] = 0;
            self.set_slack(xns);
            self.q_push(xns);
            i += 2;
        }
        self.label[xr] = INNER;
        self.pa[xr] = self.pa[b];
        for i in pr + 1..self.flower[b].len() {
            let xs = self.flower[b][i];
            self.label[xs] = FREE;
            self.set_slack(xs);
        }
        self.st[b] = 0;
    }

    fn on_found_edge(&mut self, e: Edge) -> bool {
        let u = self.st[e.0 as usize];
        let v = self.st[e.1 as usize];
        if self.label[v] == FREE {
            self.pa[v] = e.0 as usize;
            self.label[v] = INNER;
            let nu = self.st[self.mate[v]];
            self.slack[v] = 0;
            self.slack[nu] = 0;
            self.label[nu] = OUTER;
            self.q_push(nu);
        } else if self.label[v] == OUTER {
            let lca = self.get_lca(u, v);
            if lca == 0 {
                self.augment(u, v);
                self.augment(v, u);
                return true;
            }
            self.add_blossom(u, lca, v);
        }
        false
    }

    /// One augmentation phase of the perfect-matching variant: vertex duals
    /// may become negative, so the search only stops once every vertex is
    /// matched. Returns false when nothing was left to match.
    fn phase(&mut self) -> bool {
        for x in 1..=self.nx {
            self.label[x] = FREE;
            self.slack[x] = 0;
        }
        self.queue.clear();
        for x in 1..=self.nx {
            if self.st[x] == x && self.mate[x] == 0 {
                self.pa[x] = 0;
                self.label[x] = OUTER;
                self.q_push(x);
            }
        }
        if self.queue.is_empty() {
            return false;
        }
        loop {
            while let Some(u) = self.queue.pop_front() {
                if self.label[self.st[u]] == INNER {
                    continue;
                }
                for v in 1..=self.n {
                    if v != u && self.st[u] != self.st[v] {
                        let e = (u as u32, v as u32);
                        if self.delta(e) == 0 {
                            if self.on_found_edge(e) {
                                return true;
                            }
                        } else {
                            let sv = self.st[v];
                            self.update_slack(u, sv);
                        }
                    }
                }
            }
            let mut d = i64::MAX;
            for b in self.n + 1..=self.nx {
                if self.st[b] == b && self.label[b] == INNER {
                    d = d.min(self.lab[b] / 2);
                }
            }
            for x in 1..=self.nx {
                if self.st[x] == x && self.slack[x] != 0 {
                    let sd = self.delta(self.get(self.slack[x], x));
                    if self.label[x] == FREE {
                        d = d.min(sd);
                    } else if self.label[x] == OUTER {
                        d = d.min(sd / 2);
                    }
                }
            }
            if d == i64::MAX {
                return false;
            }
            for u in 1..=self.n {
                match self.label[self.st[u]] {
                    OUTER => self.lab[u] -= d,
                    INNER => self.lab[u] += d,
                    _ => {}
                }
            }
            for b in self.n + 1..=self.nx {
                if self.st[b] == b {
                    match self.label[b] {
                        OUTER => self.lab[b] += 2 * d,
                        INNER => self.lab[b] -= 2 * d,
                        _ => {}
                    }
                }
            }
            self.queue.clear();
            for x in 1..=self.nx {
                let s = self.slack[x];
                if self.st[x] == x && s != 0 && self.st[s] != x {
                    let e = self.get(s, x);
                    if self.delta(e) == 0 && self.on_found_edge(e) {
                        return true;
                    }
                }
            }
            for b in self.n + 1..=self.nx {
                if self.st[b] == b && self.label[b] == INNER && self.lab[b] == 0 {
                    self.expand_blossom(b);
                }
            }
        }
    }

    /// Jump start: tighten every vertex dual against its best partner and
    /// match greedily along tight edges. Duals stay even so every
    /// outer-outer slack is even and halving it is exact.
    fn warm_start(&mut self) {
        let n = self.n;
        let stride = n + 1;
        for u in 1..=n {
            let row = &self.w[u * stride..(u + 1) * stride];
            let best = (1..=n).filter(|&v| v != u).map(|v| row[v]).max().unwrap_or(0);
            self.lab[u] = best + (best & 1);
        }
        for u in 1..=n {
            if self.mate[u] != 0 {
                continue;
            }
            let row = &self.w[u * stride..(u + 1) * stride];
            let mut best = (i64::MIN, 0);
            for v in 1..=n {
                if v != u {
                    let need = 2 * row[v] - self.lab[v];
                    if need > best.0 || (need == best.0 && self.mate[best.1] != 0 && self.mate[v] == 0) {
                        best = (need, v);
                    }
                }
            }
            self.lab[u] = best.0;
            let v = best.1;
            if self.mate[v] == 0 {
                self.mate[u] = v;
                self.mate[v] = u;
            }
        }
    }

    fn solve(&mut self) -> Vec<usize> {
        let n = self.n;
        for u in 0..=n {
            self.st[u] = u;
        }
        self.warm_start();
        while self.phase() {}
        self.mate[..=n].to_vec()
    }
}

/// Greedy matching processed bucket by bucket. Bucket 0 holds edges of
/// weight below 1; bucket `i >= 1` holds weights in
/// `[(1+delta)^(i-1), (1+delta)^i)`. Inside a bucket edges are taken in
/// ascending weight (ties by pair) whenever both ends are still free.
/// Since a complete graph with an even vertex count always has a free
/// edge while two vertices are unmatched, the result is perfect.
pub fn bucketed_greedy_matching(g: &WeightedCompleteGraph, delta: f64) -> Result<Matching> {
    ensure_even(g)?;
    if delta <= 0.0 || !delta.is_finite() {
        return Err(Error::Parameter(format!("bucket ratio delta must be positive, got {delta}")));
    }
    let n = g.len();
    let base = 1.0 + delta;
    let ln_base = base.ln();
    let bucket_of = |w: f64| -> usize {
        if w < 1.0 {
            return 0;
        }
        let mut i = (w.ln() / ln_base).floor() as i64 + 1;
        while i > 1 && base.powi((i - 1) as i32) > w {
            i -= 1;
        }
        while base.powi(i as i32) <= w {
            i += 1;
        }
        i as usize
    };
    let mut buckets: Vec<Vec<(f64, u32, u32)>> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let w = g.weight(i, j);
            let b = bucket_of(w);
            if b >= buckets.len() {
                buckets.resize_with(b + 1, Vec::new);
            }
            buckets[b].push((w, i as u32, j as u32));
        }
    }
    let mut matched = vec![false; n];
    let mut pairs = Vec::with_capacity(n / 2);
    for bucket in buckets.iter_mut() {
        if pairs.len() * 2 == n {
            break;
        }
        bucket.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));
        for &(_, i, j) in bucket.iter() {
            let (i, j) = (i as usize, j as usize);
            if !matched[i] && !matched[j] {
                matched[i] = true;
                matched[j] = true;
                pairs.push((i, j));
            }
        }
    }
    if pairs.len() * 2 != n {
        return Err(Error::Internal("greedy matching is not perfect".into()));
    }
    Ok(Matching::from_pairs(g, pairs))
}

/// Exhaustive minimum-weight perfect matching over all (N-1)!! matchings.
pub fn brute_force_matching(g: &WeightedCompleteGraph) -> Result<Matching> {
    ensure_even(g)?;
    let n = g.len();
    if n > 12 {
        return Err(Error::TooLarge(format!("brute-force matching enumerates at most 12 vertices, got {n}")));
    }
    fn rec(
        g: &WeightedCompleteGraph,
        used: &mut [bool],
        cur: &mut Vec<(usize, usize)>,
        cost: f64,
        best: &mut (f64, Vec<(usize, usize)>),
    ) {
        let Some(i) = used.iter().position(|&u| !u) else {
            if cost < best.0 {
                *best = (cost, cur.clone());
            }
            return;
        };
        used[i] = true;
        for j in i + 1..used.len() {
            if !used[j] {
                used[j] = true;
                cur.push((i, j));
                rec(g, used, cur, cost + g.weight(i, j), best);
                cur.pop();
                used[j] = false;
            }
        }
        used[i] = false;
    }
    let mut best = (f64::INFINITY, Vec::new());
    rec(g, &mut vec![false; n], &mut Vec::new(), 0.0, &mut best);
    Ok(Matching::from_pairs(g, best.1))
}

/// Number of perfect matchings of the complete graph on `n` vertices.
pub fn perfect_matching_count(n: usize) -> u64 {
    if n % 2 == 1 {
        return 0;
    }
    (1..n as u64).step_by(2).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_core::{RngCore, SeedableRng};
    use rand_xoshiro::Xoshiro256StarStar;

    fn random_graph(n: usize, rng: &mut Xoshiro256StarStar, hi: f64) -> WeightedCompleteGraph {
        WeightedCompleteGraph::from_fn(n, |_, _| (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * hi).unwrap()
    }

    fn two_cheap_edges() -> WeightedCompleteGraph {
        let mut g = WeightedCompleteGraph::from_fn(4, |_, _| 10.0).unwrap();
        g.set(0, 1, 1.0).unwrap();
        g.set(2, 3, 1.0).unwrap();
        g
    }

    #[test]
    fn two_vertices() {
        let mut g = WeightedCompleteGraph::new(2);
        g.set(0, 1, 3.5).unwrap();
        for m in [
            exact_min_perfect_matching(&g).unwrap(),
            bucketed_greedy_matching(&g, 0.5).unwrap(),
            brute_force_matching(&g).unwrap(),
        ] {
            assert_eq!(m.pairs, vec![(0, 1)]);
            assert_eq!(m.total_weight, 3.5);
        }
    }

    #[test]
    fn four_vertices_pick_cheap_edges() {
        let g = two_cheap_edges();
        for m in [
            exact_min_perfect_matching(&g).unwrap(),
            bucketed_greedy_matching(&g, 0.5).unwrap(),
            brute_force_matching(&g).unwrap(),
        ] {
            assert_eq!(m.pairs, vec![(0, 1), (2, 3)]);
            assert_eq!(m.total_weight, 2.0);
        }
    }

    #[test]
    fn odd_and_bad_parameters() {
        let g = WeightedCompleteGraph::new(3);
        assert!(matches!(exact_min_perfect_matching(&g), Err(Error::OddCardinality(3))));
        assert!(matches!(bucketed_greedy_matching(&g, 0.5), Err(Error::OddCardinality(3))));
        let g = WeightedCompleteGraph::new(4);
        assert!(bucketed_greedy_matching(&g, 0.0).is_err());
        assert!(bucketed_greedy_matching(&g, -1.0).is_err());
        assert!(brute_force_matching(&WeightedCompleteGraph::new(14)).is_err());
        let mut g = WeightedCompleteGraph::new(2);
        assert!(g.set(0, 1, -1.0).is_err());
        assert!(g.set(1, 1, 1.0).is_err());
        assert!(WeightedCompleteGraph::from_rows(&[vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
    }

    #[test]
    fn matching_counts() {
        assert_eq!(perfect_matching_count(2), 1);
        assert_eq!(perfect_matching_count(4), 3);
        assert_eq!(perfect_matching_count(6), 15);
        assert_eq!(perfect_matching_count(8), 105);
    }

    #[test]
    fn exact_matches_brute_force_on_random_graphs() {
        let mut rng = Xoshiro256StarStar::seed_from_u64(7);
        for trial in 0..300 {
            let n = 2 * (1 + trial % 5);
            let g = random_graph(n, &mut rng, 100.0);
            let exact = exact_min_perfect_matching(&g).unwrap();
            let brute = brute_force_matching(&g).unwrap();
            assert!(exact.is_perfect(n));
            assert!(
                (exact.total_weight - brute.total_weight).abs() <= 1e-9,
                "n={n}: exact {} vs brute {}",
                exact.total_weight,
                brute.total_weight
            );
        }
    }

    /// Minimum perfect matching by DP over subsets, always pairing the
    /// lowest unmatched vertex.
    fn subset_dp(g: &WeightedCompleteGraph) -> f64 {
        let n = g.len();
        let full = (1usize << n) - 1;
        let mut best = vec![f64::INFINITY; 1 << n];
        best[0] = 0.0;
        for mask in 0..=full {
            if best[mask].is_infinite() || mask == full {
                continue;
            }
            let i = (!mask).trailing_zeros() as usize;
            for j in i + 1..n {
                if mask & (1 << j) == 0 {
                    let next = mask | (1 << i) | (1 << j);
                    best[next] = best[next].min(best[mask] + g.weight(i, j));
                }
            }
        }
        best[full]
    }

    #[test]
    fn exact_matches_subset_dp_up_to_18() {
        let mut rng = Xoshiro256StarStar::seed_from_u64(19);
        for trial in 0..60 {
            let n = 12 + 2 * (trial % 4);
            let g = if trial % 2 == 0 {
                random_graph(n, &mut rng, 50.0)
            } else {
                let pts: Vec<(f64, f64)> = (0..n)
                    .map(|_| ((rng.next_u64() % 20) as f64, (rng.next_u64() % 20) as f64))
                    .collect();
                WeightedCompleteGraph::from_fn(n, |i, j| (pts[i].0 - pts[j].0).hypot(pts[i].1 - pts[j].1)).unwrap()
            };
            let exact = exact_min_perfect_matching(&g).unwrap();
            assert!(exact.is_perfect(n));
            assert!((exact.total_weight - subset_dp(&g)).abs() <= 1e-9, "trial {trial}");
        }
    }

    #[test]
    fn exact_handles_integer_and_tied_weights() {
        let mut rng = Xoshiro256StarStar::seed_from_u64(11);
        for trial in 0..200 {
            let n = 2 * (1 + trial % 6);
            let g = WeightedCompleteGraph::from_fn(n, |_, _| (rng.next_u64() % 4) as f64).unwrap();
            let exact = exact_min_perfect_matching(&g).unwrap();
            let brute = brute_force_matching(&g).unwrap();
            assert!((exact.total_weight - brute.total_weight).abs() <= 1e-9);
        }
    }

    #[test]
    fn exact_on_larger_graph_beats_greedy() {
        let mut rng = Xoshiro256StarStar::seed_from_u64(3);
        for n in [40, 100, 200] {
            let g = random_graph(n, &mut rng, 1000.0);
            let exact = exact_min_perfect_matching(&g).unwrap();
            let greedy = bucketed_greedy_matching(&g, 0.5).unwrap();
            assert!(exact.is_perfect(n));
            assert!(greedy.is_perfect(n));
            assert!(exact.total_weight <= greedy.total_weight + 1e-9);
        }
    }

    #[test]
    fn greedy_is_global_weight_order_greedy() {
        let mut rng = Xoshiro256StarStar::seed_from_u64(5);
        for _ in 0..50 {
            let g = random_graph(10, &mut rng, 7.0);
            let bucketed = bucketed_greedy_matching(&g, 0.3).unwrap();
            let mut edges: Vec<(f64, usize, usize)> =
                (0..10).flat_map(|i| (i + 1..10).map(move |j| (i, j))).map(|(i, j)| (g.weight(i, j), i, j)).collect();
            edges.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));
            let mut used = [false; 10];
            let mut pairs = Vec::new();
            for (_, i, j) in edges {
                if !used[i] && !used[j] {
                    used[i] = true;
                    used[j] = true;
                    pairs.push((i, j));
                }
            }
            pairs.sort();
            assert_eq!(bucketed.pairs, pairs);
        }
    }

    #[test]
    fn all_zero_weights() {
        let g = WeightedCompleteGraph::new(6);
        let m = exact_min_perfect_matching(&g).unwrap();
        assert!(m.is_perfect(6));
        assert_eq!(m.total_weight, 0.0);
    }
}

//! Discrete rank space at desk scale: permutations, the bubble-sort Cayley
//! graph, weak orders (rankings with ties) and the Kemeny-Snell metric.
//!
//! Strict rankings of n items are the n! permutations; connecting
//! permutations that differ by one adjacent transposition yields the
//! bubble-sort Cayley graph, which is (n-1)-regular with vertex connectivity
//! n-1 and decomposes recursively into n copies of the next-smaller graph.
//! Allowing ties enlarges the space to all ordered set partitions, metrized
//! by the tie-aware Kemeny-Snell distance.

use std::collections::HashMap;

use num_rational::Rational64;

use crate::error::{Error, Result};

/// Enumeration is exponential in n, so it is hard-capped.
pub const MAX_WEAK_ORDER_N: usize = 5;
/// n! vertices; 6! = 720 is the largest graph worth materializing here.
pub const MAX_GRAPH_N: usize = 6;
/// Brute-force min-cut connectivity is capped below graph construction.
pub const MAX_CONNECTIVITY_N: usize = 5;

/// A complete ranking: position i holds the rank value of item i, and the
/// values form a bijection on 1..=n.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<u8>);

impl Permutation {
    pub fn new(values: Vec<u8>) -> Result<Self> {
        let n = values.len();
        let mut seen = vec![false; n + 1];
        for &v in &values {
            if v == 0 || v as usize > n || seen[v as usize] {
                return Err(Error::Validation(format!(
                    "not a permutation of 1..={n}: {values:?}"
                )));
            }
            seen[v as usize] = true;
        }
        Ok(Permutation(values))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[u8] {
        &self.0
    }

    /// Compact digit form, e.g. `2314`.
    pub fn digits(&self) -> String {
        self.0.iter().map(|v| char::from(b'0' + v)).collect()
    }
}

/// A ranking with ties: an ordered partition of items 0..n-1 into tiers,
/// tier 0 best.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeakOrder {
    levels: Vec<Vec<usize>>,
    /// Item -> tier index.
    tier: Vec<usize>,
}

impl WeakOrder {
    /// Builds a weak order on `n` items from tiers of item indices.
    pub fn from_levels(levels: Vec<Vec<usize>>, n: usize) -> Result<Self> {
        let mut tier = vec![usize::MAX; n];
        let mut covered = 0;
        for (t, level) in levels.iter().enumerate() {
            if level.is_empty() {
                return Err(Error::Validation(format!("tier {t} is empty")));
            }
            for &item in level {
                if item >= n {
                    return Err(Error::Validation(format!(
                        "item {item} out of range for n = {n}"
                    )));
                }
                if tier[item] != usize::MAX {
                    return Err(Error::Validation(format!(
                        "item {item} appears in two tiers"
                    )));
                }
                tier[item] = t;
                covered += 1;
            }
        }
        if covered != n {
            return Err(Error::Validation(format!(
                "tiers cover {covered} of {n} items"
            )));
        }
        let mut levels = levels;
        for level in &mut levels {
            level.sort_unstable();
        }
        Ok(WeakOrder { levels, tier })
    }

    /// Groups items sharing a rank value into tiers, best (lowest) first.
    pub fn from_ranks(ranks: &[f64]) -> Result<Self> {
        if ranks.is_empty() {
            return Err(Error::Validation("empty rank vector".into()));
        }
        if ranks.iter().any(|r| !r.is_finite()) {
            return Err(Error::Validation("non-finite rank value".into()));
        }
        let mut order: Vec<usize> = (0..ranks.len()).collect();
        order.sort_by(|&a, &b| ranks[a].partial_cmp(&ranks[b]).unwrap().then(a.cmp(&b)));
        let mut levels: Vec<Vec<usize>> = Vec::new();
        for &item in &order {
            match levels.last_mut() {
                Some(level) if ranks[level[0]] == ranks[item] => level.push(item),
                _ => levels.push(vec![item]),
            }
        }
        WeakOrder::from_levels(levels, ranks.len())
    }

    pub fn n_items(&self) -> usize {
        self.tier.len()
    }

    pub fn levels(&self) -> &[Vec<usize>] {
        &self.levels
    }

    pub fn tier_of(&self, item: usize) -> usize {
        self.tier[item]
    }

    pub fn is_strict(&self) -> bool {
        self.levels.iter().all(|l| l.len() == 1)
    }

    /// The unique fractional-rank vector equivalent to this order.
    pub fn fractional_ranks(&self) -> Vec<f64> {
        let mut ranks = vec![0.0; self.tier.len()];
        let mut taken = 0usize;
        for level in &self.levels {
            let size = level.len();
            let mean = (2 * taken + size + 1) as f64 / 2.0;
            for &item in level {
                ranks[item] = mean;
            }
            taken += size;
        }
        ranks
    }
}

/// The Kemeny-Snell distance between two weak orders on the same item set.
///
/// Each unordered item pair contributes 0 when the orders agree (same strict
/// direction, or tied in both), 1 when strictly opposed, and 1/2 when one
/// order ties the pair and the other does not. Exact rational arithmetic.
pub fn kemeny_distance(a: &WeakOrder, b: &WeakOrder) -> Result<Rational64> {
    let n = a.n_items();
    if n != b.n_items() {
        return Err(Error::ItemSetMismatch {
            left: n,
            right: b.n_items(),
        });
    }
    let mut halves: i64 = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            let pa = preference(a, i, j);
            let pb = preference(b, i, j);
            halves += (pa - pb).abs() as i64;
        }
    }
    Ok(Rational64::new(halves, 2))
}

/// +1 if `i` outranks `j`, -1 if `j` outranks `i`, 0 on a tie.
fn preference(order: &WeakOrder, i: usize, j: usize) -> i8 {
    match order.tier_of(i).cmp(&order.tier_of(j)) {
        std::cmp::Ordering::Less => 1,
        std::cmp::Ordering::Greater => -1,
        std::cmp::Ordering::Equal => 0,
    }
}

/// All weak orders on n items (ordered set partitions), deterministic order.
///
/// Their count is the n-th ordered Bell number, which exceeds n! as soon as
/// ties are possible.
pub fn enumerate_weak_orders(n: usize) -> Result<Vec<WeakOrder>> {
    if n == 0 {
        return Err(Error::Validation("need at least one item".into()));
    }
    if n > MAX_WEAK_ORDER_N {
        return Err(Error::TooLarge {
            what: "weak-order enumeration",
            cap: MAX_WEAK_ORDER_N,
            n,
        });
    }
    let items: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    let mut prefix: Vec<Vec<usize>> = Vec::new();
    fill_tiers(&items, &mut prefix, &mut out, n);
    Ok(out)
}

fn fill_tiers(
    remaining: &[usize],
    prefix: &mut Vec<Vec<usize>>,
    out: &mut Vec<WeakOrder>,
    n: usize,
) {
    if remaining.is_empty() {
        out.push(WeakOrder::from_levels(prefix.clone(), n).expect("tiers partition the items"));
        return;
    }
    let m = remaining.len();
    for mask in 1u32..(1 << m) {
        let tier: Vec<usize> = (0..m)
            .filter(|b| mask & (1 << b) != 0)
            .map(|b| remaining[b])
            .collect();
        let rest: Vec<usize> = (0..m)
            .filter(|b| mask & (1 << b) == 0)
            .map(|b| remaining[b])
            .collect();
        prefix.push(tier);
        fill_tiers(&rest, prefix, out, n);
        prefix.pop();
    }
}

/// The bubble-sort Cayley graph: every permutation of 1..=n is a vertex and
/// edges join permutations differing by one adjacent transposition.
#[derive(Debug, Clone)]
pub struct CayleyGraph {
    n: usize,
    vertices: Vec<Permutation>,
    adjacency: Vec<Vec<u32>>,
}

impl CayleyGraph {
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn vertices(&self) -> &[Permutation] {
        &self.vertices
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adjacency[v]
    }

    /// Some(degree) when every vertex has the same degree.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.adjacency.first()?.len();
        self.adjacency.iter().all(|a| a.len() == d).then_some(d)
    }

    pub fn is_connected(&self) -> bool {
        connected(&self.adjacency)
    }

    /// Edges as vertex-index pairs (a < b), in vertex order.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut edges = Vec::with_capacity(self.edge_count());
        for (v, nbrs) in self.adjacency.iter().enumerate() {
            for &u in nbrs {
                if (v as u32) < u {
                    edges.push((v as u32, u));
                }
            }
        }
        edges
    }

    /// Tab-separated digit-string edge list, one edge per line.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (a, b) in self.edges() {
            out.push_str(&self.vertices[a as usize].digits());
            out.push('\t');
            out.push_str(&self.vertices[b as usize].digits());
            out.push('\n');
        }
        out
    }
}

/// Builds the bubble-sort Cayley graph for 2 <= n <= 6.
pub fn build_bubble_sort_graph(n: usize) -> Result<CayleyGraph> {
    if n < 2 {
        return Err(Error::Validation(
            "bubble-sort graph needs at least 2 positions".into(),
        ));
    }
    if n > MAX_GRAPH_N {
        return Err(Error::TooLarge {
            what: "bubble-sort graph",
            cap: MAX_GRAPH_N,
            n,
        });
    }
    let vertices = all_permutations(n);
    let index: HashMap<&[u8], u32> = vertices
        .iter()
        .enumerate()
        .map(|(i, p)| (p.values(), i as u32))
        .collect();
    let mut adjacency = vec![Vec::with_capacity(n - 1); vertices.len()];
    for (v, perm) in vertices.iter().enumerate() {
        let mut swapped = perm.values().to_vec();
        for i in 0..n - 1 {
            swapped.swap(i, i + 1);
            let u = index[swapped.as_slice()];
            adjacency[v].push(u);
            swapped.swap(i, i + 1);
        }
        adjacency[v].sort_unstable();
    }
    Ok(CayleyGraph {
        n,
        vertices,
        adjacency,
    })
}

/// Permutations of 1..=n in lexicographic order.
fn all_permutations(n: usize) -> Vec<Permutation> {
    let mut out = Vec::new();
    let mut current: Vec<u8> = Vec::with_capacity(n);
    let mut used = vec![false; n + 1];
    fn recurse(n: usize, current: &mut Vec<u8>, used: &mut Vec<bool>, out: &mut Vec<Permutation>) {
        if current.len() == n {
            out.push(Permutation(current.clone()));
            return;
        }
        for v in 1..=n as u8 {
            if !used[v as usize] {
                used[v as usize] = true;
                current.push(v);
                recurse(n, current, used, out);
                current.pop();
                used[v as usize] = false;
            }
        }
    }
    recurse(n, &mut current, &mut used, &mut out);
    out
}

/// One class of the last-position partition used by the recursive check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecursiveClass {
    /// The value held in the last position by every member.
    pub last_value: u8,
    pub size: usize,
    pub induced_edges: usize,
    /// Whether the induced subgraph is isomorphic to the order-(n-1) graph.
    pub isomorphic: bool,
}

/// Result of checking that the graph splits into n copies of the
/// next-smaller bubble-sort graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecursiveReport {
    pub n: usize,
    pub classes: Vec<RecursiveClass>,
    pub cross_edges: usize,
}

impl RecursiveReport {
    pub fn all_isomorphic(&self) -> bool {
        self.classes.iter().all(|c| c.isomorphic)
    }
}

impl std::fmt::Display for RecursiveReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "B_{}: {} classes of size {}, {}; {} cross edges",
            self.n,
            self.classes.len(),
            self.classes.first().map_or(0, |c| c.size),
            if self.all_isomorphic() {
                format!("each isomorphic to B_{}", self.n - 1)
            } else {
                "NOT all isomorphic".to_string()
            },
            self.cross_edges
        )
    }
}

/// Partitions vertices by last-position value and verifies each class
/// induces a copy of the order-(n-1) graph.
pub fn verify_recursive_structure(graph: &CayleyGraph) -> Result<RecursiveReport> {
    let n = graph.order();
    if n < 3 {
        return Err(Error::Validation(
            "recursive structure check needs n >= 3".into(),
        ));
    }
    let smaller = build_bubble_sort_graph(n - 1)?;
    let smaller_index: HashMap<&[u8], u32> = smaller
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, p)| (p.values(), i as u32))
        .collect();

    let mut classes = Vec::with_capacity(n);
    let mut induced_total = 0;
    for last in 1..=n as u8 {
        let members: Vec<usize> = (0..graph.vertex_count())
            .filter(|&v| *graph.vertices[v].values().last().unwrap() == last)
            .collect();
        // Dropping the fixed last value and closing the gap in the remaining
        // values maps each member onto a permutation of 1..=n-1.
        let project = |v: usize| -> u32 {
            let vals = graph.vertices[v].values();
            let reduced: Vec<u8> = vals[..n - 1]
                .iter()
                .map(|&w| if w > last { w - 1 } else { w })
                .collect();
            smaller_index[reduced.as_slice()]
        };
        let in_class: std::collections::HashSet<usize> = members.iter().copied().collect();
        let mut induced_edges = 0;
        let mut edges_match = true;
        let mut image: std::collections::HashSet<u32> = std::collections::HashSet::new();
        for &v in &members {
            image.insert(project(v));
            for &u in graph.neighbors(v) {
                let u = u as usize;
                if u > v && in_class.contains(&u) {
                    induced_edges += 1;
                    let (pv, pu) = (project(v), project(u));
                    if !smaller.neighbors(pv as usize).contains(&pu) {
                        edges_match = false;
                    }
                }
            }
        }
        let isomorphic = members.len() == smaller.vertex_count()
            && image.len() == smaller.vertex_count()
            && induced_edges == smaller.edge_count()
            && edges_match;
        induced_total += induced_edges;
        classes.push(RecursiveClass {
            last_value: last,
            size: members.len(),
            induced_edges,
            isomorphic,
        });
    }
    Ok(RecursiveReport {
        n,
        classes,
        cross_edges: graph.edge_count() - induced_total,
    })
}

/// Brute-force vertex connectivity of the graph, capped at n = 5.
pub fn vertex_connectivity(graph: &CayleyGraph) -> Result<usize> {
    if graph.order() > MAX_CONNECTIVITY_N {
        return Err(Error::TooLarge {
            what: "vertex connectivity",
            cap: MAX_CONNECTIVITY_N,
            n: graph.order(),
        });
    }
    Ok(connectivity(&graph.adjacency))
}

fn connected(adjacency: &[Vec<u32>]) -> bool {
    if adjacency.is_empty() {
        return true;
    }
    let mut seen = vec![false; adjacency.len()];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 0;
    while let Some(v) = stack.pop() {
        count += 1;
        for &u in &adjacency[v] {
            if !seen[u as usize] {
                seen[u as usize] = true;
                stack.push(u as usize);
            }
        }
    }
    count == adjacency.len()
}

/// Minimum number of vertices whose removal disconnects the graph, computed
/// by max-flow over all non-adjacent vertex pairs (Menger). A complete graph
/// has connectivity V-1 by convention.
pub(crate) fn connectivity(adjacency: &[Vec<u32>]) -> usize {
    let v = adjacency.len();
    if v <= 1 {
        return 0;
    }
    if !connected(adjacency) {
        return 0;
    }
    let mut best = v - 1;
    let mut found_pair = false;
    for s in 0..v {
        for t in (s + 1)..v {
            if adjacency[s].contains(&(t as u32)) {
                continue;
            }
            found_pair = true;
            best = best.min(max_vertex_disjoint_paths(adjacency, s, t, best));
            if best == 0 {
                return 0;
            }
        }
    }
    if !found_pair {
        // Complete graph.
        return v - 1;
    }
    best
}

/// Max vertex-disjoint s-t paths via unit-capacity max-flow on the split
/// graph; stops early once the flow reaches `cap`.
fn max_vertex_disjoint_paths(adjacency: &[Vec<u32>], s: usize, t: usize, cap: usize) -> usize {
    let v = adjacency.len();
    // Node v splits into in-node 2v and out-node 2v+1.
    let nodes = 2 * v;
    let mut arcs: Vec<(usize, i32)> = Vec::new(); // (to, capacity)
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    let add_arc = |from: usize,
                   to: usize,
                   capacity: i32,
                   arcs: &mut Vec<(usize, i32)>,
                   adj: &mut Vec<Vec<usize>>| {
        adj[from].push(arcs.len());
        arcs.push((to, capacity));
        adj[to].push(arcs.len());
        arcs.push((from, 0));
    };
    const INF: i32 = i32::MAX / 2;
    for node in 0..v {
        let capacity = if node == s || node == t { INF } else { 1 };
        add_arc(2 * node, 2 * node + 1, capacity, &mut arcs, &mut adj);
    }
    for (a, nbrs) in adjacency.iter().enumerate() {
        for &b in nbrs {
            add_arc(2 * a + 1, 2 * b as usize, INF, &mut arcs, &mut adj);
        }
    }
    let source = 2 * s + 1;
    let sink = 2 * t;
    let mut flow = 0usize;
    let mut parent_arc = vec![usize::MAX; nodes];
    while flow < cap {
        // BFS for an augmenting path.
        for p in parent_arc.iter_mut() {
            *p = usize::MAX;
        }
        let mut queue = std::collections::VecDeque::from([source]);
        parent_arc[source] = usize::MAX - 1;
        let mut reached = false;
        'bfs: while let Some(node) = queue.pop_front() {
            for &arc_id in &adj[node] {
                let (to, capacity) = arcs[arc_id];
                if capacity > 0 && parent_arc[to] == usize::MAX {
                    parent_arc[to] = arc_id;
                    if to == sink {
                        reached = true;
                        break 'bfs;
                    }
                    queue.push_back(to);
                }
            }
        }
        if !reached {
            break;
        }
        // All path bottlenecks are the unit vertex capacities.
        let mut node = sink;
        while node != source {
            let arc_id = parent_arc[node];
            arcs[arc_id].1 -= 1;
            arcs[arc_id ^ 1].1 += 1;
            node = if arc_id % 2 == 0 {
                arcs[arc_id + 1].0
            } else {
                arcs[arc_id - 1].0
            };
        }
        flow += 1;
    }
    flow
}

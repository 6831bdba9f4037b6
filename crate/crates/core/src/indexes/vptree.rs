//! Vantage-point tree with a deterministic best-first traversal.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{ApproximationBudget, SearchOutcome};
use crate::error::{Error, Result};
use crate::scalar::{pruning_slack, DistanceScalar};

pub const LEAF_CAPACITY: usize = 16;
pub const PIVOT_CANDIDATES: usize = 32;
const VARIANCE_SAMPLE: usize = 32;

#[derive(Clone, Debug)]
enum Node<S> {
    /// Item slots stored in this bucket.
    Leaf(Vec<usize>),
    Inner {
        pivot: usize,
        radius: S,
        /// Items with `d(pivot, x) <= radius`, the pivot included.
        inside: Box<Node<S>>,
        /// Items with `d(pivot, x) >= radius`.
        outside: Box<Node<S>>,
    },
}

/// Metric tree over `(key, item)` pairs. The distance is supplied on every
/// call, so the tree can index values whose metric carries parameters.
#[derive(Clone, Debug)]
pub struct VpTree<T, S> {
    items: Vec<(u64, T)>,
    root: Node<S>,
    rng: ChaCha8Rng,
}

impl<T: Clone, S: DistanceScalar> VpTree<T, S> {
    pub fn build<F>(items: Vec<(u64, T)>, seed: u64, mut dist: F) -> Result<Self>
    where
        F: FnMut(&T, &T) -> Result<S>,
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let slots: Vec<usize> = (0..items.len()).collect();
        let root = build_node(&items, slots, &mut rng, &mut dist)?;
        Ok(VpTree { items, root, rng })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Adds an item to the leaf its pivot distances lead to; an overfull
    /// leaf is split into a subtree.
    pub fn insert<F>(&mut self, key: u64, item: T, mut dist: F) -> Result<()>
    where
        F: FnMut(&T, &T) -> Result<S>,
    {
        let slot = self.items.len();
        self.items.push((key, item));
        let mut node = &mut self.root;
        loop {
            match node {
                Node::Leaf(slots) => {
                    slots.push(slot);
                    if slots.len() > LEAF_CAPACITY {
                        let slots = std::mem::take(slots);
                        *node = build_node(&self.items, slots, &mut self.rng, &mut dist)?;
                    }
                    return Ok(());
                }
                Node::Inner {
                    pivot,
                    radius,
                    inside,
                    outside,
                } => {
                    let d = dist(&self.items[*pivot].1, &self.items[slot].1)?;
                    node = if d <= *radius { inside } else { outside };
                }
            }
        }
    }

    /// Keys per leaf, in tree order.
    pub fn leaves(&self) -> Vec<Vec<u64>> {
        fn walk<T, S>(tree: &VpTree<T, S>, n: &Node<S>, out: &mut Vec<Vec<u64>>) {
            match n {
                Node::Leaf(slots) => out.push(slots.iter().map(|&s| tree.items[s].0).collect()),
                Node::Inner { inside, outside, .. } => {
                    walk(tree, inside, out);
                    walk(tree, outside, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &self.root, &mut out);
        out
    }

    /// Checks the partition invariant of every inner node.
    pub fn check_partitions<F>(&self, mut dist: F) -> Result<bool>
    where
        F: FnMut(&T, &T) -> Result<S>,
    {
        fn slots_of<S>(n: &Node<S>, out: &mut Vec<usize>) {
            match n {
                Node::Leaf(s) => out.extend(s),
                Node::Inner { inside, outside, .. } => {
                    slots_of(inside, out);
                    slots_of(outside, out);
                }
            }
        }
        let mut stack = vec![&self.root];
        while let Some(n) = stack.pop() {
            if let Node::Inner {
                pivot,
                radius,
                inside,
                outside,
            } = n
            {
                let p = &self.items[*pivot].1;
                let (mut ins, mut outs) = (Vec::new(), Vec::new());
                slots_of(inside, &mut ins);
                slots_of(outside, &mut outs);
                for s in ins {
                    if dist(p, &self.items[s].1)? > *radius {
                        return Ok(false);
                    }
                }
                for s in outs {
                    if dist(p, &self.items[s].1)? < *radius {
                        return Ok(false);
                    }
                }
                stack.push(inside);
                stack.push(outside);
            }
        }
        Ok(true)
    }

    /// Items in ascending `(distance, key)` order, lazily.
    pub fn nearest<'a, F>(&'a self, query: &'a T, budget: ApproximationBudget, dist: F) -> Nearest<'a, T, S, F>
    where
        F: FnMut(&T, &T) -> Result<S>,
    {
        let mut heap = BinaryHeap::new();
        heap.push(Entry {
            value: S::zero(),
            what: What::Node(&self.root),
        });
        Nearest {
            tree: self,
            query,
            dist,
            budget,
            heap,
            evaluated: HashMap::new(),
            evaluations: 0,
            bound: None,
        }
    }

    /// The `k` nearest items; ties at equal distance go to the smaller key.
    pub fn knn<F>(&self, query: &T, k: usize, budget: ApproximationBudget, dist: F) -> Result<SearchOutcome<u64, S>>
    where
        F: FnMut(&T, &T) -> Result<S>,
    {
        if k < 1 {
            return Err(Error::runtime("k must be at least 1"));
        }
        let mut it = self.nearest(query, budget, dist);
        let mut hits = Vec::with_capacity(k.min(self.len()));
        while hits.len() < k {
            match it.next_hit()? {
                Some(h) => hits.push(h),
                None => break,
            }
        }
        Ok(SearchOutcome {
            hits,
            evaluations: it.evaluations(),
        })
    }

    /// Every item within `radius` of the query.
    pub fn range<F>(&self, query: &T, radius: S, budget: ApproximationBudget, dist: F) -> Result<SearchOutcome<u64, S>>
    where
        F: FnMut(&T, &T) -> Result<S>,
    {
        if !(radius >= S::zero()) {
            return Err(Error::runtime(format!("range radius must be non-negative, got {radius}")));
        }
        let mut it = self.nearest(query, budget, dist).within(radius);
        let mut hits = Vec::new();
        while let Some(h) = it.next_hit()? {
            hits.push(h);
        }
        Ok(SearchOutcome {
            hits,
            evaluations: it.evaluations(),
        })
    }
}

fn build_node<T, S, F>(items: &[(u64, T)], slots: Vec<usize>, rng: &mut ChaCha8Rng, dist: &mut F) -> Result<Node<S>>
where
    S: DistanceScalar,
    F: FnMut(&T, &T) -> Result<S>,
{
    if slots.len() <= LEAF_CAPACITY {
        return Ok(Node::Leaf(slots));
    }
    let pivot = choose_pivot(items, &slots, rng, dist)?;
    let mut scored = Vec::with_capacity(slots.len());
    for &s in &slots {
        let d = if s == pivot { S::zero() } else { dist(&items[pivot].1, &items[s].1)? };
        scored.push((d, s));
    }
    // The pivot sorts first among zero distances so it lands inside.
    scored.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(Ordering::Equal)
            .then_with(|| (a.1 != pivot).cmp(&(b.1 != pivot)))
            .then_with(|| a.1.cmp(&b.1))
    });
    let half = scored.len() / 2;
    let radius = scored[half - 1].0;
    let outside: Vec<usize> = scored[half..].iter().map(|p| p.1).collect();
    let inside: Vec<usize> = scored[..half].iter().map(|p| p.1).collect();
    Ok(Node::Inner {
        pivot,
        radius,
        inside: Box::new(build_node(items, inside, rng, dist)?),
        outside: Box::new(build_node(items, outside, rng, dist)?),
    })
}

/// The candidate whose distances to a sample of the set vary most.
fn choose_pivot<T, S, F>(items: &[(u64, T)], slots: &[usize], rng: &mut ChaCha8Rng, dist: &mut F) -> Result<usize>
where
    S: DistanceScalar,
    F: FnMut(&T, &T) -> Result<S>,
{
    let n = slots.len();
    let candidates = sample(rng, n, PIVOT_CANDIDATES.min(n)).into_vec();
    let probes = sample(rng, n, VARIANCE_SAMPLE.min(n)).into_vec();
    let mut best = (slots[candidates[0]], f64::NEG_INFINITY);
    for c in candidates {
        let p = slots[c];
        let mut ds = Vec::with_capacity(probes.len());
        for &o in &probes {
            let d = dist(&items[p].1, &items[slots[o]].1)?.to_f64_lossy();
            ds.push(if d.is_finite() { d } else { f64::MAX.sqrt() });
        }
        let mean = ds.iter().sum::<f64>() / ds.len() as f64;
        let var = ds.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / ds.len() as f64;
        if var > best.1 {
            best = (p, var);
        }
    }
    Ok(best.0)
}

enum What<'a, S> {
    Node(&'a Node<S>),
    /// Key of an evaluated item.
    Item(u64),
}

struct Entry<'a, S> {
    value: S,
    what: What<'a, S>,
}

impl<S: DistanceScalar> Entry<'_, S> {
    /// Nodes before items at equal value, items by key.
    fn rank(&self) -> (u8, u64) {
        match self.what {
            What::Node(_) => (0, 0),
            What::Item(key) => (1, key),
        }
    }
}

impl<S: DistanceScalar> PartialEq for Entry<'_, S> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<S: DistanceScalar> Eq for Entry<'_, S> {}

impl<S: DistanceScalar> PartialOrd for Entry<'_, S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<S: DistanceScalar> Ord for Entry<'_, S> {
    /// Reversed, so the max-heap pops the smallest entry.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .value
            .partial_cmp(&self.value)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.rank().cmp(&self.rank()))
    }
}

/// Incremental nearest-neighbour traversal.
///
/// The sequence of distance evaluations depends only on the tree and the
/// query, so a budget of `b` evaluations always sees a prefix of the same
/// sequence.
pub struct Nearest<'a, T, S, F> {
    tree: &'a VpTree<T, S>,
    query: &'a T,
    dist: F,
    budget: ApproximationBudget,
    heap: BinaryHeap<Entry<'a, S>>,
    /// Distances already computed, by item slot.
    evaluated: HashMap<usize, S>,
    evaluations: usize,
    bound: Option<S>,
}

impl<'a, T: Clone, S: DistanceScalar, F: FnMut(&T, &T) -> Result<S>> Nearest<'a, T, S, F> {
    /// Prunes subtrees and stops at items farther than `radius`.
    pub fn within(mut self, radius: S) -> Self {
        self.bound = Some(radius);
        self
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    fn beyond_bound(&self, lower: S) -> bool {
        self.bound.is_some_and(|r| lower > r)
    }

    /// Evaluates the item in `slot` unless already done. `None` once the
    /// budget is spent.
    fn evaluate(&mut self, slot: usize) -> Result<Option<S>> {
        if !self.budget.allows(self.evaluations) {
            return Ok(None);
        }
        self.evaluations += 1;
        let d = (self.dist)(self.query, &self.tree.items[slot].1)?;
        if d.is_nan() || d < S::zero() {
            return Err(Error::runtime(format!("invalid distance {d}")));
        }
        self.evaluated.insert(slot, d);
        Ok(Some(d))
    }

    fn push_item(&mut self, slot: usize, d: S) {
        if !self.beyond_bound(d) {
            self.heap.push(Entry {
                value: d,
                what: What::Item(self.tree.items[slot].0),
            });
        }
    }

    pub fn next_hit(&mut self) -> Result<Option<(u64, S)>> {
        while let Some(top) = self.heap.pop() {
            match top.what {
                What::Item(key) => return Ok(Some((key, top.value))),
                What::Node(Node::Leaf(slots)) => {
                    for &s in slots {
                        if self.evaluated.contains_key(&s) {
                            continue;
                        }
                        match self.evaluate(s)? {
                            Some(d) => self.push_item(s, d),
                            None => break,
                        }
                    }
                }
                What::Node(Node::Inner {
                    pivot,
                    radius,
                    inside,
                    outside,
                }) => {
                    let d = if let Some(&d) = self.evaluated.get(pivot) {
                        d
                    } else {
                        match self.evaluate(*pivot)? {
                            Some(d) => {
                                self.push_item(*pivot, d);
                                d
                            }
                            None => continue,
                        }
                    };
                    let slack = pruning_slack(d, *radius);
                    let lower = top.value;
                    let inside_lb = (d - *radius - slack).max(lower);
                    let outside_lb = (*radius - d - slack).max(lower);
                    for (lb, child) in [(inside_lb, inside), (outside_lb, outside)] {
                        if !self.beyond_bound(lb) {
                            self.heap.push(Entry {
                                value: lb.max(S::zero()),
                                what: What::Node(child),
                            });
                        }
                    }
                }
            }
        }
        Ok(None)
    }
}

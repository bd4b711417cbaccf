//! Binary heap over fixed-width sorted runs. Each tree node holds a sorted
//! run of `node_width` elements (the frontier node may be partial) and every
//! element in a node is no smaller than every element in its parent node.
//! Where an ordinary heap compares and swaps two elements, this heap merges
//! two runs and splits them back, so a single restructuring step moves a
//! whole batch of elements.

use super::SequentialQueue;
use crate::Element;

pub const DEFAULT_NODE_WIDTH: usize = 16;

/// Splits the union of two sorted runs so that `a` keeps the `a.len()`
/// smallest elements and `b` the rest, both sorted ascending by key.
pub fn merge_split(a: &mut [Element], b: &mut [Element]) {
    let mut scratch = Vec::with_capacity(a.len() + b.len());
    merge_split_into(a, b, &mut scratch);
}

fn merge_split_into(a: &mut [Element], b: &mut [Element], scratch: &mut Vec<Element>) {
    debug_assert!(is_sorted(a) && is_sorted(b));
    scratch.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i].key <= b[j].key {
            scratch.push(a[i]);
            i += 1;
        } else {
            scratch.push(b[j]);
            j += 1;
        }
    }
    scratch.extend_from_slice(&a[i..]);
    scratch.extend_from_slice(&b[j..]);
    a.copy_from_slice(&scratch[..a.len()]);
    b.copy_from_slice(&scratch[a.len()..]);
}

fn is_sorted(run: &[Element]) -> bool {
    run.windows(2).all(|w| w[0].key <= w[1].key)
}

#[derive(Clone, Debug)]
pub struct MergingHeap {
    node_width: usize,
    /// Implicit binary tree: children of node `i` are `2i + 1` and `2i + 2`.
    nodes: Vec<Vec<Element>>,
    len: usize,
    scratch: Vec<Element>,
}

impl MergingHeap {
    pub fn new(node_width: usize, capacity: usize) -> Self {
        assert!(node_width >= 1, "node width must be at least 1");
        MergingHeap {
            node_width,
            nodes: Vec::with_capacity(capacity / node_width + 1),
            len: 0,
            scratch: Vec::with_capacity(2 * node_width),
        }
    }

    pub fn node_width(&self) -> usize {
        self.node_width
    }

    pub fn peek_min(&self) -> Option<Element> {
        self.nodes.first().and_then(|run| run.first().copied())
    }

    fn merge_split_nodes(&mut self, parent: usize, child: usize) {
        debug_assert!(parent < child);
        let (head, tail) = self.nodes.split_at_mut(child);
        merge_split_into(&mut head[parent], &mut tail[0], &mut self.scratch);
    }

    fn sift_up(&mut self, mut i: usize) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if self.nodes[i][0].key >= self.nodes[parent].last().unwrap().key {
                break;
            }
            self.merge_split_nodes(parent, i);
            i = parent;
        }
    }

    fn sift_down(&mut self, mut i: usize) {
        loop {
            let left = 2 * i + 1;
            if left >= self.nodes.len() {
                break;
            }
            let right = left + 1;
            let child = if right < self.nodes.len()
                && self.nodes[right][0].key < self.nodes[left][0].key
            {
                right
            } else {
                left
            };
            if self.nodes[child][0].key >= self.nodes[i].last().unwrap().key {
                break;
            }
            self.merge_split_nodes(i, child);
            i = child;
        }
    }

    fn insert_into_run(run: &mut Vec<Element>, e: Element) {
        let pos = run.partition_point(|x| x.key <= e.key);
        run.insert(pos, e);
    }

    /// Validates runs, node sizes and the parent-dominance invariant over
    /// the whole structure.
    pub fn structure_check(&self) -> bool {
        let total: usize = self.nodes.iter().map(Vec::len).sum();
        if total != self.len {
            return false;
        }
        for (i, run) in self.nodes.iter().enumerate() {
            if run.is_empty() || !is_sorted(run) {
                return false;
            }
            // only the frontier node may be partial
            if i + 1 != self.nodes.len() && run.len() != self.node_width {
                return false;
            }
            if i > 0 {
                let parent = &self.nodes[(i - 1) / 2];
                if run[0].key < parent.last().unwrap().key {
                    return false;
                }
            }
        }
        true
    }
}

impl SequentialQueue for MergingHeap {
    fn with_capacity(capacity: usize) -> Self {
        MergingHeap::new(DEFAULT_NODE_WIDTH, capacity)
    }

    fn len(&self) -> usize {
        self.len
    }

    fn insert(&mut self, e: Element) {
        if self
            .nodes
            .last()
            .is_none_or(|run| run.len() == self.node_width)
        {
            self.nodes.push(Vec::with_capacity(self.node_width));
        }
        let last = self.nodes.len() - 1;
        Self::insert_into_run(&mut self.nodes[last], e);
        self.len += 1;
        self.sift_up(last);
    }

    fn delete_min(&mut self) -> Option<Element> {
        if self.len == 0 {
            return None;
        }
        let min = self.nodes[0].remove(0);
        self.len -= 1;
        if self.nodes.len() == 1 {
            if self.nodes[0].is_empty() {
                self.nodes.pop();
            }
            return Some(min);
        }
        // Interior nodes must stay full: backfill the root from the frontier
        // node, then restore dominance downward.
        let stolen = {
            let frontier = self.nodes.last_mut().unwrap();
            let e = frontier.pop().unwrap();
            if frontier.is_empty() {
                self.nodes.pop();
            }
            e
        };
        Self::insert_into_run(&mut self.nodes[0], stolen);
        self.sift_down(0);
        Some(min)
    }

    fn bulk_insert(&mut self, batch: &[Element]) {
        for &e in batch {
            self.insert(e);
        }
    }

    fn extract_min(&mut self, k: usize, out: &mut Vec<Element>) {
        for _ in 0..k {
            match self.delete_min() {
                Some(e) => out.push(e),
                None => break,
            }
        }
    }

    fn collect_elements(&self, out: &mut Vec<Element>) {
        for run in &self.nodes {
            out.extend_from_slice(run);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::SmallRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn merge_split_interleaved() {
        let mut a: Vec<Element> = [1, 3, 5].map(|k| Element::new(k, 0)).to_vec();
        let mut b: Vec<Element> = [2, 4, 6].map(|k| Element::new(k, 0)).to_vec();
        merge_split(&mut a, &mut b);
        assert_eq!(a.iter().map(|e| e.key).collect::<Vec<_>>(), vec![1, 2, 3]);
        assert_eq!(b.iter().map(|e| e.key).collect::<Vec<_>>(), vec![4, 5, 6]);
    }

    #[test]
    fn merge_split_with_empty_side() {
        let mut a: Vec<Element> = [1, 2, 9].map(|k| Element::new(k, 0)).to_vec();
        let mut b: Vec<Element> = Vec::new();
        merge_split(&mut a, &mut b);
        assert_eq!(a.iter().map(|e| e.key).collect::<Vec<_>>(), vec![1, 2, 9]);
        assert!(b.is_empty());
    }

    #[test]
    fn merge_split_matches_sort_oracle() {
        let mut rng = SmallRng::seed_from_u64(7);
        for _ in 0..200 {
            let la = rng.random_range(0..=16);
            let lb = rng.random_range(0..=16);
            let mut a: Vec<Element> = (0..la)
                .map(|i| Element::new(rng.random_range(0..100), i))
                .collect();
            let mut b: Vec<Element> = (0..lb)
                .map(|i| Element::new(rng.random_range(0..100), 1000 + i))
                .collect();
            a.sort_by_key(|e| e.key);
            b.sort_by_key(|e| e.key);

            let mut oracle: Vec<u32> = a.iter().chain(b.iter()).map(|e| e.key).collect();
            oracle.sort_unstable();

            merge_split(&mut a, &mut b);
            let got: Vec<u32> = a.iter().chain(b.iter()).map(|e| e.key).collect();
            assert_eq!(got, oracle);
        }
    }

    #[test]
    fn sorts_random_input() {
        let mut rng = SmallRng::seed_from_u64(11);
        let mut h = MergingHeap::new(4, 64);
        let mut keys: Vec<u32> = (0..1000).map(|_| rng.random_range(0..200)).collect();
        for (i, &k) in keys.iter().enumerate() {
            h.insert(Element::new(k, i as u32));
        }
        assert!(h.structure_check());
        keys.sort_unstable();
        let mut drained = Vec::new();
        while let Some(e) = h.delete_min() {
            drained.push(e.key);
        }
        assert_eq!(drained, keys);
    }

    #[test]
    fn structure_holds_across_interleaved_script() {
        let mut rng = SmallRng::seed_from_u64(3);
        let mut h = MergingHeap::new(3, 16);
        let mut model: Vec<u32> = Vec::new();
        for _ in 0..4000 {
            if model.is_empty() || rng.random_range(0..10) < 6 {
                let k = rng.random_range(0..64);
                h.insert(Element::new(k, 0));
                model.push(k);
            } else {
                let got = h.delete_min().unwrap().key;
                model.sort_unstable();
                assert_eq!(got, model.remove(0));
            }
            assert!(h.structure_check());
        }
    }

    #[test]
    fn width_one_degenerates_to_binary_heap() {
        let mut h = MergingHeap::new(1, 8);
        for k in [5u32, 2, 8, 1] {
            h.insert(Element::new(k, 0));
            assert!(h.structure_check());
        }
        let mut out = Vec::new();
        h.extract_min(4, &mut out);
        assert_eq!(out.iter().map(|e| e.key).collect::<Vec<_>>(), vec![1, 2, 5, 8]);
    }
}

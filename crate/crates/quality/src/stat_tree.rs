//! Order-statistic search tree over the live queue elements, augmented with
//! lazy delay counters.
//!
//! Nodes are ordered by `(key, elem_id)` and carry subtree sizes, so the
//! number of live elements below a key is a logarithmic-time query. Each
//! node additionally stores a `pending` counter that applies to the delay
//! of every element in its subtree; adding one unit of delay to the `r`
//! smallest elements touches only the nodes covering that prefix. Pending
//! counters are pushed down before any structural change, so rebalancing
//! never loses delay.

use rand::rngs::SmallRng;
use rand::{RngCore, SeedableRng};

const NIL: u32 = u32::MAX;

#[derive(Clone, Debug)]
struct Node {
    key: u32,
    elem_id: u64,
    prio: u64,
    left: u32,
    right: u32,
    size: u32,
    /// Exact delay of this element, modulo pending counters above it.
    delay: u64,
    /// Lazy addend for the delays of this whole subtree, itself included.
    pending: u64,
}

pub struct StatTree {
    nodes: Vec<Node>,
    free: Vec<u32>,
    root: u32,
    rng: SmallRng,
}

impl Default for StatTree {
    fn default() -> Self {
        Self::new()
    }
}

impl StatTree {
    pub fn new() -> Self {
        StatTree {
            nodes: Vec::new(),
            free: Vec::new(),
            root: NIL,
            // balancing priorities only; fixed seed keeps replays identical
            rng: SmallRng::seed_from_u64(0x5eed_7ee5),
        }
    }

    pub fn len(&self) -> usize {
        self.size(self.root) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.root == NIL
    }

    fn size(&self, v: u32) -> u32 {
        if v == NIL {
            0
        } else {
            self.nodes[v as usize].size
        }
    }

    fn update_size(&mut self, v: u32) {
        let (l, r) = {
            let n = &self.nodes[v as usize];
            (n.left, n.right)
        };
        self.nodes[v as usize].size = 1 + self.size(l) + self.size(r);
    }

    fn push_pending(&mut self, v: u32) {
        let p = self.nodes[v as usize].pending;
        if p == 0 {
            return;
        }
        let (l, r) = {
            let n = &mut self.nodes[v as usize];
            n.delay += p;
            n.pending = 0;
            (n.left, n.right)
        };
        if l != NIL {
            self.nodes[l as usize].pending += p;
        }
        if r != NIL {
            self.nodes[r as usize].pending += p;
        }
    }

    fn alloc(&mut self, key: u32, elem_id: u64) -> u32 {
        let prio = self.rng.next_u64();
        let node = Node {
            key,
            elem_id,
            prio,
            left: NIL,
            right: NIL,
            size: 1,
            delay: 0,
            pending: 0,
        };
        match self.free.pop() {
            Some(i) => {
                self.nodes[i as usize] = node;
                i
            }
            None => {
                self.nodes.push(node);
                (self.nodes.len() - 1) as u32
            }
        }
    }

    /// Inserts a live element with delay 0. Returns false (and inserts
    /// nothing) if `(key, elem_id)` is already present.
    pub fn insert(&mut self, key: u32, elem_id: u64) -> bool {
        let n = self.alloc(key, elem_id);
        match self.insert_at(self.root, n) {
            Some(root) => {
                self.root = root;
                true
            }
            None => {
                self.free.push(n);
                false
            }
        }
    }

    fn insert_at(&mut self, v: u32, n: u32) -> Option<u32> {
        if v == NIL {
            return Some(n);
        }
        self.push_pending(v);
        let (nk, vk) = {
            let nn = &self.nodes[n as usize];
            let vn = &self.nodes[v as usize];
            ((nn.key, nn.elem_id), (vn.key, vn.elem_id))
        };
        match nk.cmp(&vk) {
            std::cmp::Ordering::Equal => return None,
            std::cmp::Ordering::Less => {
                let child = self.insert_at(self.nodes[v as usize].left, n)?;
                self.nodes[v as usize].left = child;
                self.update_size(v);
                if self.nodes[child as usize].prio < self.nodes[v as usize].prio {
                    return Some(self.rotate_right(v));
                }
            }
            std::cmp::Ordering::Greater => {
                let child = self.insert_at(self.nodes[v as usize].right, n)?;
                self.nodes[v as usize].right = child;
                self.update_size(v);
                if self.nodes[child as usize].prio < self.nodes[v as usize].prio {
                    return Some(self.rotate_left(v));
                }
            }
        }
        Some(v)
    }

    /// Lifts the left child above `v`. Both pending counters must already
    /// be pushed, which descent guarantees.
    fn rotate_right(&mut self, v: u32) -> u32 {
        let l = self.nodes[v as usize].left;
        debug_assert_eq!(self.nodes[v as usize].pending, 0);
        debug_assert_eq!(self.nodes[l as usize].pending, 0);
        self.nodes[v as usize].left = self.nodes[l as usize].right;
        self.nodes[l as usize].right = v;
        self.update_size(v);
        self.update_size(l);
        l
    }

    fn rotate_left(&mut self, v: u32) -> u32 {
        let r = self.nodes[v as usize].right;
        debug_assert_eq!(self.nodes[v as usize].pending, 0);
        debug_assert_eq!(self.nodes[r as usize].pending, 0);
        self.nodes[v as usize].right = self.nodes[r as usize].left;
        self.nodes[r as usize].left = v;
        self.update_size(v);
        self.update_size(r);
        r
    }

    /// Number of live elements whose key is strictly smaller than `key`.
    /// Elements with an equal key never count, whatever their id.
    pub fn rank_lower(&self, key: u32) -> usize {
        let mut v = self.root;
        let mut rank = 0usize;
        while v != NIL {
            let n = &self.nodes[v as usize];
            if n.key < key {
                rank += self.size(n.left) as usize + 1;
                v = n.right;
            } else {
                v = n.left;
            }
        }
        rank
    }

    /// Adds one unit of delay to the `r` smallest live elements.
    pub fn add_delay_prefix(&mut self, r: usize) {
        assert!(r <= self.len(), "prefix length {r} exceeds live size");
        self.add_prefix_at(self.root, r as u32);
    }

    fn add_prefix_at(&mut self, v: u32, r: u32) {
        if r == 0 || v == NIL {
            return;
        }
        if r == self.size(v) {
            self.nodes[v as usize].pending += 1;
            return;
        }
        self.push_pending(v);
        let (left, right) = {
            let n = &self.nodes[v as usize];
            (n.left, n.right)
        };
        let left_size = self.size(left);
        if r <= left_size {
            self.add_prefix_at(left, r);
        } else {
            if left != NIL {
                self.nodes[left as usize].pending += 1;
            }
            self.nodes[v as usize].delay += 1;
            self.add_prefix_at(right, r - left_size - 1);
        }
    }

    /// Removes the element and returns its accumulated delay.
    pub fn remove(&mut self, key: u32, elem_id: u64) -> Option<u64> {
        let (root, delay) = self.remove_at(self.root, key, elem_id)?;
        self.root = root;
        Some(delay)
    }

    fn remove_at(&mut self, v: u32, key: u32, elem_id: u64) -> Option<(u32, u64)> {
        if v == NIL {
            return None;
        }
        self.push_pending(v);
        let vk = {
            let n = &self.nodes[v as usize];
            (n.key, n.elem_id)
        };
        match (key, elem_id).cmp(&vk) {
            std::cmp::Ordering::Equal => {
                let n = &self.nodes[v as usize];
                let (delay, l, r) = (n.delay, n.left, n.right);
                let merged = self.merge(l, r);
                self.free.push(v);
                Some((merged, delay))
            }
            std::cmp::Ordering::Less => {
                let (child, delay) = self.remove_at(self.nodes[v as usize].left, key, elem_id)?;
                self.nodes[v as usize].left = child;
                self.update_size(v);
                Some((v, delay))
            }
            std::cmp::Ordering::Greater => {
                let (child, delay) = self.remove_at(self.nodes[v as usize].right, key, elem_id)?;
                self.nodes[v as usize].right = child;
                self.update_size(v);
                Some((v, delay))
            }
        }
    }

    fn merge(&mut self, a: u32, b: u32) -> u32 {
        if a == NIL {
            return b;
        }
        if b == NIL {
            return a;
        }
        if self.nodes[a as usize].prio < self.nodes[b as usize].prio {
            self.push_pending(a);
            let merged = self.merge(self.nodes[a as usize].right, b);
            self.nodes[a as usize].right = merged;
            self.update_size(a);
            a
        } else {
            self.push_pending(b);
            let merged = self.merge(a, self.nodes[b as usize].left);
            self.nodes[b as usize].left = merged;
            self.update_size(b);
            b
        }
    }

    /// Current delay of a live element.
    pub fn delay_of(&self, key: u32, elem_id: u64) -> Option<u64> {
        let mut v = self.root;
        let mut acc = 0u64;
        while v != NIL {
            let n = &self.nodes[v as usize];
            acc += n.pending;
            match (key, elem_id).cmp(&(n.key, n.elem_id)) {
                std::cmp::Ordering::Equal => return Some(n.delay + acc),
                std::cmp::Ordering::Less => v = n.left,
                std::cmp::Ordering::Greater => v = n.right,
            }
        }
        None
    }

    /// `(elem_id, delay)` of every live element, ascending by `(key, id)`.
    pub fn survivors(&self) -> Vec<(u64, u64)> {
        let mut out = Vec::with_capacity(self.len());
        self.walk(self.root, 0, &mut out);
        out
    }

    fn walk(&self, v: u32, carry: u64, out: &mut Vec<(u64, u64)>) {
        if v == NIL {
            return;
        }
        let n = &self.nodes[v as usize];
        let carry = carry + n.pending;
        self.walk(n.left, carry, out);
        out.push((n.elem_id, n.delay + carry));
        self.walk(n.right, carry, out);
    }
}

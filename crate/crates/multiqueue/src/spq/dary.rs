use super::SequentialQueue;
use crate::Element;

pub const DEFAULT_ARITY: usize = 8;

/// Implicit d-ary min-heap over a dense array. The wider fan-out keeps the
/// tree shallow and sift-downs touch consecutive slots, which is friendlier
/// to the cache than a binary layout.
#[derive(Clone, Debug)]
pub struct DaryHeap {
    arity: usize,
    slots: Vec<Element>,
}

impl DaryHeap {
    pub fn new(arity: usize, capacity: usize) -> Self {
        assert!(arity >= 2, "heap arity must be at least 2");
        DaryHeap {
            arity,
            slots: Vec::with_capacity(capacity),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn peek_min(&self) -> Option<Element> {
        self.slots.first().copied()
    }

    fn sift_up(&mut self, mut i: usize) {
        while i > 0 {
            let parent = (i - 1) / self.arity;
            if self.slots[i].key >= self.slots[parent].key {
                break;
            }
            self.slots.swap(i, parent);
            i = parent;
        }
    }

    fn sift_down(&mut self, mut i: usize) {
        let len = self.slots.len();
        loop {
            let first = i * self.arity + 1;
            if first >= len {
                break;
            }
            let end = (first + self.arity).min(len);
            let mut min_idx = first;
            for j in first + 1..end {
                if self.slots[j].key < self.slots[min_idx].key {
                    min_idx = j;
                }
            }
            if self.slots[min_idx].key >= self.slots[i].key {
                break;
            }
            self.slots.swap(i, min_idx);
            i = min_idx;
        }
    }

    /// Checks the heap property over the whole array.
    pub fn structure_check(&self) -> bool {
        (1..self.slots.len()).all(|i| self.slots[i].key >= self.slots[(i - 1) / self.arity].key)
    }
}

impl SequentialQueue for DaryHeap {
    fn with_capacity(capacity: usize) -> Self {
        DaryHeap::new(DEFAULT_ARITY, capacity)
    }

    fn len(&self) -> usize {
        self.slots.len()
    }

    fn insert(&mut self, e: Element) {
        self.slots.push(e);
        self.sift_up(self.slots.len() - 1);
    }

    fn delete_min(&mut self) -> Option<Element> {
        if self.slots.is_empty() {
            return None;
        }
        let min = self.slots.swap_remove(0);
        if !self.slots.is_empty() {
            self.sift_down(0);
        }
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
        out.extend_from_slice(&self.slots);
    }
}

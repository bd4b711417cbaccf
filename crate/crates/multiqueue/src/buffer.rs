//! Fixed-capacity staging buffers that sit between callers and the main
//! sequential queue.

use crate::Element;

/// Sorted ring buffer serving deletions. Supports removal of the first
/// element and lookup of the last in constant time; insertion at an
/// arbitrary position shifts whichever side of the ring is shorter.
#[derive(Debug)]
pub struct DeletionBuffer {
    slots: Box<[Element]>,
    head: usize,
    len: usize,
}

impl DeletionBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "deletion buffer capacity must be at least 1");
        DeletionBuffer {
            slots: vec![Element::new(0, 0); capacity].into_boxed_slice(),
            head: 0,
            len: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.slots.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_full(&self) -> bool {
        self.len == self.slots.len()
    }

    fn idx(&self, i: usize) -> usize {
        (self.head + i) % self.slots.len()
    }

    /// Element at logical position `i` (0 is the minimum).
    pub fn get(&self, i: usize) -> Element {
        debug_assert!(i < self.len);
        self.slots[self.idx(i)]
    }

    pub fn first(&self) -> Option<Element> {
        (self.len > 0).then(|| self.get(0))
    }

    pub fn max_key(&self) -> Option<u32> {
        (self.len > 0).then(|| self.get(self.len - 1).key)
    }

    pub fn pop_first(&mut self) -> Option<Element> {
        if self.len == 0 {
            return None;
        }
        let e = self.slots[self.head];
        self.head = (self.head + 1) % self.slots.len();
        self.len -= 1;
        Some(e)
    }

    /// First logical position whose key is strictly greater than `key`.
    fn upper_bound(&self, key: u32) -> usize {
        let (mut lo, mut hi) = (0, self.len);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.get(mid).key <= key {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Inserts keeping the ring sorted. The buffer must not be full.
    pub fn insert_sorted(&mut self, e: Element) {
        assert!(!self.is_full(), "insert into full deletion buffer");
        let pos = self.upper_bound(e.key);
        let cap = self.slots.len();
        if pos <= self.len / 2 {
            // shift the prefix one slot to the left
            self.head = (self.head + cap - 1) % cap;
            for j in 0..pos {
                let src = self.idx(j + 1);
                let dst = self.idx(j);
                self.slots[dst] = self.slots[src];
            }
        } else {
            for j in (pos..self.len).rev() {
                let src = self.idx(j);
                let dst = self.idx(j + 1);
                self.slots[dst] = self.slots[src];
            }
        }
        let dst = self.idx(pos);
        self.slots[dst] = e;
        self.len += 1;
    }

    /// Removes the current maximum, inserts `e`, and returns the old
    /// maximum. The buffer must be nonempty.
    pub fn replace_max(&mut self, e: Element) -> Element {
        assert!(self.len > 0, "replace_max on empty deletion buffer");
        let old = self.get(self.len - 1);
        self.len -= 1;
        self.insert_sorted(e);
        old
    }

    /// Overwrites the (empty) buffer with an already sorted batch.
    pub fn fill_from_sorted(&mut self, batch: &[Element]) {
        debug_assert!(self.is_empty());
        debug_assert!(batch.len() <= self.capacity());
        debug_assert!(batch.windows(2).all(|w| w[0].key <= w[1].key));
        self.head = 0;
        self.slots[..batch.len()].copy_from_slice(batch);
        self.len = batch.len();
    }

    pub fn iter(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }
}

/// Plain fixed-capacity array of recently inserted elements, in no
/// particular order.
#[derive(Debug)]
pub struct InsertionBuffer {
    slots: Vec<Element>,
    capacity: usize,
}

impl InsertionBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "insertion buffer capacity must be at least 1");
        InsertionBuffer {
            slots: Vec::with_capacity(capacity),
            capacity,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.slots.len() == self.capacity
    }

    pub fn push(&mut self, e: Element) {
        assert!(!self.is_full(), "push into full insertion buffer");
        self.slots.push(e);
    }

    pub fn get(&self, i: usize) -> Element {
        self.slots[i]
    }

    /// Overwrites slot `i`, returning the previous element.
    pub fn replace(&mut self, i: usize, e: Element) -> Element {
        std::mem::replace(&mut self.slots[i], e)
    }

    pub fn swap_remove(&mut self, i: usize) -> Element {
        self.slots.swap_remove(i)
    }

    pub fn as_slice(&self) -> &[Element] {
        &self.slots
    }

    pub fn clear(&mut self) {
        self.slots.clear();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn keys(d: &DeletionBuffer) -> Vec<u32> {
        d.iter().map(|e| e.key).collect()
    }

    #[test]
    fn sorted_inserts_wrap_around() {
        let mut d = DeletionBuffer::new(4);
        d.insert_sorted(Element::new(5, 0));
        d.insert_sorted(Element::new(1, 0));
        d.insert_sorted(Element::new(3, 0));
        assert_eq!(keys(&d), vec![1, 3, 5]);
        assert_eq!(d.pop_first().unwrap().key, 1);
        // head has advanced; further inserts must wrap correctly
        d.insert_sorted(Element::new(4, 0));
        d.insert_sorted(Element::new(0, 0));
        assert_eq!(keys(&d), vec![0, 3, 4, 5]);
        assert!(d.is_full());
    }

    #[test]
    fn replace_max_returns_old_maximum() {
        let mut d = DeletionBuffer::new(3);
        for k in [2, 6, 9] {
            d.insert_sorted(Element::new(k, 0));
        }
        let old = d.replace_max(Element::new(4, 0));
        assert_eq!(old.key, 9);
        assert_eq!(keys(&d), vec![2, 4, 6]);
    }

    #[test]
    fn insert_sorted_randomized_stays_sorted() {
        use rand::rngs::SmallRng;
        use rand::{Rng, SeedableRng};
        let mut rng = SmallRng::seed_from_u64(42);
        for cap in [1usize, 2, 3, 7, 16] {
            let mut d = DeletionBuffer::new(cap);
            let mut model: Vec<u32> = Vec::new();
            for _ in 0..1000 {
                if !d.is_full() && (model.is_empty() || rng.random_bool(0.6)) {
                    let k = rng.random_range(0..50);
                    d.insert_sorted(Element::new(k, 0));
                    model.push(k);
                    model.sort_unstable();
                } else {
                    assert_eq!(d.pop_first().map(|e| e.key), Some(model.remove(0)));
                }
                assert_eq!(keys(&d), model);
            }
        }
    }

    #[test]
    fn insertion_buffer_capacity_enforced() {
        let mut i = InsertionBuffer::new(2);
        i.push(Element::new(1, 0));
        i.push(Element::new(2, 0));
        assert!(i.is_full());
        i.clear();
        assert!(i.is_empty());
    }
}

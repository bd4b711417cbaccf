//! A sequential queue wrapped with an insertion buffer `I` and a sorted
//! deletion buffer `D`.
//!
//! The invariant is that, unless the whole queue is empty, `D` is nonempty
//! and holds the smallest elements of `D ∪ I ∪ M` (with `M` the main
//! queue), so the minimum is always the first element of `D`. Most
//! operations touch only the buffers; `M` is accessed in batches of up to
//! the buffer capacity.

use crate::buffer::{DeletionBuffer, InsertionBuffer};
use crate::spq::SequentialQueue;
use crate::Element;

#[derive(Debug)]
pub struct BufferedSpq<S> {
    deletion: DeletionBuffer,
    insertion: InsertionBuffer,
    main: S,
    batch: Vec<Element>,
}

impl<S: SequentialQueue> BufferedSpq<S> {
    pub fn new(buffer_size: usize, spq_capacity: usize) -> Self {
        Self::with_main(S::with_capacity(spq_capacity), buffer_size)
    }

    pub fn with_main(main: S, buffer_size: usize) -> Self {
        BufferedSpq {
            deletion: DeletionBuffer::new(buffer_size),
            insertion: InsertionBuffer::new(buffer_size),
            main,
            batch: Vec::with_capacity(buffer_size),
        }
    }

    pub fn len(&self) -> usize {
        self.deletion.len() + self.insertion.len() + self.main.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deletion.is_empty()
    }

    /// Key of the smallest element, `None` when empty.
    pub fn min_key(&self) -> Option<u32> {
        self.deletion.first().map(|e| e.key)
    }

    pub fn insert(&mut self, e: Element) {
        let mut e = e;
        if self.deletion.is_empty() || e.key < self.deletion.max_key().unwrap() {
            if !self.deletion.is_full() {
                self.deletion.insert_sorted(e);
                return;
            }
            // e belongs in D; the old maximum is displaced towards I
            e = self.deletion.replace_max(e);
        }
        if self.insertion.is_full() {
            self.main.bulk_insert(self.insertion.as_slice());
            self.insertion.clear();
        }
        self.insertion.push(e);
    }

    /// Removes and returns the minimum, or `None` when the deletion buffer
    /// is empty (which here implies the whole queue is empty).
    pub fn delete_min(&mut self) -> Option<Element> {
        let e = self.deletion.pop_first()?;
        if self.deletion.is_empty() {
            self.refill();
        }
        Some(e)
    }

    /// Refills the empty deletion buffer: batch-extract from `M` first,
    /// then fold `I` in, swapping out anything that no longer belongs.
    fn refill(&mut self) {
        debug_assert!(self.deletion.is_empty());
        self.batch.clear();
        self.main.extract_min(self.deletion.capacity(), &mut self.batch);
        self.deletion.fill_from_sorted(&self.batch);
        let mut i = 0;
        while i < self.insertion.len() {
            let x = self.insertion.get(i);
            if !self.deletion.is_full() {
                self.deletion.insert_sorted(x);
                self.insertion.swap_remove(i);
            } else if x.key < self.deletion.max_key().unwrap() {
                let displaced = self.deletion.replace_max(x);
                self.insertion.replace(i, displaced);
                i += 1;
            } else {
                i += 1;
            }
        }
    }

    pub fn collect_elements(&self, out: &mut Vec<Element>) {
        out.extend(self.deletion.iter());
        out.extend_from_slice(self.insertion.as_slice());
        self.main.collect_elements(out);
    }

    /// Full structural validation; used by tests and quiescent checks.
    pub fn validate(&self) -> Result<(), String> {
        if self.deletion.len() > self.deletion.capacity()
            || self.insertion.len() > self.insertion.capacity()
        {
            return Err("buffer over capacity".into());
        }
        let mut prev: Option<u32> = None;
        for e in self.deletion.iter() {
            if let Some(p) = prev {
                if e.key < p {
                    return Err("deletion buffer not sorted".into());
                }
            }
            prev = Some(e.key);
        }
        if self.deletion.is_empty() && (self.insertion.len() + self.main.len()) > 0 {
            return Err("deletion buffer empty while queue holds elements".into());
        }
        if let Some(max_d) = self.deletion.max_key() {
            let mut main_elems = Vec::new();
            self.main.collect_elements(&mut main_elems);
            if main_elems.iter().any(|e| e.key < max_d) {
                return Err(format!(
                    "main queue holds an element below max(D) = {max_d}"
                ));
            }
            if self.insertion.as_slice().iter().any(|e| e.key < max_d) {
                return Err(format!(
                    "insertion buffer holds an element below max(D) = {max_d}"
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spq::DaryHeap;

    fn spq(b: usize) -> BufferedSpq<DaryHeap> {
        BufferedSpq::new(b, 1024)
    }

    fn d_keys(q: &BufferedSpq<DaryHeap>) -> Vec<u32> {
        q.deletion.iter().map(|e| e.key).collect()
    }

    #[test]
    fn first_insert_goes_to_deletion_buffer() {
        let mut q = spq(16);
        q.insert(Element::new(7, 0));
        assert_eq!(d_keys(&q), vec![7]);
        assert_eq!(q.insertion.len(), 0);
        assert_eq!(q.main.len(), 0);
        assert_eq!(q.min_key(), Some(7));
    }

    #[test]
    fn insert_below_full_deletion_buffer_displaces_max() {
        let mut q = spq(16);
        // descending keys keep routing into D until it is full
        for k in (1..=16).rev() {
            q.insert(Element::new(k, 0));
        }
        assert!(q.deletion.is_full());
        q.insert(Element::new(0, 0));
        assert_eq!(d_keys(&q), (0..=15).collect::<Vec<_>>());
        assert_eq!(q.insertion.as_slice()[0].key, 16);
        q.validate().unwrap();
    }

    #[test]
    fn min_of_empty_is_none() {
        let q = spq(4);
        assert_eq!(q.min_key(), None);
    }

    #[test]
    fn delete_from_empty_fails() {
        let mut q = spq(4);
        assert_eq!(q.delete_min(), None);
    }

    #[test]
    fn refill_pulls_from_main_then_insertion_buffer() {
        // Build the D=[2], I=[5,1], M={3} configuration by hand.
        let mut q = spq(16);
        q.deletion.insert_sorted(Element::new(2, 0));
        q.insertion.push(Element::new(5, 0));
        q.insertion.push(Element::new(1, 0));
        q.main.insert(Element::new(3, 0));

        assert_eq!(q.delete_min().unwrap().key, 2);
        assert_eq!(q.min_key(), Some(1));
        assert_eq!(d_keys(&q), vec![1, 3, 5]);
        assert!(q.insertion.is_empty());
        q.validate().unwrap();
    }

    #[test]
    fn refill_takes_smallest_batch_from_main() {
        let mut q = spq(16);
        q.deletion.insert_sorted(Element::new(0, 0));
        for k in 1..=32 {
            q.main.insert(Element::new(k, 0));
        }
        assert_eq!(q.delete_min().unwrap().key, 0);
        assert_eq!(d_keys(&q), (1..=16).collect::<Vec<_>>());
        assert_eq!(q.main.len(), 16);
        q.validate().unwrap();
    }

    #[test]
    fn refill_tops_up_from_insertion_buffer_when_main_short() {
        let mut q = spq(16);
        q.deletion.insert_sorted(Element::new(0, 0));
        q.insertion.push(Element::new(5, 0));
        q.main.insert(Element::new(10, 0));
        q.main.insert(Element::new(20, 0));
        assert_eq!(q.delete_min().unwrap().key, 0);
        assert_eq!(d_keys(&q), vec![5, 10, 20]);
        q.validate().unwrap();
    }

    // The refill implemented above batches from M first and then swaps
    // against I. The simpler alternative flushes I into M and extracts the
    // smallest b elements in one go. Both must produce the same deletion
    // buffer contents.
    #[test]
    fn refill_matches_flush_then_extract_alternative() {
        use rand::rngs::SmallRng;
        use rand::{Rng, SeedableRng};
        let mut rng = SmallRng::seed_from_u64(21);
        for _ in 0..500 {
            let b = rng.random_range(1..=16);
            let m_len = rng.random_range(0..48);
            let i_len = rng.random_range(0..=b);
            let mut q: BufferedSpq<DaryHeap> = BufferedSpq::new(b, 256);
            let mut pool: Vec<u32> = Vec::new();
            for _ in 0..m_len {
                let k = rng.random_range(0..64);
                q.main.insert(Element::new(k, 0));
                pool.push(k);
            }
            for _ in 0..i_len {
                let k = rng.random_range(0..64);
                q.insertion.push(Element::new(k, 0));
                pool.push(k);
            }

            // alternative: flush I to M, then extract the b smallest
            let mut flushed = pool.clone();
            flushed.sort_unstable();
            let expected_d: Vec<u32> = flushed.iter().copied().take(b).collect();

            q.refill();
            let got_d: Vec<u32> = q.deletion.iter().map(|e| e.key).collect();
            assert_eq!(got_d, expected_d);

            // nothing lost: the rest is still in I and M
            let mut rest: Vec<u32> = q
                .insertion
                .as_slice()
                .iter()
                .map(|e| e.key)
                .collect();
            let mut main_elems = Vec::new();
            q.main.collect_elements(&mut main_elems);
            rest.extend(main_elems.iter().map(|e| e.key));
            rest.extend(got_d.iter().copied());
            rest.sort_unstable();
            assert_eq!(rest, flushed);
        }
    }

    #[test]
    fn min_tracks_global_minimum_under_random_inserts() {
        use rand::rngs::SmallRng;
        use rand::{Rng, SeedableRng};
        let mut rng = SmallRng::seed_from_u64(5);
        let mut q = spq(16);
        let mut min = u32::MAX;
        for _ in 0..100 {
            let k = rng.random::<u32>();
            min = min.min(k);
            q.insert(Element::new(k, 0));
            assert_eq!(q.min_key(), Some(min));
        }
    }

    #[test]
    fn drain_is_globally_sorted() {
        use rand::rngs::SmallRng;
        use rand::{Rng, SeedableRng};
        let mut rng = SmallRng::seed_from_u64(9);
        for b in [1usize, 2, 16] {
            let mut q = spq(b);
            let mut keys: Vec<u32> = (0..10_000).map(|_| rng.random_range(0..5000)).collect();
            for (i, &k) in keys.iter().enumerate() {
                q.insert(Element::new(k, i as u32));
            }
            keys.sort_unstable();
            let mut drained = Vec::new();
            while let Some(e) = q.delete_min() {
                drained.push(e.key);
            }
            assert_eq!(drained, keys);
        }
    }
}

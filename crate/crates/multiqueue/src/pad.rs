//! Padding wrapper that keeps concurrently accessed values on separate
//! cache lines (or separate pages with the `numa-pages` feature).

use std::ops::{Deref, DerefMut};

/// Pads and aligns `T` so neighboring values in an array never share a
/// cache line.
#[cfg_attr(feature = "numa-pages", repr(align(4096)))]
#[cfg_attr(not(feature = "numa-pages"), repr(align(64)))]
#[derive(Default)]
pub struct CachePadded<T>(T);

impl<T> CachePadded<T> {
    pub fn new(t: T) -> Self {
        CachePadded(t)
    }
}

impl<T> Deref for CachePadded<T> {
    type Target = T;

    fn deref(&self) -> &T {
        &self.0
    }
}

impl<T> DerefMut for CachePadded<T> {
    fn deref_mut(&mut self) -> &mut T {
        &mut self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alignment_is_at_least_a_cache_line() {
        assert!(std::mem::align_of::<CachePadded<u8>>() >= 64);
        assert_eq!(std::mem::size_of::<CachePadded<u8>>() % 64, 0);
    }
}

//! Indexed binary max-heap over vertex ids with in-place key updates.
//!
//! Ties between equal keys go to the smaller id.

use std::cmp::Ordering;

const ABSENT: u32 = u32::MAX;

/// Keys live next to their ids so sifting touches one contiguous array.
pub(crate) struct IndexedMaxHeap<K> {
    heap: Vec<(K, u32)>,
    pos: Vec<u32>,
}

impl<K: Ord + Copy> IndexedMaxHeap<K> {
    /// Heap holding every id in `0..keys.len()`, built in linear time.
    pub fn from_keys(keys: Vec<K>) -> Self {
        let n = keys.len();
        assert!(n < ABSENT as usize, "too many ids");
        let mut h = IndexedMaxHeap { heap: keys.into_iter().zip(0..).collect(), pos: (0..n as u32).collect() };
        for i in (0..n / 2).rev() {
            h.sift_down(i);
        }
        h
    }

    #[cfg(test)]
    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn contains(&self, id: usize) -> bool {
        self.pos[id] != ABSENT
    }

    pub fn peek(&self) -> Option<(usize, K)> {
        self.heap.first().map(|&(key, id)| (id as usize, key))
    }

    pub fn pop(&mut self) -> Option<(usize, K)> {
        let top = self.peek()?;
        self.remove(top.0);
        Some(top)
    }

    #[cfg(test)]
    pub fn push(&mut self, id: usize, key: K) {
        assert!(!self.contains(id), "id {id} already in heap");
        self.pos[id] = self.heap.len() as u32;
        self.heap.push((key, id as u32));
        self.sift_up(self.heap.len() - 1);
    }

    /// Sets the key of a present id and restores heap order.
    pub fn update(&mut self, id: usize, key: K) {
        let i = self.pos[id];
        debug_assert!(i != ABSENT);
        let i = i as usize;
        let old = std::mem::replace(&mut self.heap[i].0, key);
        match key.cmp(&old) {
            Ordering::Greater => self.sift_up(i),
            Ordering::Less => self.sift_down(i),
            Ordering::Equal => {}
        }
    }

    pub fn remove(&mut self, id: usize) {
        let i = self.pos[id];
        if i == ABSENT {
            return;
        }
        let i = i as usize;
        let last = self.heap.len() - 1;
        self.swap(i, last);
        self.heap.pop();
        self.pos[id] = ABSENT;
        if i < self.heap.len() {
            self.sift_down(i);
            self.sift_up(i);
        }
    }

    #[inline]
    fn above(&self, a: usize, b: usize) -> bool {
        // a ranks above b: larger key, then smaller id
        let (ka, ia) = self.heap[a];
        let (kb, ib) = self.heap[b];
        match ka.cmp(&kb) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => ia < ib,
        }
    }

    #[inline]
    fn swap(&mut self, a: usize, b: usize) {
        self.heap.swap(a, b);
        self.pos[self.heap[a].1 as usize] = a as u32;
        self.pos[self.heap[b].1 as usize] = b as u32;
    }

    fn sift_up(&mut self, mut i: usize) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if !self.above(i, parent) {
                break;
            }
            self.swap(i, parent);
            i = parent;
        }
    }

    fn sift_down(&mut self, mut i: usize) {
        let n = self.heap.len();
        loop {
            let (l, r) = (2 * i + 1, 2 * i + 2);
            let mut best = i;
            if l < n && self.above(l, best) {
                best = l;
            }
            if r < n && self.above(r, best) {
                best = r;
            }
            if best == i {
                break;
            }
            self.swap(i, best);
            i = best;
        }
    }
}

/// Exact comparison of nonnegative fractions `num / den`, with `den == 0`
/// read as positive infinity (all infinities compare equal).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Self {
        Ratio { num, den }
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.den == 0, other.den == 0) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            (false, false) => (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128)),
        }
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

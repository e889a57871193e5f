//! Size-bounded min-heap that keeps the `k` largest items of a stream.
//!
//! The root always holds the weakest retained item. A newcomer that beats the
//! root replaces it and is pushed down ("bubble-push") until the heap order
//! holds again; anything else is dropped without touching the store. Ties are
//! stable: the root is the *latest* arrival among equal keys, and a newcomer
//! equal to the root is rejected, so earlier arrivals always win.

struct Entry<K, T> {
    key: K,
    seq: u64,
    item: T,
}

impl<K: Ord, T> Entry<K, T> {
    /// Ranks below `other`: smaller key, or same key but arrived later.
    #[inline]
    fn weaker_than(&self, other: &Self) -> bool {
        self.key < other.key || (self.key == other.key && self.seq > other.seq)
    }
}

pub struct TopKHeap<K, T> {
    capacity: usize,
    store: Vec<Entry<K, T>>,
    arrivals: u64,
    last_sift_depth: usize,
    max_sift_depth: usize,
}

impl<K: Ord, T> TopKHeap<K, T> {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "top-k capacity must be positive");
        Self {
            capacity,
            store: Vec::with_capacity(capacity.min(1 << 16)),
            arrivals: 0,
            last_sift_depth: 0,
            max_sift_depth: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.store.len()
    }

    pub fn is_empty(&self) -> bool {
        self.store.is_empty()
    }

    /// Key of the weakest retained item.
    pub fn min_key(&self) -> Option<&K> {
        self.store.first().map(|e| &e.key)
    }

    /// Largest number of levels any single sift has moved so far.
    pub fn max_sift_depth(&self) -> usize {
        self.max_sift_depth
    }

    /// Offers an item; returns whether it was retained.
    pub fn push(&mut self, key: K, item: T) -> bool {
        let entry = Entry {
            key,
            seq: self.arrivals,
            item,
        };
        self.arrivals += 1;
        if self.store.len() < self.capacity {
            self.store.push(entry);
            let last = self.store.len() - 1;
            self.sift_up(last);
            true
        } else if entry.key > self.store[0].key {
            self.store[0] = entry;
            self.sift_down(0);
            true
        } else {
            false
        }
    }

    fn record_depth(&mut self, depth: usize) {
        self.last_sift_depth = depth;
        self.max_sift_depth = self.max_sift_depth.max(depth);
    }

    fn sift_up(&mut self, mut i: usize) {
        let mut depth = 0;
        while i > 0 {
            let parent = (i - 1) / 2;
            if !self.store[i].weaker_than(&self.store[parent]) {
                break;
            }
            self.store.swap(i, parent);
            i = parent;
            depth += 1;
        }
        self.record_depth(depth);
    }

    fn sift_down(&mut self, mut i: usize) {
        let n = self.store.len();
        let mut depth = 0;
        loop {
            let (l, r) = (2 * i + 1, 2 * i + 2);
            let mut weakest = i;
            if l < n && self.store[l].weaker_than(&self.store[weakest]) {
                weakest = l;
            }
            if r < n && self.store[r].weaker_than(&self.store[weakest]) {
                weakest = r;
            }
            if weakest == i {
                break;
            }
            self.store.swap(i, weakest);
            i = weakest;
            depth += 1;
        }
        self.record_depth(depth);
    }

    fn pop_weakest(&mut self) -> Option<Entry<K, T>> {
        if self.store.is_empty() {
            return None;
        }
        let top = self.store.swap_remove(0);
        if !self.store.is_empty() {
            self.sift_down(0);
        }
        Some(top)
    }

    /// Drains the heap, strongest first; equal keys keep arrival order.
    pub fn finalize(&mut self) -> Vec<(K, T)> {
        let mut out = Vec::with_capacity(self.store.len());
        while let Some(e) = self.pop_weakest() {
            out.push((e.key, e.item));
        }
        out.reverse();
        out
    }

    /// Checks the heap order over the whole store.
    pub fn is_valid_heap(&self) -> bool {
        (1..self.store.len()).all(|i| !self.store[i].weaker_than(&self.store[(i - 1) / 2]))
    }
}

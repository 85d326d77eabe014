//! Indexed binary min-heap over node ids with decrease-key.

const ABSENT: usize = usize::MAX;

#[derive(Debug, Clone)]
pub(crate) struct IndexedHeap {
    items: Vec<(i64, usize)>,
    pos: Vec<usize>,
}

impl IndexedHeap {
    pub fn new(n: usize) -> Self {
        IndexedHeap { items: Vec::new(), pos: vec![ABSENT; n] }
    }

    pub fn clear(&mut self) {
        for &(_, v) in &self.items {
            self.pos[v] = ABSENT;
        }
        self.items.clear();
    }

    /// Inserts `v` or lowers its key. Larger keys are ignored.
    pub fn push_or_decrease(&mut self, v: usize, key: i64) {
        let p = self.pos[v];
        if p == ABSENT {
            self.items.push((key, v));
            let i = self.items.len() - 1;
            self.pos[v] = i;
            self.sift_up(i);
        } else if key < self.items[p].0 {
            self.items[p].0 = key;
            self.sift_up(p);
        }
    }

    /// Removes the entry with the smallest key; equal keys pop lowest node first.
    pub fn pop(&mut self) -> Option<(usize, i64)> {
        if self.items.is_empty() {
            return None;
        }
        let last = self.items.len() - 1;
        self.swap(0, last);
        let (key, v) = self.items.pop().unwrap();
        self.pos[v] = ABSENT;
        if !self.items.is_empty() {
            self.sift_down(0);
        }
        Some((v, key))
    }

    fn less(&self, a: usize, b: usize) -> bool {
        self.items[a] < self.items[b]
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.items.swap(a, b);
        self.pos[self.items[a].1] = a;
        self.pos[self.items[b].1] = b;
    }

    fn sift_up(&mut self, mut i: usize) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if !self.less(i, parent) {
                break;
            }
            self.swap(i, parent);
            i = parent;
        }
    }

    fn sift_down(&mut self, mut i: usize) {
        let len = self.items.len();
        loop {
            let l = 2 * i + 1;
            if l >= len {
                break;
            }
            let r = l + 1;
            let c = if r < len && self.less(r, l) { r } else { l };
            if !self.less(c, i) {
                break;
            }
            self.swap(i, c);
            i = c;
        }
    }
}

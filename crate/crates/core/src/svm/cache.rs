use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

/// LRU cache of kernel rows bounded by a byte budget.
///
/// Rows are handed out as `Rc` so a caller can hold two rows while a third
/// fetch evicts. Hits and misses return identical values; the cache only
/// saves recomputation.
pub(crate) struct RowCache {
    capacity: usize,
    rows: HashMap<usize, (Rc<[f64]>, u64)>,
    recency: BTreeMap<u64, usize>,
    tick: u64,
    pub(crate) hits: u64,
    pub(crate) misses: u64,
}

impl RowCache {
    pub(crate) fn new(cache_bytes: usize, row_len: usize) -> Self {
        let row_bytes = (row_len * std::mem::size_of::<f64>()).max(1);
        RowCache {
            capacity: cache_bytes / row_bytes,
            rows: HashMap::new(),
            recency: BTreeMap::new(),
            tick: 0,
            hits: 0,
            misses: 0,
        }
    }

    pub(crate) fn get_or_insert_with(&mut self, key: usize, compute: impl FnOnce() -> Vec<f64>) -> Rc<[f64]> {
        self.tick += 1;
        if let Some((row, last)) = self.rows.get_mut(&key) {
            self.hits += 1;
            self.recency.remove(last);
            *last = self.tick;
            self.recency.insert(self.tick, key);
            return Rc::clone(row);
        }
        self.misses += 1;
        let row: Rc<[f64]> = compute().into();
        if self.capacity == 0 {
            return row;
        }
        if self.rows.len() >= self.capacity {
            if let Some((_, victim)) = self.recency.pop_first() {
                self.rows.remove(&victim);
            }
        }
        self.rows.insert(key, (Rc::clone(&row), self.tick));
        self.recency.insert(self.tick, key);
        row
    }

    #[cfg(test)]
    fn contains(&self, key: usize) -> bool {
        self.rows.contains_key(&key)
    }
}

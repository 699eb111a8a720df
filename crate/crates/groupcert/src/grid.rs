//! Flat indexing of the finite group `(1/q) Z^k / Z^k`.

use crate::rational::{rat, Rat};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridIndexer {
    pub k: usize,
    pub q: u64,
}

impl GridIndexer {
    pub fn new(k: usize, q: u64) -> Self {
        assert!(k >= 1 && q >= 1);
        GridIndexer { k, q }
    }

    pub fn len(&self) -> usize {
        (self.q as usize).pow(self.k as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Multi-index (each coordinate in `0..q`) to flat index, row-major with
    /// the first coordinate most significant.
    pub fn flatten(&self, coords: &[u64]) -> usize {
        debug_assert_eq!(coords.len(), self.k);
        coords.iter().fold(0usize, |acc, &c| {
            acc * self.q as usize + (c % self.q) as usize
        })
    }

    pub fn unflatten(&self, mut idx: usize) -> Vec<u64> {
        let mut coords = vec![0u64; self.k];
        for i in (0..self.k).rev() {
            coords[i] = (idx % self.q as usize) as u64;
            idx /= self.q as usize;
        }
        coords
    }

    /// The rational point of the fundamental domain at a flat index.
    pub fn point(&self, idx: usize) -> Vec<Rat> {
        self.unflatten(idx)
            .into_iter()
            .map(|c| rat(c as i64, self.q as i64))
            .collect()
    }

    /// Index of the componentwise sum modulo 1.
    pub fn add(&self, a: usize, b: usize) -> usize {
        let ca = self.unflatten(a);
        let cb = self.unflatten(b);
        let sum: Vec<u64> = ca.iter().zip(&cb).map(|(x, y)| (x + y) % self.q).collect();
        self.flatten(&sum)
    }

    /// Index of the componentwise negation modulo 1.
    pub fn neg(&self, a: usize) -> usize {
        let ca = self.unflatten(a);
        let n: Vec<u64> = ca.iter().map(|x| (self.q - x % self.q) % self.q).collect();
        self.flatten(&n)
    }

    /// Index of `-f - x` modulo 1, where `f` is itself given by index.
    pub fn reflect(&self, f_idx: usize, x: usize) -> usize {
        self.neg(self.add(f_idx, x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let g = GridIndexer::new(2, 5);
        for idx in 0..g.len() {
            assert_eq!(g.flatten(&g.unflatten(idx)), idx);
        }
    }

    #[test]
    fn arithmetic() {
        let g = GridIndexer::new(1, 5);
        // f = 2/5 at index 2; reflection of 1/5 is -2/5 - 1/5 = -3/5 = 2/5
        assert_eq!(g.reflect(2, 1), 2);
        assert_eq!(g.add(3, 4), 2);
        assert_eq!(g.neg(0), 0);
        assert_eq!(g.neg(2), 3);
    }

    #[test]
    fn points() {
        let g = GridIndexer::new(2, 4);
        assert_eq!(g.point(g.flatten(&[1, 3])), vec![rat(1, 4), rat(3, 4)]);
    }
}

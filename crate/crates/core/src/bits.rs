//! Dense square bit matrix used as the relation store of transfer systems.

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub(crate) struct BitMatrix {
    size: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn new(size: usize) -> Self {
        let words = size.div_ceil(64).max(1);
        Self {
            size,
            words,
            data: vec![0; size * words],
        }
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn words(&self) -> usize {
        self.words
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.data[row * self.words + col / 64] >> (col % 64) & 1 == 1
    }

    /// Sets a bit, returning whether it was newly set.
    #[inline]
    pub fn set(&mut self, row: usize, col: usize) -> bool {
        let w = &mut self.data[row * self.words + col / 64];
        let bit = 1u64 << (col % 64);
        let fresh = *w & bit == 0;
        *w |= bit;
        fresh
    }

    #[inline]
    pub fn clear(&mut self, row: usize, col: usize) {
        self.data[row * self.words + col / 64] &= !(1u64 << (col % 64));
    }

    #[inline]
    pub fn row(&self, row: usize) -> &[u64] {
        &self.data[row * self.words..(row + 1) * self.words]
    }

    /// `row[dst] |= row[src]`; returns whether anything changed.
    pub fn or_row_into(&mut self, src: usize, dst: usize) -> bool {
        let mut changed = false;
        for w in 0..self.words {
            let s = self.data[src * self.words + w];
            let d = &mut self.data[dst * self.words + w];
            if s & !*d != 0 {
                *d |= s;
                changed = true;
            }
        }
        changed
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn ones_in_row(&self, row: usize) -> impl Iterator<Item = usize> + '_ {
        iter_ones(self.row(row))
    }

    /// Whether every bit of `self` is also set in `other`.
    pub fn is_subset(&self, other: &BitMatrix) -> bool {
        self.data
            .iter()
            .zip(&other.data)
            .all(|(a, b)| a & !b == 0)
    }
}

pub(crate) fn iter_ones(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(wi, &w)| {
        let mut rest = w;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let tz = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * 64 + tz)
            }
        })
    })
}

/// Bit set over `0..len` stored as words; `words_for(len)` words long.
pub(crate) fn words_for(len: usize) -> usize {
    len.div_ceil(64).max(1)
}

#[inline]
pub(crate) fn set_bit(words: &mut [u64], i: usize) {
    words[i / 64] |= 1u64 << (i % 64);
}

#[inline]
pub(crate) fn get_bit(words: &[u64], i: usize) -> bool {
    words[i / 64] >> (i % 64) & 1 == 1
}

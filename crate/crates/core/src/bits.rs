//! Small square bit matrices for relation composition scans.

/// Row-major bit matrix; the caller decides whether the diagonal is set.
#[derive(Clone)]
pub(crate) struct BitMatrix {
    pub dim: usize,
    words: usize,
    rows: Vec<u64>,
}

impl BitMatrix {
    pub fn new(dim: usize) -> BitMatrix {
        let words = dim.div_ceil(64).max(1);
        BitMatrix { dim, words, rows: vec![0; words * dim.max(1)] }
    }

    pub fn identity(dim: usize) -> BitMatrix {
        let mut m = BitMatrix::new(dim);
        for i in 0..dim {
            m.set(i, i);
        }
        m
    }

    pub fn set(&mut self, r: usize, c: usize) {
        self.rows[r * self.words + c / 64] |= 1 << (c % 64);
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r * self.words + c / 64] & (1 << (c % 64)) != 0
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.rows[r * self.words..(r + 1) * self.words]
    }

    pub fn or_row_into(&self, r: usize, acc: &mut [u64]) {
        for (a, w) in acc.iter_mut().zip(self.row(r)) {
            *a |= w;
        }
    }

    pub fn row_bits(&self, r: usize) -> impl Iterator<Item = usize> + '_ {
        let row = self.row(r);
        (0..self.dim).filter(move |&c| row[c / 64] & (1 << (c % 64)) != 0)
    }
}

/// Boolean matrix product a;b (relational composition).
pub(crate) fn compose(a: &BitMatrix, b: &BitMatrix) -> BitMatrix {
    let mut out = BitMatrix::new(a.dim);
    for s in 0..a.dim {
        let mut acc = vec![0u64; out.words];
        for u in a.row_bits(s) {
            b.or_row_into(u, &mut acc);
        }
        out.rows[s * out.words..(s + 1) * out.words].copy_from_slice(&acc);
    }
    out
}

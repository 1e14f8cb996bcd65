//! Row-reduction over GF(2) on bit-packed rows.

use crate::bits::BitWord;

/// Dense GF(2) matrix stored as packed rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitWord>,
}

impl BitMatrix {
    pub fn new(cols: usize, rows: Vec<BitWord>) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        BitMatrix { cols, rows }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[BitWord] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<BitWord> {
        self.rows
    }

    /// Reduced row-echelon form, choosing pivots only among `columns`, in the
    /// order given. Rows that end up zero on every allowed column are moved
    /// below the pivot rows. Returns the pivot columns; row `i` has its
    /// pivot at `pivots[i]`.
    pub fn rref_on(&mut self, columns: impl IntoIterator<Item = usize>) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in columns {
            if next == self.rows.len() {
                break;
            }
            let Some(found) = (next..self.rows.len()).find(|&r| self.rows[r].get(col)) else {
                continue;
            };
            self.rows.swap(next, found);
            let pivot_row = self.rows[next].clone();
            for (r, row) in self.rows.iter_mut().enumerate() {
                if r != next && row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
            pivots.push(col);
            next += 1;
        }
        pivots
    }

    /// Full reduced row-echelon form over all columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let cols = self.cols;
        self.rref_on(0..cols)
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of the dual space: words `h` with `row · h = 0` for every row.
    pub fn dual_basis(&self) -> Vec<BitWord> {
        let mut m = self.clone();
        let pivots = m.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut h = BitWord::zeros(self.cols);
                h.set(f, true);
                for (i, &p) in pivots.iter().enumerate() {
                    if m.rows[i].get(f) {
                        h.set(p, true);
                    }
                }
                h
            })
            .collect()
    }
}

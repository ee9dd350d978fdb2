//! Banded LU factorization with partial pivoting.

/// Square matrix with `kl` sub- and `ku` super-diagonals. Row pivoting grows
/// the upper band to `kl + ku`, which the storage reserves up front.
pub(crate) struct Banded {
    n: usize,
    kl: usize,
    ku: usize,
    /// Row-major, `n` rows of width `2 kl + ku + 1`; entry `(i, j)` lives at
    /// column `j + kl - i` of row `i` (offset `kl` leaves room for fill-in).
    data: Vec<f64>,
    piv: Vec<usize>,
}

impl Banded {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let w = 2 * kl + ku + 1;
        Banded { n, kl, ku, data: vec![0.0; n * w], piv: Vec::new() }
    }

    fn width(&self) -> usize {
        2 * self.kl + self.ku + 1
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.kl + self.ku);
        i * self.width() + (j + self.kl - i)
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.idx(i, j)]
    }

    /// In-place factorization. Returns false when a pivot vanishes.
    pub fn factor(&mut self) -> bool {
        let n = self.n;
        let kl = self.kl;
        let ku_eff = self.kl + self.ku;
        self.piv = vec![0; n];
        let scale = self.data.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = self.get(k, k).abs();
            for i in k + 1..=last_row {
                let v = self.get(i, k).abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if !(best > 1e-14 * scale) {
                return false;
            }
            self.piv[k] = p;
            let last_col = (k + ku_eff).min(n - 1);
            if p != k {
                for j in k..=last_col {
                    let (a, b) = (self.idx(k, j), self.idx(p, j));
                    self.data.swap(a, b);
                }
            }
            let d = self.get(k, k);
            for i in k + 1..=last_row {
                let li = self.idx(i, k);
                let m = self.data[li] / d;
                self.data[li] = m;
                if m != 0.0 {
                    for j in k + 1..=last_col {
                        let kj = self.get(k, j);
                        let ij = self.idx(i, j);
                        self.data[ij] -= m * kj;
                    }
                }
            }
        }
        true
    }

    /// Solves `A x = b` after [`factor`](Self::factor).
    pub fn solve(&self, b: &mut [f64]) {
        let n = self.n;
        let ku_eff = self.kl + self.ku;
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            for i in k + 1..=(k + self.kl).min(n - 1) {
                b[i] -= self.get(i, k) * bk;
            }
        }
        for k in (0..n).rev() {
            let mut s = b[k];
            for j in k + 1..=(k + ku_eff).min(n - 1) {
                s -= self.get(k, j) * b[j];
            }
            b[k] = s / self.get(k, k);
        }
    }
}

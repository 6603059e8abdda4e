//! LU factorization with partial pivoting for banded matrices.

/// Factorized `n × n` matrix with `kl` sub- and `ku` super-diagonals.
///
/// Row `i` stores columns `i − kl ..= i + kl + ku`; the extra `kl` slots
/// hold fill-in created by row interchanges.
pub(crate) struct BandedLu {
    n: usize,
    kl: usize,
    width: usize,
    data: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandedLu {
    /// `entry(i, j)` is queried for `|i − j|` within the band only.
    pub(crate) fn factor(n: usize, kl: usize, ku: usize, entry: impl Fn(usize, usize) -> f64) -> Self {
        let width = 2 * kl + ku + 1;
        let mut lu = Self {
            n,
            kl,
            width,
            data: vec![0.0; n * width],
            pivots: vec![0; n],
        };
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                *lu.at(i, j) = entry(i, j);
            }
        }
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + kl + ku).min(n - 1);
            let mut p = k;
            for r in k + 1..=last_row {
                if lu.get(r, k).abs() > lu.get(p, k).abs() {
                    p = r;
                }
            }
            lu.pivots[k] = p;
            if p != k {
                for j in k..=last_col {
                    let a = lu.get(k, j);
                    let b = lu.get(p, j);
                    *lu.at(k, j) = b;
                    *lu.at(p, j) = a;
                }
            }
            let d = lu.get(k, k);
            if d == 0.0 {
                continue;
            }
            for r in k + 1..=last_row {
                let l = lu.get(r, k) / d;
                *lu.at(r, k) = l;
                if l != 0.0 {
                    for j in k + 1..=last_col {
                        let u = lu.get(k, j);
                        *lu.at(r, j) -= l * u;
                    }
                }
            }
        }
        lu
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.kl - i)
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.idx(i, j)]
    }

    #[inline]
    fn at(&mut self, i: usize, j: usize) -> &mut f64 {
        let k = self.idx(i, j);
        &mut self.data[k]
    }

    pub(crate) fn solve_in_place(&self, b: &mut [f64]) {
        let (n, kl) = (self.n, self.kl);
        let ku_fill = self.width - kl - 1;
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            for r in k + 1..=(k + kl).min(n - 1) {
                b[r] -= self.get(r, k) * bk;
            }
        }
        for k in (0..n).rev() {
            let mut acc = b[k];
            for j in k + 1..=(k + ku_fill).min(n - 1) {
                acc -= self.get(k, j) * b[j];
            }
            b[k] = acc / self.get(k, k);
        }
    }
}

//! Small integer matrices: Smith normal form with unimodular transforms.

/// Dense integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<i128>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols);
            for (c, &v) in row.iter().enumerate() {
                m.set(r, c, v as i128);
            }
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> i128 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: i128) {
        self.data[r * self.cols + c] = v;
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// row_a += f * row_b
    fn add_row(&mut self, a: usize, b: usize, f: i128) {
        for c in 0..self.cols {
            let v = self.get(a, c) + f * self.get(b, c);
            self.set(a, c, v);
        }
    }

    /// col_a += f * col_b
    fn add_col(&mut self, a: usize, b: usize, f: i128) {
        for r in 0..self.rows {
            let v = self.get(r, a) + f * self.get(r, b);
            self.set(r, a, v);
        }
    }

    fn negate_row(&mut self, a: usize) {
        for c in 0..self.cols {
            let v = -self.get(a, c);
            self.set(a, c, v);
        }
    }
}

/// `u * a * v == d` with `u`, `v` unimodular and `d` diagonal, each diagonal
/// entry dividing the next.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub d: IntMatrix,
}

impl Smith {
    pub fn invariant_factors(&self) -> Vec<i128> {
        (0..self.d.rows.min(self.d.cols)).map(|i| self.d.get(i, i)).filter(|&x| x != 0).collect()
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> Smith {
    let mut d = a.clone();
    let mut u = IntMatrix::identity(a.rows);
    let mut v = IntMatrix::identity(a.cols);
    let n = a.rows.min(a.cols);
    for t in 0..n {
        loop {
            // Pivot: smallest nonzero absolute value in the trailing block.
            let mut best: Option<(usize, usize)> = None;
            for r in t..d.rows {
                for c in t..d.cols {
                    let x = d.get(r, c).abs();
                    if x != 0 && best.is_none_or(|(br, bc)| x < d.get(br, bc).abs()) {
                        best = Some((r, c));
                    }
                }
            }
            let Some((pr, pc)) = best else {
                return Smith { u, v, d };
            };
            d.swap_rows(t, pr);
            u.swap_rows(t, pr);
            d.swap_cols(t, pc);
            v.swap_cols(t, pc);
            let p = d.get(t, t);
            let mut clean = true;
            for r in t + 1..d.rows {
                let f = d.get(r, t).div_euclid(p);
                if f != 0 {
                    d.add_row(r, t, -f);
                    u.add_row(r, t, -f);
                }
                if d.get(r, t) != 0 {
                    clean = false;
                }
            }
            for c in t + 1..d.cols {
                let f = d.get(t, c).div_euclid(p);
                if f != 0 {
                    d.add_col(c, t, -f);
                    v.add_col(c, t, -f);
                }
                if d.get(t, c) != 0 {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // Divisibility of the remaining block.
            let mut bad = None;
            'outer: for r in t + 1..d.rows {
                for c in t + 1..d.cols {
                    if d.get(r, c) % p != 0 {
                        bad = Some(r);
                        break 'outer;
                    }
                }
            }
            match bad {
                Some(r) => {
                    d.add_row(t, r, 1);
                    u.add_row(t, r, 1);
                }
                None => break,
            }
        }
        if d.get(t, t) < 0 {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    Smith { u, v, d }
}

/// Determinant by fraction-free elimination.
pub fn determinant(a: &IntMatrix) -> i128 {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut m = a.clone();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if m.get(k, k) == 0 {
            let Some(sel) = (k + 1..n).find(|&r| m.get(r, k) != 0) else {
                return 0;
            };
            m.swap_rows(k, sel);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (m.get(i, j) * m.get(k, k) - m.get(i, k) * m.get(k, j)) / prev;
                m.set(i, j, v);
            }
            m.set(i, k, 0);
        }
        prev = m.get(k, k);
    }
    if n == 0 {
        1
    } else {
        sign * m.get(n - 1, n - 1)
    }
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

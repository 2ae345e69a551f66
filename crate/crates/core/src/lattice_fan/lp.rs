//! Exact phase-one simplex: feasibility of `A x = b, x >= 0`.

use num_traits::{One, Signed, Zero};

use crate::linalg::Q;

/// Returns true when some `x >= 0` satisfies `a x = b`.
///
/// Bland's rule keeps the pivoting finite; arithmetic is exact.
pub fn feasible(a: &[Vec<Q>], b: &[Q]) -> bool {
    let m = a.len();
    if m == 0 {
        return true;
    }
    let n = a[0].len();
    // Tableau columns: n originals, m artificials, rhs.
    let width = n + m + 1;
    let mut t: Vec<Vec<Q>> = Vec::with_capacity(m + 1);
    for (i, row) in a.iter().enumerate() {
        let flip = b[i].is_negative();
        let mut r = vec![Q::zero(); width];
        for j in 0..n {
            r[j] = if flip { -row[j].clone() } else { row[j].clone() };
        }
        r[n + i] = Q::one();
        r[width - 1] = if flip { -b[i].clone() } else { b[i].clone() };
        t.push(r);
    }
    // Objective: minimise the sum of artificials, expressed in reduced form.
    let mut obj = vec![Q::zero(); width];
    for r in &t {
        for j in 0..n {
            obj[j] -= &r[j];
        }
        obj[width - 1] -= &r[width - 1];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    loop {
        let Some(enter) = (0..n + m).find(|&j| obj[j].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, Q)> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &t[i][width - 1] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((pr, _)) = leave else {
            // Unbounded direction cannot occur for a bounded-below objective.
            break;
        };
        let piv = t[pr][enter].clone();
        for v in t[pr].iter_mut() {
            *v /= &piv;
        }
        let prow = t[pr].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i == pr || row[enter].is_zero() {
                continue;
            }
            let f = row[enter].clone();
            for (v, p) in row.iter_mut().zip(&prow) {
                *v -= &f * p;
            }
        }
        let f = obj[enter].clone();
        for (v, p) in obj.iter_mut().zip(&prow) {
            *v -= &f * p;
        }
        basis[pr] = enter;
    }
    obj[width - 1].is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;

    #[test]
    fn simple_feasibility() {
        // x + y = 1, x - y = 0
        let a = vec![vec![q(1), q(1)], vec![q(1), q(-1)]];
        assert!(feasible(&a, &[q(1), q(0)]));
        // x + y = -1 has no nonnegative solution
        assert!(!feasible(&[vec![q(1), q(1)]], &[q(-1)]));
        // x - y = 0, x = 1 - forces y = 1
        assert!(feasible(&[vec![q(1), q(-1)], vec![q(1), q(0)]], &[q(0), q(1)]));
    }
}

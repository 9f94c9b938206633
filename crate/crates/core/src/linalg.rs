//! Small dense linear algebra over any [`Scalar`]: determinants, rank and
//! square solves by Gaussian elimination.

use crate::scalar::{is_negligible, Scalar};

fn scale_of<T: Scalar>(rows: &[Vec<T>]) -> T {
    let mut s = T::one();
    for v in rows.iter().flatten() {
        let a = v.abs();
        if a > s {
            s = a;
        }
    }
    s
}

/// Chooses the pivot row for `col` among `rows[from..]`.
fn pivot<T: Scalar>(m: &[Vec<T>], col: usize, from: usize, scale: &T) -> Option<usize> {
    if T::EXACT {
        (from..m.len()).find(|&r| !m[r][col].is_zero())
    } else {
        let best = (from..m.len()).max_by(|&a, &b| {
            m[a][col]
                .abs()
                .partial_cmp(&m[b][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        (!is_negligible(&m[best][col], scale)).then_some(best)
    }
}

pub fn determinant<T: Scalar>(mut m: Vec<Vec<T>>) -> T {
    let n = m.len();
    if n == 0 {
        return T::one();
    }
    if n == 2 {
        return m[0][0].clone() * m[1][1].clone() - m[0][1].clone() * m[1][0].clone();
    }
    let scale = scale_of(&m);
    let mut det = T::one();
    for col in 0..n {
        let Some(p) = pivot(&m, col, col, &scale) else {
            return T::zero();
        };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        let piv = m[col][col].clone();
        det = det * piv.clone();
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone() / piv.clone();
            for c in col..n {
                let delta = factor.clone() * m[col][c].clone();
                m[r][c] = m[r][c].clone() - delta;
            }
        }
    }
    det
}

pub fn rank<T: Scalar>(mut m: Vec<Vec<T>>) -> usize {
    if m.is_empty() {
        return 0;
    }
    let cols = m[0].len();
    let scale = scale_of(&m);
    let mut row = 0;
    for col in 0..cols {
        if row == m.len() {
            break;
        }
        let Some(p) = pivot(&m, col, row, &scale) else {
            continue;
        };
        m.swap(p, row);
        let piv = m[row][col].clone();
        for r in row + 1..m.len() {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone() / piv.clone();
            for c in col..cols {
                let delta = factor.clone() * m[row][c].clone();
                m[r][c] = m[r][c].clone() - delta;
            }
        }
        row += 1;
    }
    row
}

/// Solves the square system `a x = b`; `None` when `a` is singular.
pub fn solve<T: Scalar>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Option<Vec<T>> {
    let n = a.len();
    let scale = scale_of(&a);
    for col in 0..n {
        let p = pivot(&a, col, col, &scale)?;
        a.swap(p, col);
        b.swap(p, col);
        let piv = a[col][col].clone();
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone() / piv.clone();
            for c in col..n {
                let delta = factor.clone() * a[col][c].clone();
                a[r][c] = a[r][c].clone() - delta;
            }
            let delta = factor * b[col].clone();
            b[r] = b[r].clone() - delta;
        }
    }
    Some(
        b.into_iter()
            .zip(a.iter().enumerate())
            .map(|(bi, (i, row))| bi / row[i].clone())
            .collect(),
    )
}

/// Strictly increasing `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    #[test]
    fn det_matches_cofactor_expansion() {
        let m = vec![vec![q(2), q(-1), q(0)], vec![q(1), q(3), q(4)], vec![q(0), q(5), q(-2)]];
        // 2(3*-2 - 4*5) - (-1)(1*-2 - 0) + 0
        assert_eq!(determinant(m), q(2 * (-6 - 20) - 2));
    }

    #[test]
    fn rank_and_solve() {
        let m = vec![vec![q(1), q(2)], vec![q(2), q(4)], vec![q(0), q(0)]];
        assert_eq!(rank(m), 1);
        let x = solve(vec![vec![q(2), q(1)], vec![q(1), q(3)]], vec![q(3), q(5)]).unwrap();
        assert_eq!(x, vec![Rational::from_ratio(4, 5), Rational::from_ratio(7, 5)]);
        assert!(solve(vec![vec![q(1), q(2)], vec![q(2), q(4)]], vec![q(1), q(1)]).is_none());
    }

    #[test]
    fn combination_counts() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(5, 3).len(), 10);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
        assert_eq!(combinations(2, 3).len(), 0);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert_eq!(combinations(4, 2)[1], vec![0, 2]);
    }
}

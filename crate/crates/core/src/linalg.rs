//! Small exact linear algebra: Gaussian elimination over `ℤ₂` and Smith
//! normal form over `ℤ`.

/// Reduced row echelon form over `ℤ₂`. Returns the pivot column of each
/// nonzero row; `rows` is reduced in place.
fn rref(rows: &mut [Vec<u8>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][col] & 1 == 1) else { continue };
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i != r && rows[i][col] & 1 == 1 {
                let pivot_row = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                    *x ^= y;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

fn reduce(m: &[Vec<u8>]) -> Vec<Vec<u8>> {
    m.iter().map(|row| row.iter().map(|x| x & 1).collect()).collect()
}

pub fn rank_gf2(m: &[Vec<u8>], ncols: usize) -> usize {
    let mut rows = reduce(m);
    rref(&mut rows, ncols).len()
}

/// Basis of `{v : M v = 0}` over `ℤ₂`, in reduced form: basis vector `k` is
/// the only one with a 1 at its free column `free[k]`.
pub fn kernel_gf2(m: &[Vec<u8>], ncols: usize) -> Vec<Vec<u8>> {
    let mut rows = reduce(m);
    let pivots = rref(&mut rows, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u8; ncols];
            v[f] = 1;
            for (row, &p) in rows.iter().zip(&pivots) {
                v[p] = row[f];
            }
            v
        })
        .collect()
}

/// Outcome of solving `M x = s` over `ℤ₂`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gf2Solution {
    Solution(Vec<u8>),
    /// `y` with `yᵀM = 0` and `yᵀs = 1`.
    Inconsistent(Vec<u8>),
}

pub fn solve_gf2(m: &[Vec<u8>], s: &[u8], ncols: usize) -> Gf2Solution {
    let nrows = m.len();
    // Augment with [s | I] to track row combinations.
    let mut rows: Vec<Vec<u8>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<u8> = row.iter().map(|x| x & 1).collect();
            r.push(s[i] & 1);
            r.extend((0..nrows).map(|j| u8::from(i == j)));
            r
        })
        .collect();
    let pivots = rref(&mut rows, ncols);
    for row in &rows[pivots.len()..] {
        if row[ncols] == 1 {
            return Gf2Solution::Inconsistent(row[ncols + 1..].to_vec());
        }
    }
    let mut x = vec![0u8; ncols];
    for (row, &p) in rows.iter().zip(&pivots) {
        x[p] = row[ncols];
    }
    Gf2Solution::Solution(x)
}

/// Diagonal of the Smith normal form of an integer matrix (nonzero entries
/// only, each dividing the next).
pub fn smith_invariants(m: &[Vec<i64>]) -> Vec<i64> {
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    let mut t = 0;
    while t < nrows.min(ncols) {
        // Pivot: smallest nonzero magnitude in the remaining block.
        let Some((pi, pj)) = (t..nrows)
            .flat_map(|i| (t..ncols).map(move |j| (i, j)))
            .filter(|&(i, j)| a[i][j] != 0)
            .min_by_key(|&(i, j)| a[i][j].abs())
        else {
            break;
        };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let p = a[t][t];
            let mut done = true;
            for i in t + 1..nrows {
                let q = a[i][t] / p;
                if q != 0 {
                    for j in t..ncols {
                        a[i][j] -= q * a[t][j];
                    }
                }
                if a[i][t] != 0 {
                    done = false;
                }
            }
            for j in t + 1..ncols {
                let q = a[t][j] / p;
                if q != 0 {
                    for row in a.iter_mut().skip(t) {
                        row[j] -= q * row[t];
                    }
                }
                if a[t][j] != 0 {
                    done = false;
                }
            }
            if done {
                // Divisibility: fold any entry not divisible by the pivot into row t.
                let bad =
                    (t + 1..nrows).flat_map(|i| (t + 1..ncols).map(move |j| (i, j))).find(|&(i, j)| a[i][j] % p != 0);
                match bad {
                    Some((i, _)) => {
                        for j in t..ncols {
                            let v = a[i][j];
                            a[t][j] += v;
                        }
                        continue;
                    }
                    None => break,
                }
            }
            // Move the smallest nonzero entry of row/column t to the pivot.
            let (mut bi, mut bj) = (t, t);
            for i in t..nrows {
                if a[i][t] != 0 && a[i][t].abs() < a[bi][bj].abs() {
                    (bi, bj) = (i, t);
                }
            }
            for j in t..ncols {
                if a[t][j] != 0 && a[t][j].abs() < a[bi][bj].abs() {
                    (bi, bj) = (t, j);
                }
            }
            a.swap(t, bi);
            for row in a.iter_mut() {
                row.swap(t, bj);
            }
        }
        diag.push(a[t][t].unsigned_abs() as i64);
        t += 1;
    }
    diag
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf2_kernel_and_solve() {
        let m = vec![vec![1, 1, 0], vec![0, 1, 1]];
        let k = kernel_gf2(&m, 3);
        assert_eq!(k, vec![vec![1, 1, 1]]);
        assert_eq!(rank_gf2(&m, 3), 2);
        match solve_gf2(&m, &[1, 0], 3) {
            Gf2Solution::Solution(x) => {
                assert_eq!((x[0] + x[1]) % 2, 1);
                assert_eq!((x[1] + x[2]) % 2, 0);
            }
            other => panic!("{other:?}"),
        }
        let zero = vec![vec![0, 0], vec![0, 0]];
        assert_eq!(solve_gf2(&zero, &[1, 1], 2), Gf2Solution::Inconsistent(vec![1, 0]));
    }

    #[test]
    fn smith_examples() {
        assert_eq!(smith_invariants(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]), vec![2, 6, 12]);
        assert_eq!(smith_invariants(&[vec![2, 0], vec![0, 3]]), vec![1, 6]);
        assert_eq!(smith_invariants(&[vec![0, 0]]), Vec::<i64>::new());
        assert_eq!(smith_invariants(&[vec![4], vec![6]]), vec![2]);
    }
}

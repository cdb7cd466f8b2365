//! Smith normal form over the integers.

use num_integer::Integer;

pub type IMat = Vec<Vec<i128>>;

/// Result of `U · A · V = D` with `U`, `V` unimodular and `D` diagonal,
/// each diagonal entry dividing the next.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Smith {
    pub u: IMat,
    pub d: IMat,
    pub v: IMat,
}

impl Smith {
    /// Nonzero diagonal entries.
    pub fn invariant_factors(&self) -> Vec<i128> {
        (0..self.d.len().min(self.d.first().map_or(0, Vec::len)))
            .map(|i| self.d[i][i])
            .filter(|&x| x != 0)
            .collect()
    }
}

fn ident(n: usize) -> IMat {
    (0..n)
        .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
        .collect()
}

fn swap_cols(m: &mut IMat, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

/// row[dst] += k * row[src]
fn add_row(m: &mut IMat, dst: usize, src: usize, k: i128) {
    if k == 0 {
        return;
    }
    for c in 0..m[src].len() {
        let t = m[src][c] * k;
        m[dst][c] += t;
    }
}

fn add_col(m: &mut IMat, dst: usize, src: usize, k: i128) {
    if k == 0 {
        return;
    }
    for row in m.iter_mut() {
        let t = row[src] * k;
        row[dst] += t;
    }
}

pub fn smith_normal_form(a: &IMat) -> Smith {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut d = a.clone();
    let mut u = ident(rows);
    let mut v = ident(cols);

    for t in 0..rows.min(cols) {
        // Pivot: smallest nonzero absolute value in the remaining block.
        let pivot = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| d[i][j] != 0)
            .min_by_key(|&(i, j)| d[i][j].abs());
        let Some((pi, pj)) = pivot else { break };
        d.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut d, t, pj);
        swap_cols(&mut v, t, pj);

        loop {
            let mut done = true;
            for i in t + 1..rows {
                if d[i][t] != 0 {
                    let k = Integer::div_floor(&d[i][t], &d[t][t]);
                    add_row(&mut d, i, t, -k);
                    add_row(&mut u, i, t, -k);
                    if d[i][t] != 0 {
                        done = false;
                        d.swap(t, i);
                        u.swap(t, i);
                    }
                }
            }
            for j in t + 1..cols {
                if d[t][j] != 0 {
                    let k = Integer::div_floor(&d[t][j], &d[t][t]);
                    add_col(&mut d, j, t, -k);
                    add_col(&mut v, j, t, -k);
                    if d[t][j] != 0 {
                        done = false;
                        swap_cols(&mut d, t, j);
                        swap_cols(&mut v, t, j);
                    }
                }
            }
            if !done {
                continue;
            }
            // Divisibility: fold any entry not divisible by the pivot into row t.
            let bad = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| d[i][j] % d[t][t] != 0);
            match bad {
                Some((i, _)) => {
                    add_row(&mut d, t, i, 1);
                    add_row(&mut u, t, i, 1);
                }
                None => break,
            }
        }
        if d[t][t] < 0 {
            for c in 0..cols {
                d[t][c] = -d[t][c];
            }
            for c in 0..rows {
                u[t][c] = -u[t][c];
            }
        }
    }
    Smith { u, d, v }
}

pub fn imat_mul(a: &IMat, b: &IMat) -> IMat {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| (0..cols).map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum()).collect())
        .collect()
}

/// Determinant of a square integer matrix via Bareiss elimination.
pub fn idet(a: &IMat) -> i128 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    let mut m = a.clone();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&r| m[r][k] != 0) else {
                return 0;
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

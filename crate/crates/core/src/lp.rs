//! Dense two-phase simplex over exact rationals.
//!
//! Solves `min c·x  s.t.  A x = b, x >= 0`. Pricing is Dantzig's rule, switching to
//! Bland's rule after a run of degenerate pivots so the method always terminates.

use num::{BigRational, Signed, Zero, One};

pub type Q = BigRational;

#[derive(Clone, Debug)]
pub struct Lp {
    /// Row-major constraint matrix, `m` rows of `ncols` entries.
    pub rows: Vec<Vec<Q>>,
    pub rhs: Vec<Q>,
    pub cost: Vec<Q>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpStatus {
    Optimal { x: Vec<Q>, objective: Q },
    Infeasible,
    Unbounded,
}

struct Tableau {
    t: Vec<Vec<Q>>,
    basis: Vec<usize>,
    ncols: usize,
}

const DEGENERATE_SWITCH: usize = 50;

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize, obj: &mut [Q]) {
        let p = self.t[r][c].clone();
        if !p.is_one() {
            for v in self.t[r].iter_mut() {
                if !v.is_zero() {
                    *v = &*v / &p;
                }
            }
        }
        let nz: Vec<usize> = (0..=self.ncols).filter(|&j| !self.t[r][j].is_zero()).collect();
        let prow: Vec<(usize, Q)> = nz.iter().map(|&j| (j, self.t[r][j].clone())).collect();
        for i in 0..self.t.len() {
            if i == r || self.t[i][c].is_zero() {
                continue;
            }
            let f = self.t[i][c].clone();
            for (j, v) in &prow {
                let d = &f * v;
                self.t[i][*j] -= d;
            }
        }
        if !obj[c].is_zero() {
            let f = obj[c].clone();
            for (j, v) in &prow {
                let d = &f * v;
                obj[*j] -= d;
            }
        }
        self.basis[r] = c;
    }

    /// Runs simplex iterations on reduced-cost row `obj` (last entry is minus the objective).
    /// Columns with `allowed[j] == false` never enter. Returns false when unbounded.
    fn optimize(&mut self, obj: &mut [Q], allowed: &[bool]) -> bool {
        let mut degenerate = 0usize;
        loop {
            let bland = degenerate >= DEGENERATE_SWITCH;
            let mut enter: Option<usize> = None;
            for j in 0..self.ncols {
                if !allowed[j] || !obj[j].is_negative() {
                    continue;
                }
                match enter {
                    None => enter = Some(j),
                    Some(e) if !bland && obj[j] < obj[e] => enter = Some(j),
                    _ => {}
                }
                if bland {
                    break;
                }
            }
            let Some(c) = enter else { return true };
            let mut leave: Option<(usize, Q)> = None;
            for i in 0..self.t.len() {
                let a = &self.t[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.t[i][self.ncols] / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, ratio)) = leave else { return false };
            if ratio.is_zero() {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, c, obj);
        }
    }
}

pub fn solve(lp: &Lp) -> LpStatus {
    let m = lp.rows.len();
    let n = lp.cost.len();
    if m == 0 {
        if lp.cost.iter().any(|c| c.is_negative()) {
            return LpStatus::Unbounded;
        }
        return LpStatus::Optimal { x: vec![Q::zero(); n], objective: Q::zero() };
    }
    // columns: 0..n original, n..n+m artificials, then rhs
    let ncols = n + m;
    let mut t = Vec::with_capacity(m);
    for i in 0..m {
        let neg = lp.rhs[i].is_negative();
        let mut row: Vec<Q> = Vec::with_capacity(ncols + 1);
        for j in 0..n {
            let v = lp.rows[i][j].clone();
            row.push(if neg { -v } else { v });
        }
        for a in 0..m {
            row.push(if a == i { Q::one() } else { Q::zero() });
        }
        row.push(if neg { -lp.rhs[i].clone() } else { lp.rhs[i].clone() });
        t.push(row);
    }
    let mut tab = Tableau { t, basis: (n..n + m).collect(), ncols };

    // phase 1: minimize the sum of artificials
    let mut obj = vec![Q::zero(); ncols + 1];
    for row in &tab.t {
        for j in 0..n {
            obj[j] -= &row[j];
        }
        obj[ncols] -= &row[ncols];
    }
    let all = vec![true; ncols];
    tab.optimize(&mut obj, &all);
    if !obj[ncols].is_zero() {
        return LpStatus::Infeasible;
    }
    // drive artificials out of the basis; drop redundant rows
    let mut i = 0;
    while i < tab.t.len() {
        if tab.basis[i] >= n {
            match (0..n).find(|&j| !tab.t[i][j].is_zero()) {
                Some(j) => {
                    tab.pivot(i, j, &mut obj);
                    i += 1;
                }
                None => {
                    tab.t.remove(i);
                    tab.basis.remove(i);
                }
            }
        } else {
            i += 1;
        }
    }

    // phase 2
    let mut obj = vec![Q::zero(); ncols + 1];
    obj[..n].clone_from_slice(&lp.cost);
    for (r, &b) in tab.basis.iter().enumerate() {
        let cb = lp.cost[b].clone();
        if cb.is_zero() {
            continue;
        }
        for j in 0..=ncols {
            if !tab.t[r][j].is_zero() {
                let d = &cb * &tab.t[r][j];
                obj[j] -= d;
            }
        }
    }
    let allowed: Vec<bool> = (0..ncols).map(|j| j < n).collect();
    if !tab.optimize(&mut obj, &allowed) {
        return LpStatus::Unbounded;
    }
    let mut x = vec![Q::zero(); n];
    for (r, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = tab.t[r][ncols].clone();
        }
    }
    let objective = x.iter().zip(&lp.cost).fold(Q::zero(), |acc, (a, c)| acc + a * c);
    LpStatus::Optimal { x, objective }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigInt;

    fn q(n: i64, d: i64) -> Q {
        Q::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn small_lp() {
        // min x + y  s.t. x + 2y = 4, 3x + y = 6  -> x = 8/5, y = 6/5
        let lp = Lp {
            rows: vec![vec![q(1, 1), q(2, 1)], vec![q(3, 1), q(1, 1)]],
            rhs: vec![q(4, 1), q(6, 1)],
            cost: vec![q(1, 1), q(1, 1)],
        };
        match solve(&lp) {
            LpStatus::Optimal { x, objective } => {
                assert_eq!(x, vec![q(8, 5), q(6, 5)]);
                assert_eq!(objective, q(14, 5));
            }
            s => panic!("{s:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let lp = Lp { rows: vec![vec![q(1, 1)]], rhs: vec![q(-1, 1)], cost: vec![q(1, 1)] };
        assert_eq!(solve(&lp), LpStatus::Infeasible);
        let lp = Lp {
            rows: vec![vec![q(1, 1), q(-1, 1)]],
            rhs: vec![q(1, 1)],
            cost: vec![q(0, 1), q(-1, 1)],
        };
        assert_eq!(solve(&lp), LpStatus::Unbounded);
    }

    #[test]
    fn redundant_rows() {
        let lp = Lp {
            rows: vec![vec![q(1, 1), q(1, 1)], vec![q(2, 1), q(2, 1)]],
            rhs: vec![q(3, 1), q(6, 1)],
            cost: vec![q(2, 1), q(1, 1)],
        };
        match solve(&lp) {
            LpStatus::Optimal { objective, .. } => assert_eq!(objective, q(3, 1)),
            s => panic!("{s:?}"),
        }
    }
}

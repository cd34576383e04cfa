//! Exact dense simplex method over the rationals.
//!
//! Two-phase tableau simplex with Bland's rule, so it always terminates.
//! The main entry point for the rest of the crate is [`strict_feasible`],
//! which decides strict feasibility of a system of equalities and
//! inequalities by maximising a uniform slack `t ≤ 1`.

use num_traits::{One, Signed, Zero};

use crate::rat::Rat;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<Rat>,
    pub rel: Relation,
    pub rhs: Rat,
}

/// `maximize objective·x` subject to the constraints. Variables listed in
/// `nonneg` are `≥ 0`; all others are free.
#[derive(Debug, Clone)]
pub struct Problem {
    pub num_vars: usize,
    pub objective: Vec<Rat>,
    pub constraints: Vec<Constraint>,
    pub nonneg: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Optimal(Solution),
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub x: Vec<Rat>,
    pub value: Rat,
    /// Structural variables that are basic in the final tableau.
    pub basic_vars: Vec<usize>,
}

struct Tableau {
    a: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.a[r][c].recip();
        for x in self.a[r].iter_mut() {
            *x *= &inv;
        }
        self.rhs[r] *= &inv;
        let (prow, prhs) = (self.a[r].clone(), self.rhs[r].clone());
        for i in 0..self.a.len() {
            if i == r || self.a[i][c].is_zero() {
                continue;
            }
            let f = self.a[i][c].clone();
            for (j, pj) in prow.iter().enumerate() {
                if !pj.is_zero() {
                    let d = &f * pj;
                    self.a[i][j] -= d;
                }
            }
            let d = &f * &prhs;
            self.rhs[i] -= d;
        }
        self.basis[r] = c;
    }

    /// Maximises `cost·x` over columns not in `banned`; `false` if unbounded.
    fn optimize(&mut self, cost: &[Rat], banned: &[bool]) -> bool {
        loop {
            let mut entering = None;
            for j in 0..self.ncols {
                if banned[j] || self.basis.contains(&j) {
                    continue;
                }
                let mut rc = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !cost[b].is_zero() && !self.a[i][j].is_zero() {
                        rc -= &cost[b] * &self.a[i][j];
                    }
                }
                if rc.is_positive() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else { return true };
            let mut leave: Option<(usize, Rat)> = None;
            for i in 0..self.a.len() {
                if !self.a[i][c].is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / &self.a[i][c];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }

    fn value(&self, cost: &[Rat]) -> Rat {
        self.basis.iter().zip(&self.rhs).map(|(&b, r)| &cost[b] * r).sum()
    }
}

pub fn solve(problem: &Problem) -> Result<Outcome> {
    let nv = problem.num_vars;
    if problem.objective.len() != nv || problem.nonneg.len() != nv {
        return Err(Error::MalformedSystem("objective/sign vector length".into()));
    }
    if problem.constraints.iter().any(|c| c.coeffs.len() != nv) {
        return Err(Error::MalformedSystem("constraint length".into()));
    }
    // Column layout: for each structural var a "+" column, free vars also a
    // "-" column; then one slack per inequality; then artificials.
    let mut col_of = Vec::with_capacity(nv);
    let mut ncols = 0;
    for &nn in &problem.nonneg {
        col_of.push((ncols, if nn { None } else { Some(ncols + 1) }));
        ncols += if nn { 1 } else { 2 };
    }
    let structural = ncols;
    let m = problem.constraints.len();
    let nslack = problem.constraints.iter().filter(|c| c.rel != Relation::Eq).count();
    let total_before_art = structural + nslack;
    let mut a = vec![vec![Rat::zero(); total_before_art + m]; m];
    let mut rhs = vec![Rat::zero(); m];
    let mut basis = vec![usize::MAX; m];
    let mut slack = structural;
    let mut art = total_before_art;
    let mut is_art = vec![false; total_before_art + m];
    for (i, c) in problem.constraints.iter().enumerate() {
        for (v, coef) in c.coeffs.iter().enumerate() {
            let (p, q) = col_of[v];
            a[i][p] = coef.clone();
            if let Some(q) = q {
                a[i][q] = -coef.clone();
            }
        }
        let mut slack_col = None;
        match c.rel {
            Relation::Le => {
                a[i][slack] = Rat::one();
                slack_col = Some(slack);
                slack += 1;
            }
            Relation::Ge => {
                a[i][slack] = -Rat::one();
                slack_col = Some(slack);
                slack += 1;
            }
            Relation::Eq => {}
        }
        rhs[i] = c.rhs.clone();
        if rhs[i].is_negative() {
            for x in a[i].iter_mut() {
                *x = -x.clone();
            }
            rhs[i] = -rhs[i].clone();
        }
        match slack_col {
            Some(s) if a[i][s].is_one() => basis[i] = s,
            _ => {
                a[i][art] = Rat::one();
                is_art[art] = true;
                basis[i] = art;
                art += 1;
            }
        }
    }
    let ncols = art;
    for row in a.iter_mut() {
        row.truncate(ncols);
    }
    is_art.truncate(ncols);
    let mut t = Tableau { a, rhs, basis, ncols };

    if art > total_before_art {
        let cost1: Vec<Rat> = (0..ncols).map(|j| if is_art[j] { -Rat::one() } else { Rat::zero() }).collect();
        let bounded = t.optimize(&cost1, &vec![false; ncols]);
        assert!(bounded, "phase one objective is bounded by zero");
        if t.value(&cost1).is_negative() {
            return Ok(Outcome::Infeasible);
        }
        // Drive remaining zero-level artificials out of the basis.
        let mut r = 0;
        while r < t.basis.len() {
            if is_art[t.basis[r]] {
                if let Some(c) = (0..ncols).find(|&j| !is_art[j] && !t.a[r][j].is_zero()) {
                    t.pivot(r, c);
                    r += 1;
                } else {
                    t.a.remove(r);
                    t.rhs.remove(r);
                    t.basis.remove(r);
                }
            } else {
                r += 1;
            }
        }
    }

    let mut cost = vec![Rat::zero(); ncols];
    for (v, coef) in problem.objective.iter().enumerate() {
        let (p, q) = col_of[v];
        cost[p] = coef.clone();
        if let Some(q) = q {
            cost[q] = -coef.clone();
        }
    }
    if !t.optimize(&cost, &is_art) {
        return Ok(Outcome::Unbounded);
    }
    let mut colval = vec![Rat::zero(); ncols];
    for (i, &b) in t.basis.iter().enumerate() {
        colval[b] = t.rhs[i].clone();
    }
    let x: Vec<Rat> = col_of
        .iter()
        .map(|&(p, q)| match q {
            Some(q) => &colval[p] - &colval[q],
            None => colval[p].clone(),
        })
        .collect();
    let basic_vars = (0..nv)
        .filter(|&v| {
            let (p, q) = col_of[v];
            t.basis.contains(&p) || q.is_some_and(|q| t.basis.contains(&q))
        })
        .collect();
    let value = problem.objective.iter().zip(&x).map(|(c, xi)| c * xi).sum();
    Ok(Outcome::Optimal(Solution { x, value, basic_vars }))
}

/// A point satisfying equalities exactly and inequalities with slack.
#[derive(Debug, Clone, PartialEq)]
pub struct StrictPoint {
    pub x: Vec<Rat>,
    pub margin: Rat,
}

/// Decides whether `{x : eq_a x = eq_b, ineq_a x > ineq_b}` is nonempty.
///
/// Maximises `t` subject to `ineq_a x - t ≥ ineq_b`, `t ≤ 1`; the system is
/// strictly feasible iff the optimum is positive.
pub fn strict_feasible(num_vars: usize, eqs: &[(Vec<Rat>, Rat)], ineqs: &[(Vec<Rat>, Rat)]) -> Result<Option<StrictPoint>> {
    let nv = num_vars + 1;
    let widen = |a: &[Rat], t: Rat| -> Result<Vec<Rat>> {
        if a.len() != num_vars {
            return Err(Error::MalformedSystem(format!("row of length {} for {} unknowns", a.len(), num_vars)));
        }
        let mut v = a.to_vec();
        v.push(t);
        Ok(v)
    };
    let mut constraints = Vec::with_capacity(eqs.len() + ineqs.len() + 1);
    for (a, b) in eqs {
        constraints.push(Constraint { coeffs: widen(a, Rat::zero())?, rel: Relation::Eq, rhs: b.clone() });
    }
    for (a, b) in ineqs {
        constraints.push(Constraint { coeffs: widen(a, -Rat::one())?, rel: Relation::Ge, rhs: b.clone() });
    }
    let mut cap = vec![Rat::zero(); nv];
    cap[num_vars] = Rat::one();
    constraints.push(Constraint { coeffs: cap.clone(), rel: Relation::Le, rhs: Rat::one() });
    let problem = Problem { num_vars: nv, objective: cap, constraints, nonneg: vec![false; nv] };
    match solve(&problem)? {
        Outcome::Infeasible => Ok(None),
        Outcome::Unbounded => unreachable!("margin is capped at 1"),
        Outcome::Optimal(sol) => {
            let mut x = sol.x;
            let margin = x.pop().expect("margin variable");
            Ok(margin.is_positive().then_some(StrictPoint { x, margin }))
        }
    }
}

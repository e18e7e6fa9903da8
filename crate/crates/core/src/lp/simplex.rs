//! Dense two-phase primal simplex with Bland's rule.
//!
//! Variables are shifted, flipped or split into nonnegative columns, and
//! finite upper bounds on shifted variables become explicit rows. Every row
//! carries an artificial column, so dual values can be read from the final
//! reduced costs.

use crate::lp::problem::{active_rows, LinearProgram, SolveResult, SolveStatus, Tolerances};
use crate::lp::LpError;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug)]
enum VarMap<T> {
    /// `z = l + y`
    Shift(usize, T),
    /// `z = u - y`
    Flip(usize, T),
    /// `z = y1 - y2`
    Split(usize, usize),
}

pub fn solve_lp<T: Scalar>(lp: &LinearProgram<T>) -> Result<SolveResult<T>, LpError> {
    solve_lp_with(lp, &Tolerances::default())
}

pub fn solve_lp_with<T: Scalar>(lp: &LinearProgram<T>, tol: &Tolerances) -> Result<SolveResult<T>, LpError> {
    lp.validate()?;
    if lp.n_vars() == 1 {
        return Ok(solve_single(lp, tol));
    }
    Tableau::build(lp).solve(lp, tol, true)
}

/// Finds any feasible point (zero objective, no tie-break pass).
pub(crate) fn feasible_point<T: Scalar>(lp: &LinearProgram<T>, tol: &Tolerances) -> Result<Option<Vec<T>>, LpError> {
    let mut zero = lp.clone();
    zero.cost.iter_mut().for_each(|c| *c = T::zero());
    let res = if zero.n_vars() == 1 {
        solve_single(&zero, tol)
    } else {
        Tableau::build(&zero).solve(&zero, tol, false)?
    };
    Ok(match res.status {
        SolveStatus::Optimal => Some(res.primal),
        _ => None,
    })
}

/// Which constraint pins a one-variable optimum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Binding {
    Free,
    Ineq(usize),
    Eq(usize),
    Lower,
    Upper,
}

/// Closed-form solve of `min c z` over an interval cut out by scalar rows.
/// Rows are given as coefficient and right-hand-side slices; this is the hot
/// path of network evaluation, so it allocates nothing.
#[allow(clippy::too_many_arguments)]
pub(crate) fn scalar_kernel<T: Scalar>(
    c: T,
    a: &[T],
    b: &[T],
    e: &[T],
    d: &[T],
    l: T,
    u: T,
    feas: T,
) -> (SolveStatus, T, Binding) {
    let (mut lo, mut hi) = (l, u);
    let (mut lo_b, mut hi_b) = (
        if l.is_finite() { Binding::Lower } else { Binding::Free },
        if u.is_finite() { Binding::Upper } else { Binding::Free },
    );
    for (i, (&ai, &bi)) in a.iter().zip(b).enumerate() {
        if ai > T::zero() {
            let v = bi / ai;
            if v < hi {
                hi = v;
                hi_b = Binding::Ineq(i);
            }
        } else if ai < T::zero() {
            let v = bi / ai;
            if v > lo {
                lo = v;
                lo_b = Binding::Ineq(i);
            }
        } else if bi < -feas {
            return (SolveStatus::Infeasible, T::nan(), Binding::Free);
        }
    }
    for (i, (&ei, &di)) in e.iter().zip(d).enumerate() {
        if ei != T::zero() {
            let v = di / ei;
            if v < hi {
                hi = v;
                hi_b = Binding::Eq(i);
            }
            if v > lo {
                lo = v;
                lo_b = Binding::Eq(i);
            }
        } else if di.abs() > feas {
            return (SolveStatus::Infeasible, T::nan(), Binding::Free);
        }
    }
    if lo > hi {
        let scale = T::one() + lo.abs().max(hi.abs());
        if lo - hi > feas * scale {
            return (SolveStatus::Infeasible, T::nan(), Binding::Free);
        }
    }
    let take_lo = if c > T::zero() {
        true
    } else if c < T::zero() {
        false
    } else {
        // Zero cost: the lexicographically smallest optimal vertex.
        lo.is_finite() || !hi.is_finite()
    };
    if take_lo {
        if lo.is_finite() {
            (SolveStatus::Optimal, lo, lo_b)
        } else if c == T::zero() {
            (SolveStatus::Optimal, T::zero(), Binding::Free)
        } else {
            (SolveStatus::Unbounded, T::neg_infinity(), Binding::Free)
        }
    } else if hi.is_finite() {
        (SolveStatus::Optimal, hi, hi_b)
    } else {
        (SolveStatus::Unbounded, T::infinity(), Binding::Free)
    }
}

fn solve_single<T: Scalar>(lp: &LinearProgram<T>, tol: &Tolerances) -> SolveResult<T> {
    let (m1, m2) = (lp.n_ineq(), lp.n_eq());
    let c = lp.cost[0];
    let feas = T::tol(tol.feas);
    let (status, z, binding) = scalar_kernel(
        c,
        &lp.ineq_lhs.data,
        &lp.ineq_rhs,
        &lp.eq_lhs.data,
        &lp.eq_rhs,
        lp.lower_bound(0),
        lp.upper_bound(0),
        feas,
    );
    if status != SolveStatus::Optimal {
        return SolveResult::non_optimal(status, 1, m1 + m2);
    }
    let mut duals = vec![T::zero(); m1 + m2];
    let (mut nl, mut nu) = (T::zero(), T::zero());
    if c != T::zero() {
        match binding {
            Binding::Ineq(i) => duals[i] = -c / lp.ineq_lhs.data[i],
            Binding::Eq(i) => duals[m1 + i] = -c / lp.eq_lhs.data[i],
            Binding::Lower => nl = c,
            Binding::Upper => nu = -c,
            Binding::Free => {}
        }
    }
    let primal = vec![z];
    SolveResult {
        status,
        active_set: active_rows(lp, &primal, T::tol(tol.active)),
        objective: c * z,
        primal,
        duals,
        bound_duals_lower: vec![nl],
        bound_duals_upper: vec![nu],
    }
}

struct Tableau<T> {
    m: usize,
    /// Columns: structural, then slacks, then one artificial per row.
    ncol: usize,
    /// Row-major `m x (ncol + 1)`; last entry of each row is the rhs.
    t: Vec<T>,
    basis: Vec<usize>,
    /// Row sign applied to make the rhs nonnegative.
    sigma: Vec<T>,
    n_struct: usize,
    art0: usize,
    maps: Vec<VarMap<T>>,
    /// Structural cost in y-space.
    cost_y: Vec<T>,
    piv_tol: T,
    opt_tol: T,
    cap: usize,
}

impl<T: Scalar> Tableau<T> {
    fn build(lp: &LinearProgram<T>) -> Self {
        let n = lp.n_vars();
        let (m1, m2) = (lp.n_ineq(), lp.n_eq());
        let mut maps = Vec::with_capacity(n);
        let mut ny = 0;
        let mut bound_rows: Vec<(usize, T)> = Vec::new();
        for j in 0..n {
            let (l, u) = (lp.lower_bound(j), lp.upper_bound(j));
            if l.is_finite() {
                maps.push(VarMap::Shift(ny, l));
                if u.is_finite() {
                    bound_rows.push((ny, u - l));
                }
                ny += 1;
            } else if u.is_finite() {
                maps.push(VarMap::Flip(ny, u));
                ny += 1;
            } else {
                maps.push(VarMap::Split(ny, ny + 1));
                ny += 2;
            }
        }
        let n_le = m1 + bound_rows.len();
        let m = n_le + m2;
        let n_struct = ny;
        let art0 = ny + n_le;
        let ncol = art0 + m;
        let w = ncol + 1;
        let mut t = vec![T::zero(); m * w];

        // Row r gets `coef . z <= rhs` (or `=`) rewritten in y.
        let fill = |r: usize, coef: &[T], rhs: T, t: &mut Vec<T>| {
            let mut rhs = rhs;
            for (j, &a) in coef.iter().enumerate() {
                if a == T::zero() {
                    continue;
                }
                match maps[j] {
                    VarMap::Shift(c, l) => {
                        t[r * w + c] = t[r * w + c] + a;
                        rhs = rhs - a * l;
                    }
                    VarMap::Flip(c, u) => {
                        t[r * w + c] = t[r * w + c] - a;
                        rhs = rhs - a * u;
                    }
                    VarMap::Split(c1, c2) => {
                        t[r * w + c1] = t[r * w + c1] + a;
                        t[r * w + c2] = t[r * w + c2] - a;
                    }
                }
            }
            t[r * w + ncol] = rhs;
        };
        for i in 0..m1 {
            fill(i, lp.ineq_lhs.row(i), lp.ineq_rhs[i], &mut t);
        }
        for (k, &(c, span)) in bound_rows.iter().enumerate() {
            let r = m1 + k;
            t[r * w + c] = T::one();
            t[r * w + ncol] = span;
        }
        for i in 0..m2 {
            fill(n_le + i, lp.eq_lhs.row(i), lp.eq_rhs[i], &mut t);
        }
        for r in 0..n_le {
            t[r * w + ny + r] = T::one();
        }
        let mut sigma = vec![T::one(); m];
        let mut basis = vec![0; m];
        for r in 0..m {
            if t[r * w + ncol] < T::zero() {
                sigma[r] = -T::one();
                for v in &mut t[r * w..(r + 1) * w] {
                    *v = -*v;
                }
            }
            t[r * w + art0 + r] = T::one();
            basis[r] = if r < n_le && sigma[r] > T::zero() { ny + r } else { art0 + r };
        }

        let mut cost_y = vec![T::zero(); ny];
        for (j, map) in maps.iter().enumerate() {
            match *map {
                VarMap::Shift(c, _) => cost_y[c] = lp.cost[j],
                VarMap::Flip(c, _) => cost_y[c] = -lp.cost[j],
                VarMap::Split(c1, c2) => {
                    cost_y[c1] = lp.cost[j];
                    cost_y[c2] = -lp.cost[j];
                }
            }
        }
        let amax = lp.ineq_lhs.max_abs().max(lp.eq_lhs.max_abs()).max(T::one());
        let cmax = lp.cost.iter().fold(T::one(), |s, c| s.max(c.abs()));
        Tableau {
            m,
            ncol,
            t,
            basis,
            sigma,
            n_struct,
            art0,
            maps,
            cost_y,
            piv_tol: T::tol(1e-11) * amax,
            opt_tol: T::tol(1e-11) * cmax,
            cap: 50 * (n + m1 + m2).max(ncol + m).max(1),
        }
    }

    #[inline]
    fn at(&self, r: usize, c: usize) -> T {
        self.t[r * (self.ncol + 1) + c]
    }

    fn rhs(&self, r: usize) -> T {
        self.at(r, self.ncol)
    }

    fn pivot(&mut self, pr: usize, pc: usize, obj: &mut [T]) {
        let w = self.ncol + 1;
        let p = self.at(pr, pc);
        for v in &mut self.t[pr * w..(pr + 1) * w] {
            *v = *v / p;
        }
        let prow: Vec<T> = self.t[pr * w..(pr + 1) * w].to_vec();
        for r in 0..self.m {
            if r == pr {
                continue;
            }
            let f = self.t[r * w + pc];
            if f == T::zero() {
                continue;
            }
            for (v, &pv) in self.t[r * w..(r + 1) * w].iter_mut().zip(&prow) {
                *v = *v - f * pv;
            }
            self.t[r * w + pc] = T::zero();
        }
        let f = obj[pc];
        if f != T::zero() {
            for (v, &pv) in obj.iter_mut().zip(&prow) {
                *v = *v - f * pv;
            }
            obj[pc] = T::zero();
        }
        self.basis[pr] = pc;
    }

    /// Reduced-cost row (plus negated objective value in the last slot) for
    /// a full column cost vector at the current basis.
    fn reduced_costs(&self, cost: &[T]) -> Vec<T> {
        let w = self.ncol + 1;
        let mut obj: Vec<T> = cost.to_vec();
        obj.push(T::zero());
        for r in 0..self.m {
            let cb = cost[self.basis[r]];
            if cb == T::zero() {
                continue;
            }
            for (v, &tv) in obj.iter_mut().zip(&self.t[r * w..(r + 1) * w]) {
                *v = *v - cb * tv;
            }
        }
        obj
    }

    /// Runs Bland-rule pivots. `Ok(true)` on optimality, `Ok(false)` when an
    /// improving ray exists.
    fn run(&mut self, obj: &mut [T], banned: &[bool]) -> Result<bool, LpError> {
        for _ in 0..self.cap {
            let mut is_basic = vec![false; self.ncol];
            for &b in &self.basis {
                is_basic[b] = true;
            }
            let entering = (0..self.ncol).find(|&j| !banned[j] && !is_basic[j] && obj[j] < -self.opt_tol);
            let Some(pc) = entering else {
                return Ok(true);
            };
            let mut best: Option<(usize, T)> = None;
            for r in 0..self.m {
                let a = self.at(r, pc);
                if a > self.piv_tol {
                    let ratio = self.rhs(r).max(T::zero()) / a;
                    best = match best {
                        None => Some((r, ratio)),
                        Some((br, bv)) => {
                            if ratio < bv || (ratio == bv && self.basis[r] < self.basis[br]) {
                                Some((r, ratio))
                            } else {
                                Some((br, bv))
                            }
                        }
                    };
                }
            }
            let Some((pr, _)) = best else {
                return Ok(false);
            };
            self.pivot(pr, pc, obj);
        }
        Err(LpError::NumericalFailure(format!("simplex iteration cap {} reached", self.cap)))
    }

    fn y_values(&self) -> Vec<T> {
        let mut y = vec![T::zero(); self.ncol];
        for r in 0..self.m {
            y[self.basis[r]] = self.rhs(r).max(T::zero());
        }
        y
    }

    fn z_values(&self) -> Vec<T> {
        let y = self.y_values();
        self.maps
            .iter()
            .map(|map| match *map {
                VarMap::Shift(c, l) => l + y[c],
                VarMap::Flip(c, u) => u - y[c],
                VarMap::Split(c1, c2) => y[c1] - y[c2],
            })
            .collect()
    }

    fn solve(mut self, lp: &LinearProgram<T>, tol: &Tolerances, tie_break: bool) -> Result<SolveResult<T>, LpError> {
        let n = lp.n_vars();
        let (m1, m2) = (lp.n_ineq(), lp.n_eq());
        let mut banned = vec![false; self.ncol];

        // Phase 1: drive artificial columns out; they may leave but never enter.
        for b in banned.iter_mut().skip(self.art0) {
            *b = true;
        }
        let mut c1 = vec![T::zero(); self.ncol];
        for c in c1.iter_mut().skip(self.art0) {
            *c = T::one();
        }
        let mut obj = self.reduced_costs(&c1);
        self.run(&mut obj, &banned)?;
        let infeas: T = (0..self.m).filter(|&r| self.basis[r] >= self.art0).map(|r| self.rhs(r)).sum();
        let bmax = (0..self.m).fold(T::one(), |s, r| s.max(self.rhs(r).abs()));
        if infeas > T::tol(tol.feas) * bmax {
            return Ok(SolveResult::non_optimal(SolveStatus::Infeasible, n, m1 + m2));
        }
        for r in 0..self.m {
            if self.basis[r] >= self.art0 {
                if let Some(pc) = (0..self.art0).find(|&j| self.at(r, j).abs() > self.piv_tol && !self.basis.contains(&j)) {
                    let mut dummy = vec![T::zero(); self.ncol + 1];
                    self.pivot(r, pc, &mut dummy);
                }
            }
        }

        // Phase 2 on the true cost.
        let mut c2 = vec![T::zero(); self.ncol];
        c2[..self.n_struct].copy_from_slice(&self.cost_y);
        let mut obj = self.reduced_costs(&c2);
        if !self.run(&mut obj, &banned)? {
            return Ok(SolveResult::non_optimal(SolveStatus::Unbounded, n, m1 + m2));
        }

        if tie_break {
            self.lexicographic_pass(&obj, &mut banned)?;
        }

        let z = self.z_values();
        let obj = self.reduced_costs(&c2);
        let mut duals = vec![T::zero(); m1 + m2];
        let n_le = self.m - m2;
        for i in 0..m1 {
            duals[i] = self.sigma[i] * obj[self.art0 + i];
        }
        for i in 0..m2 {
            duals[m1 + i] = self.sigma[n_le + i] * obj[self.art0 + n_le + i];
        }
        let (bl, bu) = bound_duals(lp, &duals, None, &z);
        Ok(SolveResult {
            status: SolveStatus::Optimal,
            active_set: active_rows(lp, &z, T::tol(tol.active)),
            objective: lp.objective(&z),
            primal: z,
            duals,
            bound_duals_lower: bl,
            bound_duals_upper: bu,
        })
    }

    /// Moves to the lexicographically smallest vertex of the optimal face by
    /// minimising `z_1, z_2, ...` in turn. Columns with positive reduced cost
    /// are frozen at zero, which keeps every step on the current face.
    fn lexicographic_pass(&mut self, obj: &[T], banned: &mut [bool]) -> Result<(), LpError> {
        let mut is_basic = vec![false; self.ncol];
        for &b in &self.basis {
            is_basic[b] = true;
        }
        let degenerate = (0..self.art0).any(|j| !is_basic[j] && obj[j].abs() <= self.opt_tol);
        if !degenerate {
            return Ok(());
        }
        let freeze = |obj: &[T], banned: &mut [bool], basis: &[usize], tol: T| {
            for j in 0..obj.len().min(banned.len()) {
                if !basis.contains(&j) && obj[j] > tol {
                    banned[j] = true;
                }
            }
        };
        freeze(obj, banned, &self.basis, self.opt_tol);
        let pass_tol = T::tol(1e-11);
        for i in 0..self.maps.len() {
            let mut ci = vec![T::zero(); self.ncol];
            match self.maps[i] {
                VarMap::Shift(c, _) => ci[c] = T::one(),
                VarMap::Flip(c, _) => ci[c] = -T::one(),
                VarMap::Split(c1, c2) => {
                    ci[c1] = T::one();
                    ci[c2] = -T::one();
                }
            }
            let mut oi = self.reduced_costs(&ci);
            let saved_tol = self.opt_tol;
            self.opt_tol = pass_tol;
            let bounded = self.run(&mut oi, banned)?;
            self.opt_tol = saved_tol;
            if bounded {
                freeze(&oi, banned, &self.basis, pass_tol);
            }
        }
        Ok(())
    }
}

/// Splits `g = c + Q z + A^T lam + E^T mu` into bound multipliers: a positive
/// component belongs to the lower bound, a negative one to the upper bound.
pub(crate) fn bound_duals<T: Scalar>(
    lp: &LinearProgram<T>,
    duals: &[T],
    qz: Option<&[T]>,
    _z: &[T],
) -> (Vec<T>, Vec<T>) {
    let n = lp.n_vars();
    let m1 = lp.n_ineq();
    let mut g = lp.cost.clone();
    if let Some(qz) = qz {
        for (gj, &q) in g.iter_mut().zip(qz) {
            *gj = *gj + q;
        }
    }
    let at = lp.ineq_lhs.tr_matvec(&duals[..m1]);
    let et = lp.eq_lhs.tr_matvec(&duals[m1..]);
    let (mut bl, mut bu) = (vec![T::zero(); n], vec![T::zero(); n]);
    for j in 0..n {
        let gj = g[j] + at[j] + et[j];
        if gj > T::zero() && lp.lower_bound(j).is_finite() {
            bl[j] = gj;
        } else if gj < T::zero() && lp.upper_bound(j).is_finite() {
            bu[j] = -gj;
        }
    }
    (bl, bu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    #[test]
    fn single_binding_row() {
        let lp = LinearProgram::<f64>::new(1)
            .with_cost(vec![-1.0])
            .with_ineq(Matrix::from_f64_rows(&[&[0.5]]), vec![0.25])
            .with_bounds(Some(vec![0.0]), None);
        let r = solve_lp(&lp).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.primal, vec![0.5]);
        assert_eq!(r.duals, vec![2.0]);
        assert_eq!(r.active_set, vec![0]);
    }

    #[test]
    fn box_minimum_is_lower_bound() {
        let lp = LinearProgram::<f64>::new(1).with_cost(vec![1.0]).with_bounds(Some(vec![0.0]), Some(vec![1.0]));
        let r = solve_lp(&lp).unwrap();
        assert_eq!(r.primal, vec![0.0]);
        assert_eq!(r.bound_duals_lower, vec![1.0]);
    }

    #[test]
    fn two_dimensional_vertex() {
        // max x + y s.t. x + 2y <= 4, 3x + y <= 6, x, y >= 0  -> (1.6, 1.2)
        let lp = LinearProgram::<f64>::new(2)
            .with_cost(vec![-1.0, -1.0])
            .with_ineq(Matrix::from_f64_rows(&[&[1.0, 2.0], &[3.0, 1.0]]), vec![4.0, 6.0])
            .with_bounds(Some(vec![0.0, 0.0]), None);
        let r = solve_lp(&lp).unwrap();
        assert!((r.primal[0] - 1.6).abs() < 1e-12 && (r.primal[1] - 1.2).abs() < 1e-12);
        assert!((r.duals[0] - 0.4).abs() < 1e-12 && (r.duals[1] - 0.2).abs() < 1e-12);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let inf = LinearProgram::<f64>::new(2)
            .with_ineq(Matrix::from_f64_rows(&[&[1.0, 1.0], &[-1.0, -1.0]]), vec![1.0, -2.0]);
        assert_eq!(solve_lp(&inf).unwrap().status, SolveStatus::Infeasible);
        let unb = LinearProgram::<f64>::new(2)
            .with_cost(vec![-1.0, 0.0])
            .with_bounds(Some(vec![0.0, 0.0]), Some(vec![f64::INFINITY, 1.0]));
        assert_eq!(solve_lp(&unb).unwrap().status, SolveStatus::Unbounded);
    }

    #[test]
    fn degenerate_face_resolves_lexicographically() {
        // min x + y s.t. x + y >= 1, 0 <= x, y <= 1: face is a segment.
        let lp = LinearProgram::<f64>::new(2)
            .with_cost(vec![1.0, 1.0])
            .with_ineq(Matrix::from_f64_rows(&[&[-1.0, -1.0]]), vec![-1.0])
            .with_bounds(Some(vec![0.0, 0.0]), Some(vec![1.0, 1.0]));
        let r = solve_lp(&lp).unwrap();
        assert_eq!(r.primal, vec![0.0, 1.0]);
    }

    #[test]
    fn equality_and_free_variables() {
        // min x - y s.t. x + y = 2, x - y >= -4, free vars -> (-1, 3)
        let lp = LinearProgram::<f64>::new(2)
            .with_cost(vec![1.0, -1.0])
            .with_ineq(Matrix::from_f64_rows(&[&[-1.0, 1.0]]), vec![4.0])
            .with_eq(Matrix::from_f64_rows(&[&[1.0, 1.0]]), vec![2.0]);
        let r = solve_lp(&lp).unwrap();
        assert!((r.primal[0] + 1.0).abs() < 1e-12 && (r.primal[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn works_in_f32() {
        let lp = LinearProgram::<f32>::new(2)
            .with_cost(vec![-1.0, -1.0])
            .with_ineq(Matrix::from_f64_rows(&[&[1.0, 2.0], &[3.0, 1.0]]), vec![4.0, 6.0])
            .with_bounds(Some(vec![0.0, 0.0]), None);
        let r = solve_lp(&lp).unwrap();
        assert!((r.primal[0] - 1.6).abs() < 1e-5);
    }
}

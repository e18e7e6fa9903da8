//! Primal active-set method for strictly convex QPs.

use crate::linalg::{dot, norm_inf, symmetric_eigenvalues, Matrix};
use crate::lp::problem::{active_rows, QuadraticProgram, SolveResult, SolveStatus, Tolerances};
use crate::lp::simplex::feasible_point;
use crate::lp::LpError;
use crate::scalar::Scalar;

pub fn solve_qp<T: Scalar>(qp: &QuadraticProgram<T>) -> Result<SolveResult<T>, LpError> {
    solve_qp_with(qp, &Tolerances::default())
}

/// Smallest eigenvalue of the quadratic term after a symmetry check.
pub fn min_eigenvalue<T: Scalar>(q: &Matrix<T>) -> Result<T, LpError> {
    if !q.is_symmetric(T::tol(1e-10)) {
        return Err(LpError::NotSymmetric);
    }
    if q.rows == 0 {
        return Ok(T::infinity());
    }
    Ok(symmetric_eigenvalues(q).into_iter().fold(T::infinity(), |m, v| m.min(v)))
}

pub fn solve_qp_with<T: Scalar>(qp: &QuadraticProgram<T>, tol: &Tolerances) -> Result<SolveResult<T>, LpError> {
    qp.validate()?;
    let lp = &qp.lp;
    let q = &qp.quadratic;
    let n = lp.n_vars();
    let (m1, m2) = (lp.n_ineq(), lp.n_eq());
    let lam_min = min_eigenvalue(q)?;
    if !(lam_min > T::tol(tol.definiteness)) {
        return Err(LpError::NotPositiveDefinite(lam_min.to_f64_lossy()));
    }

    // Inequalities with bounds folded in: rows of A, then -e_j for finite
    // lower bounds, then e_j for finite upper bounds.
    let mut rows: Vec<Vec<T>> = lp.ineq_lhs.to_rows();
    let mut rhs: Vec<T> = lp.ineq_rhs.clone();
    let mut origin: Vec<RowOrigin> = (0..m1).map(RowOrigin::Ineq).collect();
    for j in 0..n {
        let l = lp.lower_bound(j);
        if l.is_finite() {
            let mut r = vec![T::zero(); n];
            r[j] = -T::one();
            rows.push(r);
            rhs.push(-l);
            origin.push(RowOrigin::Lower(j));
        }
    }
    for j in 0..n {
        let u = lp.upper_bound(j);
        if u.is_finite() {
            let mut r = vec![T::zero(); n];
            r[j] = T::one();
            rows.push(r);
            rhs.push(u);
            origin.push(RowOrigin::Upper(j));
        }
    }
    let eq_rows = lp.eq_lhs.to_rows();

    let mut z = if rows.is_empty() && m2 == 0 {
        vec![T::zero(); n]
    } else {
        match feasible_point(lp, tol)? {
            Some(z) => z,
            None => return Ok(SolveResult::non_optimal(SolveStatus::Infeasible, n, m1 + m2)),
        }
    };

    let scale = q.max_abs().max(T::one());
    let step_tol = T::tol(1e-12) * (T::one() + norm_inf(&z));
    let dual_tol = T::tol(tol.kkt) * T::lit(1e-2);
    let act_tol = T::tol(tol.feas);

    // Working set: equality rows are implicit, inequality rows listed here.
    let mut work: Vec<usize> = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        if (rhs[i] - dot(r, &z)).abs() <= act_tol * (T::one() + rhs[i].abs()) {
            let mut trial: Vec<Vec<T>> = eq_rows.clone();
            trial.extend(work.iter().map(|&w| rows[w].clone()));
            trial.push(r.clone());
            let m = Matrix::from_rows(&trial);
            if m.rank(T::tol(1e-10)) == trial.len() {
                work.push(i);
            }
        }
    }

    let cap = 50 * (n + rows.len() + m2).max(1) * 4;
    let mut mult_w: Vec<T> = Vec::new();
    let mut mult_eq: Vec<T> = vec![T::zero(); m2];
    let mut converged = false;
    for _ in 0..cap {
        let k = m2 + work.len();
        let dim = n + k;
        let mut kkt = Matrix::zeros(dim, dim);
        for i in 0..n {
            for j in 0..n {
                kkt[(i, j)] = q[(i, j)];
            }
        }
        let active: Vec<&Vec<T>> = eq_rows.iter().chain(work.iter().map(|&w| &rows[w])).collect();
        for (r, a) in active.iter().enumerate() {
            for j in 0..n {
                kkt[(n + r, j)] = a[j];
                kkt[(j, n + r)] = a[j];
            }
        }
        let qz = q.matvec(&z);
        let mut b = vec![T::zero(); dim];
        for j in 0..n {
            b[j] = -(qz[j] + lp.cost[j]);
        }
        let sol = match kkt.solve(&b) {
            Some(s) => s,
            None => kkt.pinv(T::tol(tol.rank)).matvec(&b),
        };
        let p = &sol[..n];
        let mult = &sol[n..];
        if norm_inf(p) <= step_tol * scale {
            mult_eq = mult[..m2].to_vec();
            mult_w = mult[m2..].to_vec();
            let worst = mult_w
                .iter()
                .enumerate()
                .filter(|(_, &v)| v < -dual_tol)
                .min_by(|a, b| a.1.partial_cmp(b.1).unwrap());
            match worst {
                None => {
                    converged = true;
                    break;
                }
                Some((idx, _)) => {
                    work.remove(idx);
                    continue;
                }
            }
        }
        let mut alpha = T::one();
        let mut blocking = None;
        for (i, r) in rows.iter().enumerate() {
            if work.contains(&i) {
                continue;
            }
            let ap = dot(r, p);
            if ap > T::tol(1e-14) * scale {
                let step = ((rhs[i] - dot(r, &z)).max(T::zero())) / ap;
                if step < alpha {
                    alpha = step;
                    blocking = Some(i);
                }
            }
        }
        for (zj, &pj) in z.iter_mut().zip(p) {
            *zj = *zj + alpha * pj;
        }
        if let Some(i) = blocking {
            work.push(i);
        }
    }
    if !converged {
        return Err(LpError::NumericalFailure("active-set iteration cap reached".into()));
    }

    let mut duals = vec![T::zero(); m1 + m2];
    let mut bl = vec![T::zero(); n];
    let mut bu = vec![T::zero(); n];
    for (w, &v) in work.iter().zip(&mult_w) {
        match origin[*w] {
            RowOrigin::Ineq(i) => duals[i] = v,
            RowOrigin::Lower(j) => bl[j] = v,
            RowOrigin::Upper(j) => bu[j] = v,
        }
    }
    duals[m1..].copy_from_slice(&mult_eq);
    Ok(SolveResult {
        status: SolveStatus::Optimal,
        active_set: active_rows(lp, &z, T::tol(tol.active)),
        objective: qp.objective(&z),
        primal: z,
        duals,
        bound_duals_lower: bl,
        bound_duals_upper: bu,
    })
}

#[derive(Clone, Copy, Debug)]
enum RowOrigin {
    Ineq(usize),
    Lower(usize),
    Upper(usize),
}

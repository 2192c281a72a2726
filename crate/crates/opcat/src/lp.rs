//! Exact rational linear programming, sized for tiny classification problems.
//!
//! The only solver exposed is equality-form feasibility: find x ≥ 0 with
//! A·x = b, by a phase-1 primal simplex with Bland's rule (guaranteed
//! termination, deterministic pivoting, no tolerances). Infeasibility is
//! returned with a Farkas certificate y (yᵀA ≤ 0 and yᵀb > 0) that callers
//! can re-verify by substitution.

// Index arithmetic over shared tableau rows does not translate cleanly to
// iterators; keep the explicit loops.
#![allow(clippy::needless_range_loop)]

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::Error;

/// A dual vector certifying that {x ≥ 0 : A·x = b} is empty.
#[derive(Debug, Clone)]
pub struct FarkasCertificate {
    pub y: Vec<BigRational>,
}

#[derive(Debug, Clone)]
pub enum LpResult {
    Feasible(Vec<BigRational>),
    Infeasible(FarkasCertificate),
}

/// Find x ≥ 0 with A·x = b, or a Farkas certificate that none exists.
pub fn solve_equality_feasibility(
    a: &[Vec<BigRational>],
    b: &[BigRational],
) -> Result<LpResult, Error> {
    let m = a.len();
    if b.len() != m {
        return Err(Error::ShapeMismatch(format!(
            "{} rows but {} right-hand sides",
            m,
            b.len()
        )));
    }
    let n = a.first().map_or(0, Vec::len);
    if a.iter().any(|row| row.len() != n) {
        return Err(Error::ShapeMismatch("ragged constraint matrix".into()));
    }
    if m == 0 {
        return Ok(LpResult::Feasible(vec![BigRational::zero(); n]));
    }

    // Normalize to b ≥ 0, remembering which rows were negated so the dual
    // vector can be mapped back to the original system.
    let mut tableau: Vec<Vec<BigRational>> = Vec::with_capacity(m);
    let mut negated = vec![false; m];
    for i in 0..m {
        let mut row: Vec<BigRational> = Vec::with_capacity(n + m + 1);
        row.extend(a[i].iter().cloned());
        for j in 0..m {
            row.push(if i == j {
                BigRational::one()
            } else {
                BigRational::zero()
            });
        }
        row.push(b[i].clone());
        if b[i] < BigRational::zero() {
            negated[i] = true;
            for v in row.iter_mut() {
                *v = -v.clone();
            }
            // Keep the artificial column positive in its own row.
            row[n + i] = BigRational::one();
        }
        tableau.push(row);
    }

    // Phase-1 objective: minimize the sum of artificials. The cost row holds
    // reduced costs c_j − z_j; artificials have cost 1, original columns 0.
    let width = n + m + 1;
    let mut cost = vec![BigRational::zero(); width];
    for j in n..n + m {
        cost[j] = BigRational::one();
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    for row in &tableau {
        for (j, c) in cost.iter_mut().enumerate() {
            *c -= &row[j];
        }
    }

    loop {
        // Bland's rule: smallest-index column with negative reduced cost.
        let entering = (0..n + m).find(|&j| cost[j] < BigRational::zero());
        let Some(entering) = entering else { break };
        // Ratio test; ties broken by smallest basis variable index.
        let mut pivot_row: Option<usize> = None;
        let mut best_ratio: Option<BigRational> = None;
        for i in 0..m {
            if tableau[i][entering] > BigRational::zero() {
                let ratio = &tableau[i][width - 1] / &tableau[i][entering];
                let better = match &best_ratio {
                    None => true,
                    Some(r) => {
                        ratio < *r
                            || (ratio == *r && basis[i] < basis[pivot_row.unwrap()])
                    }
                };
                if better {
                    best_ratio = Some(ratio);
                    pivot_row = Some(i);
                }
            }
        }
        let Some(pr) = pivot_row else {
            // Phase-1 objective is bounded below by 0, so an unbounded ray
            // cannot occur; guard anyway.
            return Err(Error::ShapeMismatch("phase-1 simplex became unbounded".into()));
        };
        pivot(&mut tableau, &mut cost, &mut basis, pr, entering, width);
    }

    // Optimal phase-1 value = Σ artificial basic values.
    let objective: BigRational = basis
        .iter()
        .zip(&tableau)
        .filter(|(&bv, _)| bv >= n)
        .map(|(_, row)| row[width - 1].clone())
        .sum();

    if objective.is_zero() {
        let mut x = vec![BigRational::zero(); n];
        for (i, &bv) in basis.iter().enumerate() {
            if bv < n {
                x[bv] = tableau[i][width - 1].clone();
            }
        }
        return Ok(LpResult::Feasible(x));
    }

    // Simplex multipliers: for artificial column n+i (cost 1, unit column
    // e_i in the normalized system), the reduced cost is 1 − y_i.
    let mut y: Vec<BigRational> = (0..m)
        .map(|i| BigRational::one() - &cost[n + i])
        .collect();
    for i in 0..m {
        if negated[i] {
            y[i] = -y[i].clone();
        }
    }
    Ok(LpResult::Infeasible(FarkasCertificate { y }))
}

fn pivot(
    tableau: &mut [Vec<BigRational>],
    cost: &mut [BigRational],
    basis: &mut [usize],
    pr: usize,
    pc: usize,
    width: usize,
) {
    let inv = tableau[pr][pc].recip();
    for v in tableau[pr].iter_mut() {
        *v *= &inv;
    }
    for i in 0..tableau.len() {
        if i != pr && !tableau[i][pc].is_zero() {
            let factor = tableau[i][pc].clone();
            for j in 0..width {
                let delta = &factor * &tableau[pr][j];
                tableau[i][j] -= delta;
            }
        }
    }
    if !cost[pc].is_zero() {
        let factor = cost[pc].clone();
        for j in 0..width {
            let delta = &factor * &tableau[pr][j];
            cost[j] -= delta;
        }
    }
    basis[pr] = pc;
}

/// Check yᵀA ≤ 0 componentwise and yᵀb > 0 by substitution.
pub fn verify_farkas(a: &[Vec<BigRational>], b: &[BigRational], y: &[BigRational]) -> bool {
    if y.len() != a.len() || b.len() != a.len() {
        return false;
    }
    let n = a.first().map_or(0, Vec::len);
    for j in 0..n {
        let dot: BigRational = y.iter().zip(a).map(|(yi, row)| yi * &row[j]).sum();
        if dot > BigRational::zero() {
            return false;
        }
    }
    let rhs: BigRational = y.iter().zip(b).map(|(yi, bi)| yi * bi).sum();
    rhs > BigRational::zero()
}

/// Any exact solution of A·x = b with x unrestricted in sign (free variables
/// set to zero), or None when the system is inconsistent. Gaussian
/// elimination with exact pivots.
pub fn solve_linear_system(
    a: &[Vec<BigRational>],
    b: &[BigRational],
) -> Result<Option<Vec<BigRational>>, Error> {
    let m = a.len();
    if b.len() != m {
        return Err(Error::ShapeMismatch(format!(
            "{} rows but {} right-hand sides",
            m,
            b.len()
        )));
    }
    let n = a.first().map_or(0, Vec::len);
    if a.iter().any(|row| row.len() != n) {
        return Err(Error::ShapeMismatch("ragged system matrix".into()));
    }
    let mut aug: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        let Some(pr) = (rank..m).find(|&i| !aug[i][col].is_zero()) else {
            continue;
        };
        aug.swap(rank, pr);
        let inv = aug[rank][col].recip();
        for v in aug[rank].iter_mut() {
            *v *= &inv;
        }
        for i in 0..m {
            if i != rank && !aug[i][col].is_zero() {
                let factor = aug[i][col].clone();
                for j in 0..=n {
                    let delta = &factor * &aug[rank][j];
                    aug[i][j] -= delta;
                }
            }
        }
        pivot_cols.push(col);
        rank += 1;
        if rank == m {
            break;
        }
    }
    // Inconsistent iff a zero row has nonzero right-hand side.
    for row in aug.iter().skip(rank) {
        if !row[n].is_zero() {
            return Ok(None);
        }
    }
    let mut x = vec![BigRational::zero(); n];
    for (i, &col) in pivot_cols.iter().enumerate() {
        x[col] = aug[i][n].clone();
    }
    Ok(Some(x))
}

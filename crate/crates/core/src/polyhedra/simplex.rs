//! Exact rational simplex, phase-1 only: decide feasibility of
//! `{ x >= 0 : A x = b }` and return a feasible point. Everything the cone
//! code needs (redundancy tests, extension feasibility, dual certificates,
//! separating vectors) reduces to this via Farkas-style reformulations, so
//! no optimality phase is required.
//!
//! Pivoting uses the most-negative reduced cost by default and switches to
//! Bland's rule after a run of degenerate pivots, which keeps the method
//! exact, terminating and deterministic.

use num_traits::{Signed, Zero};

use crate::rational::{rat_zero, Rat};

#[derive(Clone, Debug, PartialEq)]
pub enum Feasibility {
    /// A point x >= 0 with A x = b.
    Feasible(Vec<Rat>),
    Infeasible,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }

    pub fn point(self) -> Option<Vec<Rat>> {
        match self {
            Feasibility::Feasible(x) => Some(x),
            Feasibility::Infeasible => None,
        }
    }
}

/// Number of consecutive degenerate pivots tolerated before switching to
/// Bland's rule.
const STALL_LIMIT: usize = 30;

/// Decide feasibility of `{ x >= 0 : A x = b }` with `A` given row-major.
/// Zero-width rows are allowed (feasibility then requires `b = 0` row-wise).
///
/// Phase-1 with one artificial per row. Artificial columns never re-enter
/// the basis, and while basic they keep their identity columns untouched
/// (no pivot row ever carries a nonzero of a still-basic artificial), so
/// they are never materialized.
pub fn feasible_point(a: &[Vec<Rat>], b: &[Rat]) -> Feasibility {
    let m = a.len();
    assert_eq!(m, b.len(), "row count mismatch");
    let n = a.first().map_or(0, |r| r.len());

    // Normalize b >= 0 by flipping rows.
    let mut tab: Vec<Vec<Rat>> = Vec::with_capacity(m);
    let mut rhs: Vec<Rat> = Vec::with_capacity(m);
    for i in 0..m {
        debug_assert_eq!(a[i].len(), n, "ragged constraint matrix");
        if b[i].is_negative() {
            tab.push(a[i].iter().map(|v| -v).collect());
            rhs.push(-&b[i]);
        } else {
            tab.push(a[i].clone());
            rhs.push(b[i].clone());
        }
    }

    // basis[i] = n + i means "artificial of row i".
    let mut basis: Vec<usize> = (n..n + m).collect();
    // Reduced costs for the phase-1 objective (minimize artificial sum).
    let mut obj: Vec<Rat> = (0..n)
        .map(|j| -tab.iter().map(|row| &row[j]).sum::<Rat>())
        .collect();
    let mut obj_val: Rat = -rhs.iter().sum::<Rat>();

    let one = Rat::from_integer(1.into());
    let mut stall = 0usize;
    loop {
        let entering = if stall < STALL_LIMIT {
            let mut best: Option<(usize, &Rat)> = None;
            for (j, r) in obj.iter().enumerate() {
                if r.is_negative() {
                    match best {
                        None => best = Some((j, r)),
                        Some((_, br)) => {
                            if r < br {
                                best = Some((j, r));
                            }
                        }
                    }
                }
            }
            best.map(|(j, _)| j)
        } else {
            obj.iter().position(|r| r.is_negative())
        };
        let Some(jin) = entering else {
            // Optimal. Feasible iff the artificial sum reached zero.
            if !obj_val.is_zero() {
                return Feasibility::Infeasible;
            }
            let mut x = vec![rat_zero(); n];
            for (i, &bj) in basis.iter().enumerate() {
                if bj < n {
                    x[bj] = rhs[i].clone();
                }
            }
            return Feasibility::Feasible(x);
        };

        // Ratio test; ties broken on the smallest leaving variable index.
        let mut leave: Option<(usize, Rat)> = None;
        for i in 0..m {
            let aij = &tab[i][jin];
            if aij.is_positive() {
                let ratio = &rhs[i] / aij;
                match &leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < *lr || (ratio == *lr && basis[i] < basis[*li]) {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((irow, _)) = leave else {
            // Phase-1 objective is bounded below by zero, so an unbounded
            // direction cannot occur with exact arithmetic.
            unreachable!("phase-1 simplex cannot be unbounded");
        };

        stall = if rhs[irow].is_zero() { stall + 1 } else { 0 };

        // Pivot on (irow, jin).
        let pivot = tab[irow][jin].clone();
        if pivot != one {
            let inv = &one / &pivot;
            for v in tab[irow].iter_mut() {
                if !v.is_zero() {
                    *v = &*v * &inv;
                }
            }
            rhs[irow] = &rhs[irow] * &inv;
        }
        let (pivot_row, rhs_pivot) = (tab[irow].clone(), rhs[irow].clone());
        for i in 0..m {
            if i == irow {
                continue;
            }
            let factor = tab[i][jin].clone();
            if factor.is_zero() {
                continue;
            }
            for (j, pv) in pivot_row.iter().enumerate() {
                if !pv.is_zero() {
                    tab[i][j] = &tab[i][j] - &(&factor * pv);
                }
            }
            rhs[i] = &rhs[i] - &(&factor * &rhs_pivot);
        }
        let factor = obj[jin].clone();
        if !factor.is_zero() {
            for (j, pv) in pivot_row.iter().enumerate() {
                if !pv.is_zero() {
                    obj[j] = &obj[j] - &(&factor * pv);
                }
            }
            obj_val = &obj_val - &(&factor * &rhs_pivot);
        }

        basis[irow] = jin;
    }
}

/// Does a nonnegative combination of `generators` equal `target`? Returns
/// the multipliers when it does. This Farkas-dual form drives both
/// redundancy removal and inequality-validity certificates: the system is
/// `G^T y = target, y >= 0` with one row per coordinate.
pub fn conic_combination(generators: &[Vec<Rat>], target: &[Rat]) -> Option<Vec<Rat>> {
    let dim = target.len();
    let mut a: Vec<Vec<Rat>> = Vec::with_capacity(dim);
    for d in 0..dim {
        let row: Vec<Rat> = generators.iter().map(|g| g[d].clone()).collect();
        a.push(row);
    }
    feasible_point(&a, target).point()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat_int;

    fn r(v: i64) -> Rat {
        rat_int(v)
    }

    #[test]
    fn simple_feasible_system() {
        // x0 + x1 = 2, x0 - x1 = 0 -> x = (1, 1).
        let a = vec![vec![r(1), r(1)], vec![r(1), r(-1)]];
        let b = vec![r(2), r(0)];
        let x = feasible_point(&a, &b).point().unwrap();
        assert_eq!(x, vec![r(1), r(1)]);
    }

    #[test]
    fn infeasible_system() {
        // x0 = -1 has no nonnegative solution.
        let a = vec![vec![r(1)]];
        let b = vec![r(-1)];
        assert_eq!(feasible_point(&a, &b), Feasibility::Infeasible);
    }

    #[test]
    fn degenerate_rows_are_fine() {
        // 0 = 0 rows and linearly dependent constraints.
        let a = vec![vec![r(0), r(0)], vec![r(1), r(2)], vec![r(2), r(4)]];
        let b = vec![r(0), r(4), r(8)];
        let x = feasible_point(&a, &b).point().unwrap();
        assert_eq!(&x[0] + &(&x[1] * &r(2)), r(4));
    }

    #[test]
    fn zero_width_system() {
        let a: Vec<Vec<Rat>> = vec![vec![], vec![]];
        assert!(feasible_point(&a, &[r(0), r(0)]).is_feasible());
        assert!(!feasible_point(&a, &[r(0), r(1)]).is_feasible());
    }

    #[test]
    fn rational_solution_is_exact() {
        // 3x = 1 -> x = 1/3.
        let a = vec![vec![r(3)]];
        let b = vec![r(1)];
        let x = feasible_point(&a, &b).point().unwrap();
        assert_eq!(x[0], r(1) / r(3));
    }

    #[test]
    fn conic_combination_finds_multipliers() {
        // target (1,1) = 1*(1,0) + 1*(0,1).
        let gens = vec![vec![r(1), r(0)], vec![r(0), r(1)], vec![r(-1), r(-1)]];
        let y = conic_combination(&gens, &[r(1), r(1)]).unwrap();
        for d in 0..2 {
            let got: Rat = gens.iter().zip(&y).map(|(g, yi)| &g[d] * yi).sum();
            assert_eq!(got, r(1));
        }
    }

    #[test]
    fn conic_combination_rejects_outside_target() {
        // Generators span only the nonnegative quadrant directions.
        let gens = vec![vec![r(1), r(0)], vec![r(0), r(1)]];
        assert!(conic_combination(&gens, &[r(-1), r(0)]).is_none());
    }

    #[test]
    fn random_systems_solution_always_verifies() {
        // Deterministic pseudo-random small systems; whenever a point comes
        // back it must satisfy A x = b exactly.
        let mut state = 0x243F6A8885A308D3u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state % 7) as i64 - 3
        };
        let mut feasible = 0;
        for _ in 0..60 {
            let m = 3;
            let n = 5;
            let a: Vec<Vec<Rat>> = (0..m)
                .map(|_| (0..n).map(|_| r(next())).collect())
                .collect();
            let b: Vec<Rat> = (0..m).map(|_| r(next())).collect();
            if let Feasibility::Feasible(x) = feasible_point(&a, &b) {
                feasible += 1;
                assert!(x.iter().all(|v| !v.is_negative()));
                for i in 0..m {
                    let got: Rat = a[i].iter().zip(&x).map(|(c, v)| c * v).sum();
                    assert_eq!(got, b[i], "row {i} not satisfied");
                }
            }
        }
        assert!(feasible > 5, "sanity: some systems should be feasible");
    }
}

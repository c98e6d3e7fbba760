//! Exact vertex enumeration for polar scenario polytopes by double
//! description.  The cone {μ ≥ 0 : g·μ ≥ 0 for each generator g} lives inside
//! the nonnegative orthant, hence is pointed, so incremental ray insertion
//! with the combinatorial adjacency test stays minimal; vertices of the
//! polytope (cone ∩ {Σμ = 1}) are the sum-normalized extreme rays.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational from a float; inputs are finite by construction elsewhere.
pub fn rational_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x)
        .ok_or_else(|| Error::param("value", format!("cannot convert {x} to a rational")))
}

/// Extreme rays of {x ∈ ℝ^d : x ≥ 0, row·x ≥ 0 ∀rows}, normalized to unit
/// coordinate sum and sorted ascending lexicographically.  Empty iff the cone
/// is {0}.
pub fn polar_polytope_vertices(gen_rows: &[Vec<BigRational>], d: usize) -> Vec<Vec<BigRational>> {
    assert!(d > 0, "dimension must be positive");
    let zero = BigRational::zero();

    // Start from the orthant: extreme rays e_1..e_d (already sum-normalized).
    let mut rays: Vec<Vec<BigRational>> = (0..d)
        .map(|i| {
            let mut e = vec![zero.clone(); d];
            e[i] = BigRational::from_integer(1.into());
            e
        })
        .collect();

    // Constraint list grows as rows are processed: d orthant rows first.
    let mut active: Vec<Vec<BigRational>> = (0..d)
        .map(|i| {
            let mut e = vec![zero.clone(); d];
            e[i] = BigRational::from_integer(1.into());
            e
        })
        .collect();

    for row in gen_rows {
        assert_eq!(row.len(), d, "generator row has wrong dimension");
        let vals: Vec<BigRational> = rays.iter().map(|r| dot(row, r)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] > zero).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] < zero).collect();

        if !neg.is_empty() {
            // Tight sets over the constraints processed so far.
            let masks: Vec<Vec<bool>> = rays
                .iter()
                .map(|r| active.iter().map(|c| dot(c, r).is_zero()).collect())
                .collect();
            let mut next: Vec<Vec<BigRational>> = (0..rays.len())
                .filter(|i| !neg.contains(i))
                .map(|i| rays[i].clone())
                .collect();
            for &p in &pos {
                for &n in &neg {
                    if !adjacent(&masks, p, n) {
                        continue;
                    }
                    // vals[p]·ray[n] − vals[n]·ray[p]: positive combination
                    // tight on the new row, inside the old cone.
                    let combo: Vec<BigRational> = (0..d)
                        .map(|j| {
                            vals[p].clone() * rays[n][j].clone()
                                - vals[n].clone() * rays[p][j].clone()
                        })
                        .collect();
                    if let Some(canon) = sum_normalize(combo) {
                        if !next.contains(&canon) {
                            next.push(canon);
                        }
                    }
                }
            }
            rays = next;
        }
        active.push(row.clone());
        if rays.is_empty() {
            break;
        }
    }

    rays.sort();
    rays
}

fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.clone() * y.clone())
        .fold(BigRational::zero(), |acc, v| acc + v)
}

/// Rays p and n are adjacent iff no third ray is tight on everything both
/// are tight on.
fn adjacent(masks: &[Vec<bool>], p: usize, n: usize) -> bool {
    let common: Vec<usize> = (0..masks[p].len())
        .filter(|&c| masks[p][c] && masks[n][c])
        .collect();
    for (r, mask) in masks.iter().enumerate() {
        if r == p || r == n {
            continue;
        }
        if common.iter().all(|&c| mask[c]) {
            return false;
        }
    }
    true
}

/// Scale a nonnegative nonzero ray to coordinate sum 1.
fn sum_normalize(v: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let sum = v.iter().fold(BigRational::zero(), |acc, x| acc + x.clone());
    if sum.is_zero() || sum.is_negative() {
        return None;
    }
    Some(v.into_iter().map(|x| x / sum.clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn rows(data: &[&[i64]]) -> Vec<Vec<BigRational>> {
        data.iter()
            .map(|r| r.iter().map(|&v| rat(v, 1)).collect())
            .collect()
    }

    #[test]
    fn no_generators_gives_the_simplex_corners() {
        let v = polar_polytope_vertices(&[], 3);
        assert_eq!(
            v,
            vec![
                vec![rat(0, 1), rat(0, 1), rat(1, 1)],
                vec![rat(0, 1), rat(1, 1), rat(0, 1)],
                vec![rat(1, 1), rat(0, 1), rat(0, 1)],
            ]
        );
    }

    #[test]
    fn half_plane_cuts_the_two_point_simplex() {
        let v = polar_polytope_vertices(&rows(&[&[1, -1]]), 2);
        assert_eq!(
            v,
            vec![
                vec![rat(1, 2), rat(1, 2)],
                vec![rat(1, 1), rat(0, 1)],
            ]
        );
    }

    #[test]
    fn infeasible_generator_empties_the_set() {
        let v = polar_polytope_vertices(&rows(&[&[-1, -1]]), 2);
        assert!(v.is_empty());
    }

    #[test]
    fn chain_of_monotonicity_constraints() {
        // μ₁ ≥ μ₂ ≥ μ₃ inside the 3-simplex.
        let v = polar_polytope_vertices(&rows(&[&[1, -1, 0], &[0, 1, -1]]), 3);
        assert_eq!(
            v,
            vec![
                vec![rat(1, 3), rat(1, 3), rat(1, 3)],
                vec![rat(1, 2), rat(1, 2), rat(0, 1)],
                vec![rat(1, 1), rat(0, 1), rat(0, 1)],
            ]
        );
    }

    #[test]
    fn redundant_generator_changes_nothing() {
        let base = polar_polytope_vertices(&rows(&[&[1, -1]]), 2);
        // A nonnegative generator is implied by the orthant.
        let with_extra = polar_polytope_vertices(&rows(&[&[1, -1], &[2, 1]]), 2);
        assert_eq!(base, with_extra);
    }

    #[test]
    fn single_point_space() {
        assert_eq!(
            polar_polytope_vertices(&rows(&[&[3]]), 1),
            vec![vec![rat(1, 1)]]
        );
        assert!(polar_polytope_vertices(&rows(&[&[-1]]), 1).is_empty());
    }

    #[test]
    fn fractional_data_handled_exactly() {
        // Generator (1/2, −1/4): cone is μ₁/2 ≥ μ₂/4, vertex at 2μ₁ = μ₂… i.e.
        // boundary ray (1,2)/3.
        let g = vec![vec![rat(1, 2), rat(-1, 4)]];
        let v = polar_polytope_vertices(&g, 2);
        assert_eq!(
            v,
            vec![
                vec![rat(1, 3), rat(2, 3)],
                vec![rat(1, 1), rat(0, 1)],
            ]
        );
    }
}

//! Feasible-set descriptors and Euclidean projections onto them.

use serde::{Deserialize, Serialize};

use super::matrix::CMat;
use crate::error::{FpError, Result};
use crate::scalar::Real;

/// Feasible set attached to one variable block.
///
/// A group ball couples several blocks through a shared budget
/// `Σ_j ‖X_j‖_F² ≤ radius_sq`; every member block carries the same descriptor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstraintSpec<T> {
    Unconstrained,
    Ball { radius_sq: T },
    GroupBall { members: Vec<usize>, radius_sq: T },
}

impl<T: Real> ConstraintSpec<T> {
    pub fn radius_sq(&self) -> Option<T> {
        match self {
            Self::Unconstrained => None,
            Self::Ball { radius_sq } | Self::GroupBall { radius_sq, .. } => Some(*radius_sq),
        }
    }
}

/// A block partition derived from per-block specs: each entry is one independent feasible set.
#[derive(Clone, Debug, PartialEq)]
pub enum ConstraintGroup<T> {
    Free(usize),
    Ball { block: usize, radius_sq: T },
    Joint { members: Vec<usize>, radius_sq: T },
}

impl<T: Real> ConstraintGroup<T> {
    pub fn members(&self) -> Vec<usize> {
        match self {
            Self::Free(b) | Self::Ball { block: b, .. } => vec![*b],
            Self::Joint { members, .. } => members.clone(),
        }
    }

    pub fn radius_sq(&self) -> Option<T> {
        match self {
            Self::Free(_) => None,
            Self::Ball { radius_sq, .. } | Self::Joint { radius_sq, .. } => Some(*radius_sq),
        }
    }
}

/// Validates per-block specs and groups them into a partition of the blocks.
pub fn constraint_groups<T: Real>(specs: &[ConstraintSpec<T>]) -> Result<Vec<ConstraintGroup<T>>> {
    let n = specs.len();
    let mut seen = vec![false; n];
    let mut groups = Vec::new();
    for (b, spec) in specs.iter().enumerate() {
        match spec {
            ConstraintSpec::Unconstrained => {
                seen[b] = true;
                groups.push(ConstraintGroup::Free(b));
            }
            ConstraintSpec::Ball { radius_sq } => {
                check_radius(*radius_sq)?;
                seen[b] = true;
                groups.push(ConstraintGroup::Ball {
                    block: b,
                    radius_sq: *radius_sq,
                });
            }
            ConstraintSpec::GroupBall { members, radius_sq } => {
                check_radius(*radius_sq)?;
                if !members.contains(&b) {
                    return Err(FpError::InvalidProblem(format!(
                        "block {b} carries a group constraint that does not list it"
                    )));
                }
                if seen[b] {
                    continue;
                }
                for &m in members {
                    if m >= n || seen[m] || specs[m] != *spec {
                        return Err(FpError::InvalidProblem(format!(
                            "group constraint members {members:?} do not form a partition"
                        )));
                    }
                    seen[m] = true;
                }
                groups.push(ConstraintGroup::Joint {
                    members: members.clone(),
                    radius_sq: *radius_sq,
                });
            }
        }
    }
    Ok(groups)
}

fn check_radius<T: Real>(r: T) -> Result<()> {
    if r > T::zero() && !r.is_nan() {
        Ok(())
    } else {
        Err(FpError::InvalidProblem(format!("radius² must be positive, got {r}")))
    }
}

/// Projects `v` onto `{‖v‖_F² ≤ radius_sq}`.
pub fn project_ball<T: Real>(v: &CMat<T>, radius_sq: T) -> CMat<T> {
    let nsq = v.norm_sq();
    if nsq <= radius_sq {
        v.clone()
    } else {
        v.scale((radius_sq / nsq).sqrt())
    }
}

/// Projects a set of blocks onto `{Σ_j ‖block_j‖_F² ≤ radius_sq}` by a common rescaling.
pub fn project_group_ball<T: Real>(blocks: &[CMat<T>], radius_sq: T) -> Vec<CMat<T>> {
    let total = blocks.iter().fold(T::zero(), |acc, b| acc + b.norm_sq());
    if total <= radius_sq {
        blocks.to_vec()
    } else {
        let f = (radius_sq / total).sqrt();
        blocks.iter().map(|b| b.scale(f)).collect()
    }
}

/// Applies the projection of every group to `blocks` in place.
pub fn project_all<T: Real>(groups: &[ConstraintGroup<T>], blocks: &mut [CMat<T>]) {
    for g in groups {
        match g {
            ConstraintGroup::Free(_) => {}
            ConstraintGroup::Ball { block, radius_sq } => {
                blocks[*block] = project_ball(&blocks[*block], *radius_sq);
            }
            ConstraintGroup::Joint { members, radius_sq } => {
                let sel: Vec<CMat<T>> = members.iter().map(|&m| blocks[m].clone()).collect();
                for (&m, p) in members.iter().zip(project_group_ball(&sel, *radius_sq)) {
                    blocks[m] = p;
                }
            }
        }
    }
}

/// Largest violation `Σ‖·‖² − radius²` over the groups (≤ 0 when feasible).
pub fn max_violation<T: Real>(groups: &[ConstraintGroup<T>], blocks: &[CMat<T>]) -> T {
    groups.iter().fold(T::neg_infinity(), |acc, g| match g.radius_sq() {
        None => acc,
        Some(r) => {
            let total = g.members().iter().fold(T::zero(), |s, &m| s + blocks[m].norm_sq());
            acc.max(total - r)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::C;

    fn v(xs: &[f64]) -> CMat<f64> {
        CMat::column_real(xs)
    }

    #[test]
    fn ball_projection_examples() {
        assert_eq!(project_ball(&v(&[1.0, 0.0]), 4.0), v(&[1.0, 0.0]));
        assert_eq!(project_ball(&v(&[3.0, 4.0]), 25.0), v(&[3.0, 4.0]));
        let p = project_ball(&v(&[3.0, 4.0]), 1.0);
        assert!(p.max_abs_diff(&v(&[0.6, 0.8])) < 1e-15);
    }

    #[test]
    fn group_projection_examples() {
        let blocks = vec![v(&[1.0, 0.0]), v(&[0.0, 1.0])];
        assert_eq!(project_group_ball(&blocks, 4.0), blocks);
        let big = vec![v(&[2.0, 0.0]), v(&[0.0, 2.0])];
        let p = project_group_ball(&big, 2.0);
        assert!(p[0].max_abs_diff(&v(&[1.0, 0.0])) < 1e-15);
        assert!(p[1].max_abs_diff(&v(&[0.0, 1.0])) < 1e-15);
    }

    #[test]
    fn partition_validation() {
        let g = ConstraintSpec::GroupBall {
            members: vec![0, 2],
            radius_sq: 1.0,
        };
        let specs = vec![g.clone(), ConstraintSpec::Ball { radius_sq: 2.0 }, g];
        let groups = constraint_groups(&specs).unwrap();
        assert_eq!(groups.len(), 2);
        let bad = vec![
            ConstraintSpec::GroupBall {
                members: vec![0, 1],
                radius_sq: 1.0,
            },
            ConstraintSpec::<f64>::Unconstrained,
        ];
        assert!(constraint_groups(&bad).is_err());
        assert!(constraint_groups(&[ConstraintSpec::Ball { radius_sq: 0.0 }]).is_err());
    }

    #[test]
    fn complex_ball_keeps_phase() {
        let x = CMat::column(vec![C::new(0.0, 3.0), C::new(4.0, 0.0)]);
        let p = project_ball(&x, 1.0);
        assert!((p[(0, 0)] - C::new(0.0, 0.6)).norm() < 1e-15);
    }
}

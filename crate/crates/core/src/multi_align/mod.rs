//! Pairwise alignment of N distributions against one operator.

use crate::error::{Error, Result};
use crate::function_space::{apply_operator, bilinear_form, check_len, DensityVector, FnVector, PairwiseOperator};

/// Relative agreement required between the two loss expansions.
pub const REARRANGEMENT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionFamily {
    members: Vec<DensityVector>,
}

impl DistributionFamily {
    pub fn new(members: Vec<DensityVector>) -> Result<Self> {
        if members.len() < 2 {
            return Err(Error::FamilyTooSmall(members.len()));
        }
        let k = members[0].len();
        for m in &members[1..] {
            check_len(k, m.len())?;
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[DensityVector] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn space_size(&self) -> usize {
        self.members[0].len()
    }
}

/// Σ_{i<j} ⟨p_i − p_j, A (p_i − p_j)⟩.
///
/// Cross-checked against (N − 1) Σ ⟨p_i, A p_i⟩ − Σ_{i≠j} ⟨p_i, A p_j⟩.
pub fn multi_loss(fam: &DistributionFamily, a: &PairwiseOperator) -> Result<f64> {
    check_len(a.size(), fam.space_size())?;
    let m = fam.members();
    let mut pairwise = 0.0;
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            let d = m[i].diff(&m[j])?;
            pairwise += bilinear_form(&d, a, &d)?;
        }
    }
    let rearranged = multi_loss_rearranged(fam, a)?;
    let scale = pairwise.abs().max(rearranged.abs()).max(1.0);
    if (pairwise - rearranged).abs() > REARRANGEMENT_TOLERANCE * scale {
        return Err(Error::RearrangementMismatch { pairwise, rearranged });
    }
    Ok(pairwise)
}

/// (N − 1) Σ_i ⟨p_i, A p_i⟩ − Σ_{i≠j} ⟨p_i, A p_j⟩.
pub fn multi_loss_rearranged(fam: &DistributionFamily, a: &PairwiseOperator) -> Result<f64> {
    check_len(a.size(), fam.space_size())?;
    let m = fam.members();
    let n = m.len() as f64;
    let mut diag = 0.0;
    let mut cross = 0.0;
    for (i, pi) in m.iter().enumerate() {
        for (j, pj) in m.iter().enumerate() {
            let v = bilinear_form(pi.vector(), a, pj.vector())?;
            if i == j {
                diag += v;
            } else {
                cross += v;
            }
        }
    }
    Ok((n - 1.0) * diag - cross)
}

/// ∇_{p_i} = 2(N − 1) A p_i − 2 Σ_{s≠i} A p_s, written as
/// 2N·A p_i − 2 Σ_s A p_s so equal members get bit-identical gradients.
pub fn multi_gradients(fam: &DistributionFamily, a: &PairwiseOperator) -> Result<Vec<FnVector>> {
    check_len(a.size(), fam.space_size())?;
    let applied = fam
        .members()
        .iter()
        .map(|p| apply_operator(a, p.vector()))
        .collect::<Result<Vec<_>>>()?;
    let mut total = FnVector::zeros(fam.space_size());
    for ap in &applied {
        total += ap;
    }
    let n = fam.len() as f64;
    Ok(applied.iter().map(|ap| ap * (2.0 * n) - &total * 2.0).collect())
}

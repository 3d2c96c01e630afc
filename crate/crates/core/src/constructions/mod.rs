//! Combining constructions as streaming code builders, and the named recipes.

mod addon;
mod duplication;
mod linkage;
mod pairing;
mod profile;
pub mod recipes;

pub use addon::{coset_addon, mixed_abar_addons, product_addon, xi_extension, Addon, CrossCheck};
pub use duplication::{
    duplication, remove_from_disjoint_pair, DistancePartition, NdkSequence, Witness,
};
pub use linkage::{
    check_special_substructure, check_special_substructure_sampled, cor1_bound, multiblock_linkage,
    SubstructureReport,
};
pub use pairing::pairing_construction;
pub use profile::CompositionProfile;
pub use recipes::{recipe, recipe_names, Imports, RecipeOutput};

use crate::gf::Field;
use crate::linalg::{Matrix, Rows};
use crate::subspace::Subspace;

/// Row space of `[P_1 | P_2 | ...]`, each part placed at its column offset.
pub(crate) fn concat_columns(field: Field, n: usize, parts: &[(usize, &Matrix)]) -> Subspace {
    let rows = parts[0].1.rows();
    if field.q() == 2 && n <= 64 {
        if let Some(mut bits) =
            parts
                .iter()
                .try_fold(Rows::from_elem(0, rows), |mut acc, (off, m)| {
                    let p = m.packed()?;
                    for (a, r) in acc.iter_mut().zip(p) {
                        *a |= r >> off;
                    }
                    Some(acc)
                })
        {
            return Subspace::from_bits(field, n, &mut bits);
        }
    }
    let mut data = vec![0u32; rows * n];
    for (off, m) in parts {
        for i in 0..rows {
            for j in 0..m.cols() {
                data[i * n + off + j] = m.get(i, j);
            }
        }
    }
    Subspace::from_matrix(&Matrix::from_dense(field, rows, n, data))
        .expect("concatenation has full rank")
}

/// Span of subspaces supported on disjoint coordinate blocks.
pub(crate) fn block_diagonal(field: Field, n: usize, parts: &[(usize, &Subspace)]) -> Subspace {
    if field.q() == 2 && n <= 64 {
        let mut bits: Rows = Rows::new();
        for (off, u) in parts {
            let p = u.generator().packed().expect("binary rows pack");
            bits.extend(p.iter().map(|r| r >> off));
        }
        return Subspace::from_bits(field, n, &mut bits);
    }
    let rows: usize = parts.iter().map(|(_, u)| u.k()).sum();
    let mut data = vec![0u32; rows * n];
    let mut r0 = 0;
    for (off, u) in parts {
        let g = u.generator();
        for i in 0..g.rows() {
            for j in 0..g.cols() {
                data[(r0 + i) * n + off + j] = g.get(i, j);
            }
        }
        r0 += g.rows();
    }
    Subspace::from_matrix(&Matrix::from_dense(field, rows, n, data))
        .expect("blocks are independent")
}

//! Finite groups acting by permutations on disjoint blocks of points, and the
//! block-permutation operators they induce.

use std::sync::Arc;

use super::{Scalar, SparseOp};
use crate::error::{Error, Result};
use crate::space::PointSet;

/// A finite group given by its multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    names: Vec<String>,
    /// `table[g][h]` is the index of `g·h`.
    table: Vec<Vec<usize>>,
    identity: usize,
    /// Optional realization by permutations of `0..degree`.
    perms: Option<Vec<Vec<usize>>>,
}

impl FiniteGroup {
    /// Validates closure, associativity, identity and inverses.
    pub fn new(names: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::InvalidGroup("no elements".into()));
        }
        if table.len() != n
            || table
                .iter()
                .any(|row| row.len() != n || row.iter().any(|&k| k >= n))
        {
            return Err(Error::InvalidGroup(format!(
                "table must be {n}x{n} with entries below {n}"
            )));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        for g in 0..n {
            if !(0..n).any(|h| table[g][h] == identity && table[h][g] == identity) {
                return Err(Error::InvalidGroup(format!(
                    "`{}` has no inverse",
                    names[g]
                )));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::InvalidGroup(format!(
                            "not associative at ({}, {}, {})",
                            names[a], names[b], names[c]
                        )));
                    }
                }
            }
        }
        let mut sorted = names.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidGroup("duplicate element names".into()));
        }
        Ok(FiniteGroup {
            names,
            table,
            identity,
            perms: None,
        })
    }

    /// The group generated under composition `(g·h)(i) = g(h(i))` by a list
    /// of permutations that is already closed. Element `i` is named by its
    /// one-line notation.
    pub fn from_permutations(perms: Vec<Vec<usize>>) -> Result<Self> {
        let index = |p: &Vec<usize>| perms.iter().position(|q| q == p);
        let mut table = Vec::with_capacity(perms.len());
        for g in &perms {
            let mut row = Vec::with_capacity(perms.len());
            for h in &perms {
                let gh: Vec<usize> = h.iter().map(|&i| g[i]).collect();
                row.push(
                    index(&gh)
                        .ok_or_else(|| Error::InvalidGroup("permutations are not closed".into()))?,
                );
            }
            table.push(row);
        }
        let names = perms.iter().map(|p| one_line(p)).collect();
        let mut group = FiniteGroup::new(names, table)?;
        group.perms = Some(perms);
        Ok(group)
    }

    /// The symmetric group on `k` points, elements in lexicographic order of
    /// their one-line notation (so the identity comes first).
    pub fn symmetric(k: usize) -> Self {
        let mut perms = Vec::new();
        let mut current: Vec<usize> = (0..k).collect();
        loop {
            perms.push(current.clone());
            if !next_permutation(&mut current) {
                break;
            }
        }
        Self::from_permutations(perms).expect("symmetric groups are groups")
    }

    /// `Z/n` acting on `0..n` by rotation; element `r` is named `r`.
    pub fn cyclic(n: usize) -> Self {
        assert!(n > 0, "the cyclic group needs at least one element");
        let perms: Vec<Vec<usize>> = (0..n)
            .map(|r| (0..n).map(|i| (i + r) % n).collect())
            .collect();
        let mut group = Self::from_permutations(perms).expect("cyclic groups are groups");
        group.names = (0..n).map(|r| r.to_string()).collect();
        group
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn name(&self, g: usize) -> &str {
        &self.names[g]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn element(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table[g][h]
    }

    pub fn permutation(&self, g: usize) -> Option<&[usize]> {
        self.perms.as_ref().map(|p| p[g].as_slice())
    }
}

fn one_line(p: &[usize]) -> String {
    if p.len() <= 10 {
        p.iter().map(|i| i.to_string()).collect()
    } else {
        p.iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(".")
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len())
        .rev()
        .find(|&j| p[j] > p[i - 1])
        .expect("p[i] qualifies");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// A group action on one block of points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockAction {
    /// Global point indices of the block; local index `i` is `block[i]`.
    pub block: Vec<usize>,
    /// `images[g][i]`: local image of local point `i` under `g`.
    pub images: Vec<Vec<usize>>,
}

impl BlockAction {
    /// Left regular action `h ↦ g·h`; the block lists points for the group
    /// elements in order.
    pub fn regular(group: &FiniteGroup, block: Vec<usize>) -> Result<Self> {
        if block.len() != group.order() {
            return Err(Error::InvalidBlock(format!(
                "regular action needs {} points, block has {}",
                group.order(),
                block.len()
            )));
        }
        let images = (0..group.order())
            .map(|g| (0..group.order()).map(|h| group.mul(g, h)).collect())
            .collect();
        Ok(BlockAction { block, images })
    }

    /// Action `kH ↦ gkH` on left cosets of a subgroup `H`, cosets ordered by
    /// their first element. This is the quasiregular action on `G/H`.
    pub fn cosets(group: &FiniteGroup, subgroup: &[usize], block: Vec<usize>) -> Result<Self> {
        let n = group.order();
        let closed = subgroup.contains(&group.identity())
            && subgroup.iter().all(|&a| {
                subgroup
                    .iter()
                    .all(|&b| subgroup.contains(&group.mul(a, b)))
            });
        if !closed {
            return Err(Error::InvalidGroup("subgroup is not closed".into()));
        }
        let mut coset_of = vec![usize::MAX; n];
        let mut reps = Vec::new();
        for g in 0..n {
            if coset_of[g] == usize::MAX {
                for &h in subgroup {
                    coset_of[group.mul(g, h)] = reps.len();
                }
                reps.push(g);
            }
        }
        if block.len() != reps.len() {
            return Err(Error::InvalidBlock(format!(
                "coset action needs {} points, block has {}",
                reps.len(),
                block.len()
            )));
        }
        let images = (0..n)
            .map(|g| reps.iter().map(|&k| coset_of[group.mul(g, k)]).collect())
            .collect();
        Ok(BlockAction { block, images })
    }

    /// The defining permutation action of a permutation group.
    pub fn natural(group: &FiniteGroup, block: Vec<usize>) -> Result<Self> {
        let Some(degree) = group.permutation(group.identity()).map(<[usize]>::len) else {
            return Err(Error::InvalidBlock(
                "group has no permutation realization".into(),
            ));
        };
        if block.len() != degree {
            return Err(Error::InvalidBlock(format!(
                "natural action needs {degree} points, block has {}",
                block.len()
            )));
        }
        let images = (0..group.order())
            .map(|g| group.permutation(g).expect("checked above").to_vec())
            .collect();
        Ok(BlockAction { block, images })
    }
}

/// Disjoint blocks, each carrying a permutation action of the same group.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockRep {
    pub points: Arc<PointSet>,
    pub group: FiniteGroup,
    pub blocks: Vec<BlockAction>,
}

impl BlockRep {
    /// Checks disjointness, that every image is a permutation of its block,
    /// and that each action is a homomorphism: `σ(g·h) = σ(g) ∘ σ(h)`.
    pub fn new(
        points: Arc<PointSet>,
        group: FiniteGroup,
        blocks: Vec<BlockAction>,
    ) -> Result<Self> {
        let mut owner = vec![None; points.len()];
        for (b, action) in blocks.iter().enumerate() {
            for &x in &action.block {
                points.check_index(x)?;
                if let Some(other) = owner[x].replace(b) {
                    return Err(Error::InvalidBlock(format!(
                        "point `{}` lies in blocks {other} and {b}",
                        points.id(x)
                    )));
                }
            }
            let m = action.block.len();
            if action.images.len() != group.order() {
                return Err(Error::InvalidBlock(format!(
                    "block {b} does not act by every element"
                )));
            }
            for (g, img) in action.images.iter().enumerate() {
                let mut seen = vec![false; m];
                for &i in img {
                    if i >= m || std::mem::replace(&mut seen[i], true) {
                        return Err(Error::InvalidBlock(format!(
                            "`{}` does not permute block {b}",
                            group.name(g)
                        )));
                    }
                }
                if img.len() != m {
                    return Err(Error::InvalidBlock(format!(
                        "`{}` does not permute block {b}",
                        group.name(g)
                    )));
                }
            }
            for g in 0..group.order() {
                for h in 0..group.order() {
                    let gh = &action.images[group.mul(g, h)];
                    if (0..m).any(|i| gh[i] != action.images[g][action.images[h][i]]) {
                        return Err(Error::InvalidBlock(format!(
                            "block {b}: action of `{}·{}` is not the composition",
                            group.name(g),
                            group.name(h)
                        )));
                    }
                }
            }
        }
        Ok(BlockRep {
            points,
            group,
            blocks,
        })
    }

    pub fn max_block_diameter(&self, d: &crate::space::ExtMetric) -> f64 {
        self.blocks
            .iter()
            .map(|a| d.diameter_of(&a.block))
            .fold(0.0, f64::max)
    }
}

/// `φ(g) = ⊕_n i_n λ_n(g) p_n`: `δ_x ↦ δ_{g·x}` on every block, zero off
/// the blocks.
pub fn block_embedding(rep: &BlockRep, g: usize) -> Result<SparseOp> {
    if g >= rep.group.order() {
        return Err(Error::UnknownElement(g.to_string()));
    }
    let one = Scalar::new(1.0, 0.0);
    SparseOp::from_entries(
        Arc::clone(&rep.points),
        rep.blocks.iter().flat_map(|a| {
            a.images[g]
                .iter()
                .enumerate()
                .map(move |(i, &j)| (a.block[j], a.block[i], one))
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::band_sparsity;

    #[test]
    fn s3_table() {
        let s3 = FiniteGroup::symmetric(3);
        assert_eq!(s3.order(), 6);
        assert_eq!(s3.identity(), 0);
        assert_eq!(s3.name(0), "012");
        // (0 1) then (1 2): g·h applies h first
        let swap01 = s3.element("102").unwrap();
        let swap12 = s3.element("021").unwrap();
        assert_eq!(s3.name(s3.mul(swap01, swap12)), "120");
        assert!(s3.element("000").is_err());
    }

    #[test]
    fn bad_tables_are_rejected() {
        let names = vec!["a".to_string(), "b".to_string()];
        assert!(FiniteGroup::new(names.clone(), vec![vec![0, 0], vec![0, 0]]).is_err());
        assert!(FiniteGroup::new(names.clone(), vec![vec![0, 1], vec![1, 0]]).is_ok());
        assert!(FiniteGroup::new(names, vec![vec![0, 1]]).is_err());
    }

    #[test]
    fn identity_embeds_as_projection_on_blocks() {
        let z2 = FiniteGroup::cyclic(2);
        let points = Arc::new(PointSet::range(3));
        let rep = BlockRep::new(
            points.clone(),
            z2,
            vec![BlockAction::regular(&FiniteGroup::cyclic(2), vec![0, 2]).unwrap()],
        )
        .unwrap();
        let e = block_embedding(&rep, 0).unwrap();
        assert_eq!(
            e,
            SparseOp::from_real(points.clone(), [(0, 0, 1.0), (2, 2, 1.0)]).unwrap()
        );
        let swap = block_embedding(&rep, 1).unwrap();
        assert_eq!(
            swap,
            SparseOp::from_real(points, [(0, 2, 1.0), (2, 0, 1.0)]).unwrap()
        );
        assert_eq!(band_sparsity(&swap), 1);
        assert!(block_embedding(&rep, 2).is_err());
    }

    #[test]
    fn s3_regular_is_multiplicative() {
        let s3 = FiniteGroup::symmetric(3);
        let points = Arc::new(PointSet::range(6));
        let action = BlockAction::regular(&s3, (0..6).collect()).unwrap();
        let rep = BlockRep::new(points, s3.clone(), vec![action]).unwrap();
        for g in 0..6 {
            for h in 0..6 {
                let lhs = block_embedding(&rep, s3.mul(g, h)).unwrap();
                let rhs = block_embedding(&rep, g)
                    .unwrap()
                    .mul(&block_embedding(&rep, h).unwrap())
                    .unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn coset_and_natural_actions() {
        let s3 = FiniteGroup::symmetric(3);
        let h = vec![s3.identity(), s3.element("102").unwrap()];
        let cos = BlockAction::cosets(&s3, &h, vec![0, 1, 2]).unwrap();
        let nat = BlockAction::natural(&s3, vec![3, 4, 5]).unwrap();
        let rep = BlockRep::new(Arc::new(PointSet::range(6)), s3.clone(), vec![cos, nat]).unwrap();
        assert_eq!(rep.blocks.len(), 2);
        assert!(BlockAction::cosets(&s3, &[s3.element("120").unwrap()], vec![0, 1, 2]).is_err());
    }

    #[test]
    fn overlapping_or_wrong_blocks_fail() {
        let z2 = FiniteGroup::cyclic(2);
        let a = BlockAction::regular(&z2, vec![0, 1]).unwrap();
        let b = BlockAction::regular(&z2, vec![1, 2]).unwrap();
        assert!(BlockRep::new(Arc::new(PointSet::range(3)), z2.clone(), vec![a, b]).is_err());
        assert!(BlockAction::regular(&z2, vec![0, 1, 2]).is_err());
        let broken = BlockAction {
            block: vec![0, 1],
            images: vec![vec![1, 0], vec![1, 0]],
        };
        assert!(BlockRep::new(Arc::new(PointSet::range(2)), z2, vec![broken]).is_err());
    }
}

use std::sync::Arc;

use crate::algebra::{Elem, FieldSpec, Laurent, LaurentVector};

/// A cube of level `l`: for each coordinate the coefficients at exponents
/// `0, -1, ..., -(P l - 1)`, where `P = (n+1) M` digits are added per level.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cube {
    pub level: i64,
    /// `digits[i][j]` is the coefficient of `X^{-j}` in coordinate `i`.
    pub digits: Vec<Vec<Elem>>,
}

impl Cube {
    /// The whole unit ball `Z_O^n`.
    pub fn root(n: usize) -> Self {
        Cube {
            level: 0,
            digits: vec![Vec::new(); n],
        }
    }

    pub fn n(&self) -> usize {
        self.digits.len()
    }

    /// Exponent of the side length.
    pub fn side_exponent(&self) -> i64 {
        -(self.digits[0].len() as i64)
    }

    /// The point with all free coefficients zero.
    pub fn center(&self, f: &FieldSpec) -> LaurentVector {
        LaurentVector::new(
            self.digits
                .iter()
                .map(|d| digits_to_series(f, d, None))
                .collect(),
        )
    }

    /// The cube as a point known down to its side exponent.
    pub fn as_point(&self, f: &FieldSpec) -> LaurentVector {
        let fl = self.side_exponent();
        LaurentVector::new(
            self.digits
                .iter()
                .map(|d| digits_to_series(f, d, Some(fl)))
                .collect(),
        )
    }

    /// Whether the known digits of `x` match this cube's prefix.
    pub fn contains(&self, x: &LaurentVector) -> bool {
        self.digits.iter().zip(x.coords()).all(|(d, c)| {
            d.iter()
                .enumerate()
                .all(|(j, &e)| c.coeff(-(j as i64)) == Ok(e))
        })
    }

    /// The level-`l` cube containing `x`, if its digits are known.
    pub fn of_point(x: &LaurentVector, level: i64, per_level: usize) -> Option<Cube> {
        let len = per_level * level as usize;
        let digits = x
            .coords()
            .iter()
            .map(|c| {
                (0..len)
                    .map(|j| c.coeff(-(j as i64)).ok())
                    .collect::<Option<Vec<_>>>()
            })
            .collect::<Option<Vec<_>>>()?;
        Some(Cube { level, digits })
    }
}

pub(crate) fn digits_to_series(f: &FieldSpec, d: &[Elem], floor: Option<i64>) -> Laurent {
    let terms: Vec<(i64, Elem)> = d
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(j, &c)| (-(j as i64), c))
        .collect();
    Laurent::from_terms(f, &terms, floor)
}

/// Block number `idx` in coefficient-lexicographic order.
pub fn block_of(q: u32, n: usize, per_level: usize, mut idx: u128) -> Vec<Vec<Elem>> {
    let width = n * per_level;
    let mut flat = vec![0 as Elem; width];
    for p in (0..width).rev() {
        flat[p] = (idx % q as u128) as Elem;
        idx /= q as u128;
    }
    flat.chunks(per_level).map(|c| c.to_vec()).collect()
}

/// All `q^{n P}` blocks of `P` digits per coordinate, coefficient-lexicographic.
pub fn blocks(q: u32, n: usize, per_level: usize) -> Vec<Vec<Vec<Elem>>> {
    let count = (q as u128).pow((n * per_level) as u32);
    (0..count)
        .map(|idx| block_of(q, n, per_level, idx))
        .collect()
}

/// The `N^n` children of `c`, in coefficient-lexicographic order.
pub fn subdivide(f: &FieldSpec, c: &Cube, per_level: usize) -> Vec<Cube> {
    blocks(f.q(), c.n(), per_level)
        .into_iter()
        .map(|b| Cube {
            level: c.level + 1,
            digits: c
                .digits
                .iter()
                .zip(b)
                .map(|(d, e)| {
                    let mut d = d.clone();
                    d.extend(e);
                    d
                })
                .collect(),
        })
        .collect()
}

/// One level of a lineage: the block added at `level` and the parent.
#[derive(Debug)]
pub(crate) struct Node {
    pub level: i64,
    /// `n` blocks of `P` digits.
    pub block: Vec<Vec<Elem>>,
    pub parent: Option<Arc<Node>>,
}

impl Node {
    pub fn root(n: usize) -> Arc<Node> {
        Arc::new(Node {
            level: 0,
            block: vec![Vec::new(); n],
            parent: None,
        })
    }

    pub fn child(parent: &Arc<Node>, block: Vec<Vec<Elem>>) -> Arc<Node> {
        Arc::new(Node {
            level: parent.level + 1,
            block,
            parent: Some(parent.clone()),
        })
    }

    /// Blocks of levels `> above`, deepest first.
    pub fn blocks_since(self: &Arc<Node>, above: i64) -> Vec<(i64, Vec<Vec<Elem>>)> {
        let mut out = Vec::new();
        let mut cur = Some(self);
        while let Some(node) = cur {
            if node.level <= above {
                break;
            }
            out.push((node.level, node.block.clone()));
            cur = node.parent.as_ref();
        }
        out
    }

    pub fn to_cube(self: &Arc<Node>) -> Cube {
        let n = self.block.len();
        let mut blocks = self.blocks_since(0);
        blocks.reverse();
        let mut digits = vec![Vec::new(); n];
        for (_, b) in blocks {
            for (d, e) in digits.iter_mut().zip(b) {
                d.extend(e);
            }
        }
        Cube {
            level: self.level,
            digits,
        }
    }
}

impl Drop for Node {
    // Unlinks long chains iteratively.
    fn drop(&mut self) {
        let mut next = self.parent.take();
        while let Some(p) = next {
            match Arc::try_unwrap(p) {
                Ok(mut node) => next = node.parent.take(),
                Err(_) => break,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn child_counts() {
        let f = FieldSpec::prime(2).unwrap();
        let root = Cube::root(1);
        let kids = subdivide(&f, &root, 4);
        assert_eq!(kids.len(), 16);
        assert_eq!(kids[1].digits, vec![vec![0, 0, 0, 1]]);
        let grand: std::collections::HashSet<Cube> =
            kids.iter().flat_map(|c| subdivide(&f, c, 4)).collect();
        assert_eq!(grand.len(), 256);
        assert_eq!(subdivide(&f, &Cube::root(2), 2).len(), 16);
    }

    #[test]
    fn points_and_prefixes() {
        let f = FieldSpec::prime(3).unwrap();
        let c = Cube {
            level: 1,
            digits: vec![vec![0, 2, 1], vec![1, 0, 0]],
        };
        let x = c.center(&f);
        assert!(c.contains(&x));
        assert_eq!(x.coord(0).coeff(-1).unwrap(), 2);
        assert_eq!(c.as_point(&f).floor(), Some(-3));
        assert_eq!(Cube::of_point(&x, 1, 3), Some(c.clone()));
        assert!(Cube::root(2).contains(&x));
    }

    #[test]
    fn lineage_round_trip() {
        let mut node = Node::root(1);
        for k in 0..5000 {
            node = Node::child(&node, vec![vec![(k % 2) as Elem, 1]]);
        }
        let cube = node.to_cube();
        assert_eq!(cube.level, 5000);
        assert_eq!(&cube.digits[0][..4], &[0, 1, 1, 1]);
        assert_eq!(node.blocks_since(4998).len(), 2);
    }
}

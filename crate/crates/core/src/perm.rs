//! Permutations of the four vertices of a tetrahedron.

use std::fmt;

/// An element of S₄, stored as the images of 0, 1, 2, 3.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm4([u8; 4]);

/// The 24 permutations in lexicographic order; isomorphism signatures
/// index gluing permutations into this table.
pub const S4: [Perm4; 24] = [
    Perm4([0, 1, 2, 3]),
    Perm4([0, 1, 3, 2]),
    Perm4([0, 2, 1, 3]),
    Perm4([0, 2, 3, 1]),
    Perm4([0, 3, 1, 2]),
    Perm4([0, 3, 2, 1]),
    Perm4([1, 0, 2, 3]),
    Perm4([1, 0, 3, 2]),
    Perm4([1, 2, 0, 3]),
    Perm4([1, 2, 3, 0]),
    Perm4([1, 3, 0, 2]),
    Perm4([1, 3, 2, 0]),
    Perm4([2, 0, 1, 3]),
    Perm4([2, 0, 3, 1]),
    Perm4([2, 1, 0, 3]),
    Perm4([2, 1, 3, 0]),
    Perm4([2, 3, 0, 1]),
    Perm4([2, 3, 1, 0]),
    Perm4([3, 0, 1, 2]),
    Perm4([3, 0, 2, 1]),
    Perm4([3, 1, 0, 2]),
    Perm4([3, 1, 2, 0]),
    Perm4([3, 2, 0, 1]),
    Perm4([3, 2, 1, 0]),
];

impl Perm4 {
    pub const IDENTITY: Perm4 = Perm4([0, 1, 2, 3]);

    /// Builds a permutation from its image array, returning `None` if the
    /// array is not a bijection of {0,1,2,3}.
    pub fn new(images: [u8; 4]) -> Option<Self> {
        let mut seen = [false; 4];
        for &i in &images {
            if i > 3 || seen[i as usize] {
                return None;
            }
            seen[i as usize] = true;
        }
        Some(Perm4(images))
    }

    /// The transposition swapping `a` and `b`.
    pub fn transposition(a: usize, b: usize) -> Self {
        let mut images = [0u8, 1, 2, 3];
        images.swap(a, b);
        Perm4(images)
    }

    #[inline]
    pub fn apply(self, i: usize) -> usize {
        self.0[i] as usize
    }

    pub fn images(self) -> [u8; 4] {
        self.0
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(self, other: Perm4) -> Perm4 {
        let mut out = [0u8; 4];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.0[other.0[i] as usize];
        }
        Perm4(out)
    }

    pub fn inverse(self) -> Perm4 {
        let mut out = [0u8; 4];
        for i in 0..4 {
            out[self.0[i] as usize] = i as u8;
        }
        Perm4(out)
    }

    /// +1 for even permutations, -1 for odd ones.
    pub fn sign(self) -> i8 {
        let mut inversions = 0;
        for i in 0..4 {
            for j in (i + 1)..4 {
                if self.0[i] > self.0[j] {
                    inversions += 1;
                }
            }
        }
        if inversions % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn is_odd(self) -> bool {
        self.sign() < 0
    }

    /// Position of this permutation in [`S4`].
    pub fn s4_index(self) -> usize {
        S4.iter()
            .position(|&p| p == self)
            .expect("S4 lists every permutation")
    }

    /// Every permutation, in [`S4`] order.
    pub fn all() -> impl Iterator<Item = Perm4> {
        S4.iter().copied()
    }
}

impl fmt::Debug for Perm4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}{}", self.0[0], self.0[1], self.0[2], self.0[3])
    }
}

impl fmt::Display for Perm4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

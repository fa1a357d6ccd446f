// SPDX-License-Identifier: Apache-2.0

use std::fmt;

macro_rules! bitset {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(u64);

        impl $name {
            pub const EMPTY: $name = $name(0);

            pub const fn from_bits(bits: u64) -> Self {
                $name(bits)
            }

            pub const fn bits(self) -> u64 {
                self.0
            }

            /// The set `{0, .., len - 1}`.
            pub fn full(len: usize) -> Self {
                assert!(len <= 64);
                if len == 64 {
                    $name(u64::MAX)
                } else {
                    $name((1u64 << len) - 1)
                }
            }

            pub fn singleton(index: usize) -> Self {
                $name(1u64 << index)
            }

            pub fn with(self, index: usize) -> Self {
                $name(self.0 | (1u64 << index))
            }

            pub fn without(self, index: usize) -> Self {
                $name(self.0 & !(1u64 << index))
            }

            pub fn contains(self, index: usize) -> bool {
                index < 64 && self.0 >> index & 1 == 1
            }

            pub fn len(self) -> usize {
                self.0.count_ones() as usize
            }

            pub fn is_empty(self) -> bool {
                self.0 == 0
            }

            pub fn union(self, other: Self) -> Self {
                $name(self.0 | other.0)
            }

            pub fn intersection(self, other: Self) -> Self {
                $name(self.0 & other.0)
            }

            pub fn difference(self, other: Self) -> Self {
                $name(self.0 & !other.0)
            }

            pub fn is_subset(self, other: Self) -> bool {
                self.0 & !other.0 == 0
            }

            pub fn iter(self) -> SetIter {
                SetIter(self.0)
            }

            /// All subsets of `{0, .., len - 1}` in ascending order.
            pub fn all_subsets(len: usize) -> impl Iterator<Item = Self> {
                assert!(len < 64, "cannot enumerate 2^64 subsets");
                (0..1u64 << len).map($name)
            }

            /// All subsets of `self` in ascending order, starting with the
            /// empty set.
            pub fn subsets(self) -> impl Iterator<Item = Self> {
                let mask = self.0;
                let mut next = Some(0u64);
                std::iter::from_fn(move || {
                    let current = next?;
                    next = if current == mask {
                        None
                    } else {
                        Some(current.wrapping_sub(mask) & mask)
                    };
                    Some($name(current))
                })
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.debug_set().entries(self.iter()).finish()
            }
        }

        impl FromIterator<usize> for $name {
            fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
                iter.into_iter().fold($name::EMPTY, $name::with)
            }
        }
    };
}

bitset!(
    /// A set of projects, as a bitmask over the election's project order.
    ProjectSet
);
bitset!(
    /// A set of voters, as a bitmask over the election's voter order.
    VoterSet
);

/// Iterates set bits from least to most significant.
#[derive(Debug, Clone)]
pub struct SetIter(u64);

impl Iterator for SetIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let index = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(index)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for SetIter {}

use std::fmt;

/// A set of clients stored as a bitmask, client `j` (0-based) at bit `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ClientSubset(pub u32);

impl ClientSubset {
    pub const EMPTY: ClientSubset = ClientSubset(0);

    /// The full client set of a `k`-client instance.
    pub fn full(k: usize) -> Self {
        debug_assert!(k < 32);
        ClientSubset((1u32 << k) - 1)
    }

    pub fn from_clients<I: IntoIterator<Item = usize>>(clients: I) -> Self {
        ClientSubset(clients.into_iter().fold(0, |m, j| m | (1 << j)))
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn contains(self, client: usize) -> bool {
        self.0 >> client & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Self) -> Self {
        ClientSubset(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        ClientSubset(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        ClientSubset(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    /// Complement within a `k`-client instance.
    pub fn complement(self, k: usize) -> Self {
        ClientSubset(!self.0 & Self::full(k).0)
    }

    pub fn clients(self) -> impl Iterator<Item = usize> {
        let mask = self.0;
        (0..32).filter(move |j| mask >> j & 1 == 1)
    }

    /// Every subset of a `k`-client instance in ascending mask order.
    pub fn all(k: usize) -> impl Iterator<Item = ClientSubset> {
        (0..1u32 << k).map(ClientSubset)
    }
}

/// Prints 1-based client labels, e.g. `{1,3}`.
impl fmt::Display for ClientSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, j) in self.clients().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", j + 1)?;
        }
        f.write_str("}")
    }
}

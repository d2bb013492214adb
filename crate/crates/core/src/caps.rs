/// Resource caps for exhaustive checks. All soft caps can be raised; the
/// full-subset-lattice bound (`all_pairs_group`) is hard because `2^|G|`
/// pairs stop being enumerable shortly after it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Largest group order `construct_group` will accept.
    pub max_order: u64,
    /// Largest table group for which associativity is verified (O(n^3)).
    pub assoc_check: u64,
    /// Largest structured group that may materialize its full Cayley table.
    pub table_materialize: u64,
    /// Largest structured group scanned for its center.
    pub center_scan: u64,
    /// Largest group for which quotient tables are built.
    pub quotient: u64,
    /// Largest group run through the upper-central-series test.
    pub nilpotency: u64,
    /// Largest group accepting permutation-form automorphisms (O(n^2) check).
    pub perm_aut: u64,
    /// Iteration budget for automorphism order computation.
    pub aut_order_iters: u64,
    /// Maximum estimated pair count for cardinality-restricted enumeration.
    pub pair_estimate: u64,
    /// Hard cap on |G| for full subset-pair enumeration.
    pub all_pairs_group: u64,
    /// Default triple budget for the same-ratio geometric-pair verifier.
    pub geometric_triples: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_order: 1 << 24,
            assoc_check: 512,
            table_materialize: 4096,
            center_scan: 1 << 20,
            quotient: 4096,
            nilpotency: 4096,
            perm_aut: 4096,
            aut_order_iters: 1_000_000,
            pair_estimate: 10_000_000_000,
            all_pairs_group: 16,
            geometric_triples: 50_000,
        }
    }
}

impl Caps {
    /// Raise every soft cap to at least `value`. The full-lattice cap stays put.
    pub fn with_override(mut self, value: u64) -> Self {
        self.max_order = self.max_order.max(value);
        self.assoc_check = self.assoc_check.max(value);
        self.table_materialize = self.table_materialize.max(value);
        self.center_scan = self.center_scan.max(value);
        self.quotient = self.quotient.max(value);
        self.nilpotency = self.nilpotency.max(value);
        self.perm_aut = self.perm_aut.max(value);
        self.aut_order_iters = self.aut_order_iters.max(value);
        self.pair_estimate = self.pair_estimate.max(value);
        self.geometric_triples = self.geometric_triples.max(value);
        self
    }
}

//! Binary prefix-free codes, symmetric ternary trees, and the construction of
//! a prefix-free code with the same per-length power sums as any uniquely
//! decodable code.

pub mod code;
pub mod construct;
pub mod correspondence;
pub mod decodability;
pub mod scalar;
pub mod symtree;
pub mod word;
pub mod workbench;

/// Exact rational used for Kraft-style sums.
pub type Rational = num_rational::BigRational;
/// Unbounded natural number used for profile entries and leaf counts.
pub type Natural = num_bigint::BigUint;
/// Power profile with unbounded entries.
pub type Profile = LengthProfile<Natural>;
/// Leaf counts with unbounded entries.
pub type LeafCounts = symtree::LeafCountVector<Natural>;

pub use code::{Code, CodeError, LengthProfile, ParikhSignature};
pub use construct::{
    code_from_lengths, prefixify, prefixify_traced, subset_sum_exact, ConstructError, ExponentMultiset,
};
pub use correspondence::{code_to_tree, tree_to_code, CorrespondenceError, LabeledTree, TernarySymbol};
pub use decodability::{agreement_bound, brute_force_ud, sardinas_patterson, UdVerdict, Witness};
pub use symtree::{CanonicalForm, JsonTree, Tree, TreeError};
pub use word::{Symbol, Word};

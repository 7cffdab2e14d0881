//! Words in the orbifold group, the representation `ρ_v` and its relations.

pub mod context;
pub mod eval;
pub mod word;

pub use context::{format_value, symbolic_tower, ContextSpec, ExactContext, NumericContext};
pub use eval::{generator_matrices, verify_relations, Evaluator, RelationEntry, RelationReport, RelationVerdict, RELATORS};
pub use word::{Letter, Word};

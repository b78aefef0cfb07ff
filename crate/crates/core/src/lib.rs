//! Games over collapsible pushdown systems: stack semantics, the reductions
//! from parity to safety games, and finite-arena solvers to check them.

pub mod bounds;
pub mod corpus;
pub mod counter_reduction;
pub mod model;
pub mod order_reduction;
pub mod pipeline;
pub mod poly;
pub mod rank_aware;
pub mod solver;

pub use model::explicit::{materialize, ExplicitGame, GameBuilder};
pub use model::game::{Condition, Config, Game, GameRef, Player, Role, Rule};
pub use model::ids::{State, Sym};
pub use model::op::Op;
pub use model::stack::Stack;

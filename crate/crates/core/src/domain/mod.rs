//! Types shared by the merge-avoidance solvers, the scheme analysis and the
//! ledger simulation.

mod amount;
mod instance;
mod route;
mod scheme;

pub use amount::Amount;
pub use instance::{
    check_solution, validate_instance, MAInstance, MASolution, PartitionInstance,
    SingleTargetInstance,
};
pub use route::{AttackSpec, Attacker, NodeId, Route};
pub use scheme::{
    materialize, FnSpec, LengthDistribution, RewardScheme, TabulatedScheme, DEFAULT_KMAX,
    DEFAULT_LMAX,
};

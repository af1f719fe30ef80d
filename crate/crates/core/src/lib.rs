//! Interactive proof sessions for double coset membership in
//! permutation groups, with perfect zero-knowledge simulators and the
//! exact statistical machinery to verify them.
//!
//! The crate is organized around the problem's moving parts:
//!
//! - [`permgroup`]: permutations, Schreier–Sims structures, membership,
//!   exact order, enumeration, and exactly uniform sampling;
//! - [`dcm`]: membership instances `(s, G, H)`, normalization of the
//!   four-tuple form, and the desk-scale decision/factorization oracle;
//! - [`protocol`]: the three-round public-coin proof system, its
//!   sequential and parallel compositions, and session transcripts;
//! - [`simulator`]: honest-verifier and black-box simulators plus exact
//!   view-distribution enumeration;
//! - [`dcnm`]: the two-round non-membership protocol and its simulator;
//! - [`reduction`]: the Graph Isomorphism reduction;
//! - [`stats`]: exact rational distribution comparison and the
//!   empirical test helpers;
//! - [`transport`]: channels connecting the two parties, in process or
//!   across a byte stream.

pub mod bits;
pub mod dcm;
pub mod dcnm;
pub mod permgroup;
pub mod protocol;
pub mod reduction;
pub mod rng;
pub mod simulator;
pub mod stats;
pub mod transport;

pub use bits::BitString;
pub use dcm::{
    alpha_bijection_check, branches_disjoint, dcm_decide, dcm_factorize, normalize,
    representations, CosetOracle, DcmError, DcmInstance, Factorization, PreparedInstance,
    DEFAULT_CAP,
};
pub use permgroup::{
    intersect_bruteforce, schreier_sims, Bsgs, GeneratorSet, GroupError, PermError, Permutation,
    Point,
};
pub use protocol::{Message, Mode, ProtocolError, Round, Transcript, View};
pub use rng::{BitSource, PartyTag, RandomSource};
pub use simulator::{
    exact_view_distribution, simulate_atomic_honest, simulate_sequential, SimulatedView,
    SimulatorError, ViewProcess, DEFAULT_RESTART_CAP, DEFAULT_STATE_CAP,
};
pub use stats::{
    acceptance_rate, chi_square_uniform, empirical_tv, tv_distance, tv_summary_line,
    EmpiricalSample, ExactDistribution, StatsError,
};

//! Compiling rational matrix functions into networks.

mod build;
mod identity;
mod spec;
mod strip;

pub use build::{
    add, concat, constant, direct_sum, feedback, realize_matrix, realize_scalar, reciprocal, relocate_terminals, route,
    scalar_monomial, staggered, zero, Layout,
};
pub use identity::{identity_network_symbolic, make_identity_network};
pub use spec::{realize, RationalMatrixSpec, Realization};
pub use strip::{GEdge, GVertex, Gadget, SPoint};

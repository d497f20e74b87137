//! Cones, membership predicates, conservative disposition tests and nets.

mod cone;
mod net;
mod vector;

pub use cone::{
    ball_disposition, in_half_cone, in_plane_cone, ConeRegion, Direction, Disposition, HalfCone, PlaneCone, Subspace,
    PAD,
};
pub use net::{direction_net, subspace_net};
pub use vector::{Matrix, Vector, MAX_DIM};

//! Spheres, rotation groups and Grassmannians with Haar samplers.

pub mod grassmann;
pub mod rotation;
pub mod sampler;
pub mod sphere;

pub use grassmann::{
    grassmann_distance, principal_angles, sample_grassmannian, GrassmannDraw, Grassmannian,
    Subspace,
};
pub use rotation::{sample_rotation, Rotation, RotationGroup};
pub use sampler::{SampleSpace, SeededSampler, CHUNK_SIZE};
pub use sphere::{sample_sphere, sphere_distance, Sphere, SpherePoint};

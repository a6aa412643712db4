//! Shape-conditioned generation of low-poly "artist-style" triangle meshes.
//!
//! The pipeline: a procedural watertight corpus ([`toydata`]) is normalized,
//! coordinate-quantized and canonically ordered ([`mesh`]), flattened into
//! face sequences ([`codec`]), compressed into discrete tokens by a residual
//! vector-quantized autoencoder ([`vqvae`]), and generated autoregressively
//! from a point-cloud shape condition ([`transformer`]). Conditions are
//! derived through an SDF / marching-cubes / surface-sampling pipeline
//! ([`field`]) so that training and inference see the same coarse geometry.
//! Evaluation lives in [`metrics`].
//!
//! All neural components run on the in-crate reverse-mode tensor core
//! ([`tensor`]), generic over `f32`/`f64`. Every operation is deterministic
//! given its seed, with or without the `parallel` feature.

pub mod codec;
pub mod field;
pub mod geom;
pub mod mesh;
pub mod metrics;
pub mod parallel;
pub mod toydata;
pub mod rng;
#[cfg(test)]
pub(crate) mod testutil;

pub use geom::{Aabb, Vec3};
pub use mesh::{Mesh, QuantizedMesh};

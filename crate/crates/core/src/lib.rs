//! Cut finite element solver for first-order convection on fractured domains.
//!
//! A fractured domain is a union of bulk regions (d=2), crack curves (d=1) and
//! bifurcation points (d=0), where each lower-dimensional component sits on the
//! boundary of the higher-dimensional ones. The geometry is embedded in a fixed
//! structured triangulation of the bounding box and cuts it arbitrarily. Every
//! component gets its own active mesh and its own continuous P1 space; the
//! discrete problem is a Galerkin least-squares method with weakly imposed
//! inflow and coupling conditions plus a full-gradient stabilization.
//!
//! Pipeline: [`domain::FracturedDomain`] → [`mesh::BackgroundMesh`] and
//! [`mesh::ActiveMesh`] → [`fem::Discretization`] → [`fem::assemble`] →
//! [`linalg::solve_lu`] → [`post`].

pub mod cli;
pub mod domain;
pub mod error;
pub mod fem;
pub mod linalg;
pub mod mesh;
pub mod post;
pub mod presets;

pub use error::{Error, Result};

/// Two-dimensional vector used for coordinates, normals and convection fields.
pub type Vec2 = nalgebra::Vector2<f64>;

/// Shorthand constructor for [`Vec2`].
#[inline]
pub fn vec2(x: f64, y: f64) -> Vec2 {
    Vec2::new(x, y)
}

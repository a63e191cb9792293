//! Geographically constrained 3D force-directed graph layout.
//!
//! Nodes are pulled together along edges, pushed apart pairwise, and, when
//! they carry a geolocation, attracted toward the point above the map where
//! that location projects. The geo weight `K` blends the two views: `K = 0`
//! gives a purely semantic layout, a very large `K` pins nodes to the map.
//!
//! Modules:
//! - [`graph`]: data model, equirectangular projection, degree filtering
//! - [`forces`], [`layout`]: force kernels and the annealed simulation loop
//! - [`metrics`]: edge length variation and mean locational offset
//! - [`simgen`]: seeded clustered, density and expert-network generators
//! - [`bench`]: layout timing versus graph size
//! - [`io`]: canonical JSON graph and layout documents
//! - [`config`]: parameter resolution shared by the command line tool
//! - [`service`]: streaming layout sessions and their HTTP/WebSocket server

pub mod bench;
pub mod config;
pub mod error;
pub mod forces;
pub mod graph;
pub mod io;
pub mod layout;
pub mod metrics;
pub mod service;
pub mod simgen;
pub mod vector;

pub use error::{Error, Result};
pub use graph::{project_geo, Edge, GeoCoordinate, Graph, Node, ProjectionConfig};
pub use layout::{simulate, step, update_geo_weight, LayoutParams, LayoutState};
pub use metrics::MetricsReport;
pub use vector::{ForceVector, Vec3, VirtualPosition};

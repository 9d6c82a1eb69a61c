//! Fréchet means and tangential collapse on spaces ℝˢ × Cone(G), where G is
//! a finite metric graph whose cycles all have length at least 2π.

pub mod cone_space;
pub mod error;
pub mod exec;
pub mod frechet;
pub mod gallery;
pub mod metric_graph;
mod profile;
pub mod nnls;
pub mod cones;
pub mod limit_log;
pub mod devissage;
pub mod fixtures;
pub mod properties;
pub mod sampling;

pub use cone_space::{ConePart, ConeSpace, Frame, Point, Stratum, StratumId, TangentCone, TangentVector};
pub use error::{Result, StrataError};
pub use exec::Exec;
pub use metric_graph::{EdgeId, GraphPoint, Heading, MetricGraph, SubgraphRegion, VertexId};

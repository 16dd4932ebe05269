//! Discrete Riemann surfaces on bipartite quad-graphs, together with
//! orientation-reversing involutions.
//!
//! The crate covers the whole pipeline from a quad-graph with a discrete
//! complex structure to its period matrices:
//!
//! * [`surface`] and [`medial`]: validated quad-graphs, the medial graph,
//!   type-diamond forms and closed medial walks.
//! * [`homology`]: cycle bases, intersection numbers, symplectic bases and
//!   bases adapted to an involution.
//! * [`involution`]: validation of involutions, fixed sets, ovals and the
//!   dividing / non-dividing classification.
//! * [`holomorphic`]: discrete holomorphic forms and the black, white,
//!   complete and averaged period matrices.
//! * [`z2`]: symmetric bilinear forms over `Z/2`.
//! * [`generators`]: families of example surfaces with known answers.
//! * [`io`]: JSON schemas for surfaces, patches and reports.

// `!(x <= tol)` style comparisons are deliberate: they reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod checks;
pub mod generators;
pub mod holomorphic;
pub mod homology;
pub mod intmat;
pub mod involution;
pub mod io;
pub mod linalg;
pub mod medial;
pub mod sparse;
pub mod surface;
pub mod z2;

pub use num_complex::Complex64;

pub use holomorphic::{PeriodMatrices, SolverError};
pub use homology::{AdaptedBasis, HomologyError, SymplecticBasis};
pub use intmat::IntMatrix;
pub use involution::{Classification, Involution, InvolutionError, InvolutionKind};
pub use medial::{DiamondForm, MedialCycle, Periods, Step};
pub use surface::{Color, Face, QuadSurface, SurfaceError};
pub use z2::{Z2Error, Z2Matrix};

//! Calibrating 2-forms for Busemann-Hausdorff area in polyhedral normed
//! spaces, the symmetric-polygon inequalities behind them, and harnesses
//! that check them exactly.
//!
//! Every routine is generic over [`Scalar`]; use the `Q*` aliases for exact
//! rational arithmetic and the `F*` aliases for `f64`.

pub mod error;
pub mod exterior;
pub mod linalg;
pub mod planar;
pub mod polytope;
pub mod lp;
pub mod sampling;
pub mod scalar;
pub mod density;
pub mod calibrate;
pub mod surfaces;
pub mod kdim;
pub mod io;

pub use calibrate::{
    build_calibrator, check_main_prop, lemma1_check, lemma2_check, lemma3_certificate, lp_calibrator_search,
    maximize_over_polar, reduce_functionals, verify_alpha, verify_calibrator, Calibrator, Lemma3Certificate,
    LpCalibratorSearch, SampleReport,
};
pub use density::{alpha_eval, bh_eval, ht_eval, volume_k, AlphaDensity, AreaDensity, BhDensity, HtDensity};
pub use error::{Error, Result};
pub use exterior::{eval_k_form, eval_two_form, planar_wedge_norm, wedge, Covector, KForm, SimpleTwoVector, TwoForm, Vector};
pub use kdim::{embed_linf, mu_lhs, mu_search, KInstance, MuCoefficients, MuSearchReport};
pub use lp::{FeasibilityProblem, LpOutcome};
pub use planar::Vec2;
pub use polytope::{
    edge_weights, halfplane_intersection, minkowski_gap, mixed_area, polar_polygon, polygon_area, section,
    ConstraintPolytope, PlaneBasis, SymPolygon, SymPolytope,
};
pub use sampling::Sampler;
pub use scalar::{OverPi, PiMultiple, Rational, Scalar};
pub use surfaces::{
    alpha_area, bh_area, boundary, pushforward_area, semi_ellipticity_experiment, ExperimentReport, Generator, PlanarDisc,
    Ring, TriMesh, Triangle,
};

pub type QVector = Vector<Rational>;
pub type QCovector = Covector<Rational>;
pub type QTwoForm = TwoForm<Rational>;
pub type QSymPolytope = SymPolytope<Rational>;
pub type QSymPolygon = SymPolygon<Rational>;
pub type QPlaneBasis = PlaneBasis<Rational>;
pub type QTriMesh = TriMesh<Rational>;

pub type FVector = Vector<f64>;
pub type FCovector = Covector<f64>;
pub type FTwoForm = TwoForm<f64>;
pub type FSymPolytope = SymPolytope<f64>;
pub type FSymPolygon = SymPolygon<f64>;
pub type FPlaneBasis = PlaneBasis<f64>;
pub type FTriMesh = TriMesh<f64>;

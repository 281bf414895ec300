//! Finite quantum logics, their states and the probability bounds they allow.
//!
//! * [`rational`] and [`lp`]: exact arithmetic, simplex and vertex enumeration.
//! * [`logic`]: Greechie diagrams, events, states, exclusivity graphs.
//! * [`bounds`]: classical, logic-level and quantum bounds for weighted events,
//!   including the pentagon scenario and the KCBS functional.
//! * [`hilbert`]: projectors, density states, Lüders conditioning and Sorkin's
//!   interference terms.
//! * [`boxes`]: no-signaling boxes, CHSH values and PR boxes.

pub mod bounds;
pub mod boxes;
pub mod eigen;
pub mod hilbert;
pub mod logic;
pub mod lp;
pub mod random;
pub mod rational;

pub use rational::Rational;

//! Finite combinatorics of operator categories.

pub mod category;
pub mod compare;
pub mod code;
pub mod error;
pub mod export;
pub mod functor;
pub mod interval;
pub mod laws;
pub mod leinster;
pub mod perfect;
pub mod report;
pub mod sequences;

pub use category::{Category, Constraints, Fiber};
pub use code::{MorCode, MorData, ObjCode, Point};
pub use error::{OpcatError, Result};
pub use interval::{FiberStep, IntervalWitness, Pullback};
pub use functor::{check_admissible, check_operator_morphism, AdmFunctor, FunctorReport};
pub use report::{LawCheck, LawReport};
pub use perfect::{Perfect, PerfectFunctor, PointedObj};
pub use leinster::{Factorization, KleisliMor, Leinster, PatternCospan};
pub use sequences::{MarkedPoset, PhiSeq, SeqMor};

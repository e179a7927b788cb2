//! Normalized Yamabe flow on rotationally symmetric model spaces with smooth poles and
//! cone tips, together with a-posteriori monitors for the bounds that hold along the flow
//! and an exact oracle for the auxiliary test-function inequalities.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod auxfn;
pub mod bounds;
pub mod config;
pub mod discretization;
pub mod flow;
pub mod geometry;
pub mod output;
pub mod scenario;
pub mod yamabe;

//! Command-line front end for the `bingham-dae` solver: configuration files,
//! CSV trajectories, SVG plots and flat `key = value` reports.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod csv;
pub mod report;
pub mod svg;

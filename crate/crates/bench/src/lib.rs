//! Benchmark fixtures.

use std::sync::Arc;

use toric_koszul::{builtin_fan, DegreeWindow, Fan, LatticeVector};

pub fn fan(name: &str) -> Arc<Fan> {
    Arc::new(builtin_fan(name).expect("builtin fan"))
}

/// Every degree of the cube `[-r, r]^n`.
pub fn cube(fan: &Fan, r: i64) -> Vec<LatticeVector> {
    DegreeWindow::cube(fan.rank(), -r, r).degrees()
}

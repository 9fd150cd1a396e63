#![allow(dead_code)]

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lpa_core::algebra::Lpa;
use lpa_core::path::FinitePath;
use lpa_core::quiver::{standard, Quiver};
use lpa_core::scalars::Field;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn lpa(q: Quiver) -> Lpa {
    Lpa::new(Arc::new(q), Field::Rationals)
}

pub fn all_lpas() -> Vec<Lpa> {
    standard::all().into_iter().map(lpa).collect()
}

/// `b.a` in display order.
pub fn path(q: &Quiver, display: &str) -> FinitePath {
    let arrows: Vec<_> = display.split('.').rev().map(|n| q.arrow(n).unwrap()).collect();
    let source = q.source(arrows[0]);
    FinitePath::from_arrows(q, source, arrows).unwrap()
}

/// Small random quiver on vertices `v0..` with arrows `a0..`.
pub fn random_quiver(seed: u64, max_vertices: u32, max_arrows: u32) -> Quiver {
    use rand::Rng;
    let mut r = rng(seed);
    let n = r.gen_range(1..=max_vertices);
    let m = r.gen_range(0..=max_arrows);
    let vertices: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let arrows: Vec<(String, String, String)> = (0..m)
        .map(|i| {
            (
                format!("a{i}"),
                format!("v{}", r.gen_range(0..n)),
                format!("v{}", r.gen_range(0..n)),
            )
        })
        .collect();
    Quiver::new("Q", vertices, arrows).unwrap()
}

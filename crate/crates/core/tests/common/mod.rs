#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use chevlab::group::{GroupContext, LieTables, Representation};
use chevlab::rings::{LocalRing, RingDescriptor};

pub fn ring(s: &str) -> Arc<LocalRing> {
    LocalRing::build(&RingDescriptor::parse(s).unwrap()).unwrap()
}

pub fn tables(ty: &str) -> Arc<LieTables> {
    LieTables::build(ty.parse().unwrap()).unwrap()
}

/// Ignores the invertibility table; for checks that do not depend on it.
pub fn ctx(ty: &str, r: &str, rep: Representation) -> GroupContext {
    GroupContext::unrestricted(tables(ty), ring(r), rep).unwrap()
}

pub fn adjoint(ty: &str, r: &str) -> GroupContext {
    ctx(ty, r, Representation::Adjoint)
}

pub fn natural(ty: &str, r: &str) -> GroupContext {
    ctx(ty, r, Representation::NaturalA)
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

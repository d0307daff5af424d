pub mod autos;
pub mod cache;
pub mod decomp;
pub mod group;
pub mod lie;
pub mod matrix;
pub mod par;
pub mod rings;
pub mod replay;
pub mod report;
pub mod roots;
pub mod sha;

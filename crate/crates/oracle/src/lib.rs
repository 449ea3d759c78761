//! Slow, straightforward reference implementations written without reusing
//! the toolkit's kernels. They exist to be compared against.

pub mod acceptance;
pub mod ap;
pub mod depth;
pub mod evaluate;
pub mod integrate;
pub mod iou;
pub mod matching;
pub mod random;

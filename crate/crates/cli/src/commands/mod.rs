pub mod anchors;
pub mod benchmark;
pub mod evaluate;
pub mod fit;
pub mod predict;

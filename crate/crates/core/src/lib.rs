pub mod expr;
pub mod poly;
pub mod roots;
pub mod special;
pub mod measure;
pub mod transform;
pub mod suites;

pub mod balance;
pub mod error;
pub mod measure;
pub mod numeric;
pub mod radiance;
pub mod region;
pub mod soup;
pub mod sphere;
pub mod tensor;

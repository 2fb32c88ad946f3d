pub mod cli;
pub mod cmfield;
pub mod exactfield;
pub mod hyperbolic;
pub mod num;
pub mod quaternion;
pub mod theta;

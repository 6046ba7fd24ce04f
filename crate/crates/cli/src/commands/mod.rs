pub mod forward;
pub mod invert;
pub mod ml_eval;
pub mod verify;

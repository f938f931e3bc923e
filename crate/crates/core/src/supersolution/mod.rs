//! Periodic supersolutions of the continuum equation: radial profiles around
//! strong obstacles, glued by a smooth lift over a Lipschitz box surface.

mod assembly;
mod lifting;
mod pipeline;
mod profile;
mod verify;

pub use assembly::*;
pub use lifting::*;
pub use pipeline::*;
pub use profile::*;
pub use verify::*;

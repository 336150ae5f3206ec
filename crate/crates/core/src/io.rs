//! Persistence formats, scene configuration, and image emission.

pub mod container;
pub mod pgm;
pub mod scene;

pub use container::{read_echo, read_image, read_psf_bank, write_echo, write_image, write_psf_bank};
pub use pgm::emit_image;
pub use scene::SceneConfig;

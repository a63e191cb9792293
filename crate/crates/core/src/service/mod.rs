//! Interactive layout sessions: a deterministic core plus a network server.

pub mod protocol;
pub mod server;
pub mod session;

pub use protocol::{Control, ControlMessage, FrameMessage, RunStatus, ServerMessage};
pub use server::{router, serve, Registry, ServerConfig};
pub use session::Session;

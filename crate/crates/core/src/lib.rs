//! Executable combinatorics of flows: the Reedy poset of cell chains, finite
//! set-valued colimits, globe attachment pushouts computed two independent
//! ways, latching objects, and exact Moore path composition.

pub mod cli;
pub mod corpus;
pub mod diagram;
pub mod dot;
pub mod error;
pub mod flow;
pub mod flow_io;
pub mod moore;
pub mod oracle;
pub mod pathspace;
pub mod pushout;
pub mod reedy;
pub mod report;
pub mod verify;
pub mod words;

pub use error::{Error, Result};

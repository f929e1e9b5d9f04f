//! Construction-D lattices from nested binary codes: code utilities, PEG
//! graph construction, exact lattice algebra, brute-force references, a
//! multistage min-sum decoder and a Monte-Carlo error-rate simulator.

pub mod alist;
pub mod decoder;
pub mod error;
pub mod exact;
pub mod gf2;
pub mod lattice;
pub mod oracle;
pub mod peg;
pub mod sim;

pub use alist::SparseBinaryMatrix;
pub use decoder::{complexity_bound, DecodeResult, DecoderConfig, MultistageDecoder};
pub use error::{Error, Result};
pub use gf2::{BinaryCode, BitVector, NestedCodeFamily, NestingCheck};
pub use lattice::{construction_d, ConstructionDLattice, DyadicVector, LatticeFile};
pub use oracle::{lattice_min_dist_sq, ml_decode};
pub use peg::{peg_construct, TannerGraph};
pub use sim::{run_campaign, SimConfig, SimRecord};

//! The real-valued critical locus S(f) = γ̃⁻¹(RP¹): discriminant
//! membership, fibers over single directions, component counting by
//! monodromy, and family scans.

pub mod fiber;
pub mod monodromy;
pub mod scan;

pub use fiber::{fiber, min_separation, Embedding, FiberDiagnostics};
pub use monodromy::{is_discriminantal, monodromy_b0, FiberTrack, MonodromyResult};
pub use scan::{scan_family, ScanCell, ScanResult};

//! Table namespaces. Tables from different stages are merged, so every
//! stage keys its entries under its own tag.

// graph encoding
pub const DEG: u16 = 1;
pub const ADJ: u16 = 2;
pub const OFFSET: u16 = 3;
pub const LABEL: u16 = 4;
pub const MAP: u16 = 5;
pub const EDGE: u16 = 6;
pub const VERTEX: u16 = 7;

// cycle collections
pub const SUCC: u16 = 10;
pub const PRED: u16 = 11;
pub const NODE_SUCC: u16 = 12;
pub const NODE_PRED: u16 = 13;
pub const STAMP: u16 = 14;
pub const REACH: u16 = 15;
pub const REP: u16 = 16;
pub const NEW_SUCC: u16 = 17;
pub const NEW_PRED: u16 = 18;
pub const RANK: u16 = 19;
pub const MARK: u16 = 20;

// general graphs
pub const PARENT: u16 = 30;
/// Canonical `(min, max)` edge keys of a derived graph.
pub const CEDGE: u16 = 31;

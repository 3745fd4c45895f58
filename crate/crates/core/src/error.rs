use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("relator length {0} is not a positive multiple of 4")]
    BadLength(usize),
    #[error("cell ids must be 0..n in order; found id {found} at position {index}")]
    CellOrder { index: usize, found: u32 },
    #[error("gluing {index}: {reason}")]
    BadGluing { index: usize, reason: String },
    #[error("subcomplex is not the closure of its 2-cells")]
    NotClosed,
    #[error("subcomplex is empty")]
    Empty,
    #[error("subcomplex is disconnected")]
    Disconnected,
    #[error("point {0} does not lie in the subcomplex")]
    PointOutside(String),
    #[error("not a tree: {0}")]
    NotATree(String),
    #[error("tree is round; alpha regions exist only for long trees")]
    RoundTree,
    #[error("alpha regions depend on the chosen diameter")]
    DiameterDependence,
    #[error("position {pos} is off a path of half-length {len}")]
    OffPath { pos: u32, len: u32 },
    #[error("wall path is not contained in tile {0}")]
    PathNotInTile(u32),
    #[error("invalid presentation: {0}")]
    Presentation(String),
    #[error("invalid density {0}: need 0 < d < 1")]
    Density(String),
    #[error("cannot parse rational {0:?}")]
    ParseRational(String),
    #[error("invalid word: {0}")]
    Word(String),
    #[error("fixture {name}: {reason}")]
    Fixture { name: String, reason: String },
    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),
    #[error("patch exceeds boundedness caps: {0}")]
    Caps(String),
    #[error("oracle input too large: {0}")]
    OracleCap(String),
    #[error("wall {0} is not embedded")]
    NotEmbedded(usize),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library reports.
///
/// Parse errors carry 1-based line numbers where the input has them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown element in '{0}'")]
    UnknownElement(String),
    #[error("unknown file format")]
    UnknownFormat,

    #[error("malformed XYZ at line {line}: {reason}")]
    MalformedXyz { line: usize, reason: String },
    #[error("malformed frame {frame} at line {line}: {reason}")]
    MalformedFrame { frame: usize, line: usize, reason: String },
    #[error("inconsistent frames: frame {frame} {reason}")]
    InconsistentFrames { frame: usize, reason: String },

    #[error("bad symmetry operator '{expr}': {reason}")]
    BadSymmetryExpr { expr: String, reason: String },
    #[error("degenerate cell parameters")]
    DegenerateCell,
    #[error("missing cell parameter {0}")]
    MissingCell(String),
    #[error("no atom sites found")]
    MissingSites,
    #[error("space group '{0}' given without symmetry operators")]
    UnsupportedSymmetry(String),
    #[error("malformed CIF at line {line}: {reason}")]
    MalformedCif { line: usize, reason: String },

    #[error("missing keyword {0}")]
    MissingKeyword(String),
    #[error("fractional coordinates given without unit vectors")]
    FracWithoutCell,
    #[error("expected {expected} atoms, found {found}")]
    CountMismatch { expected: usize, found: usize },
    #[error("malformed OpenMX input at line {line}: {reason}")]
    MalformedOpenmx { line: usize, reason: String },

    #[error("bad cube header at line {line}: {reason}")]
    BadHeader { line: usize, reason: String },
    #[error("truncated volumetric data: expected {expected} values, got {got}")]
    TruncatedData { expected: usize, got: usize },
    #[error("cube holds {0} datasets; only one is supported")]
    MultiOrbitalUnsupported(usize),

    #[error("truncated band file: {0}")]
    TruncatedBand(String),
    #[error("band count mismatch at line {line}: expected {expected}, found {found}")]
    BandCountMismatch { line: usize, expected: usize, found: usize },
    #[error("unsupported spin switch {0} in band file")]
    UnsupportedSpin(i64),

    #[error("operation needs a lattice")]
    NeedsLattice,
    #[error("lattice is singular or not finite")]
    SingularLattice,
    #[error("cell height {height:.4} Å is shorter than the bond cutoff {cutoff:.4} Å")]
    CellTooSmall { height: f64, cutoff: f64 },
    #[error("supercell dimensions must be positive")]
    BadSupercell,
    #[error("atom picked twice: {0}")]
    DuplicatePick(usize),
    #[error("bad atom index {0}")]
    BadIndex(usize),
    #[error("frame {frame} is out of range (1 to {count})")]
    BadFrame { frame: usize, count: usize },
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),
    #[error("a selection holds 1 to 4 atoms, got {0}")]
    BadSelection(usize),
    #[error("bond factor must be positive, got {0}")]
    BadBondFactor(f64),

    #[error("volumetric grid is empty")]
    EmptyGrid,
    #[error("voxel step vectors are singular")]
    SingularSteps,
    #[error("invalid isovalue {0}")]
    BadIsovalue(f64),

    #[error("no band point inside the energy window")]
    EmptyWindow,
    #[error("invalid energy window [{0}, {1}]")]
    BadWindow(f64, f64),
}

impl Error {
    /// Stable variant name, used as the machine-readable error code.
    pub fn name(&self) -> &'static str {
        use Error::*;
        match self {
            UnknownElement(_) => "UnknownElement",
            UnknownFormat => "UnknownFormat",
            MalformedXyz { .. } => "MalformedXYZ",
            MalformedFrame { .. } => "MalformedFrame",
            InconsistentFrames { .. } => "InconsistentFrames",
            BadSymmetryExpr { .. } => "BadSymmetryExpr",
            DegenerateCell => "DegenerateCell",
            MissingCell(_) => "MissingCell",
            MissingSites => "MissingSites",
            UnsupportedSymmetry(_) => "UnsupportedSymmetry",
            MalformedCif { .. } => "MalformedCif",
            MissingKeyword(_) => "MissingKeyword",
            FracWithoutCell => "FracWithoutCell",
            CountMismatch { .. } => "CountMismatch",
            MalformedOpenmx { .. } => "MalformedOpenmx",
            BadHeader { .. } => "BadHeader",
            TruncatedData { .. } => "TruncatedData",
            MultiOrbitalUnsupported(_) => "MultiOrbitalUnsupported",
            TruncatedBand(_) => "TruncatedBand",
            BandCountMismatch { .. } => "BandCountMismatch",
            UnsupportedSpin(_) => "UnsupportedSpin",
            NeedsLattice => "NeedsLattice",
            SingularLattice => "SingularLattice",
            CellTooSmall { .. } => "CellTooSmall",
            BadSupercell => "BadSupercell",
            DuplicatePick(_) => "DuplicatePick",
            BadIndex(_) => "BadIndex",
            BadFrame { .. } => "BadFrame",
            DegenerateGeometry(_) => "DegenerateGeometry",
            BadSelection(_) => "BadSelection",
            BadBondFactor(_) => "BadBondFactor",
            EmptyGrid => "EmptyGrid",
            SingularSteps => "SingularSteps",
            BadIsovalue(_) => "BadIsovalue",
            EmptyWindow => "EmptyWindow",
            BadWindow(..) => "BadWindow",
        }
    }

    /// Errors caused by how the caller addressed the data rather than by the data itself.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::DuplicatePick(_)
                | Error::BadIndex(_)
                | Error::BadFrame { .. }
                | Error::BadSelection(_)
                | Error::BadBondFactor(_)
                | Error::BadSupercell
                | Error::BadIsovalue(_)
                | Error::BadWindow(..)
        )
    }
}

//! JSON bodies and the operations behind them.
//!
//! The CLI `--json` output and the HTTP responses are produced by the same
//! functions here and serialized by [`to_json`], so the two agree byte for byte.

use std::borrow::Cow;
use std::collections::BTreeMap;

use mxv_core::band::{assemble_band_plot, window, BandPlot};
use mxv_core::geometry::{detect_bonds, make_supercell, measure_selection, parse_dims, Bond, MeasurementReport};
use mxv_core::isosurface::{default_isovalue, extract_pair, Algorithm, Evolution};
use mxv_core::parsers::{Confidence, DetectedFormat, FormatKind, Parsed};
use mxv_core::writers::{write_structure, StructureFormat};
use mxv_core::{Atom, BandData, Error, Structure, TriangleMesh, VolumetricGrid};
use serde::{Deserialize, Serialize};

use crate::error::{AppError, AppResult};

/// Bumped whenever a response shape changes incompatibly.
pub const API_VERSION: u32 = 1;

pub const DEFAULT_BOND_FACTOR: f64 = 1.0;

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("response types always serialize");
    s.push('\n');
    s
}

pub fn kind_label(p: &Parsed) -> &'static str {
    match p {
        Parsed::Structure(_) => "structure",
        Parsed::Trajectory(_) => "trajectory",
        Parsed::Volume(_) => "volumetric",
        Parsed::Band(_) => "band",
    }
}

pub fn parse_supercell(text: &str) -> AppResult<[usize; 3]> {
    parse_dims(text).ok_or_else(|| AppError::Usage(format!("bad supercell '{text}' (expected AxBxC)")))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VersionInfo {
    pub api: u32,
    pub version: &'static str,
}

pub fn version() -> VersionInfo {
    VersionInfo {
        api: API_VERSION,
        version: env!("CARGO_PKG_VERSION"),
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Summary {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atoms: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frames: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub periodic: Option<bool>,
    /// Atom count per element symbol.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub composition: Option<BTreeMap<&'static str, usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energies: Option<Vec<Option<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dims: Option<[usize; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_abs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub default_isovalue: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_bands: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spin_channels: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chem_potential: Option<f64>,
}

fn composition(atoms: &[Atom]) -> BTreeMap<&'static str, usize> {
    let mut m = BTreeMap::new();
    for a in atoms {
        *m.entry(a.element.symbol).or_insert(0) += 1;
    }
    m
}

pub fn summarize(p: &Parsed) -> Summary {
    match p {
        Parsed::Structure(s) => Summary {
            atoms: Some(s.len()),
            frames: Some(1),
            periodic: Some(s.is_periodic()),
            composition: Some(composition(&s.atoms)),
            ..Summary::default()
        },
        Parsed::Trajectory(t) => {
            let first = &t.frames()[0];
            let energies = t.energies().iter().any(Option::is_some).then(|| t.energies().to_vec());
            Summary {
                atoms: Some(first.len()),
                frames: Some(t.len()),
                periodic: Some(first.is_periodic()),
                composition: Some(composition(&first.atoms)),
                energies,
                ..Summary::default()
            }
        }
        Parsed::Volume(g) => Summary {
            atoms: Some(g.atoms.len()),
            composition: Some(composition(&g.atoms)),
            dims: Some(g.dims),
            max_abs: Some(g.max_abs()),
            default_isovalue: default_isovalue(g).ok(),
            ..Summary::default()
        },
        Parsed::Band(b) => {
            let mut path: Vec<String> = Vec::new();
            for seg in &b.segments {
                if path.last() != Some(&seg.label_start) {
                    path.push(seg.label_start.clone());
                }
                path.push(seg.label_end.clone());
            }
            Summary {
                n_bands: Some(b.n_bands),
                spin_channels: Some(b.spin_channels),
                k_points: Some(b.k_point_count()),
                path: Some(path),
                chem_potential: Some(b.chem_potential),
                ..Summary::default()
            }
        }
    }
}

/// `mxv info --json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfoReport {
    pub kind: FormatKind,
    pub confidence: Confidence,
    pub data: &'static str,
    pub summary: Summary,
}

pub fn info(format: DetectedFormat, p: &Parsed) -> InfoReport {
    InfoReport {
        kind: format.kind,
        confidence: format.confidence,
        data: kind_label(p),
        summary: summarize(p),
    }
}

/// Body of `POST /api/documents`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UploadResponse {
    pub id: String,
    pub kind: FormatKind,
    pub confidence: Confidence,
    pub data: &'static str,
    pub summary: Summary,
}

/// Which frame to use when the caller does not name one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DefaultFrame {
    First,
    Last,
}

pub struct Frame<'a> {
    pub structure: Cow<'a, Structure>,
    /// 1-based.
    pub number: usize,
    pub count: usize,
    pub energies: Vec<Option<f64>>,
    pub times: Vec<Option<f64>>,
}

/// Picks frame `frame` (1-based) of a structure-bearing document.
/// Volumetric documents expose their atoms as a single frame.
pub fn select_frame(p: &Parsed, frame: Option<usize>, default: DefaultFrame) -> AppResult<Frame<'_>> {
    let (frames, energies, times): (Vec<Cow<'_, Structure>>, Vec<Option<f64>>, Vec<Option<f64>>) = match p {
        Parsed::Structure(s) => (vec![Cow::Borrowed(s)], vec![None], vec![None]),
        Parsed::Trajectory(t) => (
            t.frames().iter().map(Cow::Borrowed).collect(),
            t.energies().to_vec(),
            t.times().to_vec(),
        ),
        Parsed::Volume(g) => (vec![Cow::Owned(g.structure())], vec![None], vec![None]),
        Parsed::Band(_) => {
            return Err(AppError::WrongKind {
                expected: "structure",
                found: "band",
            })
        }
    };
    let count = frames.len();
    let number = frame.unwrap_or(match default {
        DefaultFrame::First => 1,
        DefaultFrame::Last => count,
    });
    if number == 0 || number > count {
        return Err(Error::BadFrame { frame: number, count }.into());
    }
    let structure = frames.into_iter().nth(number - 1).expect("frame in range");
    Ok(Frame {
        structure,
        number,
        count,
        energies,
        times,
    })
}

fn expanded(s: Cow<'_, Structure>, supercell: Option<[usize; 3]>) -> AppResult<Cow<'_, Structure>> {
    match supercell {
        None | Some([1, 1, 1]) => Ok(s),
        Some(n) => Ok(Cow::Owned(make_supercell(&s, n)?)),
    }
}

fn volume(p: &Parsed) -> AppResult<&VolumetricGrid> {
    match p {
        Parsed::Volume(g) => Ok(g),
        other => Err(AppError::WrongKind {
            expected: "volumetric",
            found: kind_label(other),
        }),
    }
}

fn band_data(p: &Parsed) -> AppResult<&BandData> {
    match p {
        Parsed::Band(b) => Ok(b),
        other => Err(AppError::WrongKind {
            expected: "band",
            found: kind_label(other),
        }),
    }
}

/// Body of `GET /api/documents/{id}/structure`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureView {
    pub frame: usize,
    pub frame_count: usize,
    pub energies: Vec<Option<f64>>,
    pub times: Vec<Option<f64>>,
    pub supercell: [usize; 3],
    pub comment: String,
    /// Rows are a₁, a₂, a₃ in Å.
    pub lattice: Option<[[f64; 3]; 3]>,
    pub atoms: Vec<Atom>,
    pub bond_factor: f64,
    /// `i` and `j` index into `atoms`.
    pub bonds: Vec<Bond>,
}

pub fn structure_view(
    p: &Parsed,
    frame: Option<usize>,
    supercell: Option<[usize; 3]>,
    bond_factor: Option<f64>,
) -> AppResult<StructureView> {
    let f = select_frame(p, frame, DefaultFrame::First)?;
    let s = expanded(f.structure, supercell)?;
    let factor = bond_factor.unwrap_or(DEFAULT_BOND_FACTOR);
    let bonds = detect_bonds(&s, factor)?;
    let s = s.into_owned();
    Ok(StructureView {
        frame: f.number,
        frame_count: f.count,
        energies: f.energies,
        times: f.times,
        supercell: supercell.unwrap_or([1, 1, 1]),
        comment: s.comment,
        lattice: s.lattice.as_ref().map(|l| l.vectors()),
        atoms: s.atoms,
        bond_factor: factor,
        bonds,
    })
}

/// Body of `POST /api/documents/{id}/measure`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MeasureRequest {
    /// 1-based serials in pick order.
    pub atoms: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub supercell: Option<[usize; 3]>,
}

pub fn measure(p: &Parsed, req: &MeasureRequest) -> AppResult<MeasurementReport> {
    let f = select_frame(p, req.frame, DefaultFrame::First)?;
    let s = expanded(f.structure, req.supercell)?;
    if req.atoms.is_empty() || req.atoms.len() > 4 {
        return Err(Error::BadSelection(req.atoms.len()).into());
    }
    let picks = req
        .atoms
        .iter()
        .map(|&serial| s.index_of_serial(serial).ok_or(Error::BadIndex(serial)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(measure_selection(&s, &picks)?)
}

/// `mxv bonds --json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BondsReport {
    pub frame: usize,
    pub factor: f64,
    pub count: usize,
    pub bonds: Vec<Bond>,
}

pub fn bonds(p: &Parsed, frame: Option<usize>, factor: Option<f64>) -> AppResult<BondsReport> {
    let f = select_frame(p, frame, DefaultFrame::First)?;
    let factor = factor.unwrap_or(DEFAULT_BOND_FACTOR);
    let bonds = detect_bonds(&f.structure, factor)?;
    Ok(BondsReport {
        frame: f.number,
        factor,
        count: bonds.len(),
        bonds,
    })
}

/// Body of `GET /api/documents/{id}/volume/meta`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VolumeMeta {
    pub dims: [usize; 3],
    pub max_abs: f64,
    pub default_isovalue: f64,
    /// Å.
    pub origin: [f64; 3],
    /// Voxel step vectors, Å.
    pub steps: [[f64; 3]; 3],
    pub atoms: usize,
    /// Starting state for isovalue evolution; absent for an all-zero grid.
    pub evolution: Option<Evolution>,
}

pub fn volume_meta(p: &Parsed) -> AppResult<VolumeMeta> {
    let g = volume(p)?;
    let v = |x: &mxv_core::Vec3| [x.x, x.y, x.z];
    Ok(VolumeMeta {
        dims: g.dims,
        max_abs: g.max_abs(),
        default_isovalue: default_isovalue(g)?,
        origin: v(&g.origin),
        steps: [v(&g.steps[0]), v(&g.steps[1]), v(&g.steps[2])],
        atoms: g.atoms.len(),
        evolution: Evolution::for_grid(g).ok(),
    })
}

/// Body of `POST /api/documents/{id}/volume/mesh`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MeshRequest {
    #[serde(default)]
    pub isovalue: Option<f64>,
    #[serde(default)]
    pub algorithm: Option<Algorithm>,
    #[serde(default)]
    pub supercell: Option<[usize; 3]>,
}

/// Mesh as flat arrays: `vertices`/`normals` hold x,y,z triples and
/// `triangles` holds vertex index triples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlatMesh {
    pub vertices: Vec<f64>,
    pub normals: Vec<f64>,
    pub triangles: Vec<u32>,
}

impl From<&TriangleMesh> for FlatMesh {
    fn from(m: &TriangleMesh) -> Self {
        Self {
            vertices: m.vertices.iter().flatten().copied().collect(),
            normals: m.normals.iter().flatten().copied().collect(),
            triangles: m.triangles.iter().flatten().copied().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeshResponse {
    pub isovalue: f64,
    pub algorithm: Algorithm,
    pub supercell: [usize; 3],
    pub positive: FlatMesh,
    pub negative: FlatMesh,
}

/// Both surfaces at ±isovalue, defaulting to max|values|/200.
pub fn meshes(g: &VolumetricGrid, req: &MeshRequest) -> AppResult<(TriangleMesh, TriangleMesh, f64)> {
    let iso = match req.isovalue {
        Some(v) => v,
        None => default_isovalue(g)?,
    };
    let (pos, neg) = extract_pair(g, iso, req.algorithm.unwrap_or_default(), req.supercell.unwrap_or([1, 1, 1]))?;
    Ok((pos, neg, iso))
}

pub fn mesh(p: &Parsed, req: &MeshRequest) -> AppResult<MeshResponse> {
    let (pos, neg, isovalue) = meshes(volume(p)?, req)?;
    Ok(MeshResponse {
        isovalue,
        algorithm: req.algorithm.unwrap_or_default(),
        supercell: req.supercell.unwrap_or([1, 1, 1]),
        positive: (&pos).into(),
        negative: (&neg).into(),
    })
}

pub fn energy_window(emin: Option<f64>, emax: Option<f64>) -> AppResult<Option<(f64, f64)>> {
    match (emin, emax) {
        (None, None) => Ok(None),
        (Some(lo), Some(hi)) => Ok(Some((lo, hi))),
        _ => Err(AppError::Usage("emin and emax must be given together".into())),
    }
}

/// Body of `GET /api/documents/{id}/band`.
pub fn band(p: &Parsed, window_ev: Option<(f64, f64)>) -> AppResult<BandPlot> {
    let plot = assemble_band_plot(band_data(p)?)?;
    match window_ev {
        Some((lo, hi)) => Ok(window(&plot, lo, hi)?),
        None => Ok(plot),
    }
}

pub fn band_table(p: &Parsed, window_ev: Option<(f64, f64)>) -> AppResult<String> {
    Ok(mxv_core::writers::write_band_table(band_data(p)?, window_ev)?)
}

/// Body of `POST /api/documents/{id}/export`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportRequest {
    pub format: StructureFormat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<usize>,
}

/// Writes one frame (the last by default) in the requested format.
pub fn export(p: &Parsed, format: StructureFormat, frame: Option<usize>) -> AppResult<String> {
    let f = select_frame(p, frame, DefaultFrame::Last)?;
    Ok(write_structure(&f.structure, format)?)
}

pub fn supercell_text(p: &Parsed, dims: [usize; 3], format: StructureFormat, frame: Option<usize>) -> AppResult<String> {
    let f = select_frame(p, frame, DefaultFrame::Last)?;
    let s = make_supercell(&f.structure, dims)?;
    Ok(write_structure(&s, format)?)
}

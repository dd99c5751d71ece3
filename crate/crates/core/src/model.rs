//! Domain types shared by the parsers, writers and analysis modules.
//!
//! All lengths are Å, all energies Hartree.

use nalgebra::{Matrix3, Vector3};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::element::Element;
use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// Three lattice vectors a₁, a₂, a₃ (Cartesian, Å), stored as matrix rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    rows: Matrix3<f64>,
    // inverse of rowsᵀ, so that f = inv · c
    to_frac: Matrix3<f64>,
}

impl Lattice {
    pub fn new(vectors: [[f64; 3]; 3]) -> Result<Self> {
        let rows = Matrix3::from_fn(|r, c| vectors[r][c]);
        Self::from_matrix(rows)
    }

    pub fn from_vectors(a: Vec3, b: Vec3, c: Vec3) -> Result<Self> {
        Self::from_matrix(Matrix3::from_rows(&[a.transpose(), b.transpose(), c.transpose()]))
    }

    fn from_matrix(rows: Matrix3<f64>) -> Result<Self> {
        if rows.iter().any(|x| !x.is_finite()) {
            return Err(Error::SingularLattice);
        }
        let det = rows.determinant();
        let scale: f64 = (0..3).map(|r| rows.row(r).norm()).product();
        if scale == 0.0 || det.abs() <= 1e-10 * scale {
            return Err(Error::SingularLattice);
        }
        let to_frac = rows
            .transpose()
            .try_inverse()
            .ok_or(Error::SingularLattice)?;
        Ok(Self { rows, to_frac })
    }

    /// Row-major copy of the three vectors.
    pub fn vectors(&self) -> [[f64; 3]; 3] {
        let mut out = [[0.0; 3]; 3];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, x) in row.iter_mut().enumerate() {
                *x = self.rows[(r, c)];
            }
        }
        out
    }

    pub fn vector(&self, i: usize) -> Vec3 {
        self.rows.row(i).transpose()
    }

    /// Matrix whose rows are the lattice vectors.
    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.rows
    }

    /// Signed cell volume, Å³.
    pub fn volume(&self) -> f64 {
        self.rows.determinant()
    }

    /// c = fᵀ · vectors
    pub fn frac_to_cart(&self, f: &Vec3) -> Vec3 {
        self.rows.transpose() * f
    }

    pub fn cart_to_frac(&self, c: &Vec3) -> Vec3 {
        self.to_frac * c
    }

    pub fn lengths(&self) -> [f64; 3] {
        [0, 1, 2].map(|i| self.vector(i).norm())
    }

    /// (a, b, c, α, β, γ) with angles in degrees.
    pub fn parameters(&self) -> [f64; 6] {
        let [a, b, c] = self.lengths();
        let angle = |u: Vec3, v: Vec3| {
            (u.dot(&v) / (u.norm() * v.norm()))
                .clamp(-1.0, 1.0)
                .acos()
                .to_degrees()
        };
        let (v1, v2, v3) = (self.vector(0), self.vector(1), self.vector(2));
        [a, b, c, angle(v2, v3), angle(v1, v3), angle(v1, v2)]
    }

    /// Perpendicular distances between opposite cell faces.
    pub fn heights(&self) -> [f64; 3] {
        let vol = self.volume().abs();
        let (v1, v2, v3) = (self.vector(0), self.vector(1), self.vector(2));
        [
            vol / v2.cross(&v3).norm(),
            vol / v3.cross(&v1).norm(),
            vol / v1.cross(&v2).norm(),
        ]
    }

    pub fn scaled(&self, n: [usize; 3]) -> Lattice {
        let mut rows = self.rows;
        for (r, &k) in n.iter().enumerate() {
            let scaled = rows.row(r) * k as f64;
            rows.set_row(r, &scaled);
        }
        Lattice::from_matrix(rows).expect("scaling a valid lattice keeps it valid")
    }
}

impl Serialize for Lattice {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.vectors().serialize(s)
    }
}

/// Optional per-atom quantities read from files.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AtomProperties {
    /// e
    #[serde(skip_serializing_if = "Option::is_none")]
    pub net_charge: Option<f64>,
    /// μ_B
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spin: Option<f64>,
    /// Hartree/Bohr
    #[serde(skip_serializing_if = "Option::is_none")]
    pub force: Option<[f64; 3]>,
    /// atomic units
    #[serde(skip_serializing_if = "Option::is_none")]
    pub velocity: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spin_up: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spin_down: Option<f64>,
}

impl AtomProperties {
    pub fn is_empty(&self) -> bool {
        *self == AtomProperties::default()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub species: String,
    pub element: &'static Element,
    pub position: Vec3,
    pub serial: usize,
    pub properties: AtomProperties,
}

impl Atom {
    pub fn new(species: impl Into<String>, element: &'static Element, position: Vec3) -> Self {
        Self {
            species: species.into(),
            element,
            position,
            serial: 0,
            properties: AtomProperties::default(),
        }
    }
}

impl Serialize for Atom {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Atom", 5)?;
        st.serialize_field("serial", &self.serial)?;
        st.serialize_field("species", &self.species)?;
        st.serialize_field("element", self.element.symbol)?;
        st.serialize_field("position", &[self.position.x, self.position.y, self.position.z])?;
        st.serialize_field("properties", &self.properties)?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Structure {
    pub atoms: Vec<Atom>,
    pub lattice: Option<Lattice>,
    pub comment: String,
}

impl Structure {
    /// Builds a structure, numbering serials 1..=N in list order.
    pub fn new(mut atoms: Vec<Atom>, lattice: Option<Lattice>, comment: impl Into<String>) -> Self {
        for (i, a) in atoms.iter_mut().enumerate() {
            a.serial = i + 1;
        }
        Self {
            atoms,
            lattice,
            comment: comment.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn is_periodic(&self) -> bool {
        self.lattice.is_some()
    }

    pub fn lattice(&self) -> Result<&Lattice> {
        self.lattice.as_ref().ok_or(Error::NeedsLattice)
    }

    pub fn species(&self) -> impl Iterator<Item = &str> {
        self.atoms.iter().map(|a| a.species.as_str())
    }

    /// Index of the atom carrying `serial`.
    pub fn index_of_serial(&self, serial: usize) -> Option<usize> {
        match self.atoms.get(serial.wrapping_sub(1)) {
            Some(a) if a.serial == serial => Some(serial - 1),
            _ => self.atoms.iter().position(|a| a.serial == serial),
        }
    }
}

/// Ordered frames with optional per-frame energy (Hartree) and time (fs).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    frames: Vec<Structure>,
    energies: Vec<Option<f64>>,
    times: Vec<Option<f64>>,
}

impl Trajectory {
    pub fn new(
        frames: Vec<Structure>,
        energies: Vec<Option<f64>>,
        times: Vec<Option<f64>>,
    ) -> Result<Self> {
        assert_eq!(frames.len(), energies.len());
        assert_eq!(frames.len(), times.len());
        if let Some(first) = frames.first() {
            for (n, f) in frames.iter().enumerate().skip(1) {
                if f.len() != first.len() {
                    return Err(Error::InconsistentFrames {
                        frame: n + 1,
                        reason: format!("has {} atoms, frame 1 has {}", f.len(), first.len()),
                    });
                }
                if !f.species().eq(first.species()) {
                    return Err(Error::InconsistentFrames {
                        frame: n + 1,
                        reason: "species sequence differs from frame 1".into(),
                    });
                }
            }
        }
        Ok(Self {
            frames,
            energies,
            times,
        })
    }

    pub fn single(s: Structure) -> Self {
        Self {
            frames: vec![s],
            energies: vec![None],
            times: vec![None],
        }
    }

    pub fn frames(&self) -> &[Structure] {
        &self.frames
    }

    pub fn energies(&self) -> &[Option<f64>] {
        &self.energies
    }

    pub fn times(&self) -> &[Option<f64>] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn into_frames(self) -> Vec<Structure> {
        self.frames
    }
}

/// Scalar data on a regular grid spanned by three voxel step vectors.
///
/// Values are stored with the third index fastest: `i·n₂·n₃ + j·n₃ + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumetricGrid {
    pub origin: Vec3,
    pub steps: [Vec3; 3],
    pub dims: [usize; 3],
    pub values: Vec<f64>,
    pub atoms: Vec<Atom>,
    pub comments: [String; 2],
}

impl VolumetricGrid {
    pub fn new(
        origin: Vec3,
        steps: [Vec3; 3],
        dims: [usize; 3],
        values: Vec<f64>,
        atoms: Vec<Atom>,
    ) -> Result<Self> {
        let n: usize = dims.iter().product();
        if values.len() != n {
            return Err(Error::TruncatedData {
                expected: n,
                got: values.len(),
            });
        }
        let grid = Self {
            origin,
            steps,
            dims,
            values,
            atoms,
            comments: Default::default(),
        };
        grid.inverse_steps()?;
        Ok(grid)
    }

    /// Matrix whose columns are the step vectors e₁, e₂, e₃.
    pub fn step_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_columns(&self.steps)
    }

    pub fn inverse_steps(&self) -> Result<Matrix3<f64>> {
        let m = self.step_matrix();
        let scale: f64 = self.steps.iter().map(|s| s.norm()).product();
        if scale == 0.0 || !scale.is_finite() || m.determinant().abs() <= 1e-12 * scale {
            return Err(Error::SingularSteps);
        }
        m.try_inverse().ok_or(Error::SingularSteps)
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims[1] + j) * self.dims[2] + k
    }

    #[inline]
    pub fn value(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[self.index(i, j, k)]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Cell spanned by the full grid: rows nᵢ·eᵢ.
    pub fn lattice(&self) -> Result<Lattice> {
        let [a, b, c] = [0, 1, 2].map(|i| self.steps[i] * self.dims[i] as f64);
        Lattice::from_vectors(a, b, c)
    }

    /// Atoms of the grid together with the grid cell.
    pub fn structure(&self) -> Structure {
        Structure::new(
            self.atoms.clone(),
            self.lattice().ok(),
            self.comments[0].clone(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MeshSign {
    Positive,
    Negative,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    pub vertices: Vec<[f64; 3]>,
    pub normals: Vec<[f64; 3]>,
    pub triangles: Vec<[u32; 3]>,
    pub isovalue: f64,
    pub sign: MeshSign,
}

impl TriangleMesh {
    pub fn empty(isovalue: f64, sign: MeshSign) -> Self {
        Self {
            vertices: Vec::new(),
            normals: Vec::new(),
            triangles: Vec::new(),
            isovalue,
            sign,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    /// Checks index bounds and unit normals.
    pub fn check(&self) -> bool {
        let n = self.vertices.len() as u32;
        self.normals.len() == self.vertices.len()
            && self.triangles.iter().all(|t| t.iter().all(|&i| i < n))
            && self.normals.iter().all(|v| {
                let l = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                (l - 1.0).abs() <= 1e-6
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandSegment {
    pub n_points: usize,
    pub k_start: [f64; 3],
    pub k_end: [f64; 3],
    pub label_start: String,
    pub label_end: String,
}

/// One k-point: fractional k and `n_bands` eigenvalues (Hartree) per spin channel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KPointRecord {
    pub k: [f64; 3],
    pub eigenvalues: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandData {
    pub n_bands: usize,
    pub spin_channels: usize,
    /// Hartree
    pub chem_potential: f64,
    /// Reciprocal vectors as rows, Bohr⁻¹.
    pub reciprocal: [[f64; 3]; 3],
    pub segments: Vec<BandSegment>,
    /// Per segment, its k-point records.
    pub records: Vec<Vec<KPointRecord>>,
}

impl BandData {
    pub fn validate(&self) -> Result<()> {
        if self.records.len() != self.segments.len() {
            return Err(Error::TruncatedBand(format!(
                "{} segments but {} record groups",
                self.segments.len(),
                self.records.len()
            )));
        }
        for (s, (seg, recs)) in self.segments.iter().zip(&self.records).enumerate() {
            if recs.len() != seg.n_points {
                return Err(Error::TruncatedBand(format!(
                    "segment {} declares {} k-points, has {}",
                    s + 1,
                    seg.n_points,
                    recs.len()
                )));
            }
            for r in recs {
                if r.eigenvalues.len() != self.spin_channels {
                    return Err(Error::TruncatedBand(format!(
                        "segment {} record has {} spin channels",
                        s + 1,
                        r.eigenvalues.len()
                    )));
                }
                if let Some(e) = r.eigenvalues.iter().find(|e| e.len() != self.n_bands) {
                    return Err(Error::BandCountMismatch {
                        line: 0,
                        expected: self.n_bands,
                        found: e.len(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn k_point_count(&self) -> usize {
        self.records.iter().map(Vec::len).sum()
    }
}

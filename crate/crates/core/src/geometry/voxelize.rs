use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{Aabb, ComponentSpec, GeometryError, TriangleMesh};
use crate::math::Vec3;

/// Upper bound on `nx * ny * nz`.
pub const MAX_GRID_CELLS: u64 = 1 << 24;

/// Relative tolerance used when snapping the grid to multiples of the cell size.
const SNAP_EPS: f64 = 1e-9;

/// Integer cell coordinate. Ordered lexicographically by `(i, j, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "[u32; 3]", into = "[u32; 3]")]
pub struct CellIndex {
    pub i: u32,
    pub j: u32,
    pub k: u32,
}

impl CellIndex {
    pub const fn new(i: u32, j: u32, k: u32) -> Self {
        Self { i, j, k }
    }

    pub fn axis(&self, a: usize) -> u32 {
        [self.i, self.j, self.k][a]
    }

    /// Sort key used for bottom-to-top sequencing: `(k, j, i)`.
    pub fn zyx(&self) -> (u32, u32, u32) {
        (self.k, self.j, self.i)
    }

    /// Neighbour offset by `delta`, or `None` if it would leave the lattice.
    pub fn offset(&self, delta: [i32; 3]) -> Option<CellIndex> {
        let f = |v: u32, d: i32| v.checked_add_signed(d);
        Some(CellIndex::new(f(self.i, delta[0])?, f(self.j, delta[1])?, f(self.k, delta[2])?))
    }
}

impl From<[u32; 3]> for CellIndex {
    fn from(a: [u32; 3]) -> Self {
        CellIndex::new(a[0], a[1], a[2])
    }
}

impl From<CellIndex> for [u32; 3] {
    fn from(c: CellIndex) -> Self {
        [c.i, c.j, c.k]
    }
}

/// How the occupancy of a grid was decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FillMethod {
    /// Cell centers classified by ray-crossing parity (watertight input).
    ParityRayCast,
    /// Surface cells plus everything not reachable from the grid boundary.
    /// Used for leaky meshes and for meshes too thin to contain a cell center.
    SurfaceFloodFill,
}

/// Boolean occupancy lattice. Cell `(i, j, k)` spans
/// `origin + [i, i+1) x [j, j+1) x [k, k+1)` times `cell_size`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "GridRepr", try_from = "GridRepr")]
pub struct VoxelGrid {
    origin: Vec3,
    cell_size: f64,
    dims: [u32; 3],
    occupied: Vec<bool>,
    count: usize,
    fill: FillMethod,
}

#[derive(Serialize, Deserialize)]
struct GridRepr {
    origin: Vec3,
    cell_size: f64,
    dims: [u32; 3],
    fill: FillMethod,
    occupied: Vec<CellIndex>,
}

impl From<VoxelGrid> for GridRepr {
    fn from(g: VoxelGrid) -> Self {
        GridRepr {
            origin: g.origin,
            cell_size: g.cell_size,
            dims: g.dims,
            fill: g.fill,
            occupied: g.occupied_cells().collect(),
        }
    }
}

impl TryFrom<GridRepr> for VoxelGrid {
    type Error = GeometryError;

    fn try_from(r: GridRepr) -> Result<Self, Self::Error> {
        let mut grid = VoxelGrid::empty(r.origin, r.cell_size, r.dims)?;
        grid.fill = r.fill;
        for c in r.occupied {
            if !grid.in_bounds(c) {
                return Err(GeometryError::InvalidSpec(alloc::format!(
                    "occupied cell {:?} outside dims {:?}",
                    c, r.dims
                )));
            }
            grid.set(c, true);
        }
        Ok(grid)
    }
}

impl VoxelGrid {
    pub fn empty(origin: Vec3, cell_size: f64, dims: [u32; 3]) -> Result<Self, GeometryError> {
        if !(cell_size.is_finite() && cell_size > 0.0) {
            return Err(GeometryError::InvalidSpec("cell_size must be finite and > 0".into()));
        }
        if dims.contains(&0) {
            return Err(GeometryError::ResolutionTooCoarse);
        }
        let cells = dims.iter().map(|&d| d as u64).product::<u64>();
        if cells > MAX_GRID_CELLS {
            return Err(GeometryError::ResolutionTooFine {
                cells,
                limit: MAX_GRID_CELLS,
            });
        }
        Ok(Self {
            origin,
            cell_size,
            dims,
            occupied: vec![false; cells as usize],
            count: 0,
            fill: FillMethod::ParityRayCast,
        })
    }

    /// Builds a grid at the origin from a list of cells; dims are the tight bound.
    pub fn from_cells(cell_size: f64, cells: &[CellIndex]) -> Result<Self, GeometryError> {
        let mut dims = [1u32; 3];
        for c in cells {
            for (a, d) in dims.iter_mut().enumerate() {
                *d = (*d).max(c.axis(a) + 1);
            }
        }
        let mut grid = Self::empty(Vec3::ZERO, cell_size, dims)?;
        for &c in cells {
            grid.set(c, true);
        }
        Ok(grid)
    }

    pub fn origin(&self) -> Vec3 {
        self.origin
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn dims(&self) -> [u32; 3] {
        self.dims
    }

    pub fn fill_method(&self) -> FillMethod {
        self.fill
    }

    /// Set when the mesh was not watertight and surface voxelization was used.
    pub fn used_surface_fallback(&self) -> bool {
        self.fill == FillMethod::SurfaceFloodFill
    }

    pub fn occupied_count(&self) -> usize {
        self.count
    }

    pub fn in_bounds(&self, c: CellIndex) -> bool {
        c.i < self.dims[0] && c.j < self.dims[1] && c.k < self.dims[2]
    }

    fn linear(&self, c: CellIndex) -> usize {
        (c.i as usize)
            + self.dims[0] as usize * (c.j as usize + self.dims[1] as usize * c.k as usize)
    }

    pub fn is_occupied(&self, c: CellIndex) -> bool {
        self.in_bounds(c) && self.occupied[self.linear(c)]
    }

    /// Occupancy of a possibly out-of-grid signed coordinate.
    pub fn is_occupied_signed(&self, c: [i64; 3]) -> bool {
        if c.iter().any(|&v| v < 0 || v > u32::MAX as i64) {
            return false;
        }
        self.is_occupied(CellIndex::new(c[0] as u32, c[1] as u32, c[2] as u32))
    }

    pub fn set(&mut self, c: CellIndex, value: bool) {
        assert!(self.in_bounds(c), "cell {c:?} outside grid {:?}", self.dims);
        let idx = self.linear(c);
        if self.occupied[idx] != value {
            self.occupied[idx] = value;
            if value {
                self.count += 1;
            } else {
                self.count -= 1;
            }
        }
    }

    /// Occupied cells in lexicographic `(i, j, k)` order.
    pub fn occupied_cells(&self) -> impl Iterator<Item = CellIndex> + '_ {
        let [nx, ny, nz] = self.dims;
        (0..nx).flat_map(move |i| {
            (0..ny).flat_map(move |j| {
                (0..nz)
                    .map(move |k| CellIndex::new(i, j, k))
                    .filter(move |&c| self.occupied[self.linear(c)])
            })
        })
    }

    pub fn cell_center(&self, c: CellIndex) -> Vec3 {
        self.point_at([c.i as f64 + 0.5, c.j as f64 + 0.5, c.k as f64 + 0.5])
    }

    /// World position of a point given in continuous grid coordinates.
    pub fn point_at(&self, g: [f64; 3]) -> Vec3 {
        self.origin + Vec3::from(g) * self.cell_size
    }

    /// Cell containing a world point (half-open cells), if inside the grid.
    pub fn cell_of(&self, p: Vec3) -> Option<CellIndex> {
        let mut idx = [0u32; 3];
        for (a, slot) in idx.iter_mut().enumerate() {
            let g = libm::floor((p[a] - self.origin[a]) / self.cell_size);
            if g < 0.0 || g >= self.dims[a] as f64 {
                return None;
            }
            *slot = g as u32;
        }
        Some(CellIndex::from(idx))
    }

    pub fn bounds(&self) -> Aabb {
        Aabb {
            min: self.origin,
            max: self.point_at([self.dims[0] as f64, self.dims[1] as f64, self.dims[2] as f64]),
        }
    }

    fn cell_box(&self, c: CellIndex) -> (Vec3, Vec3) {
        (self.cell_center(c), Vec3::splat(self.cell_size * 0.5))
    }
}

/// Voxelizes `mesh` at the structural-component resolution.
///
/// The origin is `floor(bbox.min / edge) * edge` per axis and the dims are
/// `ceil((bbox.max - origin) / edge)`, at least one. Watertight meshes are
/// classified by cell-center parity along +X; leaky meshes (and meshes too
/// thin to contain any cell center) fall back to surface voxelization plus an
/// exterior flood fill.
pub fn voxelize(mesh: &TriangleMesh, spec: &ComponentSpec) -> Result<VoxelGrid, GeometryError> {
    spec.validate()?;
    let cell = spec.structural_edge;
    let bbox = mesh.bbox();
    let extent = bbox.extent();
    for (a, name) in ['x', 'y', 'z'].into_iter().enumerate() {
        if extent[a].is_nan() || extent[a] <= 0.0 {
            return Err(GeometryError::DegenerateMesh(name));
        }
    }
    let mut origin = [0.0; 3];
    let mut dims = [0u32; 3];
    for a in 0..3 {
        origin[a] = libm::floor(bbox.min[a] / cell + SNAP_EPS) * cell;
        let span = libm::ceil((bbox.max[a] - origin[a]) / cell - SNAP_EPS);
        if !span.is_finite() || span > u32::MAX as f64 {
            return Err(GeometryError::ResolutionTooFine {
                cells: u64::MAX,
                limit: MAX_GRID_CELLS,
            });
        }
        dims[a] = (span as u32).max(1);
    }
    let mut grid = VoxelGrid::empty(Vec3::from(origin), cell, dims)?;

    if mesh.is_watertight() {
        fill_by_parity(&mut grid, mesh);
        if grid.occupied_count() > 0 {
            return Ok(grid);
        }
    }
    fill_by_surface(&mut grid, mesh);
    grid.fill = FillMethod::SurfaceFloodFill;
    if grid.occupied_count() == 0 {
        return Err(GeometryError::ResolutionTooCoarse);
    }
    Ok(grid)
}

struct ProjectedTriangle {
    v: [Vec3; 3],
    area2: f64,
    min_y: f64,
    max_y: f64,
    min_z: f64,
    max_z: f64,
}

fn cross_yz(u: Vec3, v: Vec3) -> f64 {
    u.y * v.z - u.z * v.y
}

enum RowHit {
    Crossing(f64),
    Miss,
    Tie,
}

impl ProjectedTriangle {
    /// Intersects the +X line through `(y, z)` with this triangle.
    fn hit(&self, y: f64, z: f64, tie_band: f64) -> RowHit {
        if y < self.min_y - tie_band
            || y > self.max_y + tie_band
            || z < self.min_z - tie_band
            || z > self.max_z + tie_band
        {
            return RowHit::Miss;
        }
        let p = Vec3::new(0.0, y, z);
        let [a, b, c] = self.v;
        let edges = [(a, b), (b, c), (c, a)];
        let mut e = [0.0; 3];
        let sign = self.area2.signum();
        let mut near_edge = false;
        for (n, (s, t)) in edges.iter().enumerate() {
            e[n] = cross_yz(*t - *s, p - *s) * sign;
            let len = libm::hypot(t.y - s.y, t.z - s.z);
            // Signed distance from the edge line, positive inside.
            if libm::fabs(e[n]) <= tie_band * len {
                near_edge = true;
            } else if e[n] < 0.0 {
                return RowHit::Miss;
            }
        }
        if near_edge {
            return RowHit::Tie;
        }
        let area = libm::fabs(self.area2);
        // e[0] weights the vertex opposite edge ab, i.e. c; and so on.
        let x = (e[1] * a.x + e[2] * b.x + e[0] * c.x) / area;
        RowHit::Crossing(x)
    }
}

fn fill_by_parity(grid: &mut VoxelGrid, mesh: &TriangleMesh) {
    let cell = grid.cell_size;
    let jitter = 1e-9 * cell;
    let tie_band = 1e-10 * cell;
    let tris: Vec<ProjectedTriangle> = (0..mesh.triangles().len())
        .filter_map(|t| {
            let v = mesh.triangle(t);
            let area2 = cross_yz(v[1] - v[0], v[2] - v[0]);
            // Triangles parallel to the ray never produce a transversal crossing.
            if area2 == 0.0 {
                return None;
            }
            Some(ProjectedTriangle {
                v,
                area2,
                min_y: v[0].y.min(v[1].y).min(v[2].y),
                max_y: v[0].y.max(v[1].y).max(v[2].y),
                min_z: v[0].z.min(v[1].z).min(v[2].z),
                max_z: v[0].z.max(v[1].z).max(v[2].z),
            })
        })
        .collect();

    let [nx, ny, nz] = grid.dims;
    let mut crossings: Vec<f64> = Vec::new();
    for k in 0..nz {
        for j in 0..ny {
            let base_y = grid.origin.y + (j as f64 + 0.5) * cell;
            let base_z = grid.origin.z + (k as f64 + 0.5) * cell;
            // Deterministic jitter sequence: the first attempt is unperturbed,
            // later ones rotate by the golden angle.
            let mut resolved = false;
            for attempt in 0..32u32 {
                let (dy, dz) = if attempt == 0 {
                    (0.0, 0.0)
                } else {
                    let ang = attempt as f64 * 2.399_963_229_728_653;
                    let r = jitter * attempt as f64;
                    (r * libm::cos(ang), r * libm::sin(ang))
                };
                let (y, z) = (base_y + dy, base_z + dz);
                crossings.clear();
                let mut tie = false;
                for t in &tris {
                    match t.hit(y, z, tie_band) {
                        RowHit::Crossing(x) => crossings.push(x),
                        RowHit::Miss => {}
                        RowHit::Tie => {
                            tie = true;
                            break;
                        }
                    }
                }
                if !tie {
                    resolved = true;
                    break;
                }
            }
            if !resolved {
                // Pathological geometry; leave the row empty.
                continue;
            }
            crossings.sort_by(f64::total_cmp);
            let mut below = 0usize;
            for i in 0..nx {
                let cx = grid.origin.x + (i as f64 + 0.5) * cell;
                while below < crossings.len() && crossings[below] < cx {
                    below += 1;
                }
                if below % 2 == 1 {
                    grid.set(CellIndex::new(i, j, k), true);
                }
            }
        }
    }
}

fn fill_by_surface(grid: &mut VoxelGrid, mesh: &TriangleMesh) {
    let [nx, ny, nz] = grid.dims;
    let mut surface = vec![false; grid.occupied.len()];
    for t in 0..mesh.triangles().len() {
        let tri = mesh.triangle(t);
        let lo = tri[0].min(tri[1]).min(tri[2]);
        let hi = tri[0].max(tri[1]).max(tri[2]);
        let range = |a: usize| {
            let to = |v: f64| libm::floor((v - grid.origin[a]) / grid.cell_size);
            let max = grid.dims[a] as f64 - 1.0;
            let l = to(lo[a]).clamp(0.0, max) as u32;
            let h = to(hi[a]).clamp(0.0, max) as u32;
            (l.saturating_sub(1), (h + 1).min(grid.dims[a] - 1))
        };
        let (ri, rj, rk) = (range(0), range(1), range(2));
        for k in rk.0..=rk.1 {
            for j in rj.0..=rj.1 {
                for i in ri.0..=ri.1 {
                    let c = CellIndex::new(i, j, k);
                    let (center, half) = grid.cell_box(c);
                    if triangle_box_overlap(center, half, tri) {
                        let idx = grid.linear(c);
                        surface[idx] = true;
                    }
                }
            }
        }
    }

    // Exterior = empty cells reachable from the grid boundary.
    let mut exterior = vec![false; surface.len()];
    let mut queue = VecDeque::new();
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                let on_boundary = i == 0 || j == 0 || k == 0 || i == nx - 1 || j == ny - 1 || k == nz - 1;
                let c = CellIndex::new(i, j, k);
                let idx = grid.linear(c);
                if on_boundary && !surface[idx] {
                    exterior[idx] = true;
                    queue.push_back(c);
                }
            }
        }
    }
    while let Some(c) = queue.pop_front() {
        for d in NEIGHBOURS_6 {
            if let Some(n) = c.offset(d).filter(|n| grid.in_bounds(*n)) {
                let idx = grid.linear(n);
                if !surface[idx] && !exterior[idx] {
                    exterior[idx] = true;
                    queue.push_back(n);
                }
            }
        }
    }
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                let c = CellIndex::new(i, j, k);
                let idx = grid.linear(c);
                if surface[idx] || !exterior[idx] {
                    grid.set(c, true);
                }
            }
        }
    }
}

pub(crate) const NEIGHBOURS_6: [[i32; 3]; 6] = [
    [1, 0, 0],
    [-1, 0, 0],
    [0, 1, 0],
    [0, -1, 0],
    [0, 0, 1],
    [0, 0, -1],
];

/// Separating-axis test between a triangle and an axis-aligned box given by
/// center and half extents. Touching counts as overlap.
pub fn triangle_box_overlap(center: Vec3, half: Vec3, tri: [Vec3; 3]) -> bool {
    let v = [tri[0] - center, tri[1] - center, tri[2] - center];
    let h = half.to_array();

    // Box face normals.
    for a in 0..3 {
        let lo = v[0][a].min(v[1][a]).min(v[2][a]);
        let hi = v[0][a].max(v[1][a]).max(v[2][a]);
        if lo > h[a] || hi < -h[a] {
            return false;
        }
    }

    let e = [v[1] - v[0], v[2] - v[1], v[0] - v[2]];
    let axes = [Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0), Vec3::new(0.0, 0.0, 1.0)];

    // Edge x axis cross products.
    for edge in e {
        for axis in axes {
            let l = axis.cross(edge);
            if l.dot(l) == 0.0 {
                continue;
            }
            let p = [l.dot(v[0]), l.dot(v[1]), l.dot(v[2])];
            let r = h[0] * libm::fabs(l.x) + h[1] * libm::fabs(l.y) + h[2] * libm::fabs(l.z);
            let (lo, hi) = (p[0].min(p[1]).min(p[2]), p[0].max(p[1]).max(p[2]));
            if lo > r || hi < -r {
                return false;
            }
        }
    }

    // Triangle plane.
    let n = e[0].cross(e[1]);
    if n.dot(n) == 0.0 {
        return true;
    }
    let d = n.dot(v[0]);
    let r = h[0] * libm::fabs(n.x) + h[1] * libm::fabs(n.y) + h[2] * libm::fabs(n.z);
    libm::fabs(d) <= r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_cube() -> TriangleMesh {
        TriangleMesh::cuboid(Vec3::ZERO, Vec3::splat(1.0)).unwrap()
    }

    fn spec(edge: f64) -> ComponentSpec {
        ComponentSpec::new(edge, 0.02).unwrap()
    }

    #[test]
    fn cube_half_cells() {
        let g = voxelize(&unit_cube(), &spec(0.5)).unwrap();
        assert_eq!(g.dims(), [2, 2, 2]);
        assert_eq!(g.occupied_count(), 8);
        assert_eq!(g.fill_method(), FillMethod::ParityRayCast);
    }

    #[test]
    fn cube_unit_cell() {
        let g = voxelize(&unit_cube(), &spec(1.0)).unwrap();
        assert_eq!(g.dims(), [1, 1, 1]);
        assert_eq!(g.occupied_count(), 1);
    }

    #[test]
    fn cube_coarser_than_mesh_keeps_one_cell() {
        let g = voxelize(&unit_cube(), &spec(2.0)).unwrap();
        assert_eq!(g.dims(), [1, 1, 1]);
        assert_eq!(g.occupied_count(), 1);
    }

    #[test]
    fn flat_mesh_is_degenerate() {
        let quad = TriangleMesh::new(
            vec![Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0), Vec3::new(1.0, 1.0, 0.0)],
            vec![[0, 1, 2]],
        )
        .unwrap();
        assert_eq!(voxelize(&quad, &spec(0.5)), Err(GeometryError::DegenerateMesh('z')));
    }

    #[test]
    fn open_box_uses_surface_fallback() {
        // Cube with the top two triangles removed.
        let cube = unit_cube();
        let tris: Vec<[u32; 3]> = cube
            .triangles()
            .iter()
            .enumerate()
            .filter(|(t, _)| *t != 2 && *t != 3)
            .map(|(_, t)| *t)
            .collect();
        let open = TriangleMesh::new(cube.vertices().to_vec(), tris).unwrap();
        assert!(!open.is_watertight());
        let g = voxelize(&open, &spec(0.25)).unwrap();
        assert!(g.used_surface_fallback());
        // Walls and floor mark the outer shell; the open top lets the exterior
        // flood reach the inner 2x2x3 columns.
        assert_eq!(g.dims(), [4, 4, 4]);
        assert_eq!(g.occupied_count(), 64 - 12);
        assert!(g.is_occupied(CellIndex::new(0, 0, 0)));
        assert!(!g.is_occupied(CellIndex::new(1, 1, 2)));
    }

    #[test]
    fn cell_center_round_trip() {
        let g = VoxelGrid::empty(Vec3::new(-1.0, 2.0, 0.5), 0.25, [4, 3, 2]).unwrap();
        for c in [CellIndex::new(0, 0, 0), CellIndex::new(3, 2, 1), CellIndex::new(1, 0, 1)] {
            let p = g.cell_center(c);
            assert_eq!(g.cell_of(p), Some(c));
        }
        assert_eq!(g.cell_of(Vec3::new(-2.0, 2.1, 0.6)), None);
    }

    #[test]
    fn grid_json_round_trip() {
        let g = voxelize(&unit_cube(), &spec(0.5)).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        let back: VoxelGrid = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn sat_rejects_separated_and_accepts_touching() {
        let tri = [Vec3::new(2.0, 0.0, 0.0), Vec3::new(3.0, 0.0, 0.0), Vec3::new(2.0, 1.0, 0.0)];
        assert!(!triangle_box_overlap(Vec3::ZERO, Vec3::splat(0.5), tri));
        let touching = [Vec3::new(0.5, 0.0, 0.0), Vec3::new(1.5, 0.0, 0.0), Vec3::new(0.5, 1.0, 0.0)];
        assert!(triangle_box_overlap(Vec3::ZERO, Vec3::splat(0.5), touching));
        // Diagonal triangle whose bbox overlaps the box but whose plane misses it.
        let diag = [Vec3::new(1.0, 1.0, 3.0), Vec3::new(3.0, 1.0, 1.0), Vec3::new(1.0, 3.0, 1.0)];
        assert!(!triangle_box_overlap(Vec3::splat(1.0), Vec3::splat(0.5), diag));
    }
}

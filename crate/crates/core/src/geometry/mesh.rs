use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::GeometryError;
use crate::math::Vec3;

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn extent(&self) -> Vec3 {
        self.max - self.min
    }

    pub fn contains(&self, p: Vec3) -> bool {
        (0..3).all(|a| p[a] >= self.min[a] && p[a] <= self.max[a])
    }

    pub fn inflated(&self, by: f64) -> Aabb {
        Aabb {
            min: self.min - Vec3::splat(by),
            max: self.max + Vec3::splat(by),
        }
    }
}

/// Indexed triangle mesh in model units (meters).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleMesh {
    vertices: Vec<Vec3>,
    triangles: Vec<[u32; 3]>,
    bbox: Aabb,
}

impl TriangleMesh {
    /// Validates indices and computes the bounding box.
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[u32; 3]>) -> Result<Self, GeometryError> {
        if triangles.is_empty() {
            return Err(GeometryError::EmptyMesh);
        }
        let n = vertices.len();
        for (t, tri) in triangles.iter().enumerate() {
            if let Some(&bad) = tri.iter().find(|&&i| i as usize >= n) {
                return Err(GeometryError::InvalidIndex {
                    triangle: t,
                    index: bad,
                    vertex_count: n,
                });
            }
        }
        if let Some(v) = vertices.iter().position(|v| !v.is_finite()) {
            return Err(GeometryError::NonFiniteVertex(v));
        }
        let mut min = Vec3::splat(f64::INFINITY);
        let mut max = Vec3::splat(f64::NEG_INFINITY);
        for v in &vertices {
            min = min.min(*v);
            max = max.max(*v);
        }
        Ok(Self {
            vertices,
            triangles,
            bbox: Aabb { min, max },
        })
    }

    /// Axis-aligned box with outward-wound faces (12 triangles).
    pub fn cuboid(min: Vec3, max: Vec3) -> Result<Self, GeometryError> {
        let v = |x: bool, y: bool, z: bool| {
            Vec3::new(
                if x { max.x } else { min.x },
                if y { max.y } else { min.y },
                if z { max.z } else { min.z },
            )
        };
        let vertices = alloc::vec![
            v(false, false, false),
            v(true, false, false),
            v(true, true, false),
            v(false, true, false),
            v(false, false, true),
            v(true, false, true),
            v(true, true, true),
            v(false, true, true),
        ];
        let triangles = alloc::vec![
            [0, 2, 1],
            [0, 3, 2],
            [4, 5, 6],
            [4, 6, 7],
            [0, 1, 5],
            [0, 5, 4],
            [1, 2, 6],
            [1, 6, 5],
            [2, 3, 7],
            [2, 7, 6],
            [3, 0, 4],
            [3, 4, 7],
        ];
        Self::new(vertices, triangles)
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn bbox(&self) -> Aabb {
        self.bbox
    }

    pub fn triangle(&self, t: usize) -> [Vec3; 3] {
        let [a, b, c] = self.triangles[t];
        [
            self.vertices[a as usize],
            self.vertices[b as usize],
            self.vertices[c as usize],
        ]
    }

    pub fn translated(&self, by: Vec3) -> TriangleMesh {
        let vertices = self.vertices.iter().map(|v| *v + by).collect();
        TriangleMesh::new(vertices, self.triangles.clone()).expect("translation keeps validity")
    }

    /// Concatenates meshes without welding shared vertices.
    pub fn merged(parts: &[TriangleMesh]) -> Result<TriangleMesh, GeometryError> {
        let mut vertices = Vec::new();
        let mut triangles = Vec::new();
        for part in parts {
            let base = vertices.len() as u32;
            vertices.extend_from_slice(&part.vertices);
            triangles.extend(part.triangles.iter().map(|t| [t[0] + base, t[1] + base, t[2] + base]));
        }
        TriangleMesh::new(vertices, triangles)
    }

    /// True when every edge, after welding bit-identical positions, is shared
    /// by exactly two triangles.
    pub fn is_watertight(&self) -> bool {
        use alloc::collections::BTreeMap;
        let mut weld: BTreeMap<[u64; 3], u32> = BTreeMap::new();
        let ids: Vec<u32> = self
            .vertices
            .iter()
            .map(|v| {
                let key = [v.x.to_bits(), v.y.to_bits(), v.z.to_bits()];
                let next = weld.len() as u32;
                *weld.entry(key).or_insert(next)
            })
            .collect();
        let mut edges: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        for tri in &self.triangles {
            let w = [ids[tri[0] as usize], ids[tri[1] as usize], ids[tri[2] as usize]];
            if w[0] == w[1] || w[1] == w[2] || w[0] == w[2] {
                continue;
            }
            for e in 0..3 {
                let (a, b) = (w[e], w[(e + 1) % 3]);
                *edges.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        !edges.is_empty() && edges.values().all(|&c| c == 2)
    }
}

/// Physical component dimensions. Panels span exactly one structural face.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComponentSpec {
    pub structural_edge: f64,
    pub panel_thickness: f64,
}

impl Default for ComponentSpec {
    fn default() -> Self {
        Self {
            structural_edge: 0.30,
            panel_thickness: 0.02,
        }
    }
}

impl ComponentSpec {
    pub fn new(structural_edge: f64, panel_thickness: f64) -> Result<Self, GeometryError> {
        let spec = Self {
            structural_edge,
            panel_thickness,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn panel_span(&self) -> f64 {
        self.structural_edge
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(self.structural_edge) || !ok(self.panel_thickness) {
            return Err(GeometryError::InvalidSpec(String::from(
                "structural_edge and panel_thickness must be finite and > 0",
            )));
        }
        Ok(())
    }
}

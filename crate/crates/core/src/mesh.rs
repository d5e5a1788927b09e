//! Simplicial meshes of polygonal (n = 2) and polyhedral (n = 3) Lipschitz
//! domains, together with the boundary mesh carrying the discrete surface
//! measure.
//!
//! Boundary facets are always derived from the cell list: a facet is on the
//! boundary exactly when it belongs to one cell. Outward normals are oriented
//! against the adjacent cell's centroid.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

pub type Point = [f64; 3];

pub(crate) fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: Point, b: Point) -> Point {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm(a: Point) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn distance(a: Point, b: Point) -> f64 {
    norm(sub(a, b))
}

pub(crate) fn scale(a: Point, s: f64) -> Point {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub(crate) fn add(a: Point, b: Point) -> Point {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// Signed area of a 2D triangle (z components ignored).
fn signed_area2(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
}

/// Signed volume of a tetrahedron.
fn signed_volume3(a: Point, b: Point, c: Point, d: Point) -> f64 {
    dot(sub(b, a), cross(sub(c, a), sub(d, a))) / 6.0
}

/// Area of a triangle embedded in 3-space.
fn triangle_area3(a: Point, b: Point, c: Point) -> f64 {
    0.5 * norm(cross(sub(b, a), sub(c, a)))
}

/// A boundary facet of the volume mesh: `dim` vertex indices plus the single
/// adjacent cell and the unit outward normal.
#[derive(Debug, Clone)]
pub struct BoundaryFacet {
    pub vertices: [usize; 3],
    pub cell: usize,
    pub normal: Point,
}

/// Conforming simplicial mesh of a bounded domain.
#[derive(Debug, Clone)]
pub struct Mesh {
    dim: usize,
    vertices: Vec<Point>,
    cells: Vec<[usize; 4]>,
    boundary_facets: Vec<BoundaryFacet>,
    cell_volumes: Vec<f64>,
    diameter: f64,
}

impl Mesh {
    /// Builds a mesh from raw vertex and cell data, deriving boundary facets
    /// and checking all structural invariants.
    pub fn from_cells(dim: usize, vertices: Vec<Point>, cells_in: Vec<Vec<usize>>) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::MeshValidation(format!("dimension must be 2 or 3, got {dim}")));
        }
        let nv = vertices.len();
        let mut cells = Vec::with_capacity(cells_in.len());
        for (ci, c) in cells_in.iter().enumerate() {
            if c.len() != dim + 1 {
                return Err(Error::MeshParse(format!(
                    "cell {ci} has {} vertices, expected {}",
                    c.len(),
                    dim + 1
                )));
            }
            let mut idx = [0usize; 4];
            for (k, &v) in c.iter().enumerate() {
                if v >= nv {
                    return Err(Error::MeshParse(format!(
                        "cell {ci} references vertex {v} but only {nv} vertices exist"
                    )));
                }
                idx[k] = v;
            }
            cells.push(idx);
        }
        if cells.is_empty() {
            return Err(Error::MeshValidation("mesh has no cells".into()));
        }

        let mut cell_volumes = Vec::with_capacity(cells.len());
        for (ci, c) in cells.iter().enumerate() {
            let vol = match dim {
                2 => signed_area2(vertices[c[0]], vertices[c[1]], vertices[c[2]]),
                _ => signed_volume3(vertices[c[0]], vertices[c[1]], vertices[c[2]], vertices[c[3]]),
            };
            if vol <= 0.0 {
                return Err(Error::MeshValidation(format!(
                    "cell {ci} has non-positive volume {vol:.3e}"
                )));
            }
            cell_volumes.push(vol);
        }

        // Facet incidence: boundary facets appear once, interior facets twice.
        let mut facet_count: HashMap<Vec<usize>, (usize, usize, [usize; 3])> = HashMap::new();
        let facets_of = |c: &[usize; 4]| -> Vec<[usize; 3]> {
            if dim == 2 {
                vec![
                    [c[0], c[1], usize::MAX],
                    [c[1], c[2], usize::MAX],
                    [c[2], c[0], usize::MAX],
                ]
            } else {
                vec![
                    [c[0], c[1], c[2]],
                    [c[0], c[1], c[3]],
                    [c[0], c[2], c[3]],
                    [c[1], c[2], c[3]],
                ]
            }
        };
        for (ci, c) in cells.iter().enumerate() {
            for f in facets_of(c) {
                let mut key: Vec<usize> = f.iter().take(dim).copied().collect();
                key.sort_unstable();
                let entry = facet_count.entry(key).or_insert((0, ci, f));
                entry.0 += 1;
                if entry.0 > 2 {
                    return Err(Error::MeshValidation(format!(
                        "facet {:?} shared by more than two cells",
                        &f[..dim]
                    )));
                }
            }
        }

        // Connectivity over shared facets (union-find).
        let mut uf = UnionFind::new(cells.len());
        let mut facet_to_cell: HashMap<Vec<usize>, usize> = HashMap::new();
        for (ci, c) in cells.iter().enumerate() {
            for f in facets_of(c) {
                let mut key: Vec<usize> = f.iter().take(dim).copied().collect();
                key.sort_unstable();
                match facet_to_cell.get(&key) {
                    Some(&other) => uf.union(ci, other),
                    None => {
                        facet_to_cell.insert(key, ci);
                    }
                }
            }
        }
        let root = uf.find(0);
        if (1..cells.len()).any(|ci| uf.find(ci) != root) {
            return Err(Error::MeshValidation("mesh is disconnected".into()));
        }

        // Deterministic boundary facet order: sweep cells, then local facets.
        let mut boundary_facets = Vec::new();
        for (ci, c) in cells.iter().enumerate() {
            for f in facets_of(c) {
                let mut key: Vec<usize> = f.iter().take(dim).copied().collect();
                key.sort_unstable();
                if facet_count[&key].0 == 1 {
                    let normal = outward_normal(dim, &vertices, &cells[ci], &f, &cell_volumes, ci)?;
                    boundary_facets.push(BoundaryFacet { vertices: f, cell: ci, normal });
                }
            }
        }
        if boundary_facets.is_empty() {
            return Err(Error::MeshValidation("mesh has no boundary facets".into()));
        }

        let mut diameter = 0.0f64;
        for i in 0..nv {
            for j in (i + 1)..nv {
                diameter = diameter.max(distance(vertices[i], vertices[j]));
            }
        }

        Ok(Mesh { dim, vertices, cells, boundary_facets, cell_volumes, diameter })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> Point {
        self.vertices[i]
    }

    /// Vertex indices of cell `ci` (`dim + 1` entries).
    pub fn cell(&self, ci: usize) -> &[usize] {
        &self.cells[ci][..self.dim + 1]
    }

    pub fn cell_volume(&self, ci: usize) -> f64 {
        self.cell_volumes[ci]
    }

    pub fn cell_volumes(&self) -> &[f64] {
        &self.cell_volumes
    }

    pub fn total_volume(&self) -> f64 {
        self.cell_volumes.iter().sum()
    }

    pub fn boundary_facets(&self) -> &[BoundaryFacet] {
        &self.boundary_facets
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn cell_barycenter(&self, ci: usize) -> Point {
        let c = self.cell(ci);
        let mut b = [0.0; 3];
        for &v in c {
            b = add(b, self.vertices[v]);
        }
        scale(b, 1.0 / c.len() as f64)
    }

    /// Mesh width: the largest cell edge length.
    pub fn mesh_width(&self) -> f64 {
        let mut h = 0.0f64;
        for ci in 0..self.cells.len() {
            let c = self.cell(ci);
            for i in 0..c.len() {
                for j in (i + 1)..c.len() {
                    h = h.max(distance(self.vertices[c[i]], self.vertices[c[j]]));
                }
            }
        }
        h
    }

    /// Serializes the mesh in the plain-text format (see [`load_mesh`]).
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        writeln!(out, "dim {}", self.dim).unwrap();
        writeln!(out, "vertices {}", self.vertices.len()).unwrap();
        for v in &self.vertices {
            if self.dim == 2 {
                writeln!(out, "{} {}", v[0], v[1]).unwrap();
            } else {
                writeln!(out, "{} {} {}", v[0], v[1], v[2]).unwrap();
            }
        }
        writeln!(out, "cells {}", self.cells.len()).unwrap();
        for ci in 0..self.cells.len() {
            let c = self.cell(ci);
            let line: Vec<String> = c.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", line.join(" ")).unwrap();
        }
        std::fs::write(path, out)?;
        Ok(())
    }
}

fn outward_normal(
    dim: usize,
    vertices: &[Point],
    cell: &[usize; 4],
    facet: &[usize; 3],
    _volumes: &[f64],
    _ci: usize,
) -> Result<Point> {
    let n = if dim == 2 {
        let a = vertices[facet[0]];
        let b = vertices[facet[1]];
        let t = sub(b, a);
        [t[1], -t[0], 0.0]
    } else {
        let a = vertices[facet[0]];
        let b = vertices[facet[1]];
        let c = vertices[facet[2]];
        cross(sub(b, a), sub(c, a))
    };
    let len = norm(n);
    if len == 0.0 {
        return Err(Error::MeshValidation("degenerate boundary facet".into()));
    }
    let mut n = scale(n, 1.0 / len);
    // Orient away from the adjacent cell.
    let mut fc = [0.0; 3];
    for &v in facet.iter().take(dim) {
        fc = add(fc, vertices[v]);
    }
    let fc = scale(fc, 1.0 / dim as f64);
    let mut cc = [0.0; 3];
    for &v in cell.iter().take(dim + 1) {
        cc = add(cc, vertices[v]);
    }
    let cc = scale(cc, 1.0 / (dim + 1) as f64);
    if dot(n, sub(fc, cc)) < 0.0 {
        n = scale(n, -1.0);
    }
    Ok(n)
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// Boundary mesh: facets with measures, midpoints and normals, plus the map
/// from boundary vertex index to the parent mesh vertex index. For standalone
/// boundary meshes (closed polygon, triangulated sphere) the map is the
/// identity.
#[derive(Debug, Clone)]
pub struct BoundaryMesh {
    pub dim: usize,
    /// Facet vertex indices into the *boundary* vertex list (`dim` entries).
    pub facets: Vec<[usize; 3]>,
    pub vertex_coords: Vec<Point>,
    /// Boundary vertex index -> parent mesh vertex index.
    pub global_vertex: Vec<usize>,
    pub facet_measures: Vec<f64>,
    pub facet_midpoints: Vec<Point>,
    pub facet_normals: Vec<Point>,
}

impl BoundaryMesh {
    pub fn vertex_count(&self) -> usize {
        self.vertex_coords.len()
    }

    pub fn facet_count(&self) -> usize {
        self.facets.len()
    }

    pub fn total_measure(&self) -> f64 {
        self.facet_measures.iter().sum()
    }

    /// Vertex count per facet (2 in 2D, 3 in 3D).
    pub fn facet_arity(&self) -> usize {
        if self.dim == 2 {
            2
        } else {
            3
        }
    }

    pub fn facet_vertices(&self, f: usize) -> &[usize] {
        &self.facets[f][..self.facet_arity()]
    }

    /// Largest pairwise distance between boundary vertices.
    pub fn diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for i in 0..self.vertex_coords.len() {
            for j in (i + 1)..self.vertex_coords.len() {
                d = d.max(distance(self.vertex_coords[i], self.vertex_coords[j]));
            }
        }
        d
    }

    /// Returns a copy with all coordinates multiplied by `factor`.
    pub fn rescaled(&self, factor: f64) -> BoundaryMesh {
        let vertex_coords: Vec<Point> = self.vertex_coords.iter().map(|&p| scale(p, factor)).collect();
        let facet_midpoints: Vec<Point> = self.facet_midpoints.iter().map(|&p| scale(p, factor)).collect();
        let pow = if self.dim == 2 { factor } else { factor * factor };
        let facet_measures: Vec<f64> = self.facet_measures.iter().map(|&m| m * pow).collect();
        BoundaryMesh {
            dim: self.dim,
            facets: self.facets.clone(),
            vertex_coords,
            global_vertex: self.global_vertex.clone(),
            facet_measures,
            facet_midpoints,
            facet_normals: self.facet_normals.clone(),
        }
    }
}

/// Extracts the boundary mesh of a volume mesh. Boundary vertices are ordered
/// by ascending parent vertex index; facets keep the parent facet order.
pub fn extract_boundary(mesh: &Mesh) -> BoundaryMesh {
    let dim = mesh.dim();
    let arity = if dim == 2 { 2 } else { 3 };
    let mut on_boundary: Vec<bool> = vec![false; mesh.vertex_count()];
    for f in mesh.boundary_facets() {
        for &v in f.vertices.iter().take(arity) {
            on_boundary[v] = true;
        }
    }
    let global_vertex: Vec<usize> =
        (0..mesh.vertex_count()).filter(|&v| on_boundary[v]).collect();
    let mut local_of = vec![usize::MAX; mesh.vertex_count()];
    for (b, &g) in global_vertex.iter().enumerate() {
        local_of[g] = b;
    }

    let mut facets = Vec::new();
    let mut facet_measures = Vec::new();
    let mut facet_midpoints = Vec::new();
    let mut facet_normals = Vec::new();
    for f in mesh.boundary_facets() {
        let mut local = [usize::MAX; 3];
        for (k, &v) in f.vertices.iter().take(arity).enumerate() {
            local[k] = local_of[v];
        }
        facets.push(local);
        let pts: Vec<Point> = f.vertices.iter().take(arity).map(|&v| mesh.vertex(v)).collect();
        let measure = if dim == 2 {
            distance(pts[0], pts[1])
        } else {
            triangle_area3(pts[0], pts[1], pts[2])
        };
        facet_measures.push(measure);
        let mut mid = [0.0; 3];
        for &p in &pts {
            mid = add(mid, p);
        }
        facet_midpoints.push(scale(mid, 1.0 / arity as f64));
        facet_normals.push(f.normal);
    }

    let vertex_coords: Vec<Point> = global_vertex.iter().map(|&g| mesh.vertex(g)).collect();
    BoundaryMesh {
        dim,
        facets,
        vertex_coords,
        global_vertex,
        facet_measures,
        facet_midpoints,
        facet_normals,
    }
}

/// Uniform triangulation of the unit square: `s + 1` vertices per side, each
/// grid square split along its main diagonal into two triangles.
pub fn generate_unit_square_mesh(subdivisions: usize) -> Result<Mesh> {
    if subdivisions == 0 {
        return Err(Error::InvalidArgument("subdivisions must be >= 1".into()));
    }
    let s = subdivisions;
    let h = 1.0 / s as f64;
    let mut vertices = Vec::with_capacity((s + 1) * (s + 1));
    for j in 0..=s {
        for i in 0..=s {
            vertices.push([i as f64 * h, j as f64 * h, 0.0]);
        }
    }
    let v = |i: usize, j: usize| j * (s + 1) + i;
    let mut cells = Vec::with_capacity(2 * s * s);
    for j in 0..s {
        for i in 0..s {
            cells.push(vec![v(i, j), v(i + 1, j), v(i + 1, j + 1)]);
            cells.push(vec![v(i, j), v(i + 1, j + 1), v(i, j + 1)]);
        }
    }
    Mesh::from_cells(2, vertices, cells)
}

/// Triangulation of the L-shaped domain `[0,1]^2 \ (1/2,1]^2`: the hexagonal
/// polygon is fanned from the reentrant corner into four triangles, each
/// split uniformly into `s^2` congruent subtriangles.
pub fn generate_lshape_mesh(subdivisions: usize) -> Result<Mesh> {
    if subdivisions == 0 {
        return Err(Error::InvalidArgument("subdivisions must be >= 1".into()));
    }
    let s = subdivisions;
    // Corner fan around the reentrant corner (1/2, 1/2).
    let p0 = [0.0, 0.0, 0.0];
    let p1 = [1.0, 0.0, 0.0];
    let p2 = [1.0, 0.5, 0.0];
    let p3 = [0.5, 0.5, 0.0];
    let p4 = [0.5, 1.0, 0.0];
    let p5 = [0.0, 1.0, 0.0];
    let coarse = [[p3, p0, p1], [p3, p1, p2], [p3, p4, p5], [p3, p5, p0]];

    // All refined vertices have coordinates in (1/(2s)) * Z^2, so integer
    // keys give exact deduplication.
    let mut key_of = HashMap::new();
    let mut vertices: Vec<Point> = Vec::new();
    let mut cells: Vec<Vec<usize>> = Vec::new();
    let denom = 2 * s;
    let mut vertex_index = |p: Point, vertices: &mut Vec<Point>| -> usize {
        let kx = (p[0] * denom as f64).round() as i64;
        let ky = (p[1] * denom as f64).round() as i64;
        *key_of.entry((kx, ky)).or_insert_with(|| {
            vertices.push(p);
            vertices.len() - 1
        })
    };
    for tri in coarse {
        let [a, b, c] = tri;
        let eb = scale(sub(b, a), 1.0 / s as f64);
        let ec = scale(sub(c, a), 1.0 / s as f64);
        let at = |i: usize, j: usize| add(a, add(scale(eb, i as f64), scale(ec, j as f64)));
        for i in 0..s {
            for j in 0..(s - i) {
                let v00 = vertex_index(at(i, j), &mut vertices);
                let v10 = vertex_index(at(i + 1, j), &mut vertices);
                let v01 = vertex_index(at(i, j + 1), &mut vertices);
                cells.push(vec![v00, v10, v01]);
                if j < s - i - 1 {
                    let v11 = vertex_index(at(i + 1, j + 1), &mut vertices);
                    cells.push(vec![v10, v11, v01]);
                }
            }
        }
    }
    Mesh::from_cells(2, vertices, cells)
}

/// Tetrahedral mesh of the unit cube: each grid subcube is split into the six
/// Kuhn tetrahedra sharing the main diagonal.
pub fn generate_cube_mesh(subdivisions: usize) -> Result<Mesh> {
    if subdivisions == 0 {
        return Err(Error::InvalidArgument("subdivisions must be >= 1".into()));
    }
    let s = subdivisions;
    let h = 1.0 / s as f64;
    let mut vertices = Vec::with_capacity((s + 1).pow(3));
    for k in 0..=s {
        for j in 0..=s {
            for i in 0..=s {
                vertices.push([i as f64 * h, j as f64 * h, k as f64 * h]);
            }
        }
    }
    let v = |i: usize, j: usize, k: usize| (k * (s + 1) + j) * (s + 1) + i;
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut cells = Vec::with_capacity(6 * s * s * s);
    for k in 0..s {
        for j in 0..s {
            for i in 0..s {
                let base = [i, j, k];
                for perm in PERMS {
                    let mut p = base;
                    let mut path = vec![v(p[0], p[1], p[2])];
                    for &axis in &perm {
                        p[axis] += 1;
                        path.push(v(p[0], p[1], p[2]));
                    }
                    // Fix orientation: odd permutations give negative volume.
                    let a = vertices[path[0]];
                    let b = vertices[path[1]];
                    let c = vertices[path[2]];
                    let d = vertices[path[3]];
                    if signed_volume3(a, b, c, d) < 0.0 {
                        path.swap(2, 3);
                    }
                    cells.push(path);
                }
            }
        }
    }
    Mesh::from_cells(3, vertices, cells)
}

/// Loads a mesh from the plain-text format:
///
/// ```text
/// dim <n>
/// vertices <count>
/// <x y [z]> ...
/// cells <count>
/// <i0 i1 i2 [i3]> ...
/// ```
///
/// Boundary facets are derived, never stored.
pub fn load_mesh(path: &Path) -> Result<Mesh> {
    let text = std::fs::read_to_string(path)?;
    parse_mesh(&text)
}

pub fn parse_mesh(text: &str) -> Result<Mesh> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let mut expect = |tag: &str| -> Result<usize> {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| Error::MeshParse(format!("unexpected end of file, expected `{tag}`")))?;
        let mut parts = line.split_whitespace();
        match (parts.next(), parts.next(), parts.next()) {
            (Some(t), Some(v), None) if t == tag => v
                .parse::<usize>()
                .map_err(|_| Error::MeshParse(format!("line {}: bad `{tag}` count", ln + 1))),
            _ => Err(Error::MeshParse(format!("line {}: expected `{tag} <count>`", ln + 1))),
        }
    };

    let dim = expect("dim")?;
    if dim != 2 && dim != 3 {
        return Err(Error::MeshParse(format!("dim must be 2 or 3, got {dim}")));
    }
    let nv = expect("vertices")?;
    let mut take_line = |what: &str| -> Result<(usize, String)> {
        lines
            .next()
            .map(|(ln, l)| (ln, l.to_string()))
            .ok_or_else(|| Error::MeshParse(format!("unexpected end of file while reading {what}")))
    };
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, line) = take_line("vertices")?;
        let coords: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::MeshParse(format!("line {}: bad vertex coordinates", ln + 1)))?;
        if coords.len() != dim {
            return Err(Error::MeshParse(format!(
                "line {}: expected {dim} coordinates, got {}",
                ln + 1,
                coords.len()
            )));
        }
        let mut p = [0.0; 3];
        p[..dim].copy_from_slice(&coords);
        vertices.push(p);
    }
    let nc = expect("cells")?;
    let mut cells = Vec::with_capacity(nc);
    for _ in 0..nc {
        let (ln, line) = take_line("cells")?;
        let idx: Vec<usize> = line
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::MeshParse(format!("line {}: bad cell indices", ln + 1)))?;
        if idx.len() != dim + 1 {
            return Err(Error::MeshParse(format!(
                "line {}: expected {} indices, got {}",
                ln + 1,
                dim + 1,
                idx.len()
            )));
        }
        cells.push(idx);
    }
    Mesh::from_cells(dim, vertices, cells)
}

/// Closed regular polygon boundary (standalone boundary mesh in the plane),
/// inscribed in the circle of given radius around `center`.
pub fn polygon_boundary(center: [f64; 2], radius: f64, sides: usize) -> Result<BoundaryMesh> {
    if sides < 3 {
        return Err(Error::InvalidArgument("polygon needs at least 3 sides".into()));
    }
    if radius <= 0.0 {
        return Err(Error::InvalidArgument("radius must be positive".into()));
    }
    let mut vertex_coords = Vec::with_capacity(sides);
    for k in 0..sides {
        let a = 2.0 * std::f64::consts::PI * k as f64 / sides as f64;
        vertex_coords.push([center[0] + radius * a.cos(), center[1] + radius * a.sin(), 0.0]);
    }
    let mut facets = Vec::with_capacity(sides);
    let mut facet_measures = Vec::with_capacity(sides);
    let mut facet_midpoints = Vec::with_capacity(sides);
    let mut facet_normals = Vec::with_capacity(sides);
    for k in 0..sides {
        let a = k;
        let b = (k + 1) % sides;
        facets.push([a, b, usize::MAX]);
        let (pa, pb) = (vertex_coords[a], vertex_coords[b]);
        facet_measures.push(distance(pa, pb));
        let mid = scale(add(pa, pb), 0.5);
        facet_midpoints.push(mid);
        let t = sub(pb, pa);
        let mut n = [t[1], -t[0], 0.0];
        let c = [center[0], center[1], 0.0];
        if dot(n, sub(mid, c)) < 0.0 {
            n = scale(n, -1.0);
        }
        facet_normals.push(scale(n, 1.0 / norm(n)));
    }
    Ok(BoundaryMesh {
        dim: 2,
        facets,
        vertex_coords: vertex_coords.clone(),
        global_vertex: (0..sides).collect(),
        facet_measures,
        facet_midpoints,
        facet_normals,
    })
}

/// Triangulated unit sphere (standalone boundary mesh): icosahedron with
/// `depth` rounds of 1:4 subdivision, vertices projected to the unit sphere.
pub fn sphere_boundary(depth: usize) -> Result<BoundaryMesh> {
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let raw: [[f64; 3]; 12] = [
        [-1.0, phi, 0.0],
        [1.0, phi, 0.0],
        [-1.0, -phi, 0.0],
        [1.0, -phi, 0.0],
        [0.0, -1.0, phi],
        [0.0, 1.0, phi],
        [0.0, -1.0, -phi],
        [0.0, 1.0, -phi],
        [phi, 0.0, -1.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, -1.0],
        [-phi, 0.0, 1.0],
    ];
    let mut verts: Vec<Point> = raw.iter().map(|&p| scale(p, 1.0 / norm(p))).collect();
    let mut tris: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..depth {
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(tris.len() * 4);
        for t in &tris {
            let mut mid = [0usize; 3];
            for e in 0..3 {
                let (a, b) = (t[e], t[(e + 1) % 3]);
                let key = (a.min(b), a.max(b));
                mid[e] = *midpoint.entry(key).or_insert_with(|| {
                    let m = scale(add(verts[a], verts[b]), 0.5);
                    verts.push(scale(m, 1.0 / norm(m)));
                    verts.len() - 1
                });
            }
            next.push([t[0], mid[0], mid[2]]);
            next.push([t[1], mid[1], mid[0]]);
            next.push([t[2], mid[2], mid[1]]);
            next.push([mid[0], mid[1], mid[2]]);
        }
        tris = next;
    }
    let mut facets = Vec::with_capacity(tris.len());
    let mut facet_measures = Vec::with_capacity(tris.len());
    let mut facet_midpoints = Vec::with_capacity(tris.len());
    let mut facet_normals = Vec::with_capacity(tris.len());
    for t in &tris {
        facets.push([t[0], t[1], t[2]]);
        let (a, b, c) = (verts[t[0]], verts[t[1]], verts[t[2]]);
        facet_measures.push(triangle_area3(a, b, c));
        let mid = scale(add(add(a, b), c), 1.0 / 3.0);
        facet_midpoints.push(mid);
        let mut n = cross(sub(b, a), sub(c, a));
        if dot(n, mid) < 0.0 {
            n = scale(n, -1.0);
        }
        facet_normals.push(scale(n, 1.0 / norm(n)));
    }
    let count = verts.len();
    Ok(BoundaryMesh {
        dim: 3,
        facets,
        vertex_coords: verts,
        global_vertex: (0..count).collect(),
        facet_measures,
        facet_midpoints,
        facet_normals,
    })
}

//! Piecewise-linear Galerkin assembly: stiffness with a variable coefficient
//! matrix, lumped interior mass, consistent boundary mass, the Dirichlet
//! trace map, and the weak Neumann trace evaluator.
//!
//! The interior mass is lumped (vertex quadrature). This keeps the discrete
//! semigroup generator a Metzler matrix on the nonobtuse meshes produced by
//! the generators, so kernel positivity and entrywise domination hold at the
//! matrix level and not merely up to consistency error.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix3};

use crate::error::{Error, Result};
use crate::mesh::{BoundaryMesh, Mesh, Point};

/// Symmetric matrices are stored dense; assembly mirrors the upper triangle
/// so that `entry(i, j) == entry(j, i)` exactly as stored.
pub type SymmetricMatrix = DMatrix<f64>;

/// The coefficient matrix `A(x)` with its ellipticity bounds `a0, a1`.
#[derive(Clone)]
pub struct CoefficientField {
    kind: CoefficientKind,
    a0: f64,
    a1: f64,
}

#[derive(Clone)]
enum CoefficientKind {
    Identity,
    Scalar(f64),
    /// Scalar coefficient jumping across the hyperplane `x_1 = split`.
    PiecewiseX {
        split: f64,
        left: f64,
        right: f64,
    },
    Custom(fn(Point) -> [[f64; 3]; 3]),
}

impl CoefficientField {
    pub fn identity() -> Self {
        CoefficientField { kind: CoefficientKind::Identity, a0: 1.0, a1: 1.0 }
    }

    pub fn scalar(c: f64) -> Result<Self> {
        if c <= 0.0 {
            return Err(Error::InvalidArgument(format!("scalar coefficient must be positive, got {c}")));
        }
        Ok(CoefficientField { kind: CoefficientKind::Scalar(c), a0: c, a1: c })
    }

    pub fn piecewise_x(split: f64, left: f64, right: f64) -> Result<Self> {
        if left <= 0.0 || right <= 0.0 {
            return Err(Error::InvalidArgument("piecewise coefficient values must be positive".into()));
        }
        Ok(CoefficientField {
            kind: CoefficientKind::PiecewiseX { split, left, right },
            a0: left.min(right),
            a1: left.max(right),
        })
    }

    /// Arbitrary symmetric matrix evaluator with caller-supplied ellipticity
    /// bounds (sampled invariants are spot-checked by `validate_on`).
    pub fn custom(f: fn(Point) -> [[f64; 3]; 3], a0: f64, a1: f64) -> Result<Self> {
        if a0 <= 0.0 || a1 < a0 {
            return Err(Error::InvalidArgument("need 0 < a0 <= a1".into()));
        }
        Ok(CoefficientField { kind: CoefficientKind::Custom(f), a0, a1 })
    }

    pub fn a0(&self) -> f64 {
        self.a0
    }

    pub fn a1(&self) -> f64 {
        self.a1
    }

    /// Evaluates `A(x)` as a dim x dim matrix stored in a 3x3 block.
    pub fn eval(&self, x: Point) -> [[f64; 3]; 3] {
        match &self.kind {
            CoefficientKind::Identity => diag3(1.0),
            CoefficientKind::Scalar(c) => diag3(*c),
            CoefficientKind::PiecewiseX { split, left, right } => {
                diag3(if x[0] < *split { *left } else { *right })
            }
            CoefficientKind::Custom(f) => f(x),
        }
    }

    /// Spot-checks symmetry and the ellipticity bounds of `A` at the given
    /// sample points (the cell barycenters in practice).
    pub fn validate_on(&self, dim: usize, points: &[Point]) -> Result<()> {
        for &p in points {
            let a = self.eval(p);
            for i in 0..dim {
                for j in 0..dim {
                    if (a[i][j] - a[j][i]).abs() > 1e-12 * (1.0 + a[i][j].abs()) {
                        return Err(Error::CoefficientEval(format!(
                            "A({p:?}) is not symmetric at ({i},{j})"
                        )));
                    }
                }
            }
            let (lo, hi) = symmetric_eigen_bounds(dim, &a);
            if lo < self.a0 - 1e-10 * self.a0.abs() || hi > self.a1 + 1e-10 * self.a1.abs() {
                return Err(Error::CoefficientEval(format!(
                    "A({p:?}) eigenvalues [{lo:.6}, {hi:.6}] escape [{}, {}]",
                    self.a0, self.a1
                )));
            }
        }
        Ok(())
    }
}

fn diag3(c: f64) -> [[f64; 3]; 3] {
    [[c, 0.0, 0.0], [0.0, c, 0.0], [0.0, 0.0, c]]
}

fn symmetric_eigen_bounds(dim: usize, a: &[[f64; 3]; 3]) -> (f64, f64) {
    if dim == 2 {
        let m = Matrix2::new(a[0][0], a[0][1], a[1][0], a[1][1]);
        let e = m.symmetric_eigen().eigenvalues;
        (e.min(), e.max())
    } else {
        let m = Matrix3::new(
            a[0][0], a[0][1], a[0][2], a[1][0], a[1][1], a[1][2], a[2][0], a[2][1], a[2][2],
        );
        let e = m.symmetric_eigen().eigenvalues;
        (e.min(), e.max())
    }
}

/// Gradients of the barycentric basis functions of a cell, one per vertex.
fn p1_gradients(mesh: &Mesh, ci: usize) -> Vec<Point> {
    let dim = mesh.dim();
    let c = mesh.cell(ci);
    let p0 = mesh.vertex(c[0]);
    if dim == 2 {
        let d = Matrix2::new(
            mesh.vertex(c[1])[0] - p0[0],
            mesh.vertex(c[2])[0] - p0[0],
            mesh.vertex(c[1])[1] - p0[1],
            mesh.vertex(c[2])[1] - p0[1],
        );
        let inv = d.try_inverse().expect("positive-volume cell is invertible");
        // Rows of D^-1 are the gradients of lambda_1, lambda_2.
        let g1 = [inv[(0, 0)], inv[(0, 1)], 0.0];
        let g2 = [inv[(1, 0)], inv[(1, 1)], 0.0];
        let g0 = [-g1[0] - g2[0], -g1[1] - g2[1], 0.0];
        vec![g0, g1, g2]
    } else {
        let d = Matrix3::new(
            mesh.vertex(c[1])[0] - p0[0],
            mesh.vertex(c[2])[0] - p0[0],
            mesh.vertex(c[3])[0] - p0[0],
            mesh.vertex(c[1])[1] - p0[1],
            mesh.vertex(c[2])[1] - p0[1],
            mesh.vertex(c[3])[1] - p0[1],
            mesh.vertex(c[1])[2] - p0[2],
            mesh.vertex(c[2])[2] - p0[2],
            mesh.vertex(c[3])[2] - p0[2],
        );
        let inv = d.try_inverse().expect("positive-volume cell is invertible");
        let g1 = [inv[(0, 0)], inv[(0, 1)], inv[(0, 2)]];
        let g2 = [inv[(1, 0)], inv[(1, 1)], inv[(1, 2)]];
        let g3 = [inv[(2, 0)], inv[(2, 1)], inv[(2, 2)]];
        let g0 = [-g1[0] - g2[0] - g3[0], -g1[1] - g2[1] - g3[1], -g1[2] - g2[2] - g3[2]];
        vec![g0, g1, g2, g3]
    }
}

fn apply_coeff(a: &[[f64; 3]; 3], g: Point) -> Point {
    [
        a[0][0] * g[0] + a[0][1] * g[1] + a[0][2] * g[2],
        a[1][0] * g[0] + a[1][1] * g[1] + a[1][2] * g[2],
        a[2][0] * g[0] + a[2][1] * g[1] + a[2][2] * g[2],
    ]
}

/// Stiffness matrix of the energy form `int <grad u, A grad v>`, with `A`
/// sampled at cell barycenters (exact for piecewise-constant coefficients).
pub fn assemble_stiffness(mesh: &Mesh, coeff: &CoefficientField) -> Result<SymmetricMatrix> {
    let n = mesh.vertex_count();
    let mut k = DMatrix::zeros(n, n);
    for ci in 0..mesh.cell_count() {
        let grads = p1_gradients(mesh, ci);
        let a = coeff.eval(mesh.cell_barycenter(ci));
        let vol = mesh.cell_volume(ci);
        let cell = mesh.cell(ci);
        for (li, &gi) in cell.iter().zip(grads.iter()) {
            let agi = apply_coeff(&a, gi);
            for (lj, &gj) in cell.iter().zip(grads.iter()) {
                if lj < li {
                    continue;
                }
                let v = vol * (agi[0] * gj[0] + agi[1] * gj[1] + agi[2] * gj[2]);
                k[(*li, *lj)] += v;
                if li != lj {
                    k[(*lj, *li)] += v;
                }
            }
        }
    }
    Ok(k)
}

/// Lumped mass matrix (vertex quadrature of the `L^2` inner product):
/// diagonal with the vertex-patch volume shares, so row sums reproduce the
/// cell volumes exactly.
pub fn assemble_mass(mesh: &Mesh) -> SymmetricMatrix {
    DMatrix::from_diagonal(&lumped_mass_diagonal(mesh))
}

pub fn lumped_mass_diagonal(mesh: &Mesh) -> DVector<f64> {
    let n = mesh.vertex_count();
    let share = 1.0 / (mesh.dim() + 1) as f64;
    let mut d = DVector::zeros(n);
    for ci in 0..mesh.cell_count() {
        let w = mesh.cell_volume(ci) * share;
        for &v in mesh.cell(ci) {
            d[v] += w;
        }
    }
    d
}

/// Consistent boundary mass matrix: exact integration of hat-function
/// products over each facet (the discrete surface-measure pairing).
pub fn assemble_boundary_mass(bmesh: &BoundaryMesh) -> SymmetricMatrix {
    let n = bmesh.vertex_count();
    let mut m = DMatrix::zeros(n, n);
    if bmesh.dim == 2 {
        for (f, len) in bmesh.facets.iter().zip(bmesh.facet_measures.iter()) {
            let (a, b) = (f[0], f[1]);
            m[(a, a)] += len / 3.0;
            m[(b, b)] += len / 3.0;
            m[(a, b)] += len / 6.0;
            m[(b, a)] += len / 6.0;
        }
    } else {
        for (f, area) in bmesh.facets.iter().zip(bmesh.facet_measures.iter()) {
            for i in 0..3 {
                for j in 0..3 {
                    let w = if i == j { area / 6.0 } else { area / 12.0 };
                    m[(f[i], f[j])] += w;
                }
            }
        }
    }
    m
}

/// Lumped boundary mass: diagonal of facet-measure shares, `sum = |bdry|`.
pub fn lumped_boundary_mass(bmesh: &BoundaryMesh) -> DVector<f64> {
    let n = bmesh.vertex_count();
    let arity = bmesh.facet_arity() as f64;
    let mut d = DVector::zeros(n);
    for (f, meas) in bmesh.facets.iter().zip(bmesh.facet_measures.iter()) {
        for &v in &f[..bmesh.facet_arity()] {
            d[v] += meas / arity;
        }
    }
    d
}

/// The Dirichlet trace: a 0/1 selection of boundary nodal values, one row per
/// boundary vertex.
#[derive(Debug, Clone)]
pub struct TraceMap {
    boundary_to_global: Vec<usize>,
    global_count: usize,
}

impl TraceMap {
    pub fn rows(&self) -> usize {
        self.boundary_to_global.len()
    }

    pub fn global_index(&self, b: usize) -> usize {
        self.boundary_to_global[b]
    }

    pub fn indices(&self) -> &[usize] {
        &self.boundary_to_global
    }

    /// `T u`: restrict a volume coefficient vector to boundary nodal values.
    pub fn apply(&self, u: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.rows(), self.boundary_to_global.iter().map(|&g| u[g]))
    }

    /// `T^t w`: scatter a boundary vector into the volume DOF layout.
    pub fn apply_transpose(&self, w: &DVector<f64>) -> DVector<f64> {
        let mut u = DVector::zeros(self.global_count);
        for (b, &g) in self.boundary_to_global.iter().enumerate() {
            u[g] = w[b];
        }
        u
    }

    /// Adds `T^t B T` into the square matrix `target` (boundary coupling).
    pub fn add_boundary_block(&self, b: &DMatrix<f64>, target: &mut DMatrix<f64>) {
        for (i, &gi) in self.boundary_to_global.iter().enumerate() {
            for (j, &gj) in self.boundary_to_global.iter().enumerate() {
                target[(gi, gj)] += b[(i, j)];
            }
        }
    }
}

pub fn build_trace_map(mesh: &Mesh, bmesh: &BoundaryMesh) -> Result<TraceMap> {
    let n = mesh.vertex_count();
    if bmesh.global_vertex.iter().any(|&g| g >= n) {
        return Err(Error::DimensionMismatch(
            "boundary mesh references vertices outside the parent mesh".into(),
        ));
    }
    Ok(TraceMap { boundary_to_global: bmesh.global_vertex.clone(), global_count: n })
}

/// Weak Neumann trace: the boundary-row residual `(K u - M f)|_boundary`,
/// pairing the conormal derivative against each boundary hat function.
pub fn weak_neumann_trace(
    mesh: &Mesh,
    coeff: &CoefficientField,
    u: &DVector<f64>,
    f: &DVector<f64>,
) -> Result<DVector<f64>> {
    let n = mesh.vertex_count();
    if u.len() != n || f.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "expected coefficient vectors of length {n}, got {} and {}",
            u.len(),
            f.len()
        )));
    }
    let k = assemble_stiffness(mesh, coeff)?;
    let m = lumped_mass_diagonal(mesh);
    let bmesh = crate::mesh::extract_boundary(mesh);
    let trace = build_trace_map(mesh, &bmesh)?;
    let residual = &k * u - DVector::from_iterator(n, m.iter().zip(f.iter()).map(|(mi, fi)| mi * fi));
    Ok(trace.apply(&residual))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{extract_boundary, generate_cube_mesh, generate_lshape_mesh, generate_unit_square_mesh};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn ones(n: usize) -> DVector<f64> {
        DVector::from_element(n, 1.0)
    }

    #[test]
    fn stiffness_annihilates_constants() {
        for mesh in [
            generate_unit_square_mesh(3).unwrap(),
            generate_lshape_mesh(2).unwrap(),
            generate_cube_mesh(2).unwrap(),
        ] {
            let k = assemble_stiffness(&mesh, &CoefficientField::identity()).unwrap();
            let r = &k * ones(mesh.vertex_count());
            assert!(r.amax() < 1e-12, "K*1 = {}", r.amax());
        }
    }

    /// Independent stiffness oracle: hat functions evaluated through the
    /// area-ratio formula, differentiated by central differences, integrated
    /// by midpoint quadrature over subdivided triangles. Shares nothing with
    /// the closed-form gradient path in `assemble_stiffness`.
    fn brute_force_stiffness(mesh: &crate::mesh::Mesh) -> DMatrix<f64> {
        fn area(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
            0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
        }
        let n = mesh.vertex_count();
        let mut k = DMatrix::zeros(n, n);
        let eps = 1e-6;
        for ci in 0..mesh.cell_count() {
            let cell: Vec<usize> = mesh.cell(ci).to_vec();
            let p: Vec<[f64; 2]> = cell
                .iter()
                .map(|&v| [mesh.vertex(v)[0], mesh.vertex(v)[1]])
                .collect();
            let total = area(p[0], p[1], p[2]);
            let hat = |i: usize, x: [f64; 2]| -> f64 {
                let q = [x, p[(i + 1) % 3], p[(i + 2) % 3]];
                area(q[0], q[1], q[2]) / area(p[i], p[(i + 1) % 3], p[(i + 2) % 3])
            };
            let grad = |i: usize, x: [f64; 2]| -> [f64; 2] {
                [
                    (hat(i, [x[0] + eps, x[1]]) - hat(i, [x[0] - eps, x[1]])) / (2.0 * eps),
                    (hat(i, [x[0], x[1] + eps]) - hat(i, [x[0], x[1] - eps])) / (2.0 * eps),
                ]
            };
            // Midpoint rule over 16 congruent subtriangles.
            let s = 4;
            let sub_area = total / (s * s) as f64;
            for a_idx in 0..s {
                for b_idx in 0..(s - a_idx) {
                    for upward in [true, false] {
                        if !upward && b_idx >= s - a_idx - 1 {
                            continue;
                        }
                        let (bu, bv) = if upward {
                            ((a_idx as f64 + 1.0 / 3.0) / s as f64, (b_idx as f64 + 1.0 / 3.0) / s as f64)
                        } else {
                            ((a_idx as f64 + 2.0 / 3.0) / s as f64, (b_idx as f64 + 2.0 / 3.0) / s as f64)
                        };
                        let x = [
                            p[0][0] + bu * (p[1][0] - p[0][0]) + bv * (p[2][0] - p[0][0]),
                            p[0][1] + bu * (p[1][1] - p[0][1]) + bv * (p[2][1] - p[0][1]),
                        ];
                        for (li, &gi) in cell.iter().enumerate() {
                            let ga = grad(li, x);
                            for (lj, &gj) in cell.iter().enumerate() {
                                let gb = grad(lj, x);
                                k[(gi, gj)] += sub_area * (ga[0] * gb[0] + ga[1] * gb[1]);
                            }
                        }
                    }
                }
            }
        }
        k
    }

    #[test]
    fn stiffness_matches_brute_force_oracle() {
        let mesh = generate_unit_square_mesh(1).unwrap();
        let k = assemble_stiffness(&mesh, &CoefficientField::identity()).unwrap();
        let reference = brute_force_stiffness(&mesh);
        assert!((&k - &reference).amax() < 1e-8, "vs oracle: {}", (&k - &reference).amax());
        // Frozen oracle values: right-angle corners accumulate 1/2 from each
        // adjacent triangle, diagonal corners carry 1 from a single triangle.
        assert_relative_eq!(k[(0, 0)], 1.0, epsilon = 1e-12);
        assert_relative_eq!(k[(3, 3)], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn stiffness_scales_linearly() {
        let mesh = generate_unit_square_mesh(3).unwrap();
        let k1 = assemble_stiffness(&mesh, &CoefficientField::identity()).unwrap();
        let k4 = assemble_stiffness(&mesh, &CoefficientField::scalar(4.0).unwrap()).unwrap();
        assert!((&k4 - &k1 * 4.0).amax() < 1e-12);
    }

    #[test]
    fn mass_volumes() {
        let mesh = generate_unit_square_mesh(4).unwrap();
        let m = assemble_mass(&mesh);
        let n = mesh.vertex_count();
        assert_relative_eq!((ones(n).transpose() * &m * ones(n))[(0, 0)], 1.0, epsilon = 1e-12);
        assert!(m.diagonal().min() > 0.0);
        let lmesh = generate_lshape_mesh(3).unwrap();
        let ml = assemble_mass(&lmesh);
        let nl = lmesh.vertex_count();
        assert_relative_eq!((ones(nl).transpose() * &ml * ones(nl))[(0, 0)], 0.75, epsilon = 1e-12);
    }

    #[test]
    fn boundary_mass_measures() {
        let mesh = generate_unit_square_mesh(4).unwrap();
        let b = extract_boundary(&mesh);
        let mb = assemble_boundary_mass(&b);
        let n = b.vertex_count();
        assert_relative_eq!((ones(n).transpose() * &mb * ones(n))[(0, 0)], 4.0, epsilon = 1e-12);

        let cube = generate_cube_mesh(2).unwrap();
        let bc = extract_boundary(&cube);
        let mc = assemble_boundary_mass(&bc);
        let nc = bc.vertex_count();
        assert_relative_eq!((ones(nc).transpose() * &mc * ones(nc))[(0, 0)], 6.0, epsilon = 1e-12);

        // Refinement leaves the total boundary mass unchanged.
        let fine = extract_boundary(&generate_unit_square_mesh(8).unwrap());
        let mf = assemble_boundary_mass(&fine);
        let nf = fine.vertex_count();
        assert_relative_eq!((ones(nf).transpose() * &mf * ones(nf))[(0, 0)], 4.0, epsilon = 1e-12);
    }

    #[test]
    fn trace_map_basics() {
        let mesh = generate_unit_square_mesh(4).unwrap();
        let b = extract_boundary(&mesh);
        let t = build_trace_map(&mesh, &b).unwrap();
        assert_eq!(t.rows(), b.vertex_count());
        let u = ones(mesh.vertex_count());
        assert!((t.apply(&u) - ones(t.rows())).amax() < 1e-15);
        let x1 = DVector::from_iterator(
            mesh.vertex_count(),
            (0..mesh.vertex_count()).map(|i| mesh.vertex(i)[0]),
        );
        let tr = t.apply(&x1);
        assert!(tr.min() >= 0.0 && tr.max() <= 1.0);
    }

    #[test]
    fn weak_neumann_trace_of_constant_vanishes() {
        let mesh = generate_unit_square_mesh(4).unwrap();
        let n = mesh.vertex_count();
        let w = weak_neumann_trace(
            &mesh,
            &CoefficientField::identity(),
            &ones(n),
            &DVector::zeros(n),
        )
        .unwrap();
        assert!(w.amax() < 1e-12);
    }

    #[test]
    fn weak_neumann_trace_divergence_theorem() {
        // u = x_1 is harmonic; the conormal fluxes must balance:
        // sum_j w_j = boundary integral of nu_1 = 0.
        let mesh = generate_unit_square_mesh(6).unwrap();
        let n = mesh.vertex_count();
        let x1 = DVector::from_iterator(n, (0..n).map(|i| mesh.vertex(i)[0]));
        let w = weak_neumann_trace(&mesh, &CoefficientField::identity(), &x1, &DVector::zeros(n))
            .unwrap();
        assert!(w.sum().abs() < 1e-12);
    }

    #[test]
    fn weak_neumann_dimension_mismatch() {
        let mesh = generate_unit_square_mesh(2).unwrap();
        let err = weak_neumann_trace(
            &mesh,
            &CoefficientField::identity(),
            &ones(3),
            &DVector::zeros(3),
        );
        assert!(matches!(err, Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn assembly_is_deterministic() {
        let mesh = generate_lshape_mesh(3).unwrap();
        let c = CoefficientField::piecewise_x(0.5, 1.0, 3.0).unwrap();
        let k1 = assemble_stiffness(&mesh, &c).unwrap();
        let k2 = assemble_stiffness(&mesh, &c).unwrap();
        assert_eq!(k1.as_slice(), k2.as_slice(), "bit-identical reassembly");
    }

    #[test]
    fn coefficient_validation() {
        let mesh = generate_unit_square_mesh(2).unwrap();
        let pts: Vec<_> = (0..mesh.cell_count()).map(|c| mesh.cell_barycenter(c)).collect();
        CoefficientField::piecewise_x(0.5, 1.0, 4.0)
            .unwrap()
            .validate_on(2, &pts)
            .unwrap();
        fn bad(_: Point) -> [[f64; 3]; 3] {
            [[1.0, 2.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
        }
        let c = CoefficientField::custom(bad, 0.5, 2.0).unwrap();
        assert!(c.validate_on(2, &pts).is_err());
    }

    proptest! {
        /// Discrete ellipticity transfer: a0 u'K_I u <= u'K_A u <= a1 u'K_I u.
        #[test]
        fn ellipticity_transfer(seed in 0u64..32) {
            let mesh = generate_unit_square_mesh(3).unwrap();
            let n = mesh.vertex_count();
            let ki = assemble_stiffness(&mesh, &CoefficientField::identity()).unwrap();
            let coeff = CoefficientField::piecewise_x(0.5, 0.7, 2.5).unwrap();
            let ka = assemble_stiffness(&mesh, &coeff).unwrap();
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let u = DVector::from_fn(n, |_, _| rng.gen::<f64>() - 0.5);
            let ei = (u.transpose() * &ki * &u)[(0, 0)];
            let ea = (u.transpose() * &ka * &u)[(0, 0)];
            prop_assert!(ea >= coeff.a0() * ei - 1e-10);
            prop_assert!(ea <= coeff.a1() * ei + 1e-10);
        }
    }
}

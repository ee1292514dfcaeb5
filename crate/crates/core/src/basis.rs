//! Basis systems on regular lattices.
//!
//! Two families share one interface: cardinal B-splines of order 1..=3 and
//! the Daubechies-3 (DB3) scaling functions. A [`BasisSystem`] carries the
//! mass matrix `C`, the stiffness matrix `G`, the mass-lumped diagonal, and
//! evaluates sparse point-evaluation matrices `B`.
//!
//! Conventions:
//! - A 1-d lattice on `[lo, hi]` with `U` cells has spacing `h = (hi-lo)/U`;
//!   local coordinates are `t = (s - lo)/h ∈ [0, U]`.
//! - Spline translates are `ξ_k(s) = N_m(t - k)` for `k = -m, ..., U-1`
//!   (every translate whose support `(k, k+m+1)` meets the domain), giving
//!   `U + m` functions per axis. They are unnormalized, so order-1 splines
//!   form a partition of unity.
//! - DB3 translates are `ξ_k(s) = h^{-1/2} φ(t - k)` for `k = -4, ..., U-1`
//!   (support width 5 cells), giving `U + 4` functions per axis. The
//!   `h^{-1/2}` factor makes the family orthonormal, so `C = I`.
//! - Gram matrices integrate over the whole line, so every band is Toeplitz:
//!   `C_{kl} = h·c(|k-l|)` and `G_{kl} = h^{-1}·g(|k-l|)`. Boundary rows
//!   differ from interior rows only by clipped bands.
//! - Tensor products in d = 2 order the basis with the last axis fastest:
//!   index `i = i_x · n_y + i_y`, matching [`BoundingBox::grid`].

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::points::{BoundingBox, Points};
use crate::sparse::{kron, SparseMatrix};

/// Width of the DB3 scaling-function support, in lattice cells.
pub const DB3_SUPPORT: f64 = 5.0;

/// Dyadic resolution `2^{-L}` used for cached DB3 value tables.
///
/// The scaling function is barely more than once differentiable, and its
/// roughness concentrates near dyadic rationals, so the *uniform* linear
/// interpolation error decays only like `2^{-1.09 L}`. Level 17 is the first
/// level whose uniform error (~4e-7, measured against a doubled-resolution
/// table) sits below 1e-6 at every point rather than merely at typical ones.
pub const DEFAULT_CASCADE_LEVEL: u32 = 17;

/// Connection coefficients `Λ(η) = ∫ φ'(t) φ'(t-η) dt` of the DB3 scaling
/// function for `η = 0..4` (symmetric in `η`; zero for `|η| ≥ 5`).
pub const DB3_LAMBDA: [f64; 5] = [5.267, -3.390, 0.876, -0.114, -0.00535];

/// A basis family on a regular lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisFamily {
    /// Cardinal B-splines of order `order` (polynomial degree `order`),
    /// support `order + 1` cells.
    Spline { order: usize },
    /// Daubechies-3 scaling functions, support 5 cells, L²-normalized.
    Db3,
}

impl BasisFamily {
    /// Support width in lattice cells.
    pub fn support_cells(self) -> usize {
        match self {
            BasisFamily::Spline { order } => order + 1,
            BasisFamily::Db3 => 5,
        }
    }

    /// Smallest admissible per-axis function count.
    pub fn min_nodes(self) -> usize {
        match self {
            BasisFamily::Spline { order } => order + 2,
            BasisFamily::Db3 => 9,
        }
    }

    fn validate(self) -> Result<()> {
        match self {
            BasisFamily::Spline { order } if !(1..=3).contains(&order) => Err(
                Error::InvalidParameter(format!("spline order {order} not in 1..=3")),
            ),
            _ => Ok(()),
        }
    }
}

/// Geometry of a basis system: family, computational domain and per-axis
/// function counts. The domain is the *expanded* box on which the lattice
/// lives, not the area of interest.
#[derive(Clone, Debug)]
pub struct BasisSpec {
    family: BasisFamily,
    domain: BoundingBox,
    nodes_per_axis: Vec<usize>,
}

impl BasisSpec {
    /// Validates counts against the family and the domain dimension (1 or 2).
    pub fn new(
        family: BasisFamily,
        domain: BoundingBox,
        nodes_per_axis: &[usize],
    ) -> Result<BasisSpec> {
        family.validate()?;
        let d = domain.dim();
        if !(1..=2).contains(&d) {
            return Err(Error::InvalidParameter(format!(
                "basis systems support 1 or 2 dimensions, got {d}"
            )));
        }
        if nodes_per_axis.len() != d {
            return Err(Error::InvalidParameter(format!(
                "{} node counts for a {d}-dimensional domain",
                nodes_per_axis.len()
            )));
        }
        let min = family.min_nodes();
        if let Some(&bad) = nodes_per_axis.iter().find(|&&n| n < min) {
            return Err(Error::InvalidParameter(format!(
                "{bad} nodes per axis; family needs at least {min}"
            )));
        }
        Ok(BasisSpec {
            family,
            domain,
            nodes_per_axis: nodes_per_axis.to_vec(),
        })
    }

    /// The basis family.
    pub fn family(&self) -> BasisFamily {
        self.family
    }

    /// The expanded computational domain.
    pub fn domain(&self) -> &BoundingBox {
        &self.domain
    }

    /// Spatial dimension (1 or 2).
    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// Basis functions along `axis`.
    pub fn nodes_per_axis(&self, axis: usize) -> usize {
        self.nodes_per_axis[axis]
    }

    /// Lattice cells along `axis` (`nodes - support + 1`).
    pub fn cells(&self, axis: usize) -> usize {
        self.nodes_per_axis[axis] - (self.family.support_cells() - 1)
    }

    /// Lattice spacing along `axis`.
    pub fn spacing(&self, axis: usize) -> f64 {
        self.domain.side(axis) / self.cells(axis) as f64
    }

    /// Total number of basis functions.
    pub fn n_basis(&self) -> usize {
        self.nodes_per_axis.iter().product()
    }
}

/// A constructed basis system: spec plus Gram matrices.
#[derive(Clone, Debug)]
pub struct BasisSystem {
    spec: BasisSpec,
    c: SparseMatrix,
    g: SparseMatrix,
    c_lumped: Vec<f64>,
    db3: Option<Db3Table>,
}

impl BasisSystem {
    /// Assembles per-axis Gram matrices and their tensor products.
    pub fn build(spec: BasisSpec) -> Result<BasisSystem> {
        let mut axes = Vec::with_capacity(spec.dim());
        for ax in 0..spec.dim() {
            let h = spec.spacing(ax);
            let n = spec.nodes_per_axis(ax);
            let pair = match spec.family() {
                BasisFamily::Spline { order } => spline_cg_1d_spacing(order, h, n)?,
                BasisFamily::Db3 => db3_cg_1d_spacing(h, n)?,
            };
            axes.push(pair);
        }
        let (c, g) = tensor_assemble(&axes)?;
        let c_lumped = lump(&c);
        let db3 = matches!(spec.family(), BasisFamily::Db3)
            .then(|| cascade_db3(DEFAULT_CASCADE_LEVEL));
        Ok(BasisSystem {
            spec,
            c,
            g,
            c_lumped,
            db3,
        })
    }

    /// Wraps externally supplied Gram matrices (rescaling experiments and
    /// oracle tests); `evaluate` still uses the geometry in `spec`.
    pub fn from_parts(
        spec: BasisSpec,
        c: SparseMatrix,
        g: SparseMatrix,
        c_lumped: Vec<f64>,
    ) -> Result<BasisSystem> {
        let n = spec.n_basis();
        if c.nrows() != n || c.ncols() != n || g.nrows() != n || g.ncols() != n {
            return Err(Error::ShapeMismatch {
                op: "basis from_parts",
                left_rows: c.nrows(),
                left_cols: c.ncols(),
                right_rows: g.nrows(),
                right_cols: g.ncols(),
            });
        }
        if c_lumped.len() != n {
            return Err(Error::InvalidParameter(format!(
                "lumped diagonal has {} entries for {n} basis functions",
                c_lumped.len()
            )));
        }
        let db3 = matches!(spec.family(), BasisFamily::Db3)
            .then(|| cascade_db3(DEFAULT_CASCADE_LEVEL));
        Ok(BasisSystem {
            spec,
            c,
            g,
            c_lumped,
            db3,
        })
    }

    /// The geometry this system was built from.
    pub fn spec(&self) -> &BasisSpec {
        &self.spec
    }

    /// Mass matrix `C` with `C_{ij} = ⟨ξ_i, ξ_j⟩`.
    pub fn c(&self) -> &SparseMatrix {
        &self.c
    }

    /// Stiffness matrix `G` with `G_{ij} = ⟨∇ξ_i, ∇ξ_j⟩`.
    pub fn g(&self) -> &SparseMatrix {
        &self.g
    }

    /// Mass-lumped diagonal (row sums of `C`).
    pub fn c_lumped(&self) -> &[f64] {
        &self.c_lumped
    }

    /// Total number of basis functions.
    pub fn n_basis(&self) -> usize {
        self.spec.n_basis()
    }

    /// Point-evaluation matrix `B` with `B_{ij} = ξ_j(s_i)`, reusing the
    /// cached DB3 table when the family needs one.
    pub fn evaluate(&self, locations: &Points) -> Result<SparseMatrix> {
        evaluate_with_table(&self.spec, self.db3.as_ref(), locations)
    }
}

/// Mass and stiffness matrices of `nnodes` order-`m` B-spline translates at
/// dyadic spacing `2^{-j}`.
pub fn spline_cg_1d(m: usize, j: i32, nnodes: usize) -> Result<(SparseMatrix, SparseMatrix)> {
    spline_cg_1d_spacing(m, (2f64).powi(-j), nnodes)
}

/// Same as [`spline_cg_1d`] with an arbitrary positive spacing `h`.
pub fn spline_cg_1d_spacing(
    m: usize,
    h: f64,
    nnodes: usize,
) -> Result<(SparseMatrix, SparseMatrix)> {
    BasisFamily::Spline { order: m }.validate()?;
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("spacing {h} must be > 0")));
    }
    if nnodes < m + 2 {
        return Err(Error::InvalidParameter(format!(
            "{nnodes} nodes; order-{m} splines need at least {}",
            m + 2
        )));
    }
    let (c_band, g_band) = spline_band(m);
    Ok((
        banded_toeplitz(nnodes, &c_band, h),
        banded_toeplitz(nnodes, &g_band, 1.0 / h),
    ))
}

/// Mass and stiffness matrices of `nnodes` L²-normalized DB3 translates at
/// dyadic spacing `2^{-j}`: `C = I` and `G_{kl} = 2^{2j} Λ(k-l)`.
pub fn db3_cg_1d(j: i32, nnodes: usize) -> Result<(SparseMatrix, SparseMatrix)> {
    db3_cg_1d_spacing((2f64).powi(-j), nnodes)
}

/// Same as [`db3_cg_1d`] with an arbitrary positive spacing `h`.
pub fn db3_cg_1d_spacing(h: f64, nnodes: usize) -> Result<(SparseMatrix, SparseMatrix)> {
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("spacing {h} must be > 0")));
    }
    if nnodes < 9 {
        return Err(Error::InvalidParameter(format!(
            "{nnodes} nodes; the DB3 band needs at least 9"
        )));
    }
    Ok((
        SparseMatrix::identity(nnodes),
        banded_toeplitz(nnodes, &DB3_LAMBDA, 1.0 / (h * h)),
    ))
}

/// Mass lumping: the diagonal of row sums, `C̃_{ii} = Σ_k C_{ik}`.
pub fn lump(c: &SparseMatrix) -> Vec<f64> {
    c.row_sums()
}

/// Kronecker assembly of per-axis Gram matrices, last axis fastest:
/// `C₂ = Cx ⊗ Cy` and `G₂ = Gx ⊗ Cy + Cx ⊗ Gy`; one axis passes through.
pub fn tensor_assemble(
    axes: &[(SparseMatrix, SparseMatrix)],
) -> Result<(SparseMatrix, SparseMatrix)> {
    match axes {
        [(c, g)] => Ok((c.clone(), g.clone())),
        [(cx, gx), (cy, gy)] => {
            let c2 = kron(cx, cy)?;
            let g2 = kron(gx, cy)?.add(&kron(cx, gy)?)?;
            Ok((c2, g2))
        }
        _ => Err(Error::InvalidParameter(format!(
            "tensor assembly supports 1 or 2 axes, got {}",
            axes.len()
        ))),
    }
}

/// Point-evaluation matrix for a spec without a prebuilt system. DB3 specs
/// build a fresh cascade table at [`DEFAULT_CASCADE_LEVEL`].
pub fn evaluate_basis(spec: &BasisSpec, locations: &Points) -> Result<SparseMatrix> {
    let table =
        matches!(spec.family(), BasisFamily::Db3).then(|| cascade_db3(DEFAULT_CASCADE_LEVEL));
    evaluate_with_table(spec, table.as_ref(), locations)
}

fn evaluate_with_table(
    spec: &BasisSpec,
    table: Option<&Db3Table>,
    locations: &Points,
) -> Result<SparseMatrix> {
    if locations.dim() != spec.dim() {
        return Err(Error::InvalidParameter(format!(
            "{}-dimensional locations for a {}-dimensional basis",
            locations.dim(),
            spec.dim()
        )));
    }
    let d = spec.dim();
    let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
    let mut per_axis: Vec<Vec<(usize, f64)>> = vec![Vec::new(); d];
    for (i, p) in locations.iter().enumerate() {
        for (ax, entries) in per_axis.iter_mut().enumerate() {
            axis_entries(spec, table, ax, p, entries)?;
        }
        match d {
            1 => {
                for &(col, v) in &per_axis[0] {
                    triplets.push((i, col, v));
                }
            }
            2 => {
                let ny = spec.nodes_per_axis(1);
                for &(ix, vx) in &per_axis[0] {
                    for &(iy, vy) in &per_axis[1] {
                        triplets.push((i, ix * ny + iy, vx * vy));
                    }
                }
            }
            _ => unreachable!("dimension validated in BasisSpec::new"),
        }
    }
    SparseMatrix::from_triplets(locations.len(), spec.n_basis(), &triplets)
}

/// Collects the nonzero basis values along one axis at coordinate `p[axis]`,
/// as `(axis-local index, value)` pairs.
fn axis_entries(
    spec: &BasisSpec,
    table: Option<&Db3Table>,
    axis: usize,
    p: &[f64],
    out: &mut Vec<(usize, f64)>,
) -> Result<()> {
    out.clear();
    let cells = spec.cells(axis);
    let h = spec.spacing(axis);
    let mut t = (p[axis] - spec.domain().lo()[axis]) / h;
    let edge_tol = 1e-9 * (cells as f64).max(1.0);
    if t < -edge_tol || t > cells as f64 + edge_tol {
        return Err(Error::LocationOutsideDomain {
            location: p.to_vec(),
            axis,
        });
    }
    t = t.clamp(0.0, cells as f64);
    let cell = (t.floor() as usize).min(cells - 1);
    let width = spec.family().support_cells() - 1;
    for back in 0..=width {
        let k = cell as isize - back as isize; // translate index, from -width
        let local = t - k as f64;
        let v = match spec.family() {
            BasisFamily::Spline { order } => bspline_value(order, local),
            BasisFamily::Db3 => {
                let table = table.expect("DB3 evaluation needs a cascade table");
                table.eval(local) / h.sqrt()
            }
        };
        if v != 0.0 {
            out.push(((k + width as isize) as usize, v));
        }
    }
    out.sort_unstable_by_key(|&(i, _)| i);
    Ok(())
}

/// Cardinal B-spline `N_m` by Cox–de Boor recursion; support `(0, m+1)`.
pub fn bspline_value(m: usize, t: f64) -> f64 {
    if m == 0 {
        // Half-open box so that knot values recurse correctly (N₁(1) = 1).
        return if (0.0..1.0).contains(&t) { 1.0 } else { 0.0 };
    }
    if t <= 0.0 || t >= (m + 1) as f64 {
        return 0.0;
    }
    let mf = m as f64;
    (t / mf) * bspline_value(m - 1, t) + ((mf + 1.0 - t) / mf) * bspline_value(m - 1, t - 1.0)
}

/// Derivative `N_m'(t) = N_{m-1}(t) - N_{m-1}(t-1)`; needs `m ≥ 1`.
pub fn bspline_derivative(m: usize, t: f64) -> f64 {
    assert!(m >= 1, "derivative band needs order >= 1");
    bspline_value(m - 1, t) - bspline_value(m - 1, t - 1.0)
}

/// Band values `c(δ) = ∫ N_m(t) N_m(t-δ) dt` and `g(δ) = ∫ N_m' N_m'(·-δ)`,
/// by Gauss–Legendre per unit cell, exact for the polynomial integrands
/// (degree ≤ 2m needs m+1 points).
fn spline_band(m: usize) -> (Vec<f64>, Vec<f64>) {
    let (nodes, weights) = gauss_legendre(m + 1);
    let mut c = vec![0.0; m + 1];
    let mut g = vec![0.0; m + 1];
    for delta in 0..=m {
        let df = delta as f64;
        for cell in delta..=m {
            let mid = cell as f64 + 0.5;
            for (&x, &w) in nodes.iter().zip(weights) {
                let t = mid + 0.5 * x;
                c[delta] += 0.5 * w * bspline_value(m, t) * bspline_value(m, t - df);
                g[delta] += 0.5 * w * bspline_derivative(m, t) * bspline_derivative(m, t - df);
            }
        }
    }
    (c, g)
}

/// Symmetric banded Toeplitz matrix `A_{kl} = scale · band[|k-l|]`.
fn banded_toeplitz(n: usize, band: &[f64], scale: f64) -> SparseMatrix {
    let half = band.len() - 1;
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    row_ptr.push(0);
    for k in 0..n {
        let lo = k.saturating_sub(half);
        let hi = (k + half).min(n - 1);
        for l in lo..=hi {
            cols.push(l);
            vals.push(band[k.abs_diff(l)] * scale);
        }
        row_ptr.push(cols.len());
    }
    SparseMatrix::from_csr(n, n, row_ptr, cols, vals)
}

fn gauss_legendre(points: usize) -> (&'static [f64], &'static [f64]) {
    const N2: [f64; 2] = [-0.577_350_269_189_625_8, 0.577_350_269_189_625_8];
    const W2: [f64; 2] = [1.0, 1.0];
    const N3: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
    const W3: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
    const N4: [f64; 4] = [
        -0.861_136_311_594_052_6,
        -0.339_981_043_584_856_26,
        0.339_981_043_584_856_26,
        0.861_136_311_594_052_6,
    ];
    const W4: [f64; 4] = [
        0.347_854_845_137_453_85,
        0.652_145_154_862_546_2,
        0.652_145_154_862_546_2,
        0.347_854_845_137_453_85,
    ];
    match points {
        2 => (&N2, &W2),
        3 => (&N3, &W3),
        4 => (&N4, &W4),
        _ => unreachable!("spline orders 1..=3 need 2..=4 quadrature points"),
    }
}

/// Two-scale coefficients `p_0..p_5` of the DB3 scaling function
/// (`φ(t) = Σ p_k φ(2t - k)`, `Σ p_k = 2`).
pub fn db3_scaling_coeffs() -> [f64; 6] {
    let s10 = 10f64.sqrt();
    let s = (5.0 + 2.0 * s10).sqrt();
    [
        (1.0 + s10 + s) / 16.0,
        (5.0 + s10 + 3.0 * s) / 16.0,
        (10.0 - 2.0 * s10 + 2.0 * s) / 16.0,
        (10.0 - 2.0 * s10 - 2.0 * s) / 16.0,
        (5.0 + s10 - 3.0 * s) / 16.0,
        (1.0 + s10 - s) / 16.0,
    ]
}

/// Dyadic value table of the DB3 scaling function: `φ(k·2^{-L})` for
/// `k = 0..=5·2^L`.
#[derive(Clone, Debug)]
pub struct Db3Table {
    values: Vec<f64>,
    level: u32,
}

impl Db3Table {
    /// Dyadic refinement level `L`.
    pub fn level(&self) -> u32 {
        self.level
    }

    /// Table values at `k·2^{-L}`, `k = 0..=5·2^L`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `φ(t)` by linear interpolation on the table; zero outside `(0, 5)`.
    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 || t >= DB3_SUPPORT {
            return 0.0;
        }
        let x = t * (1u64 << self.level) as f64;
        let i = x.floor() as usize;
        if i + 1 >= self.values.len() {
            return *self.values.last().expect("non-empty table");
        }
        let frac = x - i as f64;
        self.values[i] + frac * (self.values[i + 1] - self.values[i])
    }
}

/// Cascade algorithm: exact `φ` values on the dyadic grid `2^{-levels}`.
///
/// The values at integers solve the eigenproblem the two-scale relation
/// induces there (normalized so `Σ_k φ(k) = 1`); each refinement then fills
/// odd multiples of the next dyadic step through the two-scale relation, so
/// every table value is exact up to rounding.
pub fn cascade_db3(levels: u32) -> Db3Table {
    let p = db3_scaling_coeffs();
    // phi(i) = sum_k p_k phi(2i - k) for i = 1..=4, phi(0) = phi(5) = 0:
    // rows of (M - I) with the last replaced by the normalization sum.
    let mut a = DenseMatrix::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            let k = 2 * (i as isize) - (j as isize) + 1;
            if (0..6).contains(&k) {
                a[(i, j)] = p[k as usize];
            }
            if i == j {
                a[(i, j)] -= 1.0;
            }
        }
    }
    for j in 0..4 {
        a[(3, j)] = 1.0;
    }
    let v = a
        .lu_solve(&[0.0, 0.0, 0.0, 1.0])
        .expect("two-scale system is nonsingular");
    let mut values = vec![0.0, v[0], v[1], v[2], v[3], 0.0];
    for level in 1..=levels {
        let stride = 1isize << (level - 1);
        let old = values;
        let mut next = vec![0.0; 5 * (1usize << level) + 1];
        for (j, slot) in next.iter_mut().enumerate() {
            if j % 2 == 0 {
                *slot = old[j / 2];
            } else {
                let mut s = 0.0;
                for (k, &pk) in p.iter().enumerate() {
                    let idx = j as isize - k as isize * stride;
                    if idx >= 0 && (idx as usize) < old.len() {
                        s += pk * old[idx as usize];
                    }
                }
                *slot = s;
            }
        }
        values = next;
    }
    Db3Table { values, level: levels }
}

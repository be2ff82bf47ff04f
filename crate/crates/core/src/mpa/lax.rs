//! Site-dependent Lax operators on a truncated auxiliary space.
//!
//! Every Lax operator is upper bidiagonal in the auxiliary index: the block at
//! `(j, j)` and the block at `(j, j + 1)` are the only nonzero ones, each a
//! 2×2 matrix on the physical qubit. The physical blocks depend on the site
//! `n` and the auxiliary row `j` only through `n - 2j`.

use crate::error::{NessError, Result};
use crate::linalg::{ipow, Mat2, C64, ONE, ZERO};
use crate::params::CircuitParams;

/// `A^[n] = [[1, -q^{-n}/zeta], [q^n zeta, -1]]`, the rank-one outer product
/// `(1, q^n zeta)^T (1, -q^{-n}/zeta)`.
pub fn site_matrix_a(n: i64, q: C64, zeta: C64) -> Result<Mat2> {
    if !zeta.re.is_finite() || !zeta.im.is_finite() || zeta.norm() < 1e-300 {
        return Err(NessError::ZeroStereoCoord);
    }
    let qn = ipow(q, n);
    Ok(Mat2::new(ONE, -qn.inv() / zeta, qn * zeta, -ONE))
}

/// `D = diag(lambda, 1)`.
pub fn d_matrix(lambda: C64) -> Mat2 {
    Mat2::new(lambda, ZERO, ZERO, ONE)
}

/// `E = diag(1, lambda)`.
pub fn e_matrix(lambda: C64) -> Mat2 {
    Mat2::new(ONE, ZERO, ZERO, lambda)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LaxKind {
    Plus,
    Minus,
    PlusStar,
    MinusStar,
}

/// Sign of a double (two-replica) Lax operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    fn kinds(self) -> (LaxKind, LaxKind) {
        match self {
            Sign::Plus => (LaxKind::Plus, LaxKind::PlusStar),
            Sign::Minus => (LaxKind::Minus, LaxKind::MinusStar),
        }
    }
}

/// A single-replica Lax operator truncated to `dim` auxiliary states.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteLax {
    pub site: i64,
    pub kind: LaxKind,
    pub dim: usize,
    /// Block at `(j, j)`.
    pub diag: Vec<Mat2>,
    /// Block at `(j, j + 1)`, `j + 1 < dim`.
    pub upper: Vec<Mat2>,
}

impl SiteLax {
    /// Block at auxiliary position `(j_out, j_in)`, `None` outside the band.
    pub fn block(&self, j_out: usize, j_in: usize) -> Option<&Mat2> {
        if j_in == j_out {
            self.diag.get(j_out)
        } else if j_in == j_out + 1 {
            self.upper.get(j_out)
        } else {
            None
        }
    }

    /// Dense auxiliary matrix of physical blocks, `None` marking structural zeros.
    pub fn band_pattern(&self) -> Vec<Vec<bool>> {
        (0..self.dim)
            .map(|r| (0..self.dim).map(|col| self.block(r, col).is_some()).collect())
            .collect()
    }
}

/// Build a Lax operator from raw parameters. The starred kinds use the
/// numeric conjugate transpose of the concrete `A`, `D`, `E` blocks.
pub fn build_lax_raw(kind: LaxKind, site: i64, q: C64, lambda: C64, zeta: C64, dim: usize) -> Result<SiteLax> {
    if dim == 0 {
        return Err(NessError::InvalidParams("auxiliary dimension must be positive".into()));
    }
    let d = d_matrix(lambda);
    let e = e_matrix(lambda);
    let mut diag = Vec::with_capacity(dim);
    let mut upper = Vec::with_capacity(dim.saturating_sub(1));
    for j in 0..dim {
        let a = site_matrix_a(site - 2 * j as i64, q, zeta)?;
        let (on, off) = match kind {
            LaxKind::Plus => (a * d, a * e),
            LaxKind::Minus => (e * a, d * a),
            LaxKind::PlusStar => (d.adjoint() * a.adjoint(), e.adjoint() * a.adjoint()),
            LaxKind::MinusStar => (a.adjoint() * e.adjoint(), a.adjoint() * d.adjoint()),
        };
        diag.push(on);
        if j + 1 < dim {
            upper.push(off);
        }
    }
    Ok(SiteLax {
        site,
        kind,
        dim,
        diag,
        upper,
    })
}

pub fn build_lax(kind: LaxKind, site: i64, params: &CircuitParams, dim: usize) -> Result<SiteLax> {
    build_lax_raw(kind, site, params.q(), params.lambda(), params.z(), dim)
}

/// Product `L^s_a L^{s*}_b` over the shared physical index.
///
/// `blocks[da][db][j * dim + jp]` holds the physical block connecting
/// `(j, jp)` to `(j + da, jp + db)`; entries leaving the truncated space are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubleLax {
    pub site: i64,
    pub sign: Sign,
    pub dim: usize,
    pub blocks: [[Vec<Mat2>; 2]; 2],
}

impl DoubleLax {
    pub fn from_replicas(sign: Sign, a: &SiteLax, b: &SiteLax) -> Self {
        assert_eq!(a.dim, b.dim, "replica dimensions differ");
        let dim = a.dim;
        let mut blocks: [[Vec<Mat2>; 2]; 2] = Default::default();
        for (da, row) in blocks.iter_mut().enumerate() {
            for (db, slot) in row.iter_mut().enumerate() {
                *slot = (0..dim * dim)
                    .map(|idx| {
                        let (j, jp) = (idx / dim, idx % dim);
                        match (a.block(j, j + da), b.block(jp, jp + db)) {
                            (Some(x), Some(y)) => x * y,
                            _ => Mat2::zeros(),
                        }
                    })
                    .collect();
            }
        }
        Self {
            site: a.site,
            sign,
            dim,
            blocks,
        }
    }

    /// Physical block from `(j, jp)` to `(k, kp)`.
    pub fn block(&self, j: usize, jp: usize, k: usize, kp: usize) -> Mat2 {
        let (da, db) = (k.wrapping_sub(j), kp.wrapping_sub(jp));
        if da > 1 || db > 1 || j >= self.dim || jp >= self.dim || k >= self.dim || kp >= self.dim {
            return Mat2::zeros();
        }
        self.blocks[da][db][j * self.dim + jp]
    }
}

pub fn build_double_lax_raw(sign: Sign, site: i64, q: C64, lambda: C64, zeta: C64, dim: usize) -> Result<DoubleLax> {
    let (ka, kb) = sign.kinds();
    let a = build_lax_raw(ka, site, q, lambda, zeta, dim)?;
    let b = build_lax_raw(kb, site, q, lambda, zeta, dim)?;
    Ok(DoubleLax::from_replicas(sign, &a, &b))
}

pub fn build_double_lax(sign: Sign, site: i64, params: &CircuitParams, dim: usize) -> Result<DoubleLax> {
    build_double_lax_raw(sign, site, params.q(), params.lambda(), params.z(), dim)
}

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::basis::{Basis, BasisKind};
use crate::error::{LabError, Result};

/// How sine synthesis/analysis is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformPath {
    /// DST-I through a complex FFT of length `2G`.
    #[default]
    Fast,
    /// Dense `O(N G)` sums against a tabulated sine matrix.
    Direct,
}

/// Scratch space for one thread's transforms.
#[derive(Debug, Clone, Default)]
pub struct TransformBuffer {
    data: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

/// Interior collocation nodes `s_j = j / G`, `j = 1..G-1`, for the Dirichlet
/// sine basis.
#[derive(Clone)]
pub struct SineGrid {
    modes: usize,
    points: usize,
    path: TransformPath,
    fft: Option<Arc<dyn Fft<f64>>>,
    // row k holds sin((k+1) pi j / G) for j = 1..G-1
    table: Vec<f64>,
}

impl fmt::Debug for SineGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SineGrid")
            .field("modes", &self.modes)
            .field("points", &self.points)
            .field("path", &self.path)
            .finish()
    }
}

impl SineGrid {
    /// `points` is `G`; the grid carries `G - 1` interior nodes and resolves
    /// modes up to `G - 1` exactly.
    pub fn new(modes: usize, points: usize, path: TransformPath) -> Result<Self> {
        if points < 2 || modes >= points {
            return Err(LabError::config(
                "collocation_grid",
                format!("{points} grid intervals cannot resolve {modes} sine modes"),
            ));
        }
        let (fft, table) = match path {
            TransformPath::Fast => (Some(FftPlanner::new().plan_fft_forward(2 * points)), Vec::new()),
            TransformPath::Direct => {
                let g = points as f64;
                let mut table = Vec::with_capacity(modes * (points - 1));
                for k in 1..=modes {
                    for j in 1..points {
                        table.push((PI * ((k * j) % (2 * points)) as f64 / g).sin());
                    }
                }
                (None, table)
            }
        };
        Ok(Self {
            modes,
            points,
            path,
            fft,
            table,
        })
    }

    /// Grid with the default `4 N` intervals.
    pub fn with_default_size(modes: usize, path: TransformPath) -> Result<Self> {
        Self::new(modes, (4 * modes).max(2), path)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn path(&self) -> TransformPath {
        self.path
    }

    /// Number of interior nodes.
    pub fn node_count(&self) -> usize {
        self.points - 1
    }

    pub fn nodes(&self) -> Vec<f64> {
        (1..self.points).map(|j| j as f64 / self.points as f64).collect()
    }

    pub fn buffer(&self) -> TransformBuffer {
        match &self.fft {
            Some(fft) => TransformBuffer {
                data: vec![Complex64::default(); 2 * self.points],
                scratch: vec![Complex64::default(); fft.get_inplace_scratch_len()],
            },
            None => TransformBuffer::default(),
        }
    }

    /// `out_j = Σ_k in_k sin(k pi j / G)` over `j = 1..G-1` with `in` indexed
    /// from `k = 1`. Used in both directions.
    fn dst(&self, input: &[f64], out: &mut [f64], buf: &mut TransformBuffer) {
        let fft = self.fft.as_ref().expect("fast path");
        let g = self.points;
        if buf.data.len() != 2 * g {
            *buf = self.buffer();
        }
        let data = &mut buf.data;
        data.fill(Complex64::default());
        for (k, &c) in input.iter().enumerate() {
            data[k + 1].re = c;
            data[2 * g - k - 1].re = -c;
        }
        fft.process_with_scratch(data, &mut buf.scratch);
        for (j, o) in out.iter_mut().enumerate() {
            *o = -0.5 * data[j + 1].im;
        }
    }

    /// Values at the interior nodes of `Σ_k c_k e_k`; `c` may be shorter than
    /// `modes`.
    pub fn synthesize(&self, c: &[f64], values: &mut [f64], buf: &mut TransformBuffer) {
        debug_assert!(c.len() <= self.modes && values.len() == self.points - 1);
        match self.path {
            TransformPath::Fast => {
                self.dst(c, values, buf);
                values.iter_mut().for_each(|v| *v *= SQRT_2);
            }
            TransformPath::Direct => {
                values.fill(0.0);
                let row_len = self.points - 1;
                for (k, &ck) in c.iter().enumerate() {
                    if ck == 0.0 {
                        continue;
                    }
                    let row = &self.table[k * row_len..(k + 1) * row_len];
                    for (v, s) in values.iter_mut().zip(row) {
                        *v += ck * s;
                    }
                }
                values.iter_mut().for_each(|v| *v *= SQRT_2);
            }
        }
    }

    /// Discrete projection onto the first `c.len()` sine modes.
    pub fn analyze(&self, values: &[f64], c: &mut [f64], buf: &mut TransformBuffer) {
        debug_assert!(c.len() <= self.modes && values.len() == self.points - 1);
        let scale = SQRT_2 / self.points as f64;
        match self.path {
            TransformPath::Fast => {
                // DST-I of the nodal values, read off the first c.len() outputs
                let fft = self.fft.as_ref().expect("fast path");
                let g = self.points;
                if buf.data.len() != 2 * g {
                    *buf = self.buffer();
                }
                let data = &mut buf.data;
                data.fill(Complex64::default());
                for (j, &v) in values.iter().enumerate() {
                    data[j + 1].re = v;
                    data[2 * g - j - 1].re = -v;
                }
                fft.process_with_scratch(data, &mut buf.scratch);
                for (k, ck) in c.iter_mut().enumerate() {
                    *ck = -0.5 * scale * data[k + 1].im;
                }
            }
            TransformPath::Direct => {
                let row_len = self.points - 1;
                for (k, ck) in c.iter_mut().enumerate() {
                    let row = &self.table[k * row_len..(k + 1) * row_len];
                    *ck = scale * row.iter().zip(values).map(|(s, v)| s * v).sum::<f64>();
                }
            }
        }
    }
}

/// Equispaced nodes `x_j = -L + 2 L j / G` on the torus `[-L, L)`, with direct
/// transforms against the real Fourier basis.
#[derive(Debug, Clone)]
pub struct FourierGrid {
    basis: Basis,
    points: usize,
    half_length: f64,
    // row i holds e_i(x_j)
    table: Vec<f64>,
}

impl FourierGrid {
    pub fn new(basis: Basis, points: usize) -> Result<Self> {
        let half_length = match basis.kind() {
            BasisKind::FourierTorus { half_length } => half_length,
            BasisKind::DirichletSine => {
                return Err(LabError::IncompatibleSpaces(
                    "Fourier collocation needs a torus basis".into(),
                ))
            }
        };
        if points <= 2 * basis.cutoff() {
            return Err(LabError::config(
                "collocation_grid",
                format!("{points} torus nodes cannot resolve cutoff {}", basis.cutoff()),
            ));
        }
        let nodes: Vec<f64> = (0..points)
            .map(|j| -half_length + 2.0 * half_length * j as f64 / points as f64)
            .collect();
        let mut table = Vec::with_capacity(basis.len() * points);
        for i in 0..basis.len() {
            table.extend(nodes.iter().map(|&x| basis.eval(i, x)));
        }
        Ok(Self {
            basis,
            points,
            half_length,
            table,
        })
    }

    pub fn with_default_size(basis: Basis) -> Result<Self> {
        Self::new(basis, (4 * basis.cutoff()).max(2 * basis.cutoff() + 1))
    }

    pub fn node_count(&self) -> usize {
        self.points
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points)
            .map(|j| -self.half_length + 2.0 * self.half_length * j as f64 / self.points as f64)
            .collect()
    }

    pub fn synthesize(&self, c: &[f64], values: &mut [f64]) {
        values.fill(0.0);
        for (i, &ci) in c.iter().enumerate() {
            if ci == 0.0 {
                continue;
            }
            let row = &self.table[i * self.points..(i + 1) * self.points];
            for (v, e) in values.iter_mut().zip(row) {
                *v += ci * e;
            }
        }
    }

    pub fn analyze(&self, values: &[f64], c: &mut [f64]) {
        let w = 2.0 * self.half_length / self.points as f64;
        for (i, ci) in c.iter_mut().enumerate() {
            let row = &self.table[i * self.points..(i + 1) * self.points];
            *ci = w * row.iter().zip(values).map(|(e, v)| e * v).sum::<f64>();
        }
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }
}

/// A collocation grid for pointwise products in either basis family.
#[derive(Debug, Clone)]
pub enum Collocation {
    Sine(SineGrid),
    Fourier(FourierGrid),
}

impl Collocation {
    /// Default grid (4× the truncation) for `basis`.
    pub fn for_basis(basis: &Basis, path: TransformPath) -> Result<Self> {
        match basis.kind() {
            BasisKind::DirichletSine => Ok(Self::Sine(SineGrid::with_default_size(basis.len(), path)?)),
            BasisKind::FourierTorus { .. } => Ok(Self::Fourier(FourierGrid::with_default_size(*basis)?)),
        }
    }

    /// Grid with an explicit node parameter (`G` intervals for sines, `G`
    /// nodes on the torus).
    pub fn with_size(basis: &Basis, points: usize, path: TransformPath) -> Result<Self> {
        match basis.kind() {
            BasisKind::DirichletSine => Ok(Self::Sine(SineGrid::new(basis.len(), points, path)?)),
            BasisKind::FourierTorus { .. } => Ok(Self::Fourier(FourierGrid::new(*basis, points)?)),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Self::Sine(g) => g.node_count(),
            Self::Fourier(g) => g.node_count(),
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        match self {
            Self::Sine(g) => g.nodes(),
            Self::Fourier(g) => g.nodes(),
        }
    }

    pub fn buffer(&self) -> TransformBuffer {
        match self {
            Self::Sine(g) => g.buffer(),
            Self::Fourier(_) => TransformBuffer::default(),
        }
    }

    pub fn synthesize(&self, c: &[f64], values: &mut [f64], buf: &mut TransformBuffer) {
        match self {
            Self::Sine(g) => g.synthesize(c, values, buf),
            Self::Fourier(g) => g.synthesize(c, values),
        }
    }

    pub fn analyze(&self, values: &[f64], c: &mut [f64], buf: &mut TransformBuffer) {
        match self {
            Self::Sine(g) => g.analyze(values, c, buf),
            Self::Fourier(g) => g.analyze(values, c),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn roundtrip(grid: &Collocation, c: &[f64]) -> Vec<f64> {
        let mut buf = grid.buffer();
        let mut v = vec![0.0; grid.node_count()];
        grid.synthesize(c, &mut v, &mut buf);
        let mut back = vec![0.0; c.len()];
        grid.analyze(&v, &mut back, &mut buf);
        back
    }

    #[test]
    fn fast_matches_basis_evaluation() {
        let grid = SineGrid::new(5, 16, TransformPath::Fast).unwrap();
        let basis = Basis::dirichlet_sine(5);
        let c = [0.3, -1.0, 0.0, 2.0, 0.5];
        let mut v = vec![0.0; 15];
        grid.synthesize(&c, &mut v, &mut grid.buffer());
        for (s, vj) in grid.nodes().iter().zip(&v) {
            let direct: f64 = (0..5).map(|i| c[i] * basis.eval(i, *s)).sum();
            assert!((direct - vj).abs() < 1e-13);
        }
    }

    #[test]
    fn grid_too_small_is_config_error() {
        assert!(matches!(
            SineGrid::new(8, 8, TransformPath::Fast),
            Err(LabError::Config { .. })
        ));
        let basis = Basis::fourier_torus(1.0, 4);
        assert!(FourierGrid::new(basis, 8).is_err());
    }

    proptest! {
        #[test]
        fn sine_roundtrip_identity(c in prop::collection::vec(-5.0f64..5.0, 1..48),
                                   direct in any::<bool>()) {
            let path = if direct { TransformPath::Direct } else { TransformPath::Fast };
            let grid = Collocation::Sine(SineGrid::with_default_size(c.len(), path).unwrap());
            let back = roundtrip(&grid, &c);
            let scale = c.iter().map(|x| x.abs()).fold(1e-300, f64::max);
            for (a, b) in c.iter().zip(&back) {
                prop_assert!((a - b).abs() <= 1e-12 * scale);
            }
        }

        #[test]
        fn fast_and_direct_agree(c in prop::collection::vec(-5.0f64..5.0, 1..40)) {
            let fast = SineGrid::with_default_size(c.len(), TransformPath::Fast).unwrap();
            let direct = SineGrid::with_default_size(c.len(), TransformPath::Direct).unwrap();
            let mut a = vec![0.0; fast.node_count()];
            let mut b = a.clone();
            fast.synthesize(&c, &mut a, &mut fast.buffer());
            direct.synthesize(&c, &mut b, &mut direct.buffer());
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-11);
            }
        }

        #[test]
        fn torus_roundtrip_identity(cutoff in 1usize..12, seed in prop::collection::vec(-2.0f64..2.0, 25)) {
            let basis = Basis::fourier_torus(3.0, cutoff);
            let c: Vec<f64> = seed.iter().take(basis.len()).copied().collect();
            let grid = Collocation::for_basis(&basis, TransformPath::Direct).unwrap();
            let back = roundtrip(&grid, &c);
            for (a, b) in c.iter().zip(&back) {
                prop_assert!((a - b).abs() <= 1e-12 * 2.0);
            }
        }
    }
}

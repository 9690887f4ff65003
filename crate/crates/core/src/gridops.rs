//! Staggered (MAC) grid layout, one-dimensional difference stencils, the
//! Neumann Laplacian, ghost-cell extension and the sixth-order transfer
//! between cell centers and faces.
//!
//! Storage is x-fastest: entry `(i, j)` of a field with `nx` columns sits at
//! `i + nx * j`. In one dimension every field has `ny == 1`.

use thiserror::Error;

/// Ghost depth carried by every padded array.
pub const GHOST: usize = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("grid needs M >= {min} cells per axis, got {m}")]
    TooFewCells { m: usize, min: usize },
    #[error("dimension must be 1 or 2, got {0}")]
    BadDimension(usize),
    #[error("shape mismatch: expected {expected:?}, got {got:?}")]
    Shape {
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("axis {0:?} is not active in a one-dimensional grid")]
    InactiveAxis(Axis),
    #[error("stencil needs {needed} ghost layers, input carries {have}")]
    InsufficientGhosts { needed: usize, have: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
        }
    }

    pub fn other(self) -> Axis {
        match self {
            Axis::X => Axis::Y,
            Axis::Y => Axis::X,
        }
    }
}

/// Uniform grid on the unit interval or unit square with `m` cells per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub dim: usize,
    pub m: usize,
    pub h: f64,
}

impl GridSpec {
    pub fn new(dim: usize, m: usize) -> Result<Self, GridError> {
        if dim != 1 && dim != 2 {
            return Err(GridError::BadDimension(dim));
        }
        if m < 4 {
            return Err(GridError::TooFewCells { m, min: 4 });
        }
        Ok(Self {
            dim,
            m,
            h: 1.0 / m as f64,
        })
    }

    pub fn axes(&self) -> &'static [Axis] {
        if self.dim == 1 {
            &[Axis::X]
        } else {
            &[Axis::X, Axis::Y]
        }
    }

    pub fn is_active(&self, axis: Axis) -> bool {
        self.dim == 2 || axis == Axis::X
    }

    /// Shape `(nx, ny)` of cell-centered fields.
    pub fn cell_shape(&self) -> (usize, usize) {
        if self.dim == 1 {
            (self.m, 1)
        } else {
            (self.m, self.m)
        }
    }

    /// Shape of the interior face field normal to `axis`.
    pub fn face_shape(&self, axis: Axis) -> (usize, usize) {
        match (self.dim, axis) {
            (1, _) => (self.m - 1, 1),
            (_, Axis::X) => (self.m - 1, self.m),
            (_, Axis::Y) => (self.m, self.m - 1),
        }
    }

    pub fn n_cells(&self) -> usize {
        let (a, b) = self.cell_shape();
        a * b
    }

    pub fn n_faces(&self, axis: Axis) -> usize {
        let (a, b) = self.face_shape(axis);
        a * b
    }

    /// Coordinate of cell center `i` (0-based).
    pub fn center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.h
    }

    /// Coordinate of interior face `k` (0-based, walls excluded).
    pub fn face(&self, k: usize) -> f64 {
        (k as f64 + 1.0) * self.h
    }

    /// Volume element `h^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }

    fn locs(&self, staggered: Option<Axis>) -> [Loc; 2] {
        let mut locs = [Loc::Cell, if self.dim == 1 { Loc::Flat } else { Loc::Cell }];
        if let Some(a) = staggered {
            locs[a.index()] = Loc::Face;
        }
        locs
    }

    /// Sample locations of cell fields.
    pub fn cell_locs(&self) -> [Loc; 2] {
        self.locs(None)
    }

    /// Sample locations of the face field normal to `axis`.
    pub fn face_locs(&self, axis: Axis) -> [Loc; 2] {
        self.locs(Some(axis))
    }
}

/// Dense 2D array in x-fastest order.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub nx: usize,
    pub ny: usize,
    pub data: Vec<f64>,
}

impl Field {
    pub fn zeros(nx: usize, ny: usize) -> Self {
        Self {
            nx,
            ny,
            data: vec![0.0; nx * ny],
        }
    }

    pub fn from_fn(nx: usize, ny: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                data.push(f(i, j));
            }
        }
        Self { nx, ny, data }
    }

    pub fn from_vec(nx: usize, ny: usize, data: Vec<f64>) -> Result<Self, GridError> {
        if data.len() != nx * ny {
            return Err(GridError::Shape {
                expected: (nx, ny),
                got: (data.len(), 1),
            });
        }
        Ok(Self { nx, ny, data })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i + self.nx * j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i + self.nx * j] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.data[i + self.nx * j] += v;
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field {
            nx: self.nx,
            ny: self.ny,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Field {
        debug_assert_eq!(self.shape(), other.shape());
        Field {
            nx: self.nx,
            ny: self.ny,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn axpy(&mut self, a: f64, x: &Field) {
        debug_assert_eq!(self.shape(), x.shape());
        for (s, &v) in self.data.iter_mut().zip(&x.data) {
            *s += a * v;
        }
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn extent(&self, axis: Axis) -> usize {
        match axis {
            Axis::X => self.nx,
            Axis::Y => self.ny,
        }
    }
}

/// Kind of a sample along one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Loc {
    /// Cell centers `1..=M`, padded to `-2..=M+3`.
    Cell,
    /// Faces `0..=M` (walls at both ends), padded to `-3..=M+3`.
    Face,
    /// Degenerate axis of a one-dimensional grid.
    Flat,
}

impl Loc {
    pub fn lo(self) -> isize {
        match self {
            Loc::Cell => 1 - GHOST as isize,
            Loc::Face => -(GHOST as isize),
            Loc::Flat => 0,
        }
    }

    pub fn hi(self, m: usize) -> isize {
        match self {
            Loc::Cell | Loc::Face => (m + GHOST) as isize,
            Loc::Flat => 0,
        }
    }

    pub fn padded_len(self, m: usize) -> usize {
        (self.hi(m) - self.lo() + 1) as usize
    }

    /// Range of stored interior samples (walls excluded).
    pub fn interior(self, m: usize) -> std::ops::RangeInclusive<isize> {
        match self {
            Loc::Cell => 1..=m as isize,
            Loc::Face => 1..=m as isize - 1,
            Loc::Flat => 0..=0,
        }
    }

    /// Range of samples owned by the domain, walls included.
    pub fn owned(self, m: usize) -> std::ops::RangeInclusive<isize> {
        match self {
            Loc::Cell => 1..=m as isize,
            Loc::Face => 0..=m as isize,
            Loc::Flat => 0..=0,
        }
    }

    pub fn full(self, m: usize) -> std::ops::RangeInclusive<isize> {
        self.lo()..=self.hi(m)
    }

    /// Logical index of 0-based interior position `k`.
    pub fn logical(self, k: usize) -> isize {
        match self {
            Loc::Cell | Loc::Face => k as isize + 1,
            Loc::Flat => 0,
        }
    }

    /// Number of interior samples.
    pub fn interior_len(self, m: usize) -> usize {
        match self {
            Loc::Cell => m,
            Loc::Face => m - 1,
            Loc::Flat => 1,
        }
    }
}

/// Reflection parity across walls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    pub fn times(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Field with `GHOST` extra layers on every active side, addressed by logical
/// indices (cells start at 1, faces at 0).
#[derive(Debug, Clone, PartialEq)]
pub struct Padded {
    pub m: usize,
    pub loc: [Loc; 2],
    nx: usize,
    lo: [isize; 2],
    pub data: Vec<f64>,
}

impl Padded {
    pub fn zeros(m: usize, loc: [Loc; 2]) -> Self {
        let nx = loc[0].padded_len(m);
        let ny = loc[1].padded_len(m);
        Self {
            m,
            loc,
            nx,
            lo: [loc[0].lo(), loc[1].lo()],
            data: vec![0.0; nx * ny],
        }
    }

    /// Copies the interior of `f`; walls and ghosts start at zero.
    pub fn from_field(f: &Field, m: usize, loc: [Loc; 2]) -> Result<Self, GridError> {
        let expect = (loc[0].interior_len(m), loc[1].interior_len(m));
        if f.shape() != expect {
            return Err(GridError::Shape {
                expected: expect,
                got: f.shape(),
            });
        }
        let mut p = Self::zeros(m, loc);
        for j in 0..f.ny {
            for i in 0..f.nx {
                p.set(loc[0].logical(i), loc[1].logical(j), f.get(i, j));
            }
        }
        Ok(p)
    }

    /// Ghost-extended copy of an interior field.
    pub fn extended(
        f: &Field,
        m: usize,
        loc: [Loc; 2],
        parity: [Parity; 2],
    ) -> Result<Self, GridError> {
        let mut p = Self::from_field(f, m, loc)?;
        p.fill_ghosts(parity);
        Ok(p)
    }

    /// Builds a padded array by evaluating `f` over the owned range; ghosts
    /// are left at zero.
    pub fn from_owned(m: usize, loc: [Loc; 2], mut f: impl FnMut(isize, isize) -> f64) -> Self {
        let mut p = Self::zeros(m, loc);
        for j in loc[1].owned(m) {
            for i in loc[0].owned(m) {
                p.set(i, j, f(i, j));
            }
        }
        p
    }

    #[inline]
    fn idx(&self, i: isize, j: isize) -> usize {
        (i - self.lo[0]) as usize + self.nx * (j - self.lo[1]) as usize
    }

    #[inline]
    pub fn at(&self, i: isize, j: isize) -> f64 {
        self.data[self.idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: isize, j: isize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    /// Sample at offset `d` from `(i, j)` along `axis`.
    #[inline]
    pub fn along(&self, axis: Axis, i: isize, j: isize, d: isize) -> f64 {
        match axis {
            Axis::X => self.at(i + d, j),
            Axis::Y => self.at(i, j + d),
        }
    }

    pub fn ghosts(&self) -> usize {
        GHOST
    }

    /// Interior samples as a plain field.
    pub fn interior(&self) -> Field {
        let (lx, ly) = (self.loc[0], self.loc[1]);
        Field::from_fn(lx.interior_len(self.m), ly.interior_len(self.m), |i, j| {
            self.at(lx.logical(i), ly.logical(j))
        })
    }

    /// Pointwise map, ghosts included.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Padded {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v = f(*v));
        out
    }

    pub fn zip_map(&self, other: &Padded, f: impl Fn(f64, f64) -> f64) -> Padded {
        debug_assert_eq!(self.loc, other.loc);
        let mut out = self.clone();
        for (o, &b) in out.data.iter_mut().zip(&other.data) {
            *o = f(*o, b);
        }
        out
    }

    /// Mirror-reflects the owned samples into the ghost layers: x first over
    /// every row, then y over every column, so corner ghosts are consistent.
    /// Odd parity on a face axis also zeroes the wall samples.
    pub fn fill_ghosts(&mut self, parity: [Parity; 2]) {
        let m = self.m as isize;
        for a in 0..2 {
            let loc = self.loc[a];
            if loc == Loc::Flat {
                continue;
            }
            let other = self.loc[1 - a];
            let sign = parity[a].sign();
            for o in other.full(self.m) {
                let pos = |k: isize| if a == 0 { (k, o) } else { (o, k) };
                match loc {
                    Loc::Cell => {
                        for k in 1..=GHOST as isize {
                            let (si, sj) = pos(k);
                            let (gi, gj) = pos(1 - k);
                            let v = self.at(si, sj);
                            self.set(gi, gj, sign * v);
                            let (si, sj) = pos(m + 1 - k);
                            let (gi, gj) = pos(m + k);
                            let v = self.at(si, sj);
                            self.set(gi, gj, sign * v);
                        }
                    }
                    Loc::Face => {
                        if parity[a] == Parity::Odd {
                            let (wi, wj) = pos(0);
                            self.set(wi, wj, 0.0);
                            let (wi, wj) = pos(m);
                            self.set(wi, wj, 0.0);
                        }
                        for k in 1..=GHOST as isize {
                            let (si, sj) = pos(k);
                            let (gi, gj) = pos(-k);
                            let v = self.at(si, sj);
                            self.set(gi, gj, sign * v);
                            let (si, sj) = pos(m - k);
                            let (gi, gj) = pos(m + k);
                            let v = self.at(si, sj);
                            self.set(gi, gj, sign * v);
                        }
                    }
                    Loc::Flat => unreachable!(),
                }
            }
        }
    }
}

/// One-dimensional difference operators. Lengths refer to the input vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdKind {
    /// Centered first difference with symmetric-ghost boundary rows, `n -> n`.
    Center,
    /// Face-to-cell divergence with zero wall values, `n-1 -> n`.
    Dual,
    /// Transpose of `Dual`: cell-to-face negative gradient, `n -> n-1`.
    DualTranspose,
    /// Starred dual with doubled boundary rows, `n-1 -> n`.
    DualStar,
    /// Transpose of `DualStar`, `n -> n-1`.
    DualStarTranspose,
    /// Cell-to-face average, `n -> n-1`.
    Average,
    /// Transpose of `Average`, `n-1 -> n`.
    AverageTranspose,
}

impl FdKind {
    /// Output length for an input of length `n`.
    pub fn out_len(self, n: usize) -> usize {
        match self {
            FdKind::Center => n,
            FdKind::Dual | FdKind::DualStar | FdKind::AverageTranspose => n + 1,
            FdKind::DualTranspose | FdKind::DualStarTranspose | FdKind::Average => n - 1,
        }
    }
}

/// Applies a one-dimensional operator to a vector of samples with spacing `h`.
pub fn apply_fd_line(kind: FdKind, h: f64, x: &[f64], out: &mut [f64]) {
    let n = x.len();
    debug_assert_eq!(out.len(), kind.out_len(n));
    match kind {
        FdKind::Center => {
            let s = 0.5 / h;
            if n == 1 {
                out[0] = 0.0;
                return;
            }
            out[0] = s * (x[1] - x[0]);
            for i in 1..n - 1 {
                out[i] = s * (x[i + 1] - x[i - 1]);
            }
            out[n - 1] = s * (x[n - 1] - x[n - 2]);
        }
        FdKind::Dual | FdKind::DualStar => {
            let w = if kind == FdKind::Dual { 1.0 } else { 2.0 };
            let nm = n + 1;
            out[0] = w * x[0] / h;
            for i in 1..nm - 1 {
                out[i] = (x[i] - x[i - 1]) / h;
            }
            out[nm - 1] = -w * x[n - 1] / h;
        }
        FdKind::DualTranspose | FdKind::DualStarTranspose => {
            let w = if kind == FdKind::DualTranspose { 1.0 } else { 2.0 };
            let nf = n - 1;
            for k in 0..nf {
                let a = if k == 0 { w } else { 1.0 };
                let b = if k == nf - 1 { w } else { 1.0 };
                out[k] = (a * x[k] - b * x[k + 1]) / h;
            }
        }
        FdKind::Average => {
            for k in 0..n - 1 {
                out[k] = 0.5 * (x[k] + x[k + 1]);
            }
        }
        FdKind::AverageTranspose => {
            let nm = n + 1;
            out[0] = 0.5 * x[0];
            for i in 1..nm - 1 {
                out[i] = 0.5 * (x[i - 1] + x[i]);
            }
            out[nm - 1] = 0.5 * x[n - 1];
        }
    }
}

/// Applies `kind` along `axis` of a 2D field. The extent along the other
/// axis is unchanged.
pub fn apply_fd_operator(kind: FdKind, axis: Axis, h: f64, f: &Field) -> Field {
    let n = f.extent(axis);
    let nout = kind.out_len(n);
    let (onx, ony) = match axis {
        Axis::X => (nout, f.ny),
        Axis::Y => (f.nx, nout),
    };
    let mut out = Field::zeros(onx, ony);
    let mut line = vec![0.0; n];
    let mut res = vec![0.0; nout];
    let lines = match axis {
        Axis::X => f.ny,
        Axis::Y => f.nx,
    };
    for o in 0..lines {
        for (k, l) in line.iter_mut().enumerate() {
            *l = match axis {
                Axis::X => f.get(k, o),
                Axis::Y => f.get(o, k),
            };
        }
        apply_fd_line(kind, h, &line, &mut res);
        for (k, &r) in res.iter().enumerate() {
            match axis {
                Axis::X => out.set(k, o, r),
                Axis::Y => out.set(o, k, r),
            }
        }
    }
    out
}

/// Neumann Laplacian on a 1D line: interior rows `(x[i-1]-2x[i]+x[i+1])/h^2`,
/// boundary rows `(x[1]-x[0])/h^2` and `(x[n-2]-x[n-1])/h^2`.
pub fn laplacian_line(h: f64, x: &[f64], out: &mut [f64]) {
    let n = x.len();
    let s = 1.0 / (h * h);
    if n == 1 {
        out[0] = 0.0;
        return;
    }
    out[0] = s * (x[1] - x[0]);
    for i in 1..n - 1 {
        out[i] = s * (x[i - 1] - 2.0 * x[i] + x[i + 1]);
    }
    out[n - 1] = s * (x[n - 2] - x[n - 1]);
}

/// Cell-centered Neumann Laplacian on the active axes of `grid`.
pub fn laplacian_neumann(grid: &GridSpec, f: &Field) -> Field {
    let (nx, ny) = f.shape();
    let s = 1.0 / (grid.h * grid.h);
    let mut out = Field::zeros(nx, ny);
    for j in 0..ny {
        for i in 0..nx {
            let c = f.get(i, j);
            let mut acc = 0.0;
            if i > 0 {
                acc += f.get(i - 1, j) - c;
            }
            if i + 1 < nx {
                acc += f.get(i + 1, j) - c;
            }
            if grid.dim == 2 {
                if j > 0 {
                    acc += f.get(i, j - 1) - c;
                }
                if j + 1 < ny {
                    acc += f.get(i, j + 1) - c;
                }
            }
            out.set(i, j, s * acc);
        }
    }
    out
}

/// Sixth-order interpolation weights, applied symmetrically about the target.
pub const TRANSFER6: [f64; 6] = [
    3.0 / 256.0,
    -25.0 / 256.0,
    150.0 / 256.0,
    150.0 / 256.0,
    -25.0 / 256.0,
    3.0 / 256.0,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransferDir {
    CellToFace,
    FaceToCell,
}

/// Sixth-order transfer on a 1D line carrying `ghosts` extra samples on each
/// side. The output covers the owned targets: faces `0..=M` for
/// `CellToFace`, cells `1..=M` for `FaceToCell`.
pub fn transfer6_line(
    src: &[f64],
    ghosts: usize,
    dir: TransferDir,
) -> Result<Vec<f64>, GridError> {
    let need = 3;
    if ghosts < need {
        return Err(GridError::InsufficientGhosts {
            needed: need,
            have: ghosts,
        });
    }
    let g = ghosts as isize;
    let stencil = |first: isize| -> f64 {
        TRANSFER6
            .iter()
            .enumerate()
            .map(|(r, w)| w * src[(first + r as isize) as usize])
            .sum()
    };
    match dir {
        TransferDir::CellToFace => {
            // src position p holds cell p - g + 1; face k uses cells k-2..=k+3.
            let m = src.len() - 2 * ghosts;
            Ok((0..=m as isize).map(|k| stencil(k - 2 + g - 1)).collect())
        }
        TransferDir::FaceToCell => {
            // src position p holds face p - g; cell c uses faces c-3..=c+2.
            let m = src.len() - 2 * ghosts - 1;
            Ok((1..=m as isize).map(|c| stencil(c - 3 + g)).collect())
        }
    }
}

/// Sixth-order transfer along `axis` of a ghost-extended array. The target is
/// evaluated over its owned range along `axis` and over the owned range of
/// the other axis; ghost layers of the result are left for the caller.
pub fn transfer6(src: &Padded, dir: TransferDir, axis: Axis) -> Result<Padded, GridError> {
    let a = axis.index();
    let expect = match dir {
        TransferDir::CellToFace => Loc::Cell,
        TransferDir::FaceToCell => Loc::Face,
    };
    if src.loc[a] != expect {
        return Err(GridError::InactiveAxis(axis));
    }
    let mut loc = src.loc;
    loc[a] = match dir {
        TransferDir::CellToFace => Loc::Face,
        TransferDir::FaceToCell => Loc::Cell,
    };
    let offset = match dir {
        TransferDir::CellToFace => -2,
        TransferDir::FaceToCell => -3,
    };
    let out = Padded::from_owned(src.m, loc, |i, j| {
        let t = if a == 0 { i } else { j };
        let (i0, j0) = if a == 0 { (0, j) } else { (i, 0) };
        TRANSFER6
            .iter()
            .enumerate()
            .map(|(r, w)| w * src.along(axis, i0, j0, t + offset + r as isize))
            .sum()
    });
    Ok(out)
}

/// Two-point average along `axis` from cell-type samples to the owned faces
/// `0..=M`, using ghost values at the walls.
pub fn average_to_faces(src: &Padded, axis: Axis) -> Padded {
    let a = axis.index();
    debug_assert_eq!(src.loc[a], Loc::Cell);
    let mut loc = src.loc;
    loc[a] = Loc::Face;
    Padded::from_owned(src.m, loc, |i, j| {
        0.5 * (src.along(axis, i, j, 0) + src.along(axis, i, j, 1))
    })
}

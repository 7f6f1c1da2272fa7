//! Kraus-operator channels: the three decohering families, complementary channels,
//! Choi matrices, composition, pinching maps and symmetry operators.
//!
//! Basis states are indexed from 0. Block partitions are contiguous, block `i`
//! covering `[i k, (i + 1) k)`. Weak-decoherence windows wrap modulo `d`.
//! Kraus operators that vanish at `x = 0` or `x = 1` are kept, so the
//! complementary output dimension never depends on `x`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::matrix::{hermitian_eigenvalues, ComplexMatrix, DensityMatrix};
use crate::random::hermitize;
use crate::{Error, Result};

/// Completeness tolerance for constructed channels.
pub const COMPLETENESS_TOL: f64 = 1e-12;
/// Two channels are equal when their Choi matrices agree to this max-norm distance.
pub const CHANNEL_EQ_TOL: f64 = 1e-10;

/// Completely positive map given by an ordered list of Kraus operators, each `d_out x d_in`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    d_in: usize,
    d_out: usize,
    kraus: Vec<ComplexMatrix>,
}

impl KrausChannel {
    /// Builds a channel and enforces trace preservation to [`COMPLETENESS_TOL`].
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let ch = Self::from_kraus_unchecked(kraus)?;
        let residual = ch.completeness_residual();
        if residual > COMPLETENESS_TOL {
            return Err(Error::BadParameter(format!(
                "Kraus operators are not trace preserving (residual {residual:e})"
            )));
        }
        Ok(ch)
    }

    /// Builds a CP map without the completeness check. Shapes must still agree.
    /// Used to feed deliberately broken maps to [`validate_cptp`].
    pub fn from_kraus_unchecked(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::BadParameter("empty Kraus list".into()))?;
        let (d_out, d_in) = (first.rows(), first.cols());
        for k in &kraus {
            if k.rows() != d_out || k.cols() != d_in {
                return Err(Error::dims(
                    format!("{d_out}x{d_in}"),
                    format!("{}x{}", k.rows(), k.cols()),
                ));
            }
        }
        Ok(Self { d_in, d_out, kraus })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            d_in: d,
            d_out: d,
            kraus: vec![ComplexMatrix::identity(d)],
        }
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn num_kraus(&self) -> usize {
        self.kraus.len()
    }

    /// `max |sum_i A_i^dagger A_i - I|`.
    pub fn completeness_residual(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(self.d_in, self.d_in);
        for a in &self.kraus {
            sum = &sum + &(&a.adjoint() * a);
        }
        sum.max_abs_diff(&ComplexMatrix::identity(self.d_in))
            .expect("square shapes")
    }

    /// `sum_i A_i M A_i^dagger` for any `d_in x d_in` matrix `M`.
    pub fn apply_matrix(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        if m.rows() != self.d_in || m.cols() != self.d_in {
            return Err(Error::dims(
                format!("{0}x{0}", self.d_in),
                format!("{}x{}", m.rows(), m.cols()),
            ));
        }
        let mut out = ComplexMatrix::zeros(self.d_out, self.d_out);
        for a in &self.kraus {
            out = &out + &a.conjugate(m)?;
        }
        Ok(out)
    }
}

/// Kraus action on a state. The output is a density matrix whenever the channel is CPTP.
pub fn apply(ch: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dim() != ch.d_in {
        return Err(Error::dims(ch.d_in, rho.dim()));
    }
    let out = ch.apply_matrix(rho.matrix())?;
    Ok(DensityMatrix::new_unchecked(hermitize(&out)))
}

/// Complementary channel: output `(i, j)` entry equals `tr(A_i rho A_j^dagger)`.
///
/// The `m`-th complementary Kraus operator has entries `(C_m)_{i,a} = (A_i)_{m,a}`.
pub fn complementary(ch: &KrausChannel) -> KrausChannel {
    let n = ch.num_kraus();
    let kraus = (0..ch.d_out)
        .map(|m| ComplexMatrix::from_fn(n, ch.d_in, |i, a| ch.kraus[i][(m, a)]))
        .collect();
    KrausChannel {
        d_in: ch.d_in,
        d_out: n,
        kraus,
    }
}

/// `second ∘ first`, with Kraus set `{B_j A_i}`.
pub fn compose(second: &KrausChannel, first: &KrausChannel) -> Result<KrausChannel> {
    if first.d_out != second.d_in {
        return Err(Error::dims(
            format!("second.d_in = {}", first.d_out),
            second.d_in,
        ));
    }
    let mut kraus = Vec::with_capacity(first.num_kraus() * second.num_kraus());
    for b in &second.kraus {
        for a in &first.kraus {
            kraus.push(b.matmul(a)?);
        }
    }
    Ok(KrausChannel {
        d_in: first.d_in,
        d_out: second.d_out,
        kraus,
    })
}

/// Unnormalized Choi matrix `sum_ij |i><j| ⊗ ch(|i><j|)`, trace `d_in`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    d_in: usize,
    d_out: usize,
    matrix: ComplexMatrix,
}

impl ChoiMatrix {
    /// Choi matrix of an arbitrary linear map given as a closure on `d_in x d_in` matrices.
    pub fn from_map(
        d_in: usize,
        d_out: usize,
        map: impl Fn(&ComplexMatrix) -> Result<ComplexMatrix>,
    ) -> Result<Self> {
        let n = d_in * d_out;
        let mut matrix = ComplexMatrix::zeros(n, n);
        for i in 0..d_in {
            for j in 0..d_in {
                let block = map(&ComplexMatrix::unit(d_in, d_in, i, j))?;
                if block.rows() != d_out || block.cols() != d_out {
                    return Err(Error::dims(d_out, block.rows()));
                }
                for a in 0..d_out {
                    for b in 0..d_out {
                        matrix[(i * d_out + a, j * d_out + b)] = block[(a, b)];
                    }
                }
            }
        }
        Ok(Self {
            d_in,
            d_out,
            matrix,
        })
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Trace over the output factor, a `d_in x d_in` matrix (the identity for TP maps).
    pub fn partial_trace_output(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.d_in, self.d_in, |i, j| {
            (0..self.d_out)
                .map(|a| self.matrix[(i * self.d_out + a, j * self.d_out + a)])
                .sum()
        })
    }

    /// Max-norm distance; errors if the dimensions differ.
    pub fn distance(&self, other: &ChoiMatrix) -> Result<f64> {
        if self.d_in != other.d_in || self.d_out != other.d_out {
            return Err(Error::dims(
                format!("{}->{}", self.d_in, self.d_out),
                format!("{}->{}", other.d_in, other.d_out),
            ));
        }
        self.matrix.max_abs_diff(&other.matrix)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(hermitian_eigenvalues(&self.matrix)?.min())
    }
}

/// Choi matrix built as `sum_K vec(A_K) vec(A_K)^dagger`.
pub fn choi(ch: &KrausChannel) -> ChoiMatrix {
    let n = ch.d_in * ch.d_out;
    let mut matrix = ComplexMatrix::zeros(n, n);
    for a in &ch.kraus {
        // vec index (i, out) -> i * d_out + out holds A[out, i]
        let v: Vec<Complex64> = (0..n).map(|p| a[(p % ch.d_out, p / ch.d_out)]).collect();
        for (r, vr) in v.iter().enumerate() {
            if *vr == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (c, vc) in v.iter().enumerate() {
                matrix[(r, c)] += vr * vc.conj();
            }
        }
    }
    ChoiMatrix {
        d_in: ch.d_in,
        d_out: ch.d_out,
        matrix,
    }
}

/// Choi max-norm distance of two channels.
pub fn channel_distance(a: &KrausChannel, b: &KrausChannel) -> Result<f64> {
    choi(a).distance(&choi(b))
}

/// Ordered cover of `{0, ..., d-1}` by disjoint cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    dim: usize,
    cells: Vec<Vec<usize>>,
    cell_of: Vec<usize>,
}

impl Partition {
    pub fn new(cells: Vec<Vec<usize>>) -> Result<Self> {
        let dim: usize = cells.iter().map(Vec::len).sum();
        if dim == 0 {
            return Err(Error::BadPartition("empty partition".into()));
        }
        let mut cell_of = vec![usize::MAX; dim];
        for (ci, cell) in cells.iter().enumerate() {
            if cell.is_empty() {
                return Err(Error::BadPartition(format!("cell {ci} is empty")));
            }
            for &idx in cell {
                if idx >= dim {
                    return Err(Error::BadPartition(format!(
                        "index {idx} outside 0..{dim}"
                    )));
                }
                if cell_of[idx] != usize::MAX {
                    return Err(Error::BadPartition(format!("index {idx} appears twice")));
                }
                cell_of[idx] = ci;
            }
        }
        Ok(Self {
            dim,
            cells,
            cell_of,
        })
    }

    /// Singleton cells: full dephasing.
    pub fn singletons(d: usize) -> Result<Self> {
        Self::new((0..d).map(|i| vec![i]).collect())
    }

    /// A single cell: the identity map.
    pub fn whole(d: usize) -> Result<Self> {
        Self::new(vec![(0..d).collect()])
    }

    /// Contiguous blocks of size `k`; `k` must divide `d`.
    pub fn contiguous(d: usize, k: usize) -> Result<Self> {
        if k == 0 || d == 0 || !d.is_multiple_of(k) {
            return Err(Error::BadPartition(format!(
                "block size {k} does not divide dimension {d}"
            )));
        }
        Self::new((0..d / k).map(|b| (b * k..(b + 1) * k).collect()).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    /// Projector onto cell `i`.
    pub fn projector(&self, i: usize) -> ComplexMatrix {
        let mut diag = vec![0.0; self.dim];
        for &idx in &self.cells[i] {
            diag[idx] = 1.0;
        }
        ComplexMatrix::from_diagonal(&diag)
    }

    fn same_cell(&self, a: usize, b: usize) -> bool {
        self.cell_of[a] == self.cell_of[b]
    }
}

/// Zeroes every entry whose row and column fall in different cells.
pub fn pinch_matrix(m: &ComplexMatrix, p: &Partition) -> Result<ComplexMatrix> {
    if !m.is_square() || m.rows() != p.dim() {
        return Err(Error::BadPartition(format!(
            "partition covers {} indices but the matrix is {}x{}",
            p.dim(),
            m.rows(),
            m.cols()
        )));
    }
    Ok(ComplexMatrix::from_fn(m.rows(), m.cols(), |r, c| {
        if p.same_cell(r, c) {
            m[(r, c)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }))
}

/// Pinching `sum_i P_i rho P_i` over the cells of `p`.
pub fn pinch(rho: &DensityMatrix, p: &Partition) -> Result<DensityMatrix> {
    Ok(DensityMatrix::new_unchecked(pinch_matrix(rho.matrix(), p)?))
}

/// Channel family tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Fully,
    Block,
    Weak,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Fully, Family::Block, Family::Weak];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Fully => "fully",
            Family::Block => "block",
            Family::Weak => "weak",
        }
    }

    /// Window/block sizes admissible for dimension `d`.
    pub fn valid_ks(self, d: usize) -> Vec<usize> {
        match self {
            Family::Fully => vec![1],
            Family::Block => (1..=d).filter(|k| d.is_multiple_of(*k)).collect(),
            Family::Weak => (1..=d).collect(),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fully" => Ok(Family::Fully),
            "block" => Ok(Family::Block),
            "weak" => Ok(Family::Weak),
            other => Err(Error::BadParameter(format!(
                "unknown family '{other}' (expected fully, block or weak)"
            ))),
        }
    }
}

/// A point of the parameter space: family, dimension `d`, block/window size `k`, noise `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec {
    pub family: Family,
    pub d: usize,
    pub k: usize,
    pub x: f64,
}

impl ChannelSpec {
    pub fn new(family: Family, d: usize, k: usize, x: f64) -> Result<Self> {
        check_noise(x)?;
        check_dim(d)?;
        match family {
            Family::Fully if k != 1 => {
                return Err(Error::BadParameter(format!(
                    "the fully decohering family has k = 1, got k = {k}"
                )))
            }
            Family::Block if k == 0 || !d.is_multiple_of(k) => {
                return Err(Error::BadParameter(format!(
                    "block size {k} does not divide d = {d}"
                )))
            }
            Family::Weak if k == 0 || k > d => {
                return Err(Error::BadParameter(format!(
                    "window size {k} outside 1..={d}"
                )))
            }
            _ => {}
        }
        Ok(Self { family, d, k, x })
    }

    pub fn fully(d: usize, x: f64) -> Result<Self> {
        Self::new(Family::Fully, d, 1, x)
    }

    pub fn block(d: usize, k: usize, x: f64) -> Result<Self> {
        Self::new(Family::Block, d, k, x)
    }

    pub fn weak(d: usize, k: usize, x: f64) -> Result<Self> {
        Self::new(Family::Weak, d, k, x)
    }

    pub fn with_x(&self, x: f64) -> Result<Self> {
        Self::new(self.family, self.d, self.k, x)
    }

    pub fn build(&self) -> Result<KrausChannel> {
        match self.family {
            Family::Fully => make_fully_decohering(self.d, self.x),
            Family::Block => make_block_decohering(self.d, self.k, self.x),
            Family::Weak => make_weakly_decohering(self.d, self.k, self.x),
        }
    }

    /// Partition whose pinching commutes with the channel as `D ∘ ch = D`:
    /// singletons for fully and weak, contiguous blocks for block.
    pub fn dephasing_partition(&self) -> Partition {
        match self.family {
            Family::Block => Partition::contiguous(self.d, self.k),
            Family::Fully | Family::Weak => Partition::singletons(self.d),
        }
        .expect("validated spec")
    }
}

impl fmt::Display for ChannelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} d={} k={} x={}", self.family, self.d, self.k, self.x)
    }
}

fn check_noise(x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::BadParameter(format!("noise x = {x} outside [0, 1]")));
    }
    Ok(())
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::BadParameter(format!("dimension d = {d} must be >= 2")));
    }
    Ok(())
}

/// Kraus list `sqrt(1-x) I` followed by `sqrt(weight) P_i` for each projector.
fn mixture_with_projectors(d: usize, x: f64, weight: f64, projectors: Vec<ComplexMatrix>) -> KrausChannel {
    let mut kraus = Vec::with_capacity(projectors.len() + 1);
    kraus.push(ComplexMatrix::identity(d).scale_real((1.0 - x).sqrt()));
    kraus.extend(projectors.iter().map(|p| p.scale_real(weight.sqrt())));
    KrausChannel {
        d_in: d,
        d_out: d,
        kraus,
    }
}

/// `(1 - x) rho + x D(rho)` with `D` the full dephasing: `d + 1` Kraus operators.
pub fn make_fully_decohering(d: usize, x: f64) -> Result<KrausChannel> {
    check_dim(d)?;
    check_noise(x)?;
    let projectors = (0..d).map(|i| ComplexMatrix::unit(d, d, i, i)).collect();
    Ok(mixture_with_projectors(d, x, x, projectors))
}

/// `(1 - x) rho + x D_k(rho)` with `D_k` pinching onto `d / k` contiguous blocks.
pub fn make_block_decohering(d: usize, k: usize, x: f64) -> Result<KrausChannel> {
    let spec = ChannelSpec::block(d, k, x)?;
    let partition = spec.dephasing_partition();
    let projectors = (0..partition.cells().len())
        .map(|i| partition.projector(i))
        .collect();
    Ok(mixture_with_projectors(d, x, x, projectors))
}

/// Projector onto the cyclic window `{i, i+1, ..., i+k-1} mod d`.
pub fn window_projector(d: usize, k: usize, i: usize) -> ComplexMatrix {
    let mut diag = vec![0.0; d];
    for l in 0..k {
        diag[(i + l) % d] = 1.0;
    }
    ComplexMatrix::from_diagonal(&diag)
}

/// Weak decoherence: `sqrt(1-x) I` and `sqrt(x/k)` times each of the `d` cyclic window
/// projectors of width `k`. Every index lies in exactly `k` windows.
pub fn make_weakly_decohering(d: usize, k: usize, x: f64) -> Result<KrausChannel> {
    ChannelSpec::weak(d, k, x)?;
    let projectors = (0..d).map(|i| window_projector(d, k, i)).collect();
    Ok(mixture_with_projectors(d, x, x / k as f64, projectors))
}

/// Cyclic shift `X = sum_i |i+1><i|`.
pub fn shift_operator(d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |r, c| {
        if r == (c + 1) % d {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Block-diagonal repetition of the `k`-dimensional shift (shift inside every block).
pub fn intra_block_shift(d: usize, k: usize) -> ComplexMatrix {
    let xk = shift_operator(k);
    ComplexMatrix::from_fn(d, d, |r, c| {
        if r / k == c / k {
            xk[(r % k, c % k)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Cyclic permutation of the `d / k` blocks, block `j` to block `j + 1`.
pub fn block_permutation(d: usize, k: usize) -> ComplexMatrix {
    let r_blocks = d / k;
    ComplexMatrix::from_fn(d, d, |r, c| {
        if r % k == c % k && r / k == (c / k + 1) % r_blocks {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// A unitary `U` on the input and the matching unitary `V` on the environment:
/// `ch(U rho U^dagger) = U ch(rho) U^dagger` and `ch^c(U rho U^dagger) = V ch^c(rho) V^dagger`.
#[derive(Debug, Clone)]
pub struct Symmetry {
    pub input: ComplexMatrix,
    pub environment: ComplexMatrix,
}

/// Covariance group of the family: shifts `X^m` for fully and weak, `𝕏^i Ω^j` for block.
pub fn symmetry_operators(spec: &ChannelSpec) -> Vec<ComplexMatrix> {
    symmetries(spec).into_iter().map(|s| s.input).collect()
}

/// Symmetry operators with their environment-side partners.
///
/// For shift-covariant families `X A_i X^dagger = A_{i+1}`, so the environment picks up
/// `|0><0| ⊕ X`. Inside blocks the shift fixes every block projector; the block
/// permutation moves `π_j` to `π_{j+1}`.
pub fn symmetries(spec: &ChannelSpec) -> Vec<Symmetry> {
    let one = ComplexMatrix::identity(1);
    match spec.family {
        Family::Fully | Family::Weak => {
            let x = shift_operator(spec.d);
            let env = one.direct_sum(&x);
            (0..spec.d)
                .map(|m| Symmetry {
                    input: x.pow(m).expect("square"),
                    environment: env.pow(m).expect("square"),
                })
                .collect()
        }
        Family::Block => {
            let r = spec.d / spec.k;
            let xx = intra_block_shift(spec.d, spec.k);
            let omega = block_permutation(spec.d, spec.k);
            let env_omega = one.direct_sum(&shift_operator(r));
            let mut out = Vec::with_capacity(spec.d);
            for i in 0..spec.k {
                for j in 0..r {
                    let input = xx.pow(i).expect("square") * omega.pow(j).expect("square");
                    out.push(Symmetry {
                        input,
                        environment: env_omega.pow(j).expect("square"),
                    });
                }
            }
            out
        }
    }
}

/// Outcome of [`validate_cptp`].
#[derive(Debug, Clone, PartialEq)]
pub struct CptpReport {
    /// `max |sum A^dagger A - I|`.
    pub completeness_residual: f64,
    /// Smallest Choi eigenvalue.
    pub choi_min_eigenvalue: f64,
    pub tol: f64,
    pub passed: bool,
}

/// Checks trace preservation to `tol` and Choi positivity to `-tol`.
pub fn validate_cptp(ch: &KrausChannel, tol: f64) -> CptpReport {
    let completeness_residual = ch.completeness_residual();
    let choi_min_eigenvalue = choi(ch).min_eigenvalue().unwrap_or(f64::NEG_INFINITY);
    CptpReport {
        completeness_residual,
        choi_min_eigenvalue,
        tol,
        passed: completeness_residual <= tol && choi_min_eigenvalue >= -tol,
    }
}

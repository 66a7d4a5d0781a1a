use thiserror::Error;

use crate::graph::GraphApprox;

/// Two eigenvalues closer than this are reported as one cluster. The
/// smallest genuine gap observed through level 5 is about 1e-6, so this
/// merges numerical duplicates without gluing distinct spectrum points;
/// the one known near-tie below 2e-6 is handled by the classification side.
pub const MERGE_TOL: f64 = 1e-7;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("Jacobi sweep limit {sweeps} reached with off-diagonal norm {off_diagonal:.3e} (target {target:.3e})")]
    NonConvergence { sweeps: u32, off_diagonal: f64, target: f64 },
    #[error("eigenvectors were not requested at solve time")]
    VectorsRequired,
    #[error("eigenpair {index} has residual {residual:.3e}, above the bound {bound:.3e}")]
    ResidualTooLarge { index: usize, residual: f64, bound: f64 },
}

/// Dense symmetric matrix whose eigenvalues are the graph eigenvalues in
/// the (4-λ) convention: rows encode (4-λ)u(x) = Σ weights·u(y). For the
/// reflected (Neumann) problem the stored matrix is the symmetric similar
/// form W^{1/2} M W^{-1/2}; `weight` holds W's diagonal so callers can map
/// eigenvectors back to plain vertex values.
#[derive(Clone, Debug)]
pub struct LaplacianMatrix {
    pub n: usize,
    entries: Vec<f64>,
    pub weight: Vec<f64>,
    /// matrix row -> vertex index in the graph it was built from
    pub index_map: Vec<usize>,
}

impl LaplacianMatrix {
    /// Wraps a dense row-major symmetric matrix. Panics if the data is not
    /// square or not exactly symmetric, since the Jacobi solver silently
    /// assumes both.
    pub fn from_dense(n: usize, entries: Vec<f64>, weight: Vec<f64>, index_map: Vec<usize>) -> Self {
        assert_eq!(entries.len(), n * n, "entries must be n x n");
        assert_eq!(weight.len(), n);
        assert_eq!(index_map.len(), n);
        for i in 0..n {
            for j in 0..i {
                assert_eq!(entries[i * n + j], entries[j * n + i], "matrix must be symmetric");
            }
        }
        LaplacianMatrix { n, entries, weight, index_map }
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    /// Undoes the diagonal similarity: v is an eigenvector of the stored
    /// symmetric matrix, the result solves the original vertex equations.
    pub fn unweight(&self, v: &[f64]) -> Vec<f64> {
        v.iter().zip(&self.weight).map(|(x, w)| x / w.sqrt()).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.at(i, i)).sum()
    }
}

/// Matrix of the Dirichlet eigenvalue problem: one row per interior vertex,
/// 4 on the diagonal, -1 for each interior neighbor (boundary values are 0).
pub fn dirichlet_matrix(g: &GraphApprox) -> LaplacianMatrix {
    let rows = &g.interior;
    let n = rows.len();
    let mut row_of = vec![usize::MAX; g.n()];
    for (r, &v) in rows.iter().enumerate() {
        row_of[v] = r;
    }
    let mut entries = vec![0.0; n * n];
    for (r, &v) in rows.iter().enumerate() {
        entries[r * n + r] = 4.0;
        for &w in g.neighbors(v) {
            if row_of[w] != usize::MAX {
                entries[r * n + row_of[w]] = -1.0;
            }
        }
    }
    LaplacianMatrix { n, entries, weight: vec![1.0; n], index_map: rows.clone() }
}

/// Matrix of the reflected (Neumann) problem over all vertices. Boundary
/// rows read (4-λ)u(x) = 2u(n1) + 2u(n2); the non-symmetric system is
/// symmetrized by the weights w = 1 (interior), 1/2 (boundary), giving
/// off-diagonal entries -1, -√2 or -2 according to how many endpoints are
/// boundary vertices. The spectrum is unchanged by the similarity.
pub fn neumann_matrix(g: &GraphApprox) -> LaplacianMatrix {
    let n = g.n();
    let mut entries = vec![0.0; n * n];
    let weight: Vec<f64> =
        (0..n).map(|i| if g.is_boundary(i) { 0.5 } else { 1.0 }).collect();
    for i in 0..n {
        entries[i * n + i] = 4.0;
        for &j in g.neighbors(i) {
            if j < i {
                continue;
            }
            let value = match (g.is_boundary(i), g.is_boundary(j)) {
                (false, false) => -1.0,
                (true, true) => -2.0,
                _ => -std::f64::consts::SQRT_2,
            };
            entries[i * n + j] = value;
            entries[j * n + i] = value;
        }
    }
    LaplacianMatrix { n, entries, weight, index_map: (0..n).collect() }
}

/// One merged point of the spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenCluster {
    pub value: f64,
    pub multiplicity: usize,
    /// dimension of the mirror-symmetric part, once annotated
    pub sym_dim: Option<usize>,
    pub skew_dim: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct OracleSpectrum {
    /// all n eigenvalues, ascending
    pub raw: Vec<f64>,
    /// raw values merged at [`MERGE_TOL`]; cluster value is the member mean
    pub clusters: Vec<EigenCluster>,
    /// eigenvectors of the stored symmetric matrix, aligned with `raw`
    pub vectors: Option<Vec<Vec<f64>>>,
}

impl OracleSpectrum {
    pub fn multiplicity_of(&self, value: f64, tol: f64) -> usize {
        self.clusters
            .iter()
            .filter(|c| (c.value - value).abs() <= tol)
            .map(|c| c.multiplicity)
            .sum()
    }

    /// Splits each cluster's eigenspace under the mirror symmetry of `g`.
    /// The mirror acts on eigenvectors as a permutation commuting with the
    /// matrix, so its trace on a k-dimensional eigenspace is s - (k - s)
    /// with s the symmetric dimension; averaging v^T P v over the cluster's
    /// orthonormal vectors recovers s exactly (up to rounding).
    pub fn annotate_symmetry(
        &mut self,
        mat: &LaplacianMatrix,
        g: &GraphApprox,
    ) -> Result<(), SolverError> {
        let vectors = self.vectors.as_ref().ok_or(SolverError::VectorsRequired)?;
        let mirror = g.reflection_permutation();
        let mut row_of = vec![usize::MAX; g.n()];
        for (r, &v) in mat.index_map.iter().enumerate() {
            row_of[v] = r;
        }
        let row_perm: Vec<usize> =
            mat.index_map.iter().map(|&v| row_of[mirror[v]]).collect();
        let mut next = 0usize;
        for cl in &mut self.clusters {
            let k = cl.multiplicity;
            let mut trace = 0.0;
            for v in &vectors[next..next + k] {
                trace += v.iter().enumerate().map(|(i, x)| x * v[row_perm[i]]).sum::<f64>();
            }
            let sym = ((k as f64 + trace) / 2.0).round();
            debug_assert!(((k as f64 + trace) / 2.0 - sym).abs() < 1e-6);
            cl.sym_dim = Some(sym as usize);
            cl.skew_dim = Some(k - sym as usize);
            next += k;
        }
        Ok(())
    }
}

/// Cyclic Jacobi eigendecomposition. Rotations sweep all (p, q) pairs until
/// the off-diagonal Frobenius norm falls below 1e-12 of the input norm;
/// for these matrices (n ≤ ~1100) a handful of sweeps suffices. When
/// vectors are requested each returned pair is residual-checked against
/// the input matrix.
pub fn eigensolve(m: &LaplacianMatrix, want_vectors: bool) -> Result<OracleSpectrum, SolverError> {
    const MAX_SWEEPS: u32 = 100;
    let n = m.n;
    if n == 0 {
        return Ok(OracleSpectrum {
            raw: vec![],
            clusters: vec![],
            vectors: want_vectors.then(Vec::new),
        });
    }
    let mut a = m.entries.clone();
    let mut v = vec![0.0f64; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let frob = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let target = 1e-12 * frob;
    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s.sqrt()
    };
    let mut converged = off(&a) <= target;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(SolverError::NonConvergence {
                sweeps,
                off_diagonal: off(&a),
                target,
            });
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let sgn = if theta >= 0.0 { 1.0 } else { -1.0 };
                let t = sgn / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
        sweeps += 1;
        converged = off(&a) <= target;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let raw: Vec<f64> = order.iter().map(|&i| a[i * n + i]).collect();
    let vectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&j| (0..n).map(|i| v[i * n + j]).collect())
        .collect();

    let bound = 1e-9 * n as f64;
    for (idx, (lam, vec)) in raw.iter().zip(&vectors).enumerate() {
        let mut residual = 0.0f64;
        for i in 0..n {
            let mut mv = 0.0;
            for j in 0..n {
                mv += m.entries[i * n + j] * vec[j];
            }
            residual = residual.max((mv - lam * vec[i]).abs());
        }
        if residual > bound {
            return Err(SolverError::ResidualTooLarge { index: idx, residual, bound });
        }
    }

    let mut clusters: Vec<EigenCluster> = Vec::new();
    let mut members: Vec<Vec<f64>> = Vec::new();
    for &lam in &raw {
        match members.last_mut() {
            Some(group) if lam - group.last().unwrap() <= MERGE_TOL => group.push(lam),
            _ => members.push(vec![lam]),
        }
    }
    for group in members {
        clusters.push(EigenCluster {
            value: group.iter().sum::<f64>() / group.len() as f64,
            multiplicity: group.len(),
            sym_dim: None,
            skew_dim: None,
        });
    }

    Ok(OracleSpectrum { raw, clusters, vectors: want_vectors.then_some(vectors) })
}

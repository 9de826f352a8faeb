//! LIBSVM ingestion and synthetic instances.

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::sync::Arc;

use flate2::read::GzDecoder;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::matrix::{CsrMatrix, DesignMatrix};
use crate::problem::{CompositeProblem, LeastSquares, Regularizer};

/// Labelled design matrix. `b[j]` is the target of row `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub a: Arc<DesignMatrix>,
    pub b: Vec<f64>,
}

impl Dataset {
    pub fn n(&self) -> usize {
        self.a.cols()
    }

    pub fn m(&self) -> usize {
        self.a.rows()
    }
}

/// Reads a LIBSVM file; paths ending in `.gz` are decompressed. The
/// feature count is the largest index seen, or `n_hint` if that is larger.
pub fn load_libsvm(path: impl AsRef<Path>, n_hint: Option<usize>) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader: Box<dyn Read> = if path.extension().is_some_and(|e| e == "gz") {
        Box::new(GzDecoder::new(file))
    } else {
        Box::new(file)
    };
    parse_libsvm(BufReader::new(reader), &path.display().to_string(), n_hint)
}

/// Parses LIBSVM text. `origin` is used in error messages.
pub fn parse_libsvm(reader: impl BufRead, origin: &str, n_hint: Option<usize>) -> Result<Dataset> {
    let err = |line: usize, msg: String| Error::Parse {
        path: origin.to_string(),
        line,
        msg,
    };
    let mut indptr = vec![0];
    let mut indices = Vec::new();
    let mut values = Vec::new();
    let mut b = Vec::new();
    let mut n = 0;
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| err(lineno, e.to_string()))?;
        // strip trailing comments
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut toks = body.split_ascii_whitespace();
        let label = toks.next().unwrap_or_default();
        let label: f64 = label
            .parse()
            .map_err(|_| err(lineno, format!("bad label {label:?}")))?;
        if !label.is_finite() {
            return Err(err(lineno, "non-finite label".into()));
        }
        let mut prev = 0usize;
        for tok in toks {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| err(lineno, format!("expected idx:val, got {tok:?}")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| err(lineno, format!("bad feature index {idx:?}")))?;
            let val: f64 = val
                .parse()
                .map_err(|_| err(lineno, format!("bad feature value {val:?}")))?;
            if idx == 0 {
                return Err(err(lineno, "feature indices are 1-based".into()));
            }
            if idx == prev {
                return Err(err(lineno, format!("duplicate feature index {idx}")));
            }
            if idx < prev {
                return Err(err(lineno, format!("feature index {idx} after {prev} is not ascending")));
            }
            if !val.is_finite() {
                return Err(err(lineno, format!("non-finite value for feature {idx}")));
            }
            prev = idx;
            indices.push(idx - 1);
            values.push(val);
        }
        n = n.max(prev);
        b.push(label);
        indptr.push(indices.len());
    }
    let n = n.max(n_hint.unwrap_or(0));
    let m = b.len();
    let a = CsrMatrix::new(m, n, indptr, indices, values)?;
    Ok(Dataset {
        a: Arc::new(DesignMatrix::Csr(a)),
        b,
    })
}

/// Writes LIBSVM text with shortest round-trip float formatting. Explicit
/// zeros in sparse storage are kept; dense zeros are skipped.
pub fn write_libsvm(ds: &Dataset, mut w: impl Write) -> std::io::Result<()> {
    for (r, label) in ds.b.iter().enumerate() {
        write!(w, "{label:?}")?;
        for (c, v) in ds.a.row_entries(r) {
            write!(w, " {}:{v:?}", c + 1)?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn save_libsvm(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    write_libsvm(ds, &mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

/// Least-squares fixture with a known quadratic-growth constant.
#[derive(Debug, Clone)]
pub struct SyntheticQuadratic {
    pub problem: CompositeProblem,
    /// `λ_min(AᵀA) / trace(AᵀA)`.
    pub mu_true: f64,
    pub x_star: Vec<f64>,
    /// Eigenvalues of `AᵀA`, i.e. the squared diagonal of `A`.
    pub eigenvalues: Vec<f64>,
}

impl SyntheticQuadratic {
    /// `F* = 0`.
    pub fn f_star(&self) -> f64 {
        0.0
    }

    /// `dist²_L(x, X*)`.
    pub fn dist_sq(&self, x: &[f64]) -> f64 {
        self.problem.dist_sq(x, &self.x_star)
    }
}

/// `½‖Ax − b‖²` with diagonal `A`, `AᵀA` eigenvalues geometrically spaced in
/// `[1, cond]`, scalar `L = trace(AᵀA)` and `ψ = 0`. The minimizer is drawn
/// from a standard normal with `seed`.
pub fn synth_strongly_convex(n: usize, cond: f64, seed: u64) -> Result<SyntheticQuadratic> {
    if n == 0 {
        return Err(Error::domain("n must be >= 1"));
    }
    if !(cond >= 1.0 && cond.is_finite()) {
        return Err(Error::domain(format!("cond must be >= 1, got {cond}")));
    }
    let eig: Vec<f64> = (0..n)
        .map(|i| {
            if n == 1 {
                1.0
            } else {
                cond.powf(i as f64 / (n - 1) as f64)
            }
        })
        .collect();
    synth_from_eigenvalues(&eig, seed)
}

/// As [`synth_strongly_convex`] with the `AᵀA` spectrum given explicitly.
pub fn synth_from_eigenvalues(eig: &[f64], seed: u64) -> Result<SyntheticQuadratic> {
    if eig.is_empty() || !eig.iter().all(|&e| e > 0.0 && e.is_finite()) {
        return Err(Error::domain("eigenvalues must be positive and finite"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d: Vec<f64> = eig.iter().map(|e| e.sqrt()).collect();
    let x_star: Vec<f64> = (0..eig.len()).map(|_| rng.sample(StandardNormal)).collect();
    let b: Vec<f64> = d.iter().zip(&x_star).map(|(di, xi)| di * xi).collect();
    let trace: f64 = eig.iter().sum();
    let lmin = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    let a = Arc::new(DesignMatrix::diagonal(&d));
    let smooth = LeastSquares::new(a, b)?;
    let problem = CompositeProblem::with_scalar_l(Arc::new(smooth), Regularizer::Zero, trace)?;
    Ok(SyntheticQuadratic {
        problem,
        mu_true: lmin / trace,
        x_star,
        eigenvalues: eig.to_vec(),
    })
}

/// Parameters for a random regression instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticLasso {
    pub m: usize,
    pub n: usize,
    /// Column `i` is scaled by `col_scale^(i/(n−1))`.
    pub col_scale: f64,
    /// Correlation between consecutive features, in `[0, 1)`.
    pub correlation: f64,
    /// Nonzeros in the planted coefficient vector.
    pub support: usize,
    pub noise: f64,
    pub seed: u64,
}

impl Default for SyntheticLasso {
    fn default() -> Self {
        SyntheticLasso {
            m: 500,
            n: 100,
            col_scale: 1.0,
            correlation: 0.0,
            support: 10,
            noise: 0.1,
            seed: 0,
        }
    }
}

impl SyntheticLasso {
    /// Dense Gaussian design with AR(1)-correlated features and targets
    /// `b = A w + noise` for a sparse planted `w`.
    pub fn generate(&self) -> Result<Dataset> {
        let (m, n) = (self.m, self.n);
        if m == 0 || n == 0 {
            return Err(Error::domain("m and n must be >= 1"));
        }
        if !(0.0..1.0).contains(&self.correlation) || !(self.col_scale > 0.0) {
            return Err(Error::domain("correlation must be in [0, 1) and col_scale positive"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let rho = self.correlation;
        let tail = (1.0 - rho * rho).sqrt();
        let scale: Vec<f64> = (0..n)
            .map(|i| {
                if n == 1 {
                    1.0
                } else {
                    self.col_scale.powf(i as f64 / (n - 1) as f64)
                }
            })
            .collect();
        let mut data = vec![0.0; m * n];
        for r in 0..m {
            let mut prev: f64 = rng.sample(StandardNormal);
            for c in 0..n {
                if c > 0 {
                    let e: f64 = rng.sample(StandardNormal);
                    prev = rho * prev + tail * e;
                }
                data[r * n + c] = prev * scale[c];
            }
        }
        let mut w = vec![0.0; n];
        for i in rand::seq::index::sample(&mut rng, n, self.support.min(n)) {
            let mag: f64 = rng.random_range(0.5..2.0);
            w[i] = if rng.random_bool(0.5) { mag } else { -mag };
        }
        let a = DesignMatrix::dense(m, n, data)?;
        let mut b = a.matvec(&w);
        for bi in &mut b {
            let e: f64 = StandardNormal.sample(&mut rng);
            *bi += self.noise * e;
        }
        Ok(Dataset { a: Arc::new(a), b })
    }
}

/// Random binary classification data with `±1` labels. Each row has about
/// `density · n` nonzero features stored sparsely.
pub fn synth_logistic(m: usize, n: usize, density: f64, seed: u64) -> Result<Dataset> {
    if m == 0 || n == 0 || !(density > 0.0 && density <= 1.0) {
        return Err(Error::domain("need m, n >= 1 and density in (0, 1]"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let mut indptr = vec![0];
    let mut indices = Vec::new();
    let mut values = Vec::new();
    let mut b = Vec::with_capacity(m);
    for _ in 0..m {
        let mut margin = 0.0;
        for c in 0..n {
            if rng.random_bool(density) {
                let v: f64 = rng.sample(StandardNormal);
                margin += v * w[c];
                indices.push(c);
                values.push(v);
            }
        }
        let e: f64 = rng.sample(StandardNormal);
        b.push(if margin + 0.5 * e >= 0.0 { 1.0 } else { -1.0 });
        indptr.push(indices.len());
    }
    let a = CsrMatrix::new(m, n, indptr, indices, values)?;
    Ok(Dataset {
        a: Arc::new(DesignMatrix::Csr(a)),
        b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Dataset> {
        parse_libsvm(text.as_bytes(), "mem", None)
    }

    #[test]
    fn single_line_row() {
        let ds = parse("1 1:0.5 3:2.0\n").unwrap();
        assert_eq!((ds.m(), ds.n()), (1, 3));
        assert_eq!(ds.a.matvec(&[1.0, 10.0, 100.0]), vec![0.5 + 200.0]);
        assert_eq!(ds.b, vec![1.0]);
    }

    #[test]
    fn empty_feature_list() {
        let ds = parse("-1\n+1 2:1\n").unwrap();
        assert_eq!(ds.b, vec![-1.0, 1.0]);
        assert!(ds.a.row_entries(0).is_empty());
        assert_eq!(ds.n(), 2);
    }

    #[test]
    fn hint_widens() {
        let ds = parse_libsvm("0 1:1\n".as_bytes(), "mem", Some(7)).unwrap();
        assert_eq!(ds.n(), 7);
        let ds = parse_libsvm("0 9:1\n".as_bytes(), "mem", Some(7)).unwrap();
        assert_eq!(ds.n(), 9);
    }

    #[test]
    fn errors_name_the_line() {
        for (text, line) in [
            ("1 1:1\n1 3:1 2:1\n", 2),
            ("1 1:1\n\n2 2:1 2:3\n", 3),
            ("x 1:1\n", 1),
            ("1 1:1\n1 0:4\n", 2),
            ("1 1-2\n", 1),
            ("1 1:abc\n", 1),
        ] {
            match parse(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn round_trip_text() {
        let ds = parse("1.5 1:0.1 4:-3e-7\n-2 2:1\n0\n").unwrap();
        let mut buf = Vec::new();
        write_libsvm(&ds, &mut buf).unwrap();
        let back = parse_libsvm(&buf[..], "mem", Some(ds.n())).unwrap();
        assert_eq!(back, ds);
    }

    #[test]
    fn gzip_input() {
        use flate2::write::GzEncoder;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.svm.gz");
        let mut enc = GzEncoder::new(File::create(&path).unwrap(), flate2::Compression::default());
        enc.write_all(b"1 1:2\n-1 2:3\n").unwrap();
        enc.finish().unwrap();
        let ds = load_libsvm(&path, None).unwrap();
        assert_eq!((ds.m(), ds.n()), (2, 2));
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(load_libsvm("/nonexistent/x.svm", None), Err(Error::Io { .. })));
    }

    #[test]
    fn synthetic_mu_values() {
        let s = synth_strongly_convex(1, 1.0, 3).unwrap();
        assert_eq!(s.mu_true, 1.0);
        let s = synth_from_eigenvalues(&[1.0, 9.0], 3).unwrap();
        assert!((s.mu_true - 0.1).abs() < 1e-15);
        let s = synth_strongly_convex(2, 9.0, 3).unwrap();
        assert!((s.mu_true - 0.1).abs() < 1e-15);
        let tx = s.problem.t_map(&s.x_star);
        assert!(s.dist_sq(&tx) < 1e-28);
    }

    #[test]
    fn generators_are_seeded() {
        let g = SyntheticLasso { m: 20, n: 5, ..Default::default() };
        assert_eq!(g.generate().unwrap(), g.generate().unwrap());
        assert_eq!(synth_logistic(10, 4, 0.5, 1).unwrap(), synth_logistic(10, 4, 0.5, 1).unwrap());
        assert_ne!(synth_logistic(10, 4, 0.5, 1).unwrap(), synth_logistic(10, 4, 0.5, 2).unwrap());
    }
}

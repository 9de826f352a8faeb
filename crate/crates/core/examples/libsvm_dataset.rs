// Writing and reading LIBSVM files, then solving a Lasso on the result.
// Pass a path to load your own file instead.

use adares::data_io::{load_libsvm, save_libsvm, SyntheticLasso};
use adares::restart::{ada_res, AdaResConfig};
use adares::CompositeProblem;

pub fn run_on(path: Option<std::path::PathBuf>) -> adares::Result<()> {
    let dir = std::env::temp_dir().join(format!("adares-libsvm-{}", std::process::id()));
    let path = match path {
        Some(p) => p,
        None => {
            std::fs::create_dir_all(&dir).map_err(|e| adares::Error::Io { path: dir.clone(), source: e })?;
            let ds = SyntheticLasso { m: 120, n: 12, seed: 2, ..Default::default() }.generate()?;
            let p = dir.join("regression.svm");
            save_libsvm(&ds, &p)?;
            p
        }
    };
    let ds = load_libsvm(&path, None)?;
    println!("{}: m = {}, n = {}", path.display(), ds.m(), ds.n());
    let p = CompositeProblem::lasso(ds.a.clone(), ds.b.clone(), 1e4)?;
    let out = ada_res(&p, &vec![0.0; p.dim()], &AdaResConfig::new(0.1, 1e-12))?;
    println!("solved with {} prox evals, F = {:.10}", out.n_hat, p.value(&out.x_hat));
    let _ = std::fs::remove_dir_all(&dir);
    Ok(())
}

pub fn run() -> adares::Result<()> {
    run_on(None)
}

fn main() -> adares::Result<()> {
    run_on(std::env::args_os().nth(1).map(Into::into))
}

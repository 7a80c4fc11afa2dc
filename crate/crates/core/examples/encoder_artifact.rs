//! Saving a solved kernel encoder to disk, loading it back and embedding
//! unseen samples.
//!
//!     cargo run --release --example encoder_artifact

use sarl::cli::artifact::{load_encoder, save_encoder};
use sarl::data::{gen_gaussian_mixture, write_csv};
use sarl::kernels::{KernelModel, KernelSpec};
use sarl::numerics::{max_abs, RankTolerance};
use sarl::solver::{build_problem_kernel, solve, SolverConfig};

fn main() -> sarl::Result<()> {
    let dir = std::env::temp_dir().join("sarl-artifact-example");
    let train = gen_gaussian_mixture(800, 5)?;
    let fresh = gen_gaussian_mixture(12, 6)?;
    std::fs::create_dir_all(&dir).map_err(|e| sarl::SarlError::Io { path: dir.clone(), source: e })?;
    let train_path = dir.join("train.csv");
    write_csv(&train, &train_path)?;

    let model = KernelModel::fit(&KernelSpec::rbf_median(), train.x.as_ref())?;
    let problem = build_problem_kernel(model, train.y.as_ref(), train.s.as_ref(), RankTolerance::default())?;
    let sol = solve(&problem, &SolverConfig::new(0.4))?;
    let sidecar = save_encoder(&sol.encoder, sol.lambda, &train.schema, &train_path, &dir)?;
    println!("wrote {}", sidecar.display());

    let (loaded, meta) = load_encoder(&sidecar)?;
    println!("mode {} r {} lambda {} kernel {:?}", meta.mode, meta.r, meta.lambda, meta.kernel);
    let before = sol.encoder.embed_batch(fresh.x.as_ref())?;
    let after = loaded.embed_batch(fresh.x.as_ref())?;
    println!("max difference after reload {:.2e}", max_abs((after - &before).as_ref()));
    for j in 0..4 {
        println!("  sample {j}: z = {:?}", (0..before.nrows()).map(|i| before[(i, j)]).collect::<Vec<_>>());
    }
    Ok(())
}

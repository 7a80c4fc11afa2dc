//! Linear encoders on UCI Adult (sensitive: sex) and German Credit
//! (sensitive: age >= 25), evaluated with logistic classifiers.
//!
//!     cargo run --release --example uci_fair_classification -- data/uci

use std::path::PathBuf;

use sarl::data::uci::{adult_to_csv, german_to_csv, ADULT_SPEC, GERMAN_SPEC};
use sarl::data::{load_csv, load_csv_with_schema, split, Dataset, DatasetSpec, SplitSpec};
use sarl::eval::{accuracy, delta_star, fit_logistic, majority_prior, LogisticHyper};
use sarl::numerics::RankTolerance;
use sarl::solver::{build_problem_linear, lambda_grid, solve, SolverConfig};

fn main() -> sarl::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "data/uci".into()));
    let work = std::env::temp_dir().join("sarl-uci");
    std::fs::create_dir_all(&work).map_err(|e| sarl::SarlError::Io { path: work.clone(), source: e })?;

    adult_to_csv(dir.join("adult.data"), work.join("adult_train.csv"))?;
    adult_to_csv(dir.join("adult.test"), work.join("adult_test.csv"))?;
    let spec = DatasetSpec::from_toml_str(ADULT_SPEC)?;
    let train = load_csv(work.join("adult_train.csv"), &spec)?;
    let test = load_csv_with_schema(work.join("adult_test.csv"), &train.schema)?;
    report("adult", &train, &test)?;

    german_to_csv(dir.join("german.data"), work.join("german.csv"))?;
    let spec = DatasetSpec::from_toml_str(GERMAN_SPEC)?;
    let all = load_csv(work.join("german.csv"), &spec)?;
    let (train, test) = split(&all, SplitSpec { train_fraction: 0.7, seed: 0 })?;
    report("german", &train, &test)
}

fn report(name: &str, train: &Dataset, test: &Dataset) -> sarl::Result<()> {
    let problem = build_problem_linear(train.x.as_ref(), train.y.as_ref(), train.s.as_ref(), RankTolerance::default())?;
    let (yt, st) = (train.target_labels().unwrap(), train.sensitive_labels().unwrap());
    let (ye, se) = (test.target_labels().unwrap(), test.sensitive_labels().unwrap());
    let prior = majority_prior(&se)?;
    println!("{name}: n_train {} n_test {} d {} sensitive prior {prior:.4}", train.n_samples(), test.n_samples(), train.x.nrows());
    let hyper = LogisticHyper::default();
    for lambda in lambda_grid(21) {
        let sol = solve(&problem, &SolverConfig::new(lambda))?;
        let ztr = sol.encoder.embed_batch(train.x.as_ref())?;
        let zte = sol.encoder.embed_batch(test.x.as_ref())?;
        let acc_y = accuracy(&fit_logistic(ztr.as_ref(), &yt, &hyper)?, zte.as_ref(), &ye)?;
        let acc_s = accuracy(&fit_logistic(ztr.as_ref(), &st, &hyper)?, zte.as_ref(), &se)?;
        println!(
            "  lambda {lambda:.2} r {} J_y {:.5} J_s {:.5} target {acc_y:.4} adversary {acc_s:.4} delta* {:.4}",
            sol.encoder.dim(),
            sol.objectives.target_loss,
            sol.objectives.adversary_loss,
            delta_star(acc_s, prior)
        );
    }
    Ok(())
}

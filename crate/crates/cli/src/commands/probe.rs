use serde_json::json;
use spd_augment::augment::{incorrect_label_probe, stream_rng};

use super::load;
use crate::args::ProbeArgs;
use crate::exit::{CliError, CliResult};
use crate::output::print_json;

pub fn run(a: &ProbeArgs) -> CliResult<()> {
    if a.trials == 0 {
        return Err(CliError::usage("--trials must be positive"));
    }
    let ds = load(&a.input)?;
    let s = incorrect_label_probe(&ds, a.trials, &mut stream_rng(a.seed, 0))?;
    eprintln!(
        "geodesic reconstruction error is {:.1}% below the linear one",
        100.0 * s.relative_gap()
    );
    print_json(&json!({
        "command": "probe",
        "trials": s.trials,
        "mean_dv": s.mean_dv,
        "mean_dr": s.mean_dr,
        "std_dv": s.std_dv,
        "std_dr": s.std_dr,
        "relative_gap": s.relative_gap(),
    }));
    Ok(())
}

//! Shared machinery for the benchmark commands: parallel truth simulation
//! and a serial, repeatable timing harness for the kriging engine.

use rayon::prelude::*;

use matfield::kriging::{krige, KrigingProblem, KrigingResult, StepTimings};
use matfield::metrics::{simulate_truth, Experiment, TruthDraw};

use crate::csvio::median;
use crate::error::Result;

/// Draws every replicate of an experiment. Replicates are independent RNG
/// streams, so this parallelizes freely without changing any output byte.
pub fn simulate_replicates(exp: &Experiment) -> Result<Vec<TruthDraw>> {
    (0..exp.replicates)
        .into_par_iter()
        .map(|replicate| Ok(simulate_truth(exp, replicate as u64)?))
        .collect()
}

/// Runs the engine once for its outputs, then `repeats - 1` more times for
/// timing, and reports the per-step medians. All engine runs happen on the
/// calling thread so timings are never polluted by sibling work.
pub fn run_timed(problem: &KrigingProblem, repeats: usize) -> Result<KrigingResult> {
    let mut result = krige(problem)?;
    if repeats > 1 {
        let mut step1 = vec![result.timings.step1];
        let mut step2 = vec![result.timings.step2];
        let mut step3 = vec![result.timings.step3];
        for _ in 1..repeats {
            let rerun = krige(problem)?;
            step1.push(rerun.timings.step1);
            step2.push(rerun.timings.step2);
            step3.push(rerun.timings.step3);
        }
        result.timings = StepTimings {
            step1: median(&step1),
            step2: median(&step2),
            step3: median(&step3),
        };
    }
    Ok(result)
}

/// Replaces characters that would corrupt a CSV field in a free-form reason.
pub fn sanitize_note(reason: &str) -> String {
    reason.replace([',', '\n'], ";")
}

#[cfg(test)]
mod tests {
    use super::*;
    use matfield::kriging::MethodSpec;
    use matfield::matern::MaternParams;
    use matfield::BoundingBox;

    #[test]
    fn simulated_replicates_match_serial_order() {
        let params = MaternParams::from_range(1.0, 1.0, 2).unwrap();
        let exp = Experiment::new(
            params,
            BoundingBox::square(0.0, 5.0),
            30,
            0.1,
            [4, 4],
            3,
            99,
        )
        .unwrap();
        let parallel = simulate_replicates(&exp).unwrap();
        for (r, draw) in parallel.iter().enumerate() {
            let serial = simulate_truth(&exp, r as u64).unwrap();
            assert_eq!(draw.y, serial.y, "replicate {r}");
            assert_eq!(draw.x_grid, serial.x_grid, "replicate {r}");
        }
    }

    #[test]
    fn run_timed_repeats_do_not_change_outputs() {
        let params = MaternParams::from_range(1.0, 1.0, 2).unwrap();
        let exp = Experiment::new(
            params,
            BoundingBox::square(0.0, 5.0),
            40,
            0.1,
            [5, 5],
            1,
            7,
        )
        .unwrap();
        let draw = simulate_truth(&exp, 0).unwrap();
        let grid = exp.prediction_grid();
        let problem =
            KrigingProblem::new(params, &draw.obs, &draw.y, 0.1, &grid, MethodSpec::Optimal)
                .unwrap();
        let once = run_timed(&problem, 1).unwrap();
        let thrice = run_timed(&problem, 3).unwrap();
        assert_eq!(once.predictions, thrice.predictions);
    }

    #[test]
    fn notes_never_contain_separators() {
        let cleaned = sanitize_note("bad, news\nhere");
        assert!(!cleaned.contains(','));
        assert!(!cleaned.contains('\n'));
    }
}

//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero when any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rabi_a2::sweep::run_parallel;
use rabi_a2_core::model::build_hamiltonian;
use rabi_a2_core::spectra::{classify_susy, converge, relative_change, sector_levels};
use rabi_a2_core::sweeps::{self, SweepResult, FIGURE_C, FIGURE_OMEGA};
use rabi_a2_core::verify::{
    decreasing_within_noise, hb_spectrum_equivalence, parity_commutator, polaron_identity_residual,
    polaron_residual_sequence, sector_agreement,
};
use rabi_a2_core::{hb_map, ModelParams, Spectrum, SusyClass, SusyCriteria, Truncation};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const W: f64 = FIGURE_OMEGA;
const STABILITY_LEVELS: usize = 8;
const STABILITY_TOL: f64 = 1e-8;

/// A converged computation whose final cutoff is re-doubled for the
/// convergence criterion.
struct Run {
    label: String,
    params: ModelParams,
    shift: f64,
    n_max: usize,
}

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(checks: &[(&str, bool)], detail: String) -> Self {
        let failed: Vec<&str> = checks.iter().filter(|(_, ok)| !ok).map(|(name, _)| *name).collect();
        let detail = if failed.is_empty() {
            detail
        } else {
            format!("{detail}; failed: {}", failed.join(", "))
        };
        Self {
            passed: failed.is_empty(),
            detail,
        }
    }
}

fn trunc(n: usize) -> Truncation {
    Truncation::with_n_max(n).expect("positive cutoff")
}

fn jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn preset_sweep(name: &str) -> SweepResult {
    run_parallel(&sweeps::preset(name).expect("known preset"), jobs()).expect("sweep runs")
}

fn sweep_runs(name: &str, result: &SweepResult) -> Vec<Run> {
    result
        .points
        .iter()
        .map(|p| Run {
            label: format!("{name} at {}", p.axis_value),
            params: p.params,
            shift: p.shift,
            n_max: p.spectrum.n_max_used,
        })
        .collect()
}

fn classes(result: &SweepResult) -> Vec<Option<SusyClass>> {
    result
        .points
        .iter()
        .map(|p| p.susy.as_ref().map(|s| s.classification))
        .collect()
}

fn degenerate_pairs(spec: &Spectrum, tol: f64) -> bool {
    spec.levels.chunks(2).all(|pair| {
        pair.len() == 2 && (pair[1].energy - pair[0].energy).abs() < tol && pair[0].parity != pair[1].parity
    })
}

fn criterion_1(runs: &mut Vec<Run>) -> Outcome {
    let p = ModelParams::resonant(W, 0.0, 0.0).unwrap();
    let spec = converge(|t| Ok(build_hamiltonian(&p, t)), &trunc(16), 6).unwrap();
    let want = [0.0, W, W, 2.0 * W, 2.0 * W, 3.0 * W];
    let err = spec
        .energies()
        .iter()
        .zip(want)
        .map(|(e, w)| (e - w).abs())
        .fold(0.0, f64::max);
    let class = classify_susy(&spec, &SusyCriteria::for_params(&p)).map(|r| r.classification);
    runs.push(Run {
        label: "decoupled fixture".into(),
        params: p,
        shift: 0.0,
        n_max: spec.n_max_used,
    });
    Outcome::new(
        &[
            ("converged", spec.converged),
            ("levels within 1e-9", err < 1e-9),
            ("unbroken", class == Ok(SusyClass::Unbroken)),
        ],
        format!("max level error {err:.2e}, class {class:?}"),
    )
}

fn criterion_2(runs: &mut Vec<Run>) -> Outcome {
    let result = preset_sweep("fig1a");
    runs.extend(sweep_runs("fig1a", &result));
    let top = result.points.last().unwrap();
    let levels = &top.spectrum.levels;
    let splitting = levels[1].energy - levels[0].energy;
    let pair_energy = 0.5 * (levels[0].energy + levels[1].energy);
    let offset = (pair_energy - W / 2.0).abs();
    let seq = classes(&result);
    let first_broken = seq.iter().position(|c| *c == Some(SusyClass::SpontaneouslyBroken));
    let transition = seq[0] == Some(SusyClass::Unbroken)
        && first_broken.is_some_and(|i| {
            seq[..i].iter().all(|c| *c == Some(SusyClass::Unbroken))
                && seq[i..].iter().all(|c| *c == Some(SusyClass::SpontaneouslyBroken))
        });
    Outcome::new(
        &[
            ("all points converged", result.unconverged_points() == 0),
            ("opposite-parity ground pair", levels[0].parity != levels[1].parity),
            ("splitting < 1e-4 w", splitting < 1e-4 * W),
            ("pair energy within 1e-3 w of w/2", offset < 1e-3 * W),
            ("unbroken -> spontaneously_broken", transition),
        ],
        format!(
            "g = 4w: pair energy {pair_energy:.6}, |E - w/2| = {:.3e} w, splitting {splitting:.2e}; breaking from g = {:.4}",
            offset / W,
            first_broken.map_or(f64::NAN, |i| result.points[i].axis_value)
        ),
    )
}

fn criterion_3(runs: &mut Vec<Run>) -> Outcome {
    let result = preset_sweep("fig1b");
    runs.extend(sweep_runs("fig1b", &result));
    let top = result.points.last().unwrap();
    let omega_g = hb_map(&top.params).omega_g;
    let e = top.spectrum.energies();
    let ground = top.spectrum.levels[0];
    let partner = top
        .spectrum
        .levels
        .iter()
        .find(|l| l.parity != ground.parity)
        .map_or(f64::INFINITY, |l| l.energy - ground.energy);
    let spacing = e[2] - e[0];
    let seq = classes(&result);
    let target = 1.0 / (4.0 * FIGURE_C);
    Outcome::new(
        &[
            ("all points classified", seq.iter().all(Option::is_some)),
            ("partner gap within 15% of w", (partner - W).abs() < 0.15 * W),
            ("spacing within 15% of w(g)", (spacing / omega_g - 1.0).abs() < 0.15),
            ("never spontaneously broken", !seq.contains(&Some(SusyClass::SpontaneouslyBroken))),
            ("shift within 5% of 1/(4C)", (top.shift - target).abs() < 0.05 * target),
        ],
        format!(
            "g = 4w: partner gap {partner:.4} (w = {W}), spacing {spacing:.4} vs w(g) {omega_g:.4}, shift {:.4} vs {target:.4}",
            top.shift
        ),
    )
}

fn criterion_4(runs: &mut Vec<Run>) -> Outcome {
    let p = ModelParams::resonant(W, W, FIGURE_C).unwrap();
    let img = hb_map(&p);
    let report = hb_spectrum_equivalence(&p, 6, &trunc(16)).unwrap();
    runs.push(Run {
        label: "A^2 model".into(),
        params: p,
        shift: 0.0,
        n_max: report.n_max_full,
    });
    runs.push(Run {
        label: "squeezed image".into(),
        params: p.hb_image_params(),
        shift: 0.0,
        n_max: report.n_max_image,
    });
    Outcome::new(
        &[
            ("converged", report.converged),
            ("w(g) ~ 20.335", (img.omega_g - 20.335).abs() < 1e-3),
            ("g~ ~ 3.492", (img.g_tilde - 3.492).abs() < 1e-3),
            ("relative discrepancy < 1e-6", report.max_relative_discrepancy < 1e-6),
        ],
        format!(
            "w(g) {:.4}, g~ {:.4}, discrepancy {:.2e}",
            img.omega_g, img.g_tilde, report.max_relative_discrepancy
        ),
    )
}

fn criterion_5() -> Outcome {
    let p = ModelParams::resonant(1.0, 1.0, 0.0).unwrap();
    let at_200 = polaron_identity_residual(&p, 40, &trunc(200)).unwrap();
    let seq = polaron_residual_sequence(&p, 40, &[100, 200, 400]).unwrap();
    let residuals: Vec<String> = seq.iter().map(|r| format!("{:.2e}", r.residual)).collect();
    Outcome::new(
        &[
            ("residual < 1e-8", at_200.residual < 1e-8),
            ("truncation adequate", !at_200.truncation_inadequate),
            ("decreasing on doubling", decreasing_within_noise(&seq, 1e-11)),
        ],
        format!(
            "n = 200: {:.2e}; n = 100, 200, 400: {}",
            at_200.residual,
            residuals.join(", ")
        ),
    )
}

fn criterion_6(runs: &mut Vec<Run>) -> Outcome {
    let free = preset_sweep("fig2a");
    let quad = preset_sweep("fig2b");
    runs.extend(sweep_runs("fig2a", &free));
    runs.extend(sweep_runs("fig2b", &quad));

    let (end_a, _) = endpoint(&free);
    let spacing_a = end_a.levels[2].energy - end_a.levels[0].energy;

    let (end_b, class_b) = endpoint(&quad);
    let scheme = match quad.metadata.spec.base() {
        sweeps::SweepBase::RScheme(s) => *s,
        sweeps::SweepBase::Coupling { .. } => unreachable!("fig2b is an r sweep"),
    };
    let omega_tilde = scheme.omega_tilde(1.0);
    let spacing_b = end_b.levels[2].energy - end_b.levels[0].energy;
    let tol = 1e-6 * W;
    let ground_pair_b =
        end_b.levels[1].energy - end_b.levels[0].energy < tol && end_b.levels[0].parity != end_b.levels[1].parity;
    Outcome::new(
        &[
            ("(a) degenerate ladder", degenerate_pairs(end_a, tol)),
            ("(a) spacing within 1e-6 of w", (spacing_a - W).abs() < 1e-6),
            (
                "(b) spacing within 1e-3 of w~[1]",
                (spacing_b / omega_tilde - 1.0).abs() < 1e-3,
            ),
            ("(b) ground pair degenerate", ground_pair_b),
            (
                "(b) spontaneously broken",
                class_b == Some(SusyClass::SpontaneouslyBroken),
            ),
        ],
        format!("(a) spacing {spacing_a:.9}; (b) spacing {spacing_b:.6} vs w~[1] {omega_tilde:.6}, class {class_b:?}"),
    )
}

fn endpoint(result: &SweepResult) -> (&Spectrum, Option<SusyClass>) {
    let p = result.points.last().unwrap();
    (&p.spectrum, p.susy.as_ref().map(|s| s.classification))
}

fn criterion_7() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut worst_gap: f64 = 0.0;
    let mut worst_commutator: f64 = 0.0;
    for _ in 0..20 {
        let p = ModelParams::new(
            rng.gen_range(0.2..3.0),
            rng.gen_range(0.2..3.0),
            rng.gen_range(0.0..2.0),
            rng.gen_range(0.0..1.0),
        )
        .unwrap();
        let t = trunc(rng.gen_range(20..60));
        worst_gap = worst_gap.max(sector_agreement(&p, &t, 8).unwrap());
        worst_commutator = worst_commutator.max(parity_commutator(&p, &t));
    }
    Outcome::new(
        &[
            ("sector route within 1e-9", worst_gap < 1e-9),
            ("[H, P] < 1e-12", worst_commutator < 1e-12),
        ],
        format!("20 draws: max level difference {worst_gap:.2e}, max |[H, P]| {worst_commutator:.2e}"),
    )
}

fn criterion_8(runs: &[Run]) -> Outcome {
    let mut worst = (0.0f64, String::new());
    for run in runs {
        let small = trunc(run.n_max);
        let large = small.doubled();
        let levels = |t: &Truncation| -> Vec<f64> {
            let h = build_hamiltonian(&run.params, t).shifted(run.shift);
            sector_levels(&h, t, STABILITY_LEVELS)
                .unwrap()
                .iter()
                .map(|l| l.energy)
                .collect()
        };
        let change = relative_change(&levels(&small), &levels(&large));
        if change >= worst.0 {
            worst = (change, run.label.clone());
        }
    }
    Outcome::new(
        &[("lowest 8 levels stable on doubling", worst.0 < STABILITY_TOL)],
        format!(
            "{} runs, worst relative change {:.2e} ({})",
            runs.len(),
            worst.0,
            worst.1
        ),
    )
}

fn main() -> ExitCode {
    let mut runs = Vec::new();
    let mut all_passed = true;
    let mut report = |n: usize, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let outcome = f();
        all_passed &= outcome.passed;
        println!(
            "criterion {n} ({name}): {} [{:.1}s] {}",
            if outcome.passed { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            outcome.detail
        );
    };
    report(1, "unbroken fixture", &mut || criterion_1(&mut runs));
    report(2, "spontaneous breaking at C = 0", &mut || criterion_2(&mut runs));
    report(3, "no-go at C = 0.3770", &mut || criterion_3(&mut runs));
    report(4, "squeezed-image spectrum", &mut || criterion_4(&mut runs));
    report(5, "polaron-frame identity", &mut criterion_5);
    report(6, "r-scheme endpoints", &mut || criterion_6(&mut runs));
    report(7, "parity sectors", &mut criterion_7);
    let runs = std::mem::take(&mut runs);
    report(8, "convergence contract", &mut || criterion_8(&runs));
    if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

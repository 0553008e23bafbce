//! Acceptance suite. Runs every criterion at its stated tolerance, prints one
//! line per criterion and exits non-zero if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use taubnut::config_file::{preset, ConfigFile};
use taubnut::manifest::RunManifest;
use taubnut::report::VerificationReport;
use taubnut::sampling::{random_config, random_points, Region};
use taubnut::suite::{run_suite, CheckName};
use taubnut_core::geometry::riem_norm;
use taubnut_core::integrals::fiber_length;
use taubnut_core::{ChartPoint, InstantonConfig};

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    limit_s: f64,
    run: fn() -> Outcome,
}

fn physical_presets() -> Vec<(String, InstantonConfig)> {
    ["taub-nut", "two-center", "ak"]
        .iter()
        .map(|n| (n.to_string(), preset(n).unwrap()))
        .collect()
}

/// Random centers for k in {1, 2, 3, 5}.
fn random_configs() -> Vec<(String, InstantonConfig)> {
    [(1, 0.5), (2, 0.3), (3, 0.25), (5, 0.2)]
        .iter()
        .map(|&(k, m)| {
            (
                format!("random k={k}"),
                random_config(k, m, 1000 + k as u64),
            )
        })
        .collect()
}

fn all_configs() -> Vec<(String, InstantonConfig)> {
    let mut v = physical_presets();
    v.extend(random_configs());
    v
}

fn run(config: &InstantonConfig, checks: &[CheckName]) -> Result<VerificationReport, String> {
    let mut m = RunManifest::new(ConfigFile::from_config(config));
    m.suite = checks.to_vec();
    run_suite(&m).map(|o| o.report).map_err(|e| e.to_string())
}

/// Runs `checks` on every config and requires all of them to pass; reports
/// the largest value of each check relative to its tolerance.
fn require_pass(configs: &[(String, InstantonConfig)], checks: &[CheckName]) -> Outcome {
    let mut worst: Vec<(CheckName, f64, f64)> = checks.iter().map(|c| (*c, 0.0, 0.0)).collect();
    for (name, c) in configs {
        let r = run(c, checks)?;
        for (rec, w) in r.checks.iter().zip(worst.iter_mut()) {
            if !rec.passed {
                return Err(format!(
                    "{name}: {} = {:e} > {:e}",
                    rec.name, rec.value, rec.tolerance
                ));
            }
            if rec.value >= w.1 {
                *w = (rec.name, rec.value, rec.tolerance);
            }
        }
    }
    Ok(worst
        .iter()
        .map(|(n, v, t)| format!("{n} {v:.2e}/{t:.0e}"))
        .collect::<Vec<_>>()
        .join(", "))
}

fn flat_model() -> Outcome {
    let c = preset("flat").unwrap();
    let pts = random_points(&c, Region::Admissible, 500, 1, "acceptance-flat");
    let mut riem: f64 = 0.0;
    for x in &pts {
        riem = riem.max(riem_norm(&c, &ChartPoint::automatic(&c, *x)).map_err(|e| e.to_string())?);
        let l = fiber_length(&c, *x).map_err(|e| e.to_string())?;
        if l != 8.0 * PI * c.mass() {
            return Err(format!("fiber length {l} at {x:?}"));
        }
    }
    if riem > 1e-12 {
        return Err(format!("|Riem| = {riem:e}"));
    }
    let summary = require_pass(
        &[("flat".into(), c)],
        &[
            CheckName::Mass,
            CheckName::RiemDecay,
            CheckName::FiberLength,
        ],
    )?;
    Ok(format!(
        "max |Riem| {riem:e}, fiber length exact; {summary}"
    ))
}

fn connection_identity() -> Outcome {
    require_pass(&random_configs(), &[CheckName::ConnectionCurvature])
}

fn hyperkahler() -> Outcome {
    require_pass(
        &all_configs(),
        &[
            CheckName::KahlerClosedness,
            CheckName::Quaternion,
            CheckName::KillingMoment,
        ],
    )
}

fn ricci_flatness() -> Outcome {
    require_pass(&all_configs(), &[CheckName::RicciFlatness])
}

fn flux() -> Outcome {
    require_pass(
        &all_configs(),
        &[CheckName::FluxQuantization, CheckName::FluxAdditivity],
    )
}

fn mass() -> Outcome {
    let mut out = Vec::new();
    for (name, c) in physical_presets() {
        let r = run(&c, &[CheckName::Mass, CheckName::MassFluxIdentity])?;
        for rec in &r.checks {
            if !rec.passed {
                return Err(format!("{name}: {} = {:e}", rec.name, rec.value));
            }
        }
        out.push(format!(
            "{name} {:.9}",
            r.checks[0].details["extrapolated"].as_f64().unwrap()
        ));
    }
    Ok(out.join(", "))
}

fn slopes(checks: &[CheckName]) -> Outcome {
    let mut out = Vec::new();
    for (name, c) in all_configs() {
        let r = run(&c, checks)?;
        for rec in &r.checks {
            if !rec.passed {
                return Err(format!("{name}: {} off by {:.4}", rec.name, rec.value));
            }
        }
        let s: Vec<String> = r
            .checks
            .iter()
            .map(|rec| format!("{:+.3}", rec.details["slope"].as_f64().unwrap()))
            .collect();
        out.push(format!("{name} {}", s.join("/")));
    }
    Ok(out.join(", "))
}

fn curvature_decay() -> Outcome {
    slopes(&[CheckName::RiemDecay])
}

fn asymptotic_model() -> Outcome {
    let s = slopes(&[CheckName::MetricDeviationDecay, CheckName::FiberDefectDecay])?;
    let f = require_pass(&all_configs(), &[CheckName::FiberLength])?;
    Ok(format!("{s}; {f}"))
}

fn volume_growth() -> Outcome {
    require_pass(&all_configs(), &[CheckName::VolumeGrowth])
}

fn harmonic_coordinates() -> Outcome {
    require_pass(&all_configs(), &[CheckName::HarmonicCoordinates])
}

fn gauge_invariance() -> Outcome {
    require_pass(&all_configs(), &[CheckName::GaugeInvariance])
}

fn negative_controls() -> Outcome {
    let c = preset("perturbed-connection").unwrap();
    let must_fail = [
        CheckName::ConnectionCurvature,
        CheckName::KahlerClosedness,
        CheckName::Quaternion,
        CheckName::KillingMoment,
        CheckName::RicciFlatness,
        CheckName::FluxQuantization,
    ];
    let r = run(&c, &must_fail)?;
    // criterion 3 is a group: at least one of its checks must catch it
    let hk_caught = r.checks[1..4].iter().any(|x| !x.passed);
    for rec in [&r.checks[0], &r.checks[4], &r.checks[5]] {
        if rec.passed {
            return Err(format!("perturbed connection passes {}", rec.name));
        }
    }
    if !hk_caught {
        return Err("perturbed connection passes the hyperkahler checks".into());
    }
    let failing = r.checks.iter().filter(|x| !x.passed).count();
    let u = preset("unequal-masses").unwrap();
    let r = run(&u, &[CheckName::FluxQuantization])?;
    let small: Vec<f64> = serde_json::from_value(r.checks[0].details["small"].clone()).unwrap();
    let frac = small
        .iter()
        .map(|v| (v - v.round()).abs())
        .fold(0.0, f64::max);
    if r.checks[0].passed || frac < 0.1 {
        return Err(format!("unequal masses give chern {small:?}"));
    }
    Ok(format!(
        "perturbed: {failing} of 6 checks fail; unequal-mass chern {small:?}"
    ))
}

fn oracle() -> Outcome {
    require_pass(
        &all_configs(),
        &[CheckName::JetOracle, CheckName::MetricInverse],
    )
}

const CRITERIA: &[Criterion] = &[
    Criterion {
        id: 1,
        name: "flat model",
        limit_s: 5.0,
        run: flat_model,
    },
    Criterion {
        id: 2,
        name: "connection identity",
        limit_s: 10.0,
        run: connection_identity,
    },
    Criterion {
        id: 3,
        name: "hyperkahler identities",
        limit_s: 30.0,
        run: hyperkahler,
    },
    Criterion {
        id: 4,
        name: "ricci-flatness",
        limit_s: 60.0,
        run: ricci_flatness,
    },
    Criterion {
        id: 5,
        name: "flux quantization",
        limit_s: 20.0,
        run: flux,
    },
    Criterion {
        id: 6,
        name: "mass",
        limit_s: 120.0,
        run: mass,
    },
    Criterion {
        id: 7,
        name: "curvature decay",
        limit_s: 60.0,
        run: curvature_decay,
    },
    Criterion {
        id: 8,
        name: "asymptotic model",
        limit_s: 60.0,
        run: asymptotic_model,
    },
    Criterion {
        id: 9,
        name: "cubic volume growth",
        limit_s: 60.0,
        run: volume_growth,
    },
    Criterion {
        id: 10,
        name: "harmonic coordinates",
        limit_s: 10.0,
        run: harmonic_coordinates,
    },
    Criterion {
        id: 11,
        name: "gauge invariance",
        limit_s: 30.0,
        run: gauge_invariance,
    },
    Criterion {
        id: 12,
        name: "negative controls",
        limit_s: 30.0,
        run: negative_controls,
    },
    Criterion {
        id: 13,
        name: "oracle equivalence",
        limit_s: 10.0,
        run: oracle,
    },
];

fn main() -> ExitCode {
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for c in CRITERIA {
        if !filter.is_empty()
            && !filter
                .iter()
                .any(|f| c.name.contains(f.as_str()) || c.id.to_string() == *f)
        {
            continue;
        }
        let start = Instant::now();
        let outcome = (c.run)();
        let t = start.elapsed().as_secs_f64();
        let outcome = match outcome {
            Ok(msg) if t > c.limit_s => Err(format!("took {t:.1} s, limit {} s; {msg}", c.limit_s)),
            other => other,
        };
        match outcome {
            Ok(msg) => println!("PASS [{:>2}] {} ({t:.2} s): {msg}", c.id, c.name),
            Err(msg) => {
                failed += 1;
                println!("FAIL [{:>2}] {} ({t:.2} s): {msg}", c.id, c.name);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

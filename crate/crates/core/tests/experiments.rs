use hfa_core::experiments::{run, ExperimentKind, ExperimentSpec, Filling, Knobs};

fn small(kind: ExperimentKind) -> ExperimentSpec {
    ExperimentSpec {
        experiment: kind,
        length: 60,
        samples: 4,
        seed: 11,
        knobs: Knobs {
            radius: 3,
            rotations: 5,
            ..Knobs::default()
        },
        ..ExperimentSpec::default()
    }
}

#[test]
fn every_experiment_runs_on_a_small_lattice() {
    for kind in ExperimentKind::ALL {
        let mut spec = small(kind);
        match kind {
            ExperimentKind::SweepPeriodic => spec.q = 0.0,
            ExperimentKind::MultiscaleProbe => {
                spec.w = 8.0;
                spec.q = 0.5;
                spec.length = 10;
            }
            _ => {}
        }
        let table = run(&spec).unwrap_or_else(|e| panic!("{kind}: {e}"));
        assert_eq!(table.experiment(), kind.name());
        assert!(table.is_complete(), "{kind}: {:?}", table.failure());
        assert!(!table.rows().is_empty(), "{kind} produced no rows");
        let csv = table.to_csv(&[]);
        assert!(csv.contains("# status: complete"));
    }
}

#[test]
fn same_seed_gives_identical_csv() {
    for kind in [ExperimentKind::Converge, ExperimentKind::Wegner] {
        let spec = small(kind);
        let a = run(&spec).unwrap().to_csv(&[]);
        let b = run(&spec).unwrap().to_csv(&[]);
        assert_eq!(a, b);
    }
}

#[test]
fn periodic_sweep_rejects_interaction() {
    let spec = small(ExperimentKind::SweepPeriodic);
    assert!(run(&spec).unwrap_err().is_configuration());
}

#[test]
fn oversized_filling_is_a_configuration_error() {
    let spec = ExperimentSpec {
        filling: Filling::Count(1000),
        ..small(ExperimentKind::Localisation)
    };
    assert!(run(&spec).unwrap_err().is_configuration());
}

#[test]
fn non_convergence_keeps_the_partial_trace() {
    let spec = ExperimentSpec {
        max_iter: 3,
        tol: 1e-14,
        algorithm: hfa_core::scf::Algorithm::FixedPoint,
        ..small(ExperimentKind::Converge)
    };
    let table = run(&spec).unwrap();
    assert!(!table.is_complete());
    assert!(table.to_csv(&[]).contains("# status: failed"));
    assert!(!table.rows().is_empty());
}

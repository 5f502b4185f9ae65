// Temporary timing probe; removed once the projection pipeline is tuned.
use entrocone::polyhedra::{project_cone_with_progress, shannon_cone_for, ProjectOptions};
use entrocone::scenario::Scenario;

#[test]
#[ignore]
fn probe_chsh_projection() {
    let s = Scenario::chained_bell(2).unwrap();
    let cone = shannon_cone_for(s.labels().to_vec());
    let t0 = std::time::Instant::now();
    let projected = project_cone_with_progress(
        &cone,
        &s.observed_index(),
        &ProjectOptions::default(),
        |st| {
            eprintln!(
                "step {} eliminate {}: {}x{} -> {} derived, {} pruned, {} minimal ({:?})",
                st.step,
                st.eliminated,
                st.positive_rows,
                st.negative_rows,
                st.derived,
                st.after_prune,
                st.after_redundancy,
                t0.elapsed()
            );
        },
    )
    .unwrap();
    eprintln!("CHSH projected: {} facets in {:?}", projected.len(), t0.elapsed());
    eprintln!("{}", projected.format());
}

#[test]
#[ignore]
fn probe_extension_lp() {
    use entrocone::dist::JointDistribution;
    use entrocone::polyhedra::extension_feasible;
    use rand::SeedableRng;
    let s = Scenario::n_cycle(5).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let t0 = std::time::Instant::now();
    let mut feasible = 0;
    for i in 0..50 {
        let d = JointDistribution::random(s.labels().to_vec(), vec![2; 5], &mut rng);
        let obs = d.observed_entropy_vector(&s).unwrap();
        if extension_feasible(&obs, &s).unwrap().is_feasible() {
            feasible += 1;
        }
        if i == 9 {
            eprintln!("10 LPs in {:?}", t0.elapsed());
        }
    }
    eprintln!("50 extension LPs (n=5): {:?}, {} feasible", t0.elapsed(), feasible);
}

#[test]
#[ignore]
fn probe_five_cycle_projection() {
    let s = Scenario::n_cycle(5).unwrap();
    let cone = shannon_cone_for(s.labels().to_vec());
    let t0 = std::time::Instant::now();
    let projected = project_cone_with_progress(
        &cone,
        &s.observed_index(),
        &ProjectOptions::default(),
        |st| {
            eprintln!(
                "step {} eliminate {}: {}x{} -> {} derived, {} pruned, {} minimal ({:?})",
                st.step,
                st.eliminated,
                st.positive_rows,
                st.negative_rows,
                st.derived,
                st.after_prune,
                st.after_redundancy,
                t0.elapsed()
            );
        },
    )
    .unwrap();
    eprintln!("5-cycle projected: {} facets in {:?}", projected.len(), t0.elapsed());
}

use kslab::clifford::WordPolicy;
use kslab::kugasatake::{reference_phi_coords, run_prop51, GramModel, Prop51Config};
use kslab::field::REFERENCE_MATRIX;

fn main() {
    for model in [GramModel::Diagonalized, GramModel::Exact] {
        let report = run_prop51(&Prop51Config {
            matrix: REFERENCE_MATRIX,
            phi: reference_phi_coords(),
            modulus: 101,
            policies: vec![WordPolicy::three_fold(), WordPolicy::restricted_four_fold(), WordPolicy::Closure],
            gram_model: model,
        })
        .unwrap();
        println!("{model:?} relations");
        for (k, g) in report.generators.iter().enumerate() {
            println!("  G{} = {g}", k + 1);
        }
        for r in &report.ranks {
            println!("  {}: {} words, rank {}", r.policy_label, r.words, r.rank);
        }
    }
}

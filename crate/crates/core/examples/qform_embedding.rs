use kslab::qform::{complement_for_embedding, form_invariants_with, HasseConvention, QForm};

fn main() {
    let small = QForm::diagonal_ints(&[1, -3, 5]);
    let big = QForm::diagonal_ints(&[1, 1, 1, -1, -1, -1, 2, 7]);
    for conv in [HasseConvention::LessEq, HasseConvention::Less] {
        let inv = form_invariants_with(&small, conv).unwrap();
        println!("convention {conv}: signature {:?}, disc {}", inv.signature, inv.disc);
        for v in inv.places() {
            println!("  hasse at {v}: {:+}", inv.hasse(v));
        }
    }
    let cert = complement_for_embedding(&small, &big).unwrap();
    let diag: Vec<String> = (0..cert.codim).map(|i| cert.complement.gram()[i][i].to_string()).collect();
    println!("complement diag({}), verified {}", diag.join(", "), cert.verified);
    for rec in &cert.places {
        println!("  {}: complement {:+} (target {:+}), sum {:+}, ambient {:+}", rec.place, rec.complement_hasse, rec.target_hasse, rec.sum_hasse, rec.ambient_hasse);
    }
}

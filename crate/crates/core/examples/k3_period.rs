use kslab::arith::qf;
use kslab::field::{make_field, search_prop33, REFERENCE_MATRIX};
use kslab::interval::decimal;
use kslab::k3lattice::{build_transcendental, embeds_in_k3, hodge_vs_isometry, solve_period};
use kslab::pipeline::default_search;

fn main() {
    let f = make_field(REFERENCE_MATRIX).unwrap();
    let t = search_prop33(&f, &default_search()).unwrap();
    let space = build_transcendental(&f, [t.f1, t.f2, t.f3]).unwrap();
    println!("signature(D) = {:?}", space.signature);

    let cert = embeds_in_k3(&space, 1).unwrap();
    println!("D embeds in L_2: {} (complement signature {:?})", cert.verified, cert.complement_signature);

    let p = solve_period(&space, &qf(1, 2), 128).unwrap();
    println!("v = {:?}", p.symbolic);
    println!("x3^2 = {}", decimal(&p.x3_sq.mid(), 30));
    println!("|v^T D v| <= {}", decimal(&p.residual_mag(), 40));
    println!("conj(v)^T D v = {}", decimal(&p.hermitian.re.mid(), 30));
    println!("2 t^2 q2      = {}", decimal(&p.expected_hermitian().mid(), 30));

    let h = hodge_vs_isometry(&space, Some(&p), &f.alpha(), 5).unwrap();
    println!("{}", serde_json::to_string_pretty(&h).unwrap());
}

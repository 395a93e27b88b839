use kslab::field::{make_field, search_prop33, REFERENCE_MATRIX};
use kslab::interval::decimal;
use kslab::pipeline::default_search;

fn main() {
    let f = make_field(REFERENCE_MATRIX).unwrap();
    println!("charpoly {}", f.charpoly_string());
    for k in 0..3 {
        println!("root {k}: {}", decimal(&f.root(k, 128).mid(), 30));
    }
    let b: Vec<String> = f.b_basis().iter().map(|x| x.to_string()).collect();
    println!("b = {b:?}");

    let t = search_prop33(&f, &default_search()).unwrap();
    for (name, x) in [("f1", &t.f1), ("f2", &t.f2), ("f3", &t.f3)] {
        let c = x.approx_conjugates();
        println!("{name} = {x}  conjugates {c:.4?}  pattern {:?}", x.sign_pattern().pair());
    }
    println!("distinguished embedding {}", t.embedding);
}

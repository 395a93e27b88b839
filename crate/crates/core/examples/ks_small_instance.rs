use kslab::kugasatake::small_instance;

fn main() {
    let r = small_instance().unwrap();
    println!("n = {}, J^2 = -1: {}", r.n, r.j_squared_minus_one);
    println!("negative-square pair: {:?}", r.negative_pair);
    println!("polarization from {:?} with sign {}: positive {}", r.polarization_pair, r.polarization_sign, r.polarization_positive);
    println!("Phi_v J = J Phi_v: {:?}", r.equivariance.commutes);
    println!("J Phi_v - Phi_v J = Phi_[c,v]: {}", r.equivariance.commutator_identity);
    println!("pullback lambda = {} (multiple of -gram: {})", r.pullback.lambda, r.pullback.weight_two_multiple);
    println!("right multiplication ratio {}", r.right_invariance.ratio);
}

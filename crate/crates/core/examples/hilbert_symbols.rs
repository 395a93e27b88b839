use kslab::arith::q;
use kslab::qform::{hilbert_symbol, relevant_places};
use num_bigint::BigInt;

fn main() {
    for (a, b) in [(-1, -1), (2, 5), (3, -7), (-6, 10)] {
        let ints = [BigInt::from(2), BigInt::from(a), BigInt::from(b)];
        let mut prod = 1;
        print!("({a}, {b}):");
        for v in relevant_places(ints.iter()) {
            let s = hilbert_symbol(&q(a), &q(b), v).unwrap();
            prod *= s;
            print!(" {v}={s:+}");
        }
        println!("  product {prod:+}");
    }
}

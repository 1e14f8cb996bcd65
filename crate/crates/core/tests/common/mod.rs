//! Helpers shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;

use trm_core::adversarial::ComponentCode;
use trm_core::tensor::{AxisLayout, BitTensor, TriTensor};
use trm_core::BitWord;

pub fn random_word(rng: &mut impl Rng, n: usize) -> BitWord {
    BitWord::from_bits((0..n).map(|_| rng.random::<bool>()))
}

/// Random codeword of the product of the row spaces of `gens`, encoded one
/// axis at a time.
pub fn random_product_codeword(rng: &mut impl Rng, gens: &[Vec<BitWord>]) -> BitTensor {
    let mut shape: Vec<usize> = gens.iter().map(|g| g.len()).collect();
    let mut cur = BitTensor::from_word(&shape, random_word(rng, shape.iter().product())).unwrap();
    for (axis, g) in gens.iter().enumerate() {
        let n = g[0].len();
        let mut next_shape = shape.clone();
        next_shape[axis] = n;
        let mut next = BitTensor::zeros(&next_shape).unwrap();
        let from = AxisLayout::new(&shape, axis);
        let to = AxisLayout::new(&next_shape, axis);
        for p in 0..from.prefix {
            for s in 0..from.suffix {
                let coeffs = cur.axis_vector(&from, p, s);
                let mut c = BitWord::zeros(n);
                for i in coeffs.ones_iter() {
                    c.xor_assign(&g[i]);
                }
                next.set_axis_vector(&to, p, s, &c);
            }
        }
        cur = next;
        shape = next_shape;
    }
    cur
}

/// Every axis vector along every axis is a codeword of its component.
pub fn is_tensor_codeword(codes: &[&dyn ComponentCode], a: &BitTensor) -> bool {
    codes.iter().enumerate().all(|(k, c)| {
        let l = AxisLayout::new(a.shape(), k);
        (0..l.prefix).all(|p| (0..l.suffix).all(|s| c.is_member(&a.axis_vector(&l, p, s))))
    })
}

/// Distance between a decoder output and its input, skipping input erasures.
pub fn distance_to_input(out: &BitTensor, input: &TriTensor) -> usize {
    (0..out.len())
        .filter(|&i| input.get_flat(i).is_some_and(|b| b != out.bits().get(i)))
        .count()
}

/// Random generator with `k` rows of length `n` and no zero column.
pub fn random_generator(rng: &mut impl Rng, k: usize, n: usize) -> Vec<BitWord> {
    loop {
        let g: Vec<BitWord> = (0..k).map(|_| random_word(rng, n)).collect();
        let covered = (0..n).all(|j| g.iter().any(|r| r.get(j)));
        let rank = trm_core::gf2::BitMatrix::new(n, g.clone()).rank();
        if covered && rank == k {
            return g;
        }
    }
}

use std::collections::{HashSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::semigroup::{check_budget, GeneratorSet, Odometer, Word, DEFAULT_WORD_BUDGET};

/// Bound on the size of the reduced group `Γ_m` we are willing to close.
const GROUP_CLOSURE_CAP: usize = 1 << 24;

/// Words congruent to the identity modulo `m`, with the order of the group
/// generated by the reductions of the generators in `GL(d, ℤ/mℤ)`.
#[derive(Debug, Clone)]
pub struct CongruenceWords {
    pub modulus: u64,
    pub words: Vec<Word>,
    pub group_order: u64,
}

fn is_prime(m: u64) -> bool {
    if m < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= m {
        if m.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

/// `|GL(d, 𝔽_p)| = Π_{i<d} (p^d − p^i)`; `None` on overflow.
pub fn gl_order(d: u32, p: u64) -> Option<u128> {
    let pd = (p as u128).checked_pow(d)?;
    (0..d).try_fold(1u128, |acc, i| acc.checked_mul(pd - (p as u128).pow(i)))
}

fn mul_mod(d: usize, x: &[u64], y: &[u64], m: u64) -> Vec<u64> {
    let mut out = vec![0u64; d * d];
    for i in 0..d {
        for j in 0..d {
            let mut s: u128 = 0;
            for k in 0..d {
                s += x[i * d + k] as u128 * y[k * d + j] as u128;
            }
            out[i * d + j] = (s % m as u128) as u64;
        }
    }
    out
}

fn identity_mod(d: usize) -> Vec<u64> {
    let mut id = vec![0u64; d * d];
    for i in 0..d {
        id[i * d + i] = 1;
    }
    id
}

/// All words of length `≤ max_len` whose product is `≡ Id (mod m)`.
pub fn congruence_words(gens: &GeneratorSet, m: u64, max_len: usize) -> Result<CongruenceWords> {
    if !gens.is_integer() {
        return Err(Error::Precondition("congruence subsemigroups need integer generators".into()));
    }
    if !is_prime(m) {
        return Err(Error::BadModulus { modulus: m, reason: "not prime".into() });
    }
    let mb = BigInt::from(m);
    for (i, det) in gens.dets().iter().enumerate() {
        if det.numer().mod_floor(&mb).is_zero() {
            return Err(Error::BadModulus {
                modulus: m,
                reason: format!("divides det of generator {}", gens.label(i)),
            });
        }
    }
    check_budget(gens.len(), max_len, DEFAULT_WORD_BUDGET)?;
    let d = gens.dim();
    let reduced: Vec<Vec<u64>> =
        (0..gens.len()).map(|i| gens.matrix(i).reduce_mod(m).expect("integral")).collect();
    let id = identity_mod(d);

    let mut hits: Vec<Vec<usize>> = Vec::new();
    let mut odo = Odometer::new(gens.len(), max_len, id.clone(), |p: &Vec<u64>, i| {
        mul_mod(d, p, &reduced[i], m)
    });
    while let Some((digits, p)) = odo.advance() {
        if *p == id {
            hits.push(digits.to_vec());
        }
    }
    let words = hits.iter().map(|ix| Word::from_indices(gens, ix)).collect::<Result<Vec<_>>>()?;

    let mut seen: HashSet<Vec<u64>> = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for r in &reduced {
            let y = mul_mod(d, &x, r, m);
            if seen.insert(y.clone()) {
                if seen.len() > GROUP_CLOSURE_CAP {
                    return Err(Error::BudgetExceeded {
                        needed: seen.len() as u128,
                        budget: GROUP_CLOSURE_CAP as u128,
                    });
                }
                queue.push_back(y);
            }
        }
    }
    Ok(CongruenceWords { modulus: m, words, group_order: seen.len() as u64 })
}

use positlab_core::oracle::{self, round_to_posit};
use positlab_core::posit::{self, PositBits, State};
use positlab_core::softfloat::FloatBits;
use positlab_core::BigFloat;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn any_posit() -> impl Strategy<Value = PositBits> {
    any::<u32>().prop_map(PositBits)
}

fn non_nar() -> impl Strategy<Value = PositBits> {
    any::<u32>().prop_filter("not NaR", |&b| b != 0x8000_0000).prop_map(PositBits)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn encode_inverts_decode(p in any_posit()) {
        prop_assert_eq!(posit::posit_encode(posit::posit_decode(p)), p);
    }

    #[test]
    fn decode_matches_field_evaluator(p in any_posit()) {
        match oracle::posit_value(p) {
            None => prop_assert_eq!(posit::posit_decode(p).state, State::NaR),
            Some(v) => {
                if !p.is_zero() {
                    let d = posit::posit_decode(p);
                    prop_assert!((-120..=120).contains(&d.sf));
                }
                prop_assert_eq!(p.to_real(), v);
            }
        }
    }

    #[test]
    fn add_is_commutative(a in any_posit(), b in any_posit()) {
        prop_assert_eq!(posit::posit_add(a, b), posit::posit_add(b, a));
    }

    #[test]
    fn mul_is_commutative(a in any_posit(), b in any_posit()) {
        prop_assert_eq!(posit::posit_mul(a, b), posit::posit_mul(b, a));
    }

    #[test]
    fn add_negation_symmetry(a in non_nar(), b in non_nar()) {
        let lhs = posit::posit_add(a, b);
        let rhs = posit::posit_add(a.negate(), b.negate()).negate();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn sub_is_add_of_negation(a in any_posit(), b in any_posit()) {
        prop_assert_eq!(posit::posit_sub(a, b), posit::posit_add(a, b.negate()));
    }

    #[test]
    fn add_correctly_rounded(a in any_posit(), b in any_posit()) {
        prop_assert_eq!(posit::posit_add(a, b), oracle::posit_add_ref(a, b));
    }

    #[test]
    fn mul_correctly_rounded(a in any_posit(), b in any_posit()) {
        prop_assert_eq!(posit::posit_mul(a, b), oracle::posit_mul_ref(a, b));
    }

    #[test]
    fn from_real_matches_neighbour_search(bits in any::<u64>(), scale in -130i64..130) {
        let v = BigFloat::from_parts(bits >> 63 == 1, bits | 1, scale - 63);
        prop_assert_eq!(posit::posit_from_real(&v), round_to_posit(&v));
    }

    /// Between 2^-20 and 2^20 posit32 keeps at least 23 fraction bits, so its
    /// rounding error never exceeds that of float32.
    #[test]
    fn accuracy_band_vs_float32(bits in any::<u64>(), scale in -20i64..20) {
        let v = BigFloat::from_parts(false, bits | (1 << 63), scale - 63);
        let pe = posit::posit_from_real(&v).to_real().sub(&v, 512).abs();
        let fe = FloatBits::from_real(&v).to_real().sub(&v, 512).abs();
        prop_assert!(pe <= fe, "{:?} {:?}", pe, fe);
    }
}

/// Operands clustered around each other to exercise cancellation and carries.
#[test]
fn seeded_near_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..5000 {
        let a = PositBits(rng.random());
        let delta: i32 = rng.random_range(-300..300);
        let b = PositBits((a.0 as i32).wrapping_add(delta) as u32);
        for b in [b, b.negate()] {
            assert_eq!(posit::posit_add(a, b), oracle::posit_add_ref(a, b), "{a} + {b}");
            assert_eq!(posit::posit_sub(a, b), oracle::posit_sub_ref(a, b), "{a} - {b}");
            assert_eq!(posit::posit_mul(a, b), oracle::posit_mul_ref(a, b), "{a} * {b}");
        }
    }
}

#[test]
fn regime_boundary_round_trip() {
    // Every regime length, with fractions at both ends of their range.
    for sf in -120..=120i32 {
        for frac in [0u32, 0x8000_0000, u32::MAX << 5] {
            let v = BigFloat::from_parts(false, (1u64 << 32) | frac as u64, sf as i64 - 32);
            let p = posit::posit_from_real(&v);
            assert_eq!(posit::posit_encode(posit::posit_decode(p)), p);
            assert_eq!(posit::posit_encode(posit::posit_decode(p.negate())), p.negate());
        }
    }
}

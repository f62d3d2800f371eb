use positlab_core::opgraph::{self, Operator, TracedFormat};
use positlab_core::word::Bits;
use proptest::prelude::*;

fn total(op: Operator, fastmath: bool) -> u64 {
    opgraph::operator_report(op, fastmath).total_nodes
}

#[test]
fn print_operator_reports() {
    for fm in [true, false] {
        for op in Operator::ALL {
            let r = opgraph::operator_report(op, fm);
            println!(
                "fastmath={fm} {:<10} total={:>4} height={:>3} width={:>3} cats={:?}",
                op.name(),
                r.total_nodes,
                r.height,
                r.width,
                r.per_category
            );
        }
    }
}

#[test]
fn tracing_is_deterministic() {
    for op in Operator::ALL {
        assert_eq!(opgraph::trace_operator(op, true), opgraph::trace_operator(op, true));
    }
}

#[test]
fn fastmath_removes_nar_handling() {
    for op in [Operator::PositAdd, Operator::PositSub, Operator::PositMul] {
        assert!(total(op, true) < total(op, false), "{op}");
    }
}

#[test]
fn report_invariants_hold() {
    for op in Operator::ALL {
        let r = opgraph::operator_report(op, true);
        assert_eq!(r.total_nodes, r.per_category.iter().sum::<u64>());
        assert!(r.height <= r.total_nodes);
        assert!(r.width >= r.total_nodes.div_ceil(r.height));
        assert_eq!(r.level_occupancy.iter().sum::<u64>(), r.total_nodes);
    }
}

#[test]
fn fft_butterfly_ratio_is_size_independent() {
    let ratio = |n| {
        let p = opgraph::fft_cost_report(n, TracedFormat::Posit32, true).unwrap();
        let f = opgraph::fft_cost_report(n, TracedFormat::Float32, true).unwrap();
        assert!(f.total_nodes < p.total_nodes);
        p.total_nodes as f64 / f.total_nodes as f64
    };
    let r = ratio(16);
    for n in [64, 256, 4096] {
        assert!((ratio(n) - r).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(3000))]

    /// Replaying a traced graph reproduces the operator bit for bit.
    #[test]
    fn replay_matches_direct(a in any::<u32>(), b in any::<u32>(), fm in any::<bool>()) {
        for op in Operator::ALL {
            let g = opgraph::trace_operator(op, fm);
            prop_assert_eq!(g.eval(&[a, b])[0], op.apply(a, b, fm), "{}", op);
        }
    }

    #[test]
    fn butterfly_replay(x in proptest::collection::vec(any::<u32>(), 14)) {
        use positlab_core::fft::{butterfly4, Complex, Posit32};
        use positlab_core::posit::PositBits;
        let g = opgraph::trace_butterfly4(TracedFormat::Posit32, false);
        let c: Vec<Complex<PositBits>> = (0..7).map(|i| Complex::new(PositBits(x[2 * i]), PositBits(x[2 * i + 1]))).collect();
        let want = butterfly4(&Posit32, [&c[0], &c[1], &c[2], &c[3]], [&c[4], &c[5], &c[6]], false);
        let want: Vec<u32> = want.iter().flat_map(|c| [c.re.0, c.im.0]).collect();
        prop_assert_eq!(g.eval(&x), want);
        let _ = Bits(0);
    }
}

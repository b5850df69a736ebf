use plonka_core::builders::{
    chopped_sum_lattice_ops, complex_algebra, example_fig1, pz2, two_component_sum, FiniteMonoid,
};
use plonka_core::enumerate::enumerate_residuated_posets;
use plonka_core::format::AlgebraFile;
use plonka_core::order_sum::{generate_systems, GeneratorConfig};
use plonka_core::residuated::HCondition;
use plonka_core::{decompose, Algebra, FinitePoset, ResiduatedPoset};

fn up_to(n: usize) -> Vec<ResiduatedPoset> {
    (1..=n).flat_map(|k| enumerate_residuated_posets(k, None).unwrap()).collect()
}

fn fixture(name: &str) -> ResiduatedPoset {
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    AlgebraFile::from_json(&std::fs::read_to_string(path).unwrap())
        .unwrap()
        .to_algebra()
        .unwrap()
}

fn doubly_chopped(p: &FinitePoset) -> bool {
    let n = p.len();
    let bounded = |x: usize, y: usize, up: bool| {
        (0..n).any(|c| if up { p.leq(x, c) && p.leq(y, c) } else { p.leq(c, x) && p.leq(c, y) })
    };
    (0..n).all(|x| {
        (0..n).all(|y| (!bounded(x, y, true) || p.join(x, y).is_some()) && (!bounded(x, y, false) || p.meet(x, y).is_some()))
    })
}

#[test]
fn fig1_h4_failure_cells() {
    let a = example_fig1();
    let id = |l: &str| a.lookup(l).unwrap();
    let (p, x) = (id("p"), id("a"));
    assert_eq!(a.mult(p, x), id("b"));
    assert_eq!(a.one_x(id("b")), id("q"));
    assert_eq!(a.mult(a.one_x(p), a.one_x(x)), id("p"));
    assert_eq!(a.ld(p, x), id("⊥"));
    assert_eq!(a.one_x(id("⊥")), id("q"));
}

#[test]
fn pz2_is_not_integral_but_decomposes() {
    let a = pz2();
    assert!(!a.is_integrally_closed());
    assert!(a.balanced());
    for k in HCondition::ALL {
        assert!(a.check_h(k).holds, "{k}");
    }
    assert_eq!(decompose(&a).unwrap().members.len(), 2);
}

#[test]
fn pz3_is_balanced_but_fails_h1() {
    let a = complex_algebra(&FiniteMonoid::cyclic(3)).unwrap();
    assert!(a.balanced());
    // two-element subsets have trivial stabilizer, like the singletons,
    // but their square is the whole group, whose stabilizer is everything
    let x = a.lookup("{e,g}").unwrap();
    assert_eq!(a.one_x(x), a.unit());
    assert_eq!(a.one_x(a.mult(x, x)), a.lookup("{e,g,g2}").unwrap());
    assert!(!a.check_h(HCondition::H1).holds);
    assert!(!a.check_h(HCondition::H4).holds);
    assert!(decompose(&a).is_err());
}

/// Constant maps into any `0 < 1` of the second component always compose.
#[test]
fn every_two_component_sum_composes() {
    let small = up_to(3);
    let mut sums = 0;
    for a1 in &small {
        for a2 in &small {
            for zero in (0..a2.len()).filter(|&z| a2.poset().lt(z, a2.unit())) {
                let s = two_component_sum(a1, a2, zero).unwrap();
                assert_eq!(s.algebra.len(), a1.len() + a2.len());
                sums += 1;
            }
        }
    }
    assert!(sums > 0);
}

#[test]
fn doubly_chopped_sums_are_lattices() {
    let small = up_to(3);
    let mut checked = 0;
    for a1 in small.iter().filter(|a| doubly_chopped(a.poset())) {
        for a2 in small.iter().filter(|a| a.poset().is_lattice()) {
            for zero in (0..a2.len()).filter(|&z| a2.poset().lt(z, a2.unit())) {
                let s = two_component_sum(a1, a2, zero).unwrap();
                let (join, meet) = chopped_sum_lattice_ops(&s).unwrap();
                let o = s.algebra.poset();
                assert!(o.is_lattice());
                for x in 0..o.len() {
                    for y in 0..o.len() {
                        assert_eq!(Some(join.get(x, y)), o.join(x, y));
                        assert_eq!(Some(meet.get(x, y)), o.meet(x, y));
                    }
                }
                checked += 1;
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn chopped_ops_reject_a_non_lattice_second_component() {
    let small = up_to(3);
    let a1 = &small[0];
    let mut rejected = 0;
    for a2 in small.iter().filter(|a| !a.poset().is_lattice()) {
        for zero in (0..a2.len()).filter(|&z| a2.poset().lt(z, a2.unit())) {
            let s = two_component_sum(a1, a2, zero).unwrap();
            assert!(chopped_sum_lattice_ops(&s).is_err());
            rejected += 1;
        }
    }
    assert!(rejected > 0);
}

#[test]
fn fixtures_match_builders() {
    assert_eq!(fixture("pz2.json"), pz2());
    assert_eq!(fixture("fig1.json"), example_fig1());
}

#[test]
fn sum_order_of_generated_poset_components_is_a_poset() {
    // a single sample from the generator turned into a `FinitePoset`
    let mut first = None;
    generate_systems(
        GeneratorConfig {
            max_component_size: 2,
            budget_per_assignment: 10,
            seed: 1,
        },
        |s| {
            if first.is_none() && s.verify_o().ok() && s.index.len() == 2 {
                first = Some(s.clone());
            }
        },
    );
    let sys = first.expect("a satisfying system");
    let order: FinitePoset = sys.sum_poset().unwrap();
    assert_eq!(order.len(), sys.components.iter().map(|c| c.len()).sum::<usize>());
}

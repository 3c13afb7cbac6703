use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use tdcount_core::asp::{self, count_answer_sets, count_optimal, is_consistent, AspRow};
use tdcount_core::cnf::{CnfFormula, Lit};
use tdcount_core::corpus::{instance_rng, random_cnf, random_program, random_subset, CnfShape, ProgramShape};
use tdcount_core::dp::{purge, DpError, DpTable, Mode, Origins, RowData};
use tdcount_core::oracle::{brute_count_models, brute_projected_count};
use tdcount_core::projection::{projected_count, run_projection};
use tdcount_core::sat::{self, count_models, weighted_count};
use tdcount_core::td::{Heuristic, NiceKind};
use tdcount_core::{Instance, Options};

fn program(seed: u64) -> tdcount_core::program::GroundProgram {
    random_program(&mut instance_rng(seed, 0), &ProgramShape::default())
}

fn formula(seed: u64) -> CnfFormula {
    random_cnf(&mut instance_rng(seed, 0), &CnfShape::default())
}

fn unweighted(f: &CnfFormula) -> CnfFormula {
    CnfFormula::new(f.num_vars(), f.clauses().to_vec()).unwrap()
}

/// Forget-node totals equal the child totals over rows that pass the check.
fn forget_conserves<D: RowData>(tables: &[DpTable<D>]) -> bool
where
    D::Count: PartialEq,
{
    tables.iter().filter(|t| matches!(t.kind, NiceKind::Forget(_))).all(|t| {
        let child = &tables[t.children[0]];
        let survivors = t.rows.iter().flat_map(|r| match &r.origins {
            Origins::Unary(o) => o.clone(),
            _ => unreachable!(),
        });
        let child_total = survivors.fold(D::Count::zero(), |acc, i| acc + child.rows[i as usize].data.count().clone());
        child_total == t.total_count()
    })
}

#[test]
fn big_counts_are_exact() {
    // 100 unconstrained variables.
    let f = CnfFormula::new(100, vec![]).unwrap();
    assert_eq!(count_models(&f, &Options::default()).unwrap(), BigUint::one() << 100);
    // 40 independent choices.
    let src: String = (0..40).map(|i| format!("p{i} | q{i}.\n")).collect();
    let p = tdcount_core::program::parse_ground_program(&src).unwrap();
    assert_eq!(count_answer_sets(&p, &Options::default()).unwrap(), BigUint::one() << 40);
}

#[test]
fn decision_mode() {
    let p = tdcount_core::program::parse_ground_program("a :- not a.").unwrap();
    assert!(!is_consistent(&p, &Options::default()).unwrap());
    let p = tdcount_core::program::parse_ground_program("a | b. :- a.").unwrap();
    assert!(is_consistent(&p, &Options::default()).unwrap());
}

#[test]
fn oversized_bags_are_rejected() {
    let clauses: Vec<Vec<Lit>> =
        (1..=70).flat_map(|i| (i + 1..=70).map(move |j| vec![Lit::positive(i), Lit::positive(j)])).collect();
    let f = CnfFormula::new(70, clauses).unwrap();
    let err = count_models(&f, &Options::default()).unwrap_err();
    assert!(matches!(err, tdcount_core::Error::Dp(DpError::WidthTooLarge(70))), "{err}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn asp_tables_are_well_formed(seed in any::<u64>()) {
        let p = program(seed);
        let run = asp::solve(&p, &Options::new(Heuristic::MinDegree, seed), Mode::Counting, None).unwrap();
        for t in &run.store.tables {
            prop_assert!(t.keys_unique());
            for row in &t.rows {
                let r: &AspRow = &row.data;
                prop_assert!(r.has_self_witness(), "self-witness lost at node {}", t.node);
                prop_assert!(r.witnesses.len() <= 1 << (t.bag.len() + 1));
                prop_assert!(r.count >= BigUint::one());
            }
        }
        prop_assert!(forget_conserves(&run.store.tables));
    }

    #[test]
    fn sat_tables_are_well_formed(seed in any::<u64>()) {
        let f = formula(seed);
        let run = sat::solve_counting(&f, &Options::new(Heuristic::MinFill, seed), None).unwrap();
        for t in &run.store.tables {
            prop_assert!(t.keys_unique());
            prop_assert!(t.len() <= 1 << t.bag.len());
        }
        prop_assert!(forget_conserves(&run.store.tables));
        let weighted = sat::solve_weighted(&f, &Options::new(Heuristic::MinFill, seed), None).unwrap();
        prop_assert!(weighted.store.tables.iter().all(|t| t.rows.iter().all(|r| r.data.value > BigRational::zero())));
    }

    #[test]
    fn unit_weights_match_counts(seed in any::<u64>()) {
        let f = unweighted(&formula(seed));
        let ones: BTreeMap<Lit, BigRational> = (1..=f.num_vars())
            .flat_map(|v| [Lit::positive(v), Lit::negative(v)])
            .map(|l| (l, BigRational::one()))
            .collect();
        let f1 = f.clone().with_weights(ones).unwrap();
        let opts = Options::default();
        let count = count_models(&f, &opts).unwrap();
        prop_assert_eq!(weighted_count(&f1, &opts).unwrap(), BigRational::from_integer(BigInt::from(count.clone())));
        prop_assert_eq!(count, brute_count_models(&f).unwrap());
    }

    #[test]
    fn projection_bounds_and_monotonicity(seed in any::<u64>()) {
        let p = program(seed);
        let mut rng = instance_rng(seed, 1);
        let small = random_subset(&mut rng, p.num_atoms(), 0);
        let mut large = small.clone();
        large.extend(random_subset(&mut rng, p.num_atoms(), 0));
        large.sort();
        large.dedup();
        let opts = Options::new(Heuristic::MinFill, seed);
        let total = count_answer_sets(&p, &opts).unwrap();
        let ps = projected_count(Instance::Asp(&p), &small, &opts).unwrap();
        let pl = projected_count(Instance::Asp(&p), &large, &opts).unwrap();
        prop_assert!(ps <= pl);
        prop_assert!(pl <= total.clone().min(BigUint::one() << large.len()));
        let none = projected_count(Instance::Asp(&p), &[], &opts).unwrap();
        prop_assert_eq!(none == BigUint::one(), total > BigUint::zero());
        let all: Vec<usize> = (0..p.num_atoms()).collect();
        prop_assert_eq!(projected_count(Instance::Asp(&p), &all, &opts).unwrap(), total);
    }

    #[test]
    fn projection_matches_oracle_on_formulas(seed in any::<u64>()) {
        let f = formula(seed);
        let proj = random_subset(&mut instance_rng(seed, 2), f.num_vars(), 1);
        let run = run_projection(Instance::Cnf(&f), &proj, &Options::new(Heuristic::MinDegree, seed), None).unwrap();
        prop_assert_eq!(&run.count, &brute_projected_count(Instance::Cnf(&f), &proj).unwrap());
        for (t, &rows) in run.tables.iter().zip(&run.purged_rows) {
            prop_assert!(rows >= 20 || t.len() <= 1 << rows);
        }
        let all: Vec<usize> = (1..=f.num_vars()).collect();
        prop_assert_eq!(
            brute_projected_count(Instance::Cnf(&f), &all).unwrap(),
            brute_count_models(&f).unwrap()
        );
    }

    #[test]
    fn optimum_count_is_bounded_by_count(seed in any::<u64>()) {
        let p = program(seed);
        let opts = Options::default();
        let opt = count_optimal(&p, &opts).unwrap();
        let total = count_answer_sets(&p, &opts).unwrap();
        prop_assert!(opt.count <= total);
        prop_assert_eq!(opt.cost.is_none(), total.is_zero());
        let run = asp::solve(&p, &opts, Mode::Optimization, None).unwrap();
        prop_assert_eq!(purge(&run.store).root().rows.iter().all(|r| r.data.is_solution()), true);
    }
}

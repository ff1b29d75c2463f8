use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use natfarkas::certificates::{verify_witness, witness_from_solution, CertificateKind, Polynomial};
use natfarkas::engine::{check, check_semigroup, check_zsystem, CheckOptions};
use natfarkas::hierarchy::{classical_relaxation, is_monotone, solve_hierarchy};
use natfarkas::lattice::{add_points, monomial_pow, LatticeBox};
use natfarkas::lp::{solve_feasibility, LpInstance, LpOutcome, PivotRule, Simplex};
use natfarkas::matrices::{
    aggregate, build_delta, build_theta, delta_theta_dense, dual_theta_dense, rhs_vectors, AggregationE, ColumnLayout,
};
use natfarkas::oracle::{enumerate_solutions, ip_optimum, semigroup_member, zsystem_box_solutions};
use natfarkas::rational::{from_big, int, Rational};
use natfarkas::reduction::{group_sum, AbelianGroupSpec, Modulus, ZSystem};
use natfarkas::verify::{verify_certificate, verify_feasibility};
use natfarkas::IpProblem;

/// Columns with entries up to `max_entry`, a box containing them, and a
/// right-hand side inside the box.
fn instance(max_m: usize, max_n: usize, max_entry: u64, max_beta: u64) -> impl Strategy<Value = IpProblem> {
    (1..=max_m, 1..=max_n)
        .prop_flat_map(move |(m, n)| {
            let column =
                prop::collection::vec(0..=max_entry, m).prop_filter("nonzero column", |c| c.iter().any(|&v| v > 0));
            (prop::collection::vec(column, n), prop::collection::vec(0..=max_beta, m))
        })
        .prop_flat_map(move |(columns, slack)| {
            let beta: Vec<u64> = (0..slack.len())
                .map(|j| columns.iter().map(|c| c[j]).max().unwrap().max(slack[j]))
                .collect();
            let b = beta.iter().map(|&bj| 0..=bj).collect::<Vec<_>>();
            (Just(columns), Just(beta), b)
        })
        .prop_map(|(columns, beta, b)| {
            let rows = (0..beta.len())
                .map(|j| columns.iter().map(|c| c[j]).collect())
                .collect();
            IpProblem::new(rows, b, Some(beta)).unwrap()
        })
}

fn with_cost(p: IpProblem) -> impl Strategy<Value = IpProblem> {
    let n = p.n();
    prop::collection::vec(-3i64..=3, n)
        .prop_map(move |c| p.clone().with_cost(c.into_iter().map(int).collect()).unwrap())
}

fn rational(v: &[BigInt]) -> Vec<Rational> {
    v.iter().map(from_big).collect()
}

fn theta_lp(p: &IpProblem) -> LpInstance {
    let theta = build_theta(p.columns(), p.beta()).unwrap();
    let rhs = rhs_vectors(p.b(), p.beta()).unwrap();
    LpInstance::new(theta.to_rational_rows(), rational(&rhs.lifted), theta.cols()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lattice_index_round_trip(beta in prop::collection::vec(0u64..5, 1..4)) {
        let lattice = LatticeBox::new(&beta).unwrap();
        let mut seen = 0;
        for (i, p) in lattice.points().enumerate() {
            prop_assert_eq!(lattice.index_of(&p), Some(i));
            prop_assert_eq!(lattice.point_of(i), p);
            seen += 1;
        }
        prop_assert_eq!(seen, lattice.len());
    }

    #[test]
    fn monomials_are_multiplicative(
        w in prop::collection::vec(0u64..6, 3),
        y in prop::collection::vec(0u64..4, 3),
        z in prop::collection::vec(0u64..4, 3),
    ) {
        prop_assert_eq!(monomial_pow(&w, &add_points(&y, &z)), monomial_pow(&w, &y) * monomial_pow(&w, &z));
        for j in 0..3 {
            let mut e = vec![0; 3];
            e[j] = 1;
            prop_assert_eq!(monomial_pow(&w, &e), BigInt::from(w[j]));
        }
    }

    #[test]
    fn kronecker_solves_invert_delta(
        beta in prop::collection::vec(0u64..4, 1..3),
        seed in prop::collection::vec(-5i64..=5, 64),
    ) {
        let delta = build_delta(&beta).unwrap();
        let s = delta.lattice().len();
        let v: Vec<Rational> = seed.iter().cycle().take(s).map(|&x| int(x)).collect();
        prop_assert_eq!(delta.mul_vec(&delta.solve(&v)), v.clone());
        prop_assert_eq!(delta.transpose_mul(&delta.solve_transpose(&v)), v.clone());
        let dense = delta.to_dense();
        let direct: Vec<Rational> = dense.iter().map(|row| row.iter().zip(&v).map(|(a, x)| from_big(a) * x).sum()).collect();
        prop_assert_eq!(delta.mul_vec(&v), direct);
    }

    #[test]
    fn moment_rows_match_the_matrix_product(p in instance(2, 2, 3, 3)) {
        let layout = ColumnLayout::new(p.columns(), p.beta()).unwrap();
        let theta = build_theta(p.columns(), p.beta()).unwrap().to_dense();
        let delta = build_delta(p.beta()).unwrap().to_dense();
        let product = |d: &Vec<Vec<BigInt>>| -> Vec<Vec<BigInt>> {
            d.iter()
                .map(|row| (0..layout.len()).map(|c| row.iter().zip(&theta).map(|(a, t)| a * &t[c]).sum()).collect())
                .collect()
        };
        prop_assert_eq!(product(&delta), delta_theta_dense(&layout));
        let transposed: Vec<Vec<BigInt>> = (0..delta.len()).map(|i| delta.iter().map(|r| r[i].clone()).collect()).collect();
        prop_assert_eq!(product(&transposed), dual_theta_dense(&layout));
    }

    #[test]
    fn theta_is_a_network_matrix(p in instance(2, 3, 3, 4)) {
        let theta = build_theta(p.columns(), p.beta()).unwrap();
        prop_assert!(theta.is_network_matrix());
        let dense = theta.to_dense();
        for c in 0..theta.cols() {
            let column: Vec<&BigInt> = dense.iter().map(|r| &r[c]).filter(|v| !v.is_zero()).collect();
            prop_assert_eq!(column.len(), 2);
            prop_assert_eq!(column.iter().map(|v| (*v).clone()).sum::<BigInt>(), BigInt::zero());
        }
        let rhs = rhs_vectors(p.b(), p.beta()).unwrap();
        prop_assert!(rhs.lifted.iter().sum::<BigInt>().is_zero());
    }

    #[test]
    fn aggregation_preserves_mass(p in instance(2, 3, 3, 3), weights in prop::collection::vec(0i64..5, 128)) {
        let layout = ColumnLayout::new(p.columns(), p.beta()).unwrap();
        let y: Vec<Rational> = weights.iter().cycle().take(layout.len()).map(|&w| int(w)).collect();
        let x = aggregate(&AggregationE::new(&layout), &y);
        prop_assert!(x.iter().all(|v| !v.is_negative()));
        prop_assert_eq!(x.iter().sum::<Rational>(), y.iter().sum::<Rational>());
    }

    #[test]
    fn dichotomy_agrees_with_the_oracle(p in instance(2, 3, 3, 5)) {
        let decision = check(&p, &CheckOptions::default()).unwrap();
        let oracle = enumerate_solutions(&p).unwrap();
        prop_assert_eq!(decision.feasible, oracle.is_feasible());
        if decision.feasible {
            let w = decision.witness.expect("feasible decisions carry a witness");
            prop_assert!(verify_feasibility(&w, p.columns(), p.b(), p.beta()).accepted);
            let x: Vec<Rational> = w.recover_solution();
            let x: Vec<u64> = x.iter().map(|v| u64::try_from(v.to_integer()).unwrap()).collect();
            prop_assert!(p.is_solution(&x));
            prop_assert!(decision.certificate.is_none());
        } else {
            let cert = decision.certificate.expect("small infeasible decisions carry a certificate");
            let verdict = verify_certificate(cert.kind, &cert.beta, &cert.support(), p.columns(), p.b());
            prop_assert!(verdict.accepted, "{:?}", verdict.reasons);
            prop_assert!(decision.witness.is_none());
        }
    }

    #[test]
    fn witness_identity_holds_formally_and_at_points(p in instance(2, 3, 3, 4), points in prop::collection::vec(prop::collection::vec(-3i64..=3, 2), 3)) {
        let Some(x) = enumerate_solutions(&p).unwrap().solutions.first().cloned() else {
            return Ok(());
        };
        let w = witness_from_solution(&p, &x).unwrap();
        prop_assert!(verify_witness(&w, p.b(), p.columns(), p.beta()));
        let lhs = Polynomial::monomial(p.b().to_vec(), int(1)).sub(&Polynomial::monomial(vec![0; p.m()], int(1)));
        for point in points {
            let at: Vec<BigInt> = point[..p.m()].iter().map(|&v| BigInt::from(v)).collect();
            prop_assert_eq!(w.combination(p.columns()).eval(&at), lhs.eval(&at));
        }
    }

    #[test]
    fn certificates_never_accept_feasible_rhs(p in instance(2, 2, 3, 4), b_other in prop::collection::vec(0u64..=4, 2)) {
        let b2: Vec<u64> = p.beta().iter().zip(&b_other).map(|(&bj, &o)| o.min(bj)).collect();
        let Ok(p2) = p.with_rhs(b2) else { return Ok(()); };
        let (infeasible, feasible) = match (enumerate_solutions(&p).unwrap().is_feasible(), enumerate_solutions(&p2).unwrap().is_feasible()) {
            (false, true) => (p, p2),
            (true, false) => (p2, p),
            _ => return Ok(()),
        };
        for kind in [CertificateKind::Polynomial, CertificateKind::Exponential] {
            let cert = check(&infeasible, &CheckOptions::default().with_kind(kind)).unwrap().certificate.unwrap();
            let verdict = verify_certificate(kind, &cert.beta, &cert.support(), feasible.columns(), feasible.b());
            prop_assert!(!verdict.accepted);
        }
    }

    #[test]
    fn simplex_rules_agree(p in instance(2, 2, 3, 3).prop_flat_map(with_cost)) {
        let lp = classical_relaxation(&p).unwrap();
        let bland = Simplex::new(PivotRule::Bland).minimize(&lp).unwrap();
        let dantzig = Simplex::new(PivotRule::Dantzig).minimize(&lp).unwrap();
        prop_assert_eq!(bland.value(), dantzig.value());
        prop_assert_eq!(bland.is_feasible(), dantzig.is_feasible());
    }

    #[test]
    fn farkas_rays_verify(p in instance(2, 2, 3, 4)) {
        let lp = theta_lp(&p);
        match solve_feasibility(&lp) {
            LpOutcome::Feasible { point } => prop_assert!(lp.is_feasible_point(&point)),
            LpOutcome::InfeasibleWithRay { ray } => prop_assert!(lp.is_farkas_ray(&ray)),
            other => prop_assert!(false, "unexpected outcome {:?}", other),
        }
    }

    #[test]
    fn hierarchy_is_monotone_and_exact(p in instance(2, 3, 3, 3).prop_flat_map(with_cost)) {
        let levels = solve_hierarchy(&p, None).unwrap();
        prop_assert!(is_monotone(&levels));
        match ip_optimum(&p).unwrap() {
            Some((j, _)) => {
                prop_assert_eq!(levels.last().unwrap().value.as_ref(), Some(&j));
                let lp = natfarkas::lp::solve_min(&classical_relaxation(&p).unwrap()).unwrap();
                prop_assert_eq!(levels[0].value.as_ref(), lp.value());
            }
            None => prop_assert!(!levels.last().unwrap().is_feasible()),
        }
    }

    #[test]
    fn oracle_order_is_deterministic(p in instance(2, 3, 3, 4)) {
        prop_assert_eq!(enumerate_solutions(&p).unwrap(), enumerate_solutions(&p).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn reduction_preserves_feasibility(
        cols in 1usize..=3,
        entries in prop::collection::vec(-3i64..=3, 3),
        rhs in -6i64..=6,
    ) {
        let sys = ZSystem::from_i64(&[entries[..cols].to_vec()], &[rhs]).unwrap();
        let brute = zsystem_box_solutions(&sys, 6);
        let decision = check_zsystem(&sys, &BigInt::from(6), &CheckOptions::default()).unwrap();
        prop_assert_eq!(decision.feasible, !brute.is_empty());
        if let Some(x) = decision.solution {
            prop_assert!(sys.is_solution(&x));
        }
    }

    #[test]
    fn product_group_membership(p in 1i64..=3, q in 1i64..=3, a in (0i64..3, 0i64..3), target in (0i64..3, 0i64..3)) {
        let (a, target) = (vec![a.0 % p, a.1 % q], vec![target.0 % p, target.1 % q]);
        let spec = AbelianGroupSpec::new(&[Some(p), Some(q)], vec![a.clone()], target).unwrap();
        // some member uses x < lcm(p, q), with slacks at most a_j x / p_j
        let lcm = num_integer::lcm(p, q);
        let needed = (0..lcm).map(|x| x + a[0] * x / p + a[1] * x / q).max().unwrap();
        let engine = check_semigroup(&spec, &BigInt::from(needed.max(1)), &CheckOptions::default()).unwrap();
        prop_assert_eq!(engine.feasible, semigroup_member(&spec, 10_000).unwrap());
    }

    #[test]
    fn group_sum_is_an_abelian_operation(
        x in prop::collection::vec(-20i64..20, 3),
        y in prop::collection::vec(-20i64..20, 3),
        z in prop::collection::vec(-20i64..20, 3),
        moduli in prop::collection::vec(prop::option::of(1u64..7), 3),
    ) {
        let moduli: Vec<Modulus> = moduli.into_iter().map(|m| m.map_or(Modulus::Infinite, Modulus::Finite)).collect();
        let zero = vec![0; 3];
        let reduce = |v: &[i64]| group_sum(v, &zero, &moduli);
        prop_assert_eq!(group_sum(&x, &y, &moduli), group_sum(&y, &x, &moduli));
        prop_assert_eq!(
            group_sum(&group_sum(&x, &y, &moduli), &z, &moduli),
            group_sum(&x, &group_sum(&y, &z, &moduli), &moduli)
        );
        prop_assert_eq!(group_sum(&reduce(&x), &zero, &moduli), reduce(&x));
    }
}

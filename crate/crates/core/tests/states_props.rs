//! Coherent-state vectors: normalization, truncation and phase behaviour.

use nlcs::families::{make_family, FamilyId, FamilyParams, FamilySpec};
use nlcs::states::{build_state, overlap};
use nlcs::Error;
use num_complex::Complex64;
use proptest::prelude::*;

fn fam(id: FamilyId, p: FamilyParams) -> FamilySpec {
    make_family(id, &p).unwrap()
}

fn all_families() -> Vec<FamilySpec> {
    vec![
        FamilySpec::glauber(),
        fam(FamilyId::Su11, FamilyParams::j(1.0)),
        fam(FamilyId::Su11, FamilyParams::j(2.5)),
        fam(FamilyId::BarutGirardello, FamilyParams::j(0.5)),
        fam(FamilyId::BarutGirardello, FamilyParams::j(2.0)),
        fam(FamilyId::NcOscillator, FamilyParams::tau(0.1)),
        fam(
            FamilyId::NcPoschlTeller,
            FamilyParams::poschl_teller(0.2, 0.2, 0.2),
        ),
    ]
}

#[test]
fn vacuum_for_every_family() {
    for f in all_families() {
        let s = build_state(&f, Complex64::new(0.0, 0.0), 1e-12).unwrap();
        assert_eq!(s.truncation, 0);
        assert_eq!(s.coeffs(), vec![Complex64::new(1.0, 0.0)]);
    }
}

#[test]
fn canonical_coherent_state() {
    let s = build_state(&FamilySpec::glauber(), Complex64::new(1.0, 0.0), 1e-12).unwrap();
    let mut ln_fact = 0.0;
    for (n, c) in s.coeffs().iter().enumerate() {
        if n > 0 {
            ln_fact += (n as f64).ln();
        }
        let want = (-0.5 - 0.5 * ln_fact).exp();
        assert!((c.re - want).abs() <= 1e-15 && c.im == 0.0, "n={n}");
    }
    assert!(s.norm_residual < 1e-12);
}

#[test]
fn su11_state_at_half() {
    // ρ_n = 1/(n+1), 𝒩 = 4
    let s = build_state(
        &fam(FamilyId::Su11, FamilyParams::j(1.0)),
        Complex64::new(0.5f64.sqrt(), 0.0),
        1e-12,
    )
    .unwrap();
    for (n, c) in s.coeffs().iter().enumerate() {
        let want = ((n as f64 + 1.0) / 4.0).sqrt() * 0.5f64.powf(n as f64 / 2.0);
        assert!((c.re / want - 1.0).abs() <= 1e-13, "n={n}");
    }
}

#[test]
fn su11_outside_the_disk_diverges() {
    let f = fam(FamilyId::Su11, FamilyParams::j(1.5));
    for a in [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.8, 0.8),
        Complex64::new(0.0, -3.0),
    ] {
        match build_state(&f, a, 1e-10) {
            Err(Error::Divergence {
                abs_alpha_sq,
                radius,
            }) => {
                assert_eq!(radius, 1.0);
                assert!(abs_alpha_sq >= 1.0);
            }
            other => panic!("expected divergence at {a}, got {other:?}"),
        }
    }
}

#[test]
fn overlap_examples() {
    let g = FamilySpec::glauber();
    let a = build_state(&g, Complex64::new(1.0, 0.0), 1e-14).unwrap();
    let b = build_state(&g, Complex64::new(-1.0, 0.0), 1e-14).unwrap();
    let ab = overlap(&a, &b).unwrap();
    assert!((ab - Complex64::new((-2f64).exp(), 0.0)).norm() <= 1e-10);

    let vac = build_state(&g, Complex64::new(0.0, 0.0), 1e-14).unwrap();
    assert_eq!(overlap(&vac, &a).unwrap(), a.coeffs()[0]);

    let aa = overlap(&a, &a).unwrap();
    assert!((aa.re - (1.0 - a.norm_residual)).abs() <= 1e-14);

    let other = build_state(
        &fam(FamilyId::Su11, FamilyParams::j(1.0)),
        Complex64::new(0.3, 0.0),
        1e-10,
    )
    .unwrap();
    assert!(matches!(overlap(&a, &other), Err(Error::FamilyMismatch(_))));
    let other_j = build_state(
        &fam(FamilyId::Su11, FamilyParams::j(2.0)),
        Complex64::new(0.3, 0.0),
        1e-10,
    )
    .unwrap();
    assert!(matches!(
        overlap(&other, &other_j),
        Err(Error::FamilyMismatch(_))
    ));
}

#[test]
fn glauber_overlap_closed_form() {
    // ⟨α|β⟩ = exp(−|α|²/2 − |β|²/2 + ᾱβ)
    let g = FamilySpec::glauber();
    let (alpha, beta) = (Complex64::new(0.7, -0.2), Complex64::new(-0.4, 1.1));
    let a = build_state(&g, alpha, 1e-15).unwrap();
    let b = build_state(&g, beta, 1e-15).unwrap();
    let want = (-0.5 * alpha.norm_sqr() - 0.5 * beta.norm_sqr() + alpha.conj() * beta).exp();
    assert!((overlap(&a, &b).unwrap() - want).norm() <= 1e-12);
}

fn any_state_input() -> impl Strategy<Value = (FamilySpec, Complex64)> {
    (
        0usize..7,
        0.0f64..1.0,
        -std::f64::consts::PI..std::f64::consts::PI,
    )
        .prop_map(|(i, r, th)| {
            let f = all_families()[i];
            // keep |α|² within the disk for SU(1,1), up to 9 otherwise
            let radius = if f.id() == FamilyId::Su11 {
                0.95 * r
            } else {
                3.0 * r
            };
            (f, Complex64::from_polar(radius, th))
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn states_are_normalized((f, alpha) in any_state_input(), k in 6i32..14) {
        let tol = 10f64.powi(-k);
        let s = build_state(&f, alpha, tol).unwrap();
        prop_assert!(s.norm_residual >= 0.0 && s.norm_residual < tol);
        let norm = s.norm_squared();
        prop_assert!(norm <= 1.0 + 1e-14);
        prop_assert!((norm + s.norm_residual - 1.0).abs() <= 1e-13);
    }

    #[test]
    fn residual_shrinks_with_truncation((f, alpha) in any_state_input()) {
        let probs = build_state(&f, alpha, 1e-14).unwrap().probabilities();
        // residual after keeping 0..=N, for each N
        let mut residual = 1.0;
        let mut last = f64::INFINITY;
        for p in probs {
            residual -= p;
            prop_assert!(residual <= last + 1e-15);
            last = residual;
        }
        let loose = build_state(&f, alpha, 1e-6).unwrap();
        let tight = build_state(&f, alpha, 1e-12).unwrap();
        prop_assert!(loose.truncation <= tight.truncation);
        prop_assert!(tight.norm_residual <= loose.norm_residual);
    }

    #[test]
    fn phase_covariance((f, alpha) in any_state_input(), theta in -3.0f64..3.0) {
        let rotated = alpha * Complex64::from_polar(1.0, theta);
        let a = build_state(&f, alpha, 1e-12).unwrap();
        let b = build_state(&f, rotated, 1e-12).unwrap();
        prop_assert_eq!(a.truncation, b.truncation);
        for n in 0..=a.truncation {
            prop_assert!((a.log_magnitudes()[n] - b.log_magnitudes()[n]).abs() <= 1e-12);
            let shift = b.phases()[n] - a.phases()[n];
            let want = n as f64 * (rotated.arg() - alpha.arg());
            prop_assert!((shift - want).abs() <= 1e-12 * (n as f64 + 1.0));
            // and modulo 2π the shift is nθ
            let wrapped = (shift - n as f64 * theta).rem_euclid(std::f64::consts::TAU);
            prop_assert!(wrapped.min(std::f64::consts::TAU - wrapped) <= 1e-9 * (n as f64 + 1.0));
        }
    }

    #[test]
    fn overlaps_are_bounded((f, a) in any_state_input(), shrink in 0.0f64..1.0, turn in -3.0f64..3.0) {
        let b = a * Complex64::from_polar(shrink, turn);
        let sa = build_state(&f, a, 1e-12).unwrap();
        let sb = build_state(&f, b, 1e-12).unwrap();
        let o = overlap(&sa, &sb).unwrap();
        prop_assert!(o.norm() <= 1.0 + sa.norm_residual + sb.norm_residual + 1e-12);
        let rev = overlap(&sb, &sa).unwrap();
        prop_assert!((o - rev.conj()).norm() <= 1e-14);
    }
}

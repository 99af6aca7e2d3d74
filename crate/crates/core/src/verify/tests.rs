use super::*;
use crate::ambient::radial_from_warp;
use crate::immersion::{build_surface, shape_field, SurfaceSpec};
use crate::warp::{make_dss, make_rn, make_space_form};

fn field(
    spec: SurfaceSpec,
    model: &WarpingModel,
    anchor: f64,
    n: usize,
) -> (ShapeField, RadialConformalFactor) {
    let ambient = radial_from_warp(model, anchor).unwrap();
    let shape = shape_field(&build_surface(&spec, &ambient, n).unwrap(), &ambient).unwrap();
    (shape, ambient)
}

fn dss_slice_t0(model: &WarpingModel) -> f64 {
    model.t_for_h(3.0).unwrap()
}

#[test]
fn identity_ids_round_trip_through_strings() {
    for id in IdentityId::ALL {
        assert_eq!(id.to_string().parse::<IdentityId>().unwrap(), id);
    }
    assert!("I11".parse::<IdentityId>().is_err());
    assert!(!IdentityId::I10.needs_surface());
    assert!(!IdentityId::I7.requires_conformal());
    assert!(IdentityId::I9.requires_conformal());
}

#[test]
fn convergence_order_of_a_fourth_order_pair() {
    let report = |max: f64, step: f64| ResidualReport {
        identity: IdentityId::I1,
        max_residual: max,
        rms_residual: max,
        scale: 1.0,
        node_count: 1,
        grid_step: step,
        convergence_order: None,
    };
    let coarse = report(1.6e-5, 0.02);
    let fine = report(1e-6, 0.01);
    assert!((convergence_order(&coarse, &fine) - 4.0).abs() < 1e-12);
    assert!(meets_order(&coarse, &fine, 3.5));
    assert!(!meets_order(&coarse, &report(4e-6, 0.01), 3.5));
    assert!(meets_order(&report(1e-12, 0.02), &report(2e-12, 0.01), 3.5));
}

#[test]
fn slice_in_dss_has_unit_normal_component() {
    let dss = make_dss(2.0, 0.0).unwrap();
    let (shape, ambient) = field(
        SurfaceSpec::Slice {
            t0: dss_slice_t0(&dss),
        },
        &dss,
        0.5,
        128,
    );
    let r = evaluate_identity(&shape, &ambient, &dss, IdentityId::I5).unwrap();
    assert!(r.max_residual < 1e-6, "{r:?}");
    assert!(r.node_count > 128 * 128);
}

#[test]
fn round_sphere_gauss_equation() {
    let flat = make_space_form(0.0);
    let (shape, ambient) = field(
        SurfaceSpec::EuclideanSphere {
            center: [0.0; 3],
            radius: 2.0,
        },
        &flat,
        1.0,
        512,
    );
    let r = evaluate_identity(&shape, &ambient, &flat, IdentityId::I2).unwrap();
    assert!(r.max_residual < 1e-8, "{r:?}");
}

#[test]
fn codazzi_needs_a_conformal_chart() {
    let dss = make_dss(2.0, 0.0).unwrap();
    let spec = SurfaceSpec::PerturbedSlice {
        t0: dss_slice_t0(&dss),
        eps: 0.05,
        l: 1,
        m: 0,
    };
    let (shape, ambient) = field(spec, &dss, 0.5, 64);
    for id in [IdentityId::I1, IdentityId::I3, IdentityId::I9] {
        let err = evaluate_identity(&shape, &ambient, &dss, id).unwrap_err();
        assert!(matches!(err, GeometryError::ConformalRequired(_)), "{err}");
    }
    let r = evaluate_identity(&shape, &ambient, &dss, IdentityId::I7).unwrap();
    assert!(r.max_residual < 1e-8, "{r:?}");
}

#[test]
fn codazzi_on_an_off_center_sphere_in_dss() {
    let dss = make_dss(2.0, 0.0).unwrap();
    let spec = SurfaceSpec::EuclideanSphere {
        center: [0.3, 0.0, 0.2],
        radius: 1.5,
    };
    let (shape, ambient) = field(spec, &dss, 0.5, 128);
    let r = evaluate_identity(&shape, &ambient, &dss, IdentityId::I9).unwrap();
    assert!(r.max_residual < 1e-5, "{r:?}");
}

#[test]
fn residuals_converge_at_fourth_order() {
    let round = make_space_form(1.0);
    let spec = SurfaceSpec::EuclideanSphere {
        center: [0.3, 0.1, -0.2],
        radius: 0.6,
    };
    let (coarse, ambient) = field(spec.clone(), &round, 0.5, 128);
    let (fine, _) = field(spec, &round, 0.5, 256);
    for id in [
        IdentityId::I1,
        IdentityId::I2,
        IdentityId::I3,
        IdentityId::I5,
        IdentityId::I9,
    ] {
        let a = evaluate_identity(&coarse, &ambient, &round, id).unwrap();
        let b = evaluate_identity(&fine, &ambient, &round, id).unwrap();
        assert!(a.max_residual < 1e-5, "{a:?}");
        assert!(meets_order(&a, &b, 3.5), "{id}: {a:?} {b:?}");
    }
}

#[test]
fn radicand_closed_forms_agree() {
    let dss = make_dss(2.0, 0.0).unwrap();
    let rn = make_rn(2.0, 0.5).unwrap();
    for model in [dss, rn] {
        let r = radicand_identity(&model).unwrap();
        assert!(r.max_residual < 1e-9, "{r:?}");
        assert_eq!(r.node_count, 2100);
    }
}

#[test]
fn et_test_vanishes_on_slices_and_cmc_spheres() {
    let dss = make_dss(2.0, 0.0).unwrap();
    let ball = make_space_form(-1.0);
    let cases = [
        (
            SurfaceSpec::Slice {
                t0: dss_slice_t0(&dss),
            },
            dss.clone(),
            0.5,
        ),
        (
            SurfaceSpec::EuclideanSphere {
                center: [0.2, -0.1, 0.15],
                radius: 0.4,
            },
            ball,
            0.5,
        ),
    ];
    for (spec, model, anchor) in cases {
        let (shape, _) = field(spec, &model, anchor, 128);
        let et = et_test(&shape, &model, 4.0, 1e-12).unwrap();
        assert_eq!(et.sup_f_min, 0.0);
        assert_eq!(et.norm_p, 0.0);
        assert_eq!(et.umbilic_count(), et.f_min.len());
        assert!(et.min_radicand() > -1e-10);
        assert!(et.lhs.iter().all(|v| *v < 1e-5));
    }
}

#[test]
fn et_test_sees_a_perturbed_slice() {
    let dss = make_dss(2.0, 0.0).unwrap();
    let spec = SurfaceSpec::PerturbedSlice {
        t0: dss_slice_t0(&dss),
        eps: 0.05,
        l: 2,
        m: 0,
    };
    let (shape, _) = field(spec, &dss, 0.5, 96);
    let et = et_test(&shape, &dss, 4.0, 1e-12).unwrap();
    assert!(et.sup_f_min > 0.1);
    assert!(et.norm_p.is_finite() && et.norm_p > 0.0);
    assert!(et.min_radicand() > -1e-8);
    for (f, (lhs, rad)) in et.f_min.iter().zip(et.lhs.iter().zip(&et.radicand)) {
        if let Some(f) = f {
            assert!((f * rad.sqrt() - lhs).abs() <= 1e-12 * (1.0 + lhs));
        }
    }
}

#[test]
fn classification_of_slices_and_spheres() {
    let rn = make_rn(2.0, 0.5).unwrap();
    let (shape, _) = field(
        SurfaceSpec::Slice {
            t0: rn.t_for_h(3.0).unwrap(),
        },
        &rn,
        0.5,
        96,
    );
    let v = classify(&shape, &rn, ClassifyTolerances::default()).unwrap();
    assert!(v.umbilic && v.cmc && v.slice, "{v:?}");
    assert_eq!(v.d1_fraction, 0.0);
    assert_eq!(v.d2_fraction, 1.0);

    let ball = make_space_form(-1.0);
    let spec = SurfaceSpec::EuclideanSphere {
        center: [0.2, -0.1, 0.15],
        radius: 0.4,
    };
    let (shape, _) = field(spec, &ball, 0.5, 96);
    let v = classify(&shape, &ball, ClassifyTolerances::default()).unwrap();
    assert!(v.umbilic && v.cmc && !v.slice, "{v:?}");
    assert_eq!(v.curvature_gap_zero_fraction, 1.0);

    let dss = make_dss(2.0, 0.0).unwrap();
    let spec = SurfaceSpec::PerturbedSlice {
        t0: dss_slice_t0(&dss),
        eps: 0.05,
        l: 2,
        m: 0,
    };
    let (shape, _) = field(spec, &dss, 0.5, 96);
    let v = classify(&shape, &dss, ClassifyTolerances::default()).unwrap();
    assert!(!v.umbilic && !v.cmc && !v.slice, "{v:?}");
}

#[test]
fn ellipsoid_has_four_umbilics_of_index_one_half() {
    let flat = RadialConformalFactor::flat();
    let shape = shape_field(
        &build_surface(
            &SurfaceSpec::Ellipsoid {
                semiaxes: [1.0, 1.2, 1.5],
            },
            &flat,
            96,
        )
        .unwrap(),
        &flat,
    )
    .unwrap();
    let HopfZeros::Isolated {
        zeros,
        unresolved,
        index_sum,
    } = hopf_zero_indices(&shape, 1e-5, 0.1)
    else {
        panic!("ellipsoid reported umbilic");
    };
    assert!(unresolved.is_empty());
    assert_eq!(zeros.len(), 4);
    assert!(zeros.iter().all(|z| z.winding == Some(-1)));
    assert_eq!(index_sum, 2.0);
    for z in &zeros {
        // Umbilics of a triaxial ellipsoid lie in the plane of the largest and smallest axes.
        assert!(z.position[1].abs() < 0.1, "{z:?}");
    }
}

#[test]
fn sphere_has_no_isolated_zeros() {
    let flat = RadialConformalFactor::flat();
    let spec = SurfaceSpec::EuclideanSphere {
        center: [0.1, 0.0, -0.2],
        radius: 1.0,
    };
    let shape = shape_field(&build_surface(&spec, &flat, 64).unwrap(), &flat).unwrap();
    assert!(matches!(
        hopf_zero_indices(&shape, 1e-5, 0.1),
        HopfZeros::Umbilic { .. }
    ));
}

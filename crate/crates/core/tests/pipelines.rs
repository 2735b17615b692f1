use nestkit::bounds::lower_bound;
use nestkit::recursive::{pipeline, plan, Provider};
use nestkit::verify::{verify_bibd, verify_nesting};
use nestkit::{DesignParams, Mode, NestError};

#[test]
fn every_planned_order_up_to_sixty() {
    let provider = Provider::default();
    let mut built = Vec::new();
    for v in 4..=60 {
        for mode in [Mode::Weak, Mode::Strong] {
            if v % 3 == 2 {
                assert!(
                    matches!(plan(v, mode), Err(NestError::InfeasibleParams { .. })),
                    "v = {v}"
                );
                continue;
            }
            let Ok(p) = plan(v, mode) else {
                continue;
            };
            match pipeline(v, mode, &provider) {
                Ok(out) => {
                    assert_eq!(out.nesting.w(), p.w, "v = {v} {mode}");
                    assert!(verify_bibd(&out.design).passed(), "v = {v} {mode}");
                    assert!(
                        verify_nesting(&out.design, &out.nesting, mode).passed(),
                        "v = {v} {mode}"
                    );
                    let bound = lower_bound(DesignParams::new(v, 3, 2), mode).unwrap().value;
                    assert!(p.w >= bound, "v = {v} {mode}: {} below bound {bound}", p.w);
                    built.push((v, mode));
                }
                Err(e) => assert!(
                    matches!(
                        e,
                        NestError::MissingIngredient(_) | NestError::UnsupportedCase(_)
                    ),
                    "v = {v} {mode}: {e}"
                ),
            }
        }
    }
    // orders whose ingredients are all built in or found by search
    for v in [
        4, 6, 7, 9, 10, 12, 13, 15, 19, 24, 25, 28, 31, 37, 43, 49, 55,
    ] {
        assert!(built.contains(&(v, Mode::Weak)), "v = {v} weak not built");
    }
    for v in [4, 6, 7, 9, 10, 12, 15, 24, 28] {
        assert!(
            built.contains(&(v, Mode::Strong)),
            "v = {v} strong not built"
        );
    }
}

#[test]
fn unsupported_orders_exit_two() {
    for (v, mode) in [
        (18, Mode::Weak),
        (36, Mode::Weak),
        (13, Mode::Strong),
        (9, Mode::Minimal),
    ] {
        let err = plan(v, mode).unwrap_err();
        assert_eq!(err.exit_code(), 2, "v = {v} {mode}");
    }
}

#[test]
fn planned_weight_is_optimal_for_weak_one_mod_six() {
    for v in (7..=97).step_by(6) {
        let p = plan(v, Mode::Weak).unwrap();
        assert_eq!(
            p.w,
            lower_bound(DesignParams::new(v, 3, 2), Mode::Weak)
                .unwrap()
                .value
        );
    }
}

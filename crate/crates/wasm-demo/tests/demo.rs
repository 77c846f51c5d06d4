use qrough_wasm_demo::{demo_scene, granule_view, segment_view, threat_curve, EXCLUDED_COLOR, INCLUDED_COLOR, LOWER_COLOR};

#[test]
fn scene_is_deterministic_rgba() {
    let a = demo_scene(4, 40, 30);
    assert_eq!(a.len(), 40 * 30 * 4);
    assert!(a.chunks_exact(4).all(|p| p[3] == 255));
    assert_eq!(a, demo_scene(4, 40, 30));
    assert_ne!(a, demo_scene(5, 40, 30));
}

#[test]
fn threshold_controls_granule_count() {
    let img = demo_scene(2, 64, 48);
    let counts: Vec<usize> = [1, 10, 30, 120, 255].iter().map(|&t| granule_view(&img, 64, 48, t).unwrap().count()).collect();
    assert!(counts[0] > counts[2], "{counts:?}");
    assert_eq!(counts[4], 1);
    assert_eq!(granule_view(&img, 64, 48, 30).unwrap().rgba().len(), img.len());
}

#[test]
fn overlay_pixel_counts_match_painted_colors() {
    let (w, h) = (80, 60);
    let img = demo_scene(1, w, h);
    let s = segment_view(&img, w, h, 30, 0.9).unwrap();
    assert!(s.lower_pixels() > 0);
    let painted = |c: [u8; 3]| s.rgba().chunks_exact(4).filter(|p| p[..3] == c).count();
    assert_eq!(painted(LOWER_COLOR), s.lower_pixels());
    assert_eq!(painted(INCLUDED_COLOR), s.included_pixels());
    assert_eq!(painted(EXCLUDED_COLOR), s.excluded_pixels());
}

#[test]
fn flashover_curve_alarms_after_the_jump() {
    let c = threat_curve("flashover", 60, 10.0, 0.2).unwrap();
    assert_eq!(c.threat().len(), 60);
    let first = c.alarm().iter().position(|&a| a == 1).expect("alarm");
    assert!((30..40).contains(&first), "{first}");
    assert!(c.area()[40] > 3.0 * c.area()[10]);
}

#[test]
fn bad_inputs_are_errors() {
    assert!(threat_curve("smoulder", 10, 30.0, 0.2).is_err());
    assert!(threat_curve("grow", 10, 0.0, 0.2).is_err());
    assert!(granule_view(&[0; 12], 2, 2, 30).is_err());
    assert!(segment_view(&[0; 16], 2, 2, 30, 1.5).is_err());
}

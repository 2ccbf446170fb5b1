//! Scenario files shipped with the binary.

/// `(file name, JSON text)` pairs in name order.
pub const SCENARIOS: &[(&str, &str)] = &[
    ("contact_classify.json", include_str!("../scenarios/contact_classify.json")),
    ("contact_geodesic.json", include_str!("../scenarios/contact_geodesic.json")),
    ("crossed_eb_classify.json", include_str!("../scenarios/crossed_eb_classify.json")),
    ("cyclotron_em_geodesic.json", include_str!("../scenarios/cyclotron_em_geodesic.json")),
    ("cyclotron_lorentz.json", include_str!("../scenarios/cyclotron_lorentz.json")),
    ("darboux1_geodesic.json", include_str!("../scenarios/darboux1_geodesic.json")),
    ("darboux2_classify.json", include_str!("../scenarios/darboux2_classify.json")),
    ("sphere_curvature.json", include_str!("../scenarios/sphere_curvature.json")),
    ("sphere_geodesic.json", include_str!("../scenarios/sphere_geodesic.json")),
    ("sphere_normal_curve.json", include_str!("../scenarios/sphere_normal_curve.json")),
];

pub fn find(name: &str) -> Option<&'static str> {
    SCENARIOS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

use std::f64::consts::PI;

use fsw::config::{parse_config, serialize_config, ConfigError};
use fsw_core::thermal::{DtPolicy, YieldSource};
use fsw_core::types::BottomContactCondition;
use proptest::prelude::*;

const EXAMPLE: &str = include_str!("../examples/weld.cfg");

fn edit(from: &str, to: &str) -> String {
    assert!(EXAMPLE.contains(from), "example lacks `{from}`");
    EXAMPLE.replacen(from, to, 1)
}

fn line_of(text: &str, needle: &str) -> usize {
    text.lines().position(|l| l.starts_with(needle)).unwrap() + 1
}

#[test]
fn example_round_trips_through_the_serializer() {
    let config = parse_config(EXAMPLE).unwrap();
    let text = serialize_config(&config);
    let again = parse_config(&text).unwrap();
    assert_eq!(config, again);
    assert_eq!(text, serialize_config(&again));
}

#[test]
fn rpm_is_stored_in_rad_per_second() {
    let config = parse_config(EXAMPLE).unwrap();
    let omega = config.setup.process.omega();
    assert!((omega - 41.888).abs() < 5e-4);
    assert!((omega - 2.0 * PI * 400.0 / 60.0).abs() < 1e-12);
    // Phases without their own omega inherit the process value.
    assert!(config
        .setup
        .schedule
        .phases()
        .iter()
        .all(|p| p.omega() == omega));
}

#[test]
fn unit_conversions() {
    let c = parse_config(EXAMPLE).unwrap();
    assert_eq!(c.setup.tool.shoulder_radius(), 9e-3);
    assert!((c.setup.tool.cone_angle() - 10f64.to_radians()).abs() < 1e-15);
    assert_eq!(c.setup.process.downward_force(), 8e3);
    assert!((c.setup.process.traverse_speed() - 0.4 / 60.0).abs() < 1e-15);
    assert!((c.setup.solver.ambient_temperature - 293.15).abs() < 1e-12);
    assert_eq!(c.setup.material.yield_stress(293.0), 276e6);
    assert_eq!(c.setup.material.yield_stress(900.0), 0.0);
    assert!((c.flow.unwrap().circulation - 2e-5).abs() < 1e-18);
}

#[test]
fn probe_not_smaller_than_shoulder_is_rejected() {
    let text = edit("probe_radius = 3 mm", "probe_radius = 9 mm");
    match parse_config(&text) {
        Err(ConfigError::Invalid { line, source }) => {
            assert_eq!(line, line_of(&text, "[tool]"));
            assert!(source.to_string().contains("probe radius"), "{source}");
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn unknown_key_is_reported_with_its_line() {
    let text = edit("emissivity = 0.3", "emissivity = 0.3\ncolour = grey");
    match parse_config(&text) {
        Err(ConfigError::UnknownKey { line, key, section }) => {
            assert_eq!((key.as_str(), section.as_str()), ("colour", "material"));
            assert_eq!(line, line_of(&text, "colour"));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn missing_key_names_the_key() {
    let text = edit("downward_force = 8 kN\n", "");
    let err = parse_config(&text).unwrap_err();
    assert!(matches!(&err, ConfigError::MissingKey { key, .. } if key == "downward_force"));
    assert!(err.to_string().contains("downward_force"));
    assert_eq!(err.line(), Some(line_of(&text, "[process]")));
}

#[test]
fn missing_unit_is_an_error() {
    for (from, to) in [
        ("shoulder_radius = 9 mm", "shoulder_radius = 9"),
        ("omega = 400 rpm", "omega = 400"),
        (
            "conductivity = 293 45, 873 35 [K, W/mK]",
            "conductivity = 293 45, 873 35",
        ),
        ("h_gap_bounds = 100 5000 W/m2K", "h_gap_bounds = 100 5000"),
    ] {
        let text = edit(from, to);
        match parse_config(&text) {
            Err(ConfigError::MissingUnit { line, .. }) => assert_eq!(line, line_of(&text, to)),
            other => panic!("{to}: unexpected {other:?}"),
        }
    }
}

#[test]
fn wrong_unit_and_unit_on_a_ratio_are_errors() {
    assert!(parse_config(&edit("omega = 400 rpm", "omega = 400 mm")).is_err());
    assert!(parse_config(&edit("delta = 0.6", "delta = 0.6 rad")).is_err());
}

#[test]
fn structural_errors_carry_lines() {
    let cases = [
        edit("[grid]", "[mesh]"),
        edit("[output]", "[tool]"),
        edit("kind = plunge", "kind = plunge\nkind = dwell"),
        edit("[phase]\nkind = plunge", "[phase]\nkind = traverse"),
        edit("y = 36 mm", "y = 60 mm"),
        edit("start_x = 16 mm", "start_x = 5 mm"),
        edit("h_gap = 1000 W/m2K", "h_gap = -1 W/m2K"),
        edit(
            "bottom = gap\nh_gap = 1000 W/m2K",
            "bottom = adiabatic\nh_gap = 1000 W/m2K",
        ),
        edit("free = delta, h_gap", "free = delta, kappa"),
        edit("thickness = 4 mm", "thickness = 3 mm"),
    ];
    for text in &cases {
        let err = parse_config(text).unwrap_err();
        assert!(err.line().is_some(), "{err}");
        assert!(err.to_string().starts_with("line "), "{err}");
    }
}

#[test]
fn backing_section_required_for_backed_bottoms() {
    let start = EXAMPLE.find("[backing]").unwrap();
    let end = EXAMPLE.find("[heat]").unwrap();
    let text = format!("{}{}", &EXAMPLE[..start], &EXAMPLE[end..]);
    let err = parse_config(&text).unwrap_err();
    assert!(err.to_string().contains("[backing]"), "{err}");
    let adiabatic = text.replace("bottom = gap\nh_gap = 1000 W/m2K", "bottom = adiabatic");
    let adiabatic = adiabatic
        .replace("free = delta, h_gap", "free = delta")
        .replace("h_gap_bounds = 100 5000 W/m2K\n", "");
    assert_eq!(
        parse_config(&adiabatic).unwrap().setup.solver.bottom,
        BottomContactCondition::Adiabatic
    );
}

#[test]
fn optional_models_round_trip() {
    let text = edit("power_model = analytical", "power_model = torque_traverse\nyield_source = johnson_cook\ngamma = 0")
        + "\n[johnson_cook]\na = 324 MPa\nb = 114 MPa\nc = 0.002\nn = 0.42\nm = 1.34\nmelt_temperature = 855 K\n\
           reference_temperature = 293 K\nreference_strain_rate = 1 1/s\nstrain = 1\nstrain_rate = 100 1/s\n";
    let text = text
        .replace(
            "bottom = gap\nh_gap = 1000 W/m2K",
            "bottom = spar\nspar_width = 20 mm\nspar_height = 6 mm",
        )
        .replace("dt = auto", "dt = 2 ms\nflux_profile = linear_r")
        .replace("free = delta, h_gap", "free = delta, eta")
        .replace(
            "h_gap_bounds = 100 5000 W/m2K",
            "eta_bounds = 0.9 0.99\nweights = bottom: 2\nconfirm_refinement = 2",
        );
    let c = parse_config(&text).unwrap();
    assert!(matches!(
        c.setup.heat.yield_source,
        YieldSource::JohnsonCook { .. }
    ));
    assert_eq!(c.setup.solver.dt_policy, DtPolicy::Fixed(2e-3));
    assert_eq!(c.calibration.as_ref().unwrap().weight("bottom"), 2.0);
    assert_eq!(parse_config(&serialize_config(&c)).unwrap(), c);

    let st = text
        .replace("yield_source = johnson_cook", "yield_source = sellars_tegart")
        .replace(
            "[johnson_cook]",
            "[sellars_tegart]\na = 2.4e8 1/s\nalpha = 0.045 1/MPa\nn = 3.55\nactivation_energy = 145 kJ/mol\nstrain_rate = 10 1/s\n[unused]",
        );
    // The old [johnson_cook] keys now sit in an unknown section.
    assert!(parse_config(&st).is_err());
    let st = st[..st.find("[unused]").unwrap()].to_string();
    let c = parse_config(&st).unwrap();
    assert!(matches!(
        c.setup.heat.yield_source,
        YieldSource::SellarsTegart { .. }
    ));
    assert_eq!(parse_config(&serialize_config(&c)).unwrap(), c);
}

#[test]
fn yield_section_must_match_the_selected_source() {
    let text = EXAMPLE.to_string() + "\n[sellars_tegart]\na = 1 1/s\nalpha = 1 1/MPa\nn = 1\nactivation_energy = 1 J/mol\nstrain_rate = 1 1/s\n";
    assert!(parse_config(&text).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_tool_and_process_round_trip(
        rs in 6.0f64..12.0,
        ratio in 0.1f64..0.6,
        hp in 0.5f64..4.0,
        alpha in 0.0f64..20.0,
        rpm in 100.0f64..2000.0,
        speed in 50.0f64..1000.0,
        delta in 0.0f64..1.0,
    ) {
        let text = EXAMPLE
            .replace("shoulder_radius = 9 mm", &format!("shoulder_radius = {rs} mm"))
            .replace("probe_radius = 3 mm", &format!("probe_radius = {} mm", rs * ratio))
            .replace("probe_height = 4 mm", &format!("probe_height = {hp} mm"))
            .replace("cone_angle = 10 deg", &format!("cone_angle = {alpha} deg"))
            .replace("omega = 400 rpm", &format!("omega = {rpm} rpm"))
            .replace("traverse_speed = 400 mm/min", &format!("traverse_speed = {speed} mm/min"))
            .replace("duration = 6 s", "duration = 1 s")
            .replace("ring_radius = 6 mm", &format!("ring_radius = {} mm", 0.5 * rs * (1.0 + ratio)))
            .replace("delta = 0.6", &format!("delta = {delta}"));
        let c = parse_config(&text).unwrap();
        prop_assert_eq!(parse_config(&serialize_config(&c)).unwrap(), c);
    }
}

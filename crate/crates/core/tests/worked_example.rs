mod common;

use arsp::baselines::{enum_arsp_exact, loop_arsp_exact, total_world_probability_exact, world_probability_exact};
use arsp::dual2d::{self, halfspace_report_scan, hyperplane_for, region_partition, Profile, RegionCode};
use arsp::exact::ratio;
use arsp::{Algorithm, PreferenceSpec};
use num_traits::Zero;

#[test]
fn every_algorithm_reproduces_the_example() {
    let ds = common::four_objects();
    let spec = PreferenceSpec::Ratio(common::example_box());
    for algo in Algorithm::ALL {
        let res = algo.run(&ds, &spec).unwrap();
        assert!((res.get(1, 1).unwrap() - 2.0 / 9.0).abs() <= 1e-12, "{algo}");
        assert_eq!(res.get(1, 2).unwrap(), 0.0, "{algo}");
        assert!((res.object(1).unwrap() - 2.0 / 9.0).abs() <= 1e-12, "{algo}");
        res.check_invariants(&ds).unwrap();
    }
    let general = dual2d::dual2d_arsp(&ds, &common::example_box(), Profile::General).unwrap();
    assert!((general.get(1, 1).unwrap() - 2.0 / 9.0).abs() <= 1e-12);
}

#[test]
fn exact_values() {
    let ds = common::four_objects();
    let spec = PreferenceSpec::Ratio(common::example_box());
    let e = enum_arsp_exact(&ds, &spec).unwrap();
    assert_eq!(e.get(1, 1).unwrap(), &ratio(2, 9));
    assert!(e.get(1, 2).unwrap().is_zero());
    assert_eq!(e.object(1), ratio(2, 9));
    assert_eq!(loop_arsp_exact(&ds, &spec).unwrap(), e);
    assert_eq!(world_probability_exact(&ds, &[Some(0); 4]).unwrap(), ratio(1, 36));
    assert_eq!(total_world_probability_exact(&ds, &spec).unwrap(), ratio(1, 1));
}

#[test]
fn regions_around_t23() {
    let ds = common::four_objects();
    let t = ds.objects[1].instances[2].coords.clone();
    let others: Vec<(&str, &[f64])> = [("t11", 0, 0), ("t12", 0, 1), ("t31", 2, 0), ("t32", 2, 1), ("t33", 2, 2), ("t41", 3, 0), ("t42", 3, 1)]
        .iter()
        .map(|&(name, o, i)| (name, ds.objects[o].instances[i].coords.as_slice()))
        .collect();
    let parts = region_partition(&t, others.iter().map(|(_, c)| *c));
    let names = |k: u32| parts[&RegionCode(k)].iter().map(|&i| others[i].0).collect::<Vec<_>>();
    assert_eq!(parts.len(), 2);
    assert_eq!(names(0), ["t11", "t12", "t31", "t32", "t41"]);
    assert_eq!(names(1), ["t33", "t42"]);

    let rb = common::example_box();
    for (k, expect) in [(0u32, vec!["t31", "t32"]), (1, vec!["t33"])] {
        let region: Vec<&[f64]> = parts[&RegionCode(k)].iter().map(|&i| others[i].1).collect();
        let hits: Vec<&str> = halfspace_report_scan(&t, RegionCode(k), &rb, &region)
            .into_iter()
            .map(|j| others[parts[&RegionCode(k)][j]].0)
            .collect();
        assert_eq!(hits, expect);
    }
    // t33 = (10, 10) lies exactly on the plane for region 1.
    let plane = hyperplane_for(&t, RegionCode(1), &rb);
    assert_eq!(plane.height(&[10.0]), 10.0);
}

use proxyhss::output::{render, to_csv, Format, CSV_HEADER};
use proxyhss::reference::*;
use proxyhss::repro::{cell_ids, run, ReproOptions, Status, TableId};

#[test]
fn table_ids_parse() {
    for t in TableId::ALL {
        assert_eq!(t.name().parse::<TableId>().unwrap(), t);
    }
    assert!("T1".parse::<TableId>().is_err());
}

#[test]
fn cell_grids() {
    assert_eq!(cell_ids(TableId::T1).len(), T1_MIN_P.len());
    assert_eq!(cell_ids(TableId::T2)[0], "n2048-L1");
    assert_eq!(cell_ids(TableId::T3)[0], "n2048-L2-p32");
    let t4 = cell_ids(TableId::T4);
    assert_eq!(t4.len(), T4_ERRORS.len() + T4_RANKS.len());
    assert_eq!(t4[12], "n2048-rank");
    assert_eq!(cell_ids(TableId::Scaling), ["n2048", "n4096", "n8192", "n16384"]);
}

#[test]
fn reference_values() {
    assert_eq!(T1_MIN_P.map(|c| c.1), [21, 27, 34, 39, 47, 53, 59, 65, 72]);
    assert_eq!(T2_MIN_P[..3], [(2048, 1, 26), (4096, 1, 27), (4096, 2, 27)]);
    let t3: Vec<f64> = T3_ERRORS.iter().filter(|c| c.0 == 2048).map(|c| c.3).collect();
    assert_eq!(t3, [5.4863e-13, 2.9697e-13, 2.0441e-13, 9.3656e-13]);
    assert_eq!(T4_ERRORS[0], (2048, 2, 32, 7.1041e-14));
    assert_eq!(T4_RANKS[0], (2048, 26));
}

#[test]
fn cells_above_cap_are_skipped() {
    let opts = ReproOptions { max_n: 1024, ..ReproOptions::default() };
    for t in [TableId::T2, TableId::T3, TableId::T4] {
        let r = run(t, &opts).unwrap();
        assert!(r.rows.iter().all(|row| row.status == Status::Skipped), "{t}");
        assert!(!r.failed());
    }
    let opts = ReproOptions { svd_cap: 1024, only: Some("n2048-rank".into()), ..ReproOptions::default() };
    assert_eq!(run(TableId::T4, &opts).unwrap().rows[0].status, Status::Skipped);
}

#[test]
fn only_selects_one_cell() {
    let opts = ReproOptions { only: Some("n32".into()), ..ReproOptions::default() };
    let r = run(TableId::T1, &opts).unwrap();
    assert_eq!(r.rows.len(), 1);
    let row = &r.rows[0];
    assert_eq!((row.n, row.p, row.reference), (32, Some(36), Some(34.0)));
    assert_eq!(row.status, Status::Pass);
    assert!(row.entry_calls.unwrap() > 16 * 16);

    let opts = ReproOptions { only: Some("n33".into()), ..ReproOptions::default() };
    assert!(run(TableId::T1, &opts).is_err());
}

#[test]
fn tolerance_override() {
    let opts = ReproOptions { only: Some("n16".into()), tol: Some(1e-3), ..ReproOptions::default() };
    let row = &run(TableId::T1, &opts).unwrap().rows[0];
    assert!(row.p.unwrap() < 22);
}

#[test]
fn rank_cell() {
    let opts = ReproOptions { only: Some("n2048-rank".into()), ..ReproOptions::default() };
    let row = &run(TableId::T4, &opts).unwrap().rows[0];
    let rank = row.measured.unwrap() as usize;
    assert!(rank.abs_diff(26) <= 2, "rank {rank}");
    assert_eq!(row.status, Status::Pass);
}

#[test]
fn csv_is_stable() {
    let opts = ReproOptions { only: Some("n16".into()), ..ReproOptions::default() };
    let r = run(TableId::T1, &opts).unwrap();
    let csv = to_csv(std::slice::from_ref(&r)).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
    let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(fields.len(), CSV_HEADER.len());
    assert_eq!(fields[10], "pass");
    assert_eq!(render(std::slice::from_ref(&r), Format::Csv).unwrap(), csv);
    let json: serde_json::Value = serde_json::from_str(&render(&[r], Format::Json).unwrap()).unwrap();
    assert_eq!(json[0]["table"], "t1");
    assert_eq!(json[0]["rows"][0]["status"], "pass");
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const FOUR_OBJECTS: &str = "object_id,instance_id,prob,a1,a2
1,1,0.5,2,17
1,2,0.5,8,14
2,1,0.3333333333333333,2,12
2,2,0.3333333333333333,12,4
2,3,0.3333333333333333,9,12
3,1,0.3333333333333333,6,5
3,2,0.3333333333333333,8,10
3,3,0.3333333333333333,10,10
4,1,0.5,5,16
4,2,0.5,14,6
";

fn arsp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arsp")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

struct Fixture {
    dir: tempfile::TempDir,
}

impl Fixture {
    fn new() -> Self {
        let f = Fixture {
            dir: tempfile::tempdir().unwrap(),
        };
        f.write("four.csv", FOUR_OBJECTS);
        f.write("ratio.txt", "d 2\nratio 0.5 2\n");
        f
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn s(&self, name: &str) -> String {
        self.path(name).to_string_lossy().into_owned()
    }

    fn write(&self, name: &str, text: &str) {
        fs::write(self.path(name), text).unwrap();
    }
}

#[test]
fn arsp_writes_the_example_row_and_stats() {
    let f = Fixture::new();
    let out = arsp(&["arsp", "--algo", "kdtt-fused", "--data", &f.s("four.csv"), "--constraints", &f.s("ratio.txt"), "--out", &f.s("r.csv")]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(f.path("r.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "object_id,instance_id,prob_rsky");
    assert_eq!(lines[1], "1,1,0.222222222222");
    assert_eq!(lines[2], "1,2,0");
    assert_eq!(lines.len(), 11);
    let stats = fs::read_to_string(f.path("r.csv.stats")).unwrap();
    assert!(stats.contains("arsp_size=8"), "{stats}");
    assert!(stats.contains("d_prime=2"), "{stats}");
    assert!(stats.contains("seconds="), "{stats}");
}

#[test]
fn all_algorithms_write_identical_files() {
    let f = Fixture::new();
    let mut files = Vec::new();
    for algo in ["enum", "loop", "kdtt", "kdtt-fused", "qdtt-fused", "bnb", "dual2d"] {
        let name = format!("{algo}.csv");
        let out = arsp(&["arsp", "--algo", algo, "--data", &f.s("four.csv"), "--constraints", &f.s("ratio.txt"), "-o", &f.s(&name)]);
        assert_eq!(code(&out), 0, "{algo}");
        files.push(fs::read_to_string(f.path(&name)).unwrap());
    }
    assert!(files.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn verify_passes_on_the_example_and_catches_mutation() {
    let f = Fixture::new();
    let ok = arsp(&["verify", "--data", &f.s("four.csv"), "--constraints", &f.s("ratio.txt"), "--tol", "1e-9"]);
    assert_eq!(code(&ok), 0, "{}", stdout(&ok));
    let exact = arsp(&["verify", "--data", &f.s("four.csv"), "--constraints", &f.s("ratio.txt"), "--rational", "--tol", "0"]);
    assert_eq!(code(&exact), 0, "{}", stdout(&exact));

    arsp(&["arsp", "--algo", "loop", "--data", &f.s("four.csv"), "--constraints", &f.s("ratio.txt"), "-o", &f.s("r.csv")]);
    let good = arsp(&["verify", "--data", &f.s("four.csv"), "--constraints", &f.s("ratio.txt"), "--algos", "loop", "--result", &f.s("r.csv")]);
    assert_eq!(code(&good), 0);
    let text = fs::read_to_string(f.path("r.csv")).unwrap().replace("1,1,0.222222222222", "1,1,0.25");
    f.write("r.csv", &text);
    let bad = arsp(&["verify", "--data", &f.s("four.csv"), "--constraints", &f.s("ratio.txt"), "--algos", "loop", "--result", &f.s("r.csv")]);
    assert_eq!(code(&bad), 1);
}

#[test]
fn verify_skips_enumeration_when_infeasible() {
    let f = Fixture::new();
    assert_eq!(code(&arsp(&["gen", "--m", "300", "--cnt", "4", "--d", "3", "--seed", "3", "-o", &f.s("big.csv")])), 0);
    assert_eq!(code(&arsp(&["constraints", "--kind", "wr", "--d", "3", "--c", "2", "-o", &f.s("wr.txt")])), 0);
    let out = arsp(&["verify", "--data", &f.s("big.csv"), "--constraints", &f.s("wr.txt")]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("enum skipped"));
    let enum_run = arsp(&["arsp", "--algo", "enum", "--data", &f.s("big.csv"), "--constraints", &f.s("wr.txt")]);
    assert_eq!(code(&enum_run), 3);
}

#[test]
fn empty_constraints_on_certain_data_give_membership() {
    let f = Fixture::new();
    f.write("pts.csv", "object_id,instance_id,prob,a1,a2\n1,1,1,1,3\n2,1,1,3,1\n3,1,1,2,2\n4,1,1,4,4\n");
    f.write("none.txt", "d 2\n");
    let out = arsp(&["arsp", "--algo", "bnb", "--data", &f.s("pts.csv"), "--constraints", &f.s("none.txt")]);
    assert_eq!(code(&out), 0);
    let vals: Vec<String> = stdout(&out).lines().skip(1).map(|l| l.rsplit(',').next().unwrap().to_string()).collect();
    assert_eq!(vals, ["1", "1", "1", "0"]);
}

#[test]
fn generation_is_deterministic_and_validated() {
    let f = Fixture::new();
    let gen = |name: &str| arsp(&["gen", "--dist", "anti", "--m", "50", "--cnt", "4", "--d", "3", "--l", "0.2", "--phi", "0.3", "--seed", "7", "-o", &f.s(name)]);
    assert_eq!(code(&gen("a.csv")), 0);
    assert_eq!(code(&gen("b.csv")), 0);
    assert_eq!(fs::read(f.path("a.csv")).unwrap(), fs::read(f.path("b.csv")).unwrap());
    assert_eq!(code(&arsp(&["gen", "--m", "0", "--cnt", "3", "--d", "2"])), 2);
    assert_eq!(code(&arsp(&["gen", "--dist", "weird", "--m", "3", "--cnt", "3", "--d", "2"])), 2);
    assert_eq!(code(&arsp(&["constraints", "--kind", "wr", "--d", "3", "--c", "5"])), 2);
    let wr = arsp(&["constraints", "--kind", "wr", "--d", "4", "--c", "3"]);
    assert_eq!(stdout(&wr), "d 4\n-1 1 0 0 <= 0\n0 -1 1 0 <= 0\n0 0 -1 1 <= 0\n");
}

#[test]
fn input_errors_exit_with_two() {
    let f = Fixture::new();
    f.write("broken.csv", "object_id,instance_id,prob,a1,a2\n1,1,half,2,3\n");
    let out = arsp(&["arsp", "--algo", "loop", "--data", &f.s("broken.csv"), "--constraints", &f.s("ratio.txt")]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    f.write("d3.txt", "d 3\nratio 1 2 1 2\n");
    assert_eq!(code(&arsp(&["arsp", "--algo", "loop", "--data", &f.s("four.csv"), "--constraints", &f.s("d3.txt")])), 2);
    assert_eq!(code(&arsp(&["arsp", "--algo", "loop", "--data", &f.s("missing.csv"), "--constraints", &f.s("ratio.txt")])), 2);
}

fn eclipse_ids(data: &Path, algo: &str) -> Vec<String> {
    let out = arsp(&["eclipse", "--data", &data.to_string_lossy(), "--ratio", "0.36,2.75", "--algo", algo]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    stdout(&out).lines().skip(1).map(str::to_string).collect()
}

#[test]
fn eclipse_variants_agree() {
    let f = Fixture::new();
    assert_eq!(code(&arsp(&["gen", "--m", "2000", "--cnt", "1", "--d", "3", "--l", "0", "--seed", "5", "-o", &f.s("pts.csv")])), 0);
    let naive = eclipse_ids(&f.path("pts.csv"), "naive");
    assert!(!naive.is_empty());
    assert_eq!(eclipse_ids(&f.path("pts.csv"), "pruned"), naive);
    f.write("one.csv", "object_id,instance_id,prob,a1,a2,a3\n9,1,1,0.5,0.5,0.5\n");
    assert_eq!(eclipse_ids(&f.path("one.csv"), "pruned"), ["9"]);
    assert_eq!(code(&arsp(&["eclipse", "--data", &f.s("four.csv"), "--ratio", "0.5,2"])), 2);
}

#[test]
fn bench_writes_rows_and_records_timeouts() {
    let f = Fixture::new();
    f.write("grid.txt", "m = 100,200\ncnt = 3\nd = 2\nkind = ratio\nalgos = loop,dual2d,eclipse-pruned\n");
    let out = arsp(&["bench", "--spec", &f.s("grid.txt"), "-o", &f.s("bench.csv")]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(f.path("bench.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "param,algo,seconds,arsp_size");
    assert_eq!(rows.len(), 7);
    assert!(rows[1].starts_with("m=100,loop,"));
    assert!(rows[6].starts_with("m=200,eclipse-pruned,"));
    for row in &rows[1..] {
        let cols: Vec<&str> = row.split(',').collect();
        assert!(cols[2].parse::<f64>().is_ok(), "{row}");
        assert!(cols[3].parse::<usize>().is_ok(), "{row}");
    }
    // Loop and dual2d agree on the set size.
    assert_eq!(rows[1].rsplit(',').next(), rows[2].rsplit(',').next());

    f.write("slow.txt", "m = 20000\ncnt = 50\nd = 4\nalgos = kdtt\n");
    let out = arsp(&["bench", "--spec", &f.s("slow.txt"), "--cap", "0.2"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("m=20000,kdtt,INF,"));

    f.write("bad.txt", "algos = loop\nwhat = 1\n");
    assert_eq!(code(&arsp(&["bench", "--spec", &f.s("bad.txt")])), 2);
}

#[test]
fn ingest_groups_rows() {
    let f = Fixture::new();
    f.write("cars.csv", "model,price,power\na,10,200\na,12,180\nb,9,150\na,11,210\na,13,190\na,10,220\n");
    f.write("map.txt", "group = model\nattributes = price,power\nmaximize = power\n");
    let out = arsp(&["ingest", "--csv", &f.s("cars.csv"), "--mapping", &f.s("map.txt")]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows.iter().filter(|r| r.contains(",0.2,")).count(), 5);
    assert!(rows.iter().any(|r| r.ends_with(",9,-150")));
}

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use pcsp_core::csp::{mcsp_structure, Constraint, Instance, PcspTemplate, RelationalStructure};

/// The complete graph on `n` atoms `0..n`, relation `neq`.
pub fn k(n: usize) -> RelationalStructure {
    let domain: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let tuples: Vec<Vec<String>> = (0..n)
        .flat_map(|a| {
            (0..n)
                .filter(move |&b| b != a)
                .map(move |b| vec![a.to_string(), b.to_string()])
        })
        .collect();
    RelationalStructure::from_labels(&domain, &[("neq", tuples)]).unwrap()
}

pub fn template(a: usize, b: usize) -> PcspTemplate {
    PcspTemplate::new(k(a), k(b)).unwrap()
}

pub fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

pub fn vars(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i}")).collect()
}

/// Every m-CSP instance over {0,1} with m = 1 on `n` variables, in the normal
/// form where each variable carries a set of distinct unary relations,
/// listed in relation-name order.
pub fn unary_instances(n: usize) -> Vec<Instance> {
    let structure = mcsp_structure(2, 1).unwrap();
    let names: Vec<String> = structure.relations().keys().cloned().collect();
    let per_var = 1usize << names.len();
    let total = per_var.pow(n as u32);
    (0..total)
        .map(|mut code| {
            let mut constraints = Vec::new();
            for v in 0..n {
                let mask = code % per_var;
                code /= per_var;
                for (i, name) in names.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        constraints.push(Constraint {
                            scope: vec![v],
                            relation: name.clone(),
                        });
                    }
                }
            }
            Instance::new(vars(n), constraints).unwrap()
        })
        .collect()
}

/// Every instance on `n` variables whose constraints are a set of `neq`
/// constraints on ordered pairs (loops included).
pub fn neq_instances(n: usize) -> Vec<Instance> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect();
    (0u64..1 << pairs.len())
        .map(|mask| {
            let constraints = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &(a, b))| Constraint {
                    scope: vec![a, b],
                    relation: "neq".into(),
                })
                .collect();
            Instance::new(vars(n), constraints).unwrap()
        })
        .collect()
}

/// Polymorphism tables by trying every table, independent of the library's
/// constraint-based enumerator. Tables are indexed with the first
/// coordinate most significant.
pub fn naive_polymorphisms(a: &RelationalStructure, b: &RelationalStructure, arity: usize) -> Vec<Vec<usize>> {
    let (qa, qb) = (a.domain_size(), b.domain_size());
    let points = qa.pow(arity as u32);
    let index = |point: &[usize]| point.iter().fold(0, |acc, &x| acc * qa + x);
    let mut out = Vec::new();
    let mut table = vec![0usize; points];
    loop {
        let ok = a.relations().iter().all(|(name, ra)| {
            let rb = b.relation(name).unwrap();
            let rows: Vec<&Vec<usize>> = ra.tuples().iter().collect();
            // every choice of `arity` tuples of A, read as columns
            let mut choice = vec![0usize; arity];
            loop {
                let image: Vec<usize> = (0..ra.arity())
                    .map(|pos| {
                        let point: Vec<usize> = choice.iter().map(|&c| rows[c][pos]).collect();
                        table[index(&point)]
                    })
                    .collect();
                if !rb.contains(&image) {
                    return false;
                }
                if !advance(&mut choice, rows.len()) {
                    return true;
                }
            }
        });
        if ok {
            out.push(table.clone());
        }
        if !advance(&mut table, qb) {
            return out;
        }
    }
}

/// Odometer step, last digit fastest; false once it wraps.
pub fn advance(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

pub fn pcsp() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pcsp"))
}

/// Runs one pass of every CLI command with outputs and reports in `dir`.
/// Returns each command's exit code and stdout, in order.
pub fn cli_suite(dir: &Path) -> Vec<(i32, Vec<u8>)> {
    let d = |n: &str| data(n).to_string_lossy().into_owned();
    let o = |n: &str| dir.join(n).to_string_lossy().into_owned();
    let pcsp_src = |extra: &[String]| {
        let mut v: Vec<String> = vec![
            "--source".into(),
            d("edge.json"),
            "--source-template".into(),
            d("k2k2.json"),
            "--target-template".into(),
            d("k2k2.json"),
            "--dr-table".into(),
            d("identity.json"),
        ];
        v.extend_from_slice(extra);
        v
    };
    let s = |x: &str| x.to_string();
    let runs: Vec<Vec<String>> = vec![
        vec![
            s("solve"),
            s("--instance"),
            d("edge.json"),
            s("--template"),
            d("k2.json"),
            s("--out"),
            o("solve.json"),
        ],
        vec![s("solve"), s("--instance"), d("c5.json"), s("--template"), d("k2.json")],
        vec![
            s("poly"),
            s("enum"),
            s("--template"),
            d("k2k3.json"),
            s("--arity"),
            s("2"),
            s("--audit-closure"),
            s("--out"),
            o("poly.json"),
        ],
        vec![
            s("poly"),
            s("check"),
            s("--template"),
            d("k2k2.json"),
            s("--function"),
            d("xor.json"),
        ],
        [
            s("poly"),
            s("check"),
            s("--dr-table"),
            d("identity.json"),
            s("--target-template"),
            d("k2k2.json"),
            s("--source-template"),
            d("k2k2.json"),
            s("--arities"),
            s("1,2"),
        ]
        .to_vec(),
        vec![
            s("gap"),
            s("params"),
            s("--domain-size"),
            s("2"),
            s("--m"),
            s("1"),
            s("--values"),
            s("2,1"),
            s("--out"),
            o("params.json"),
        ],
        vec![
            s("gap"),
            s("oracle"),
            s("--instance"),
            d("c5.json"),
            s("--template"),
            d("k3.json"),
            s("--k"),
            s("3,2"),
            s("--d"),
            s("1"),
            s("--out"),
            o("oracle.json"),
        ],
        vec![
            s("reduce"),
            s("llc"),
            s("--instance"),
            d("c5.json"),
            s("--template"),
            d("k3.json"),
            s("--params"),
            d("k32.json"),
            s("--out"),
            o("llc.json"),
        ],
        [
            vec![s("reduce"), s("pcsp")],
            pcsp_src(&[
                s("--mode"),
                s("fitted"),
                s("--out"),
                o("out.json"),
                s("--layout"),
                o("layout.json"),
            ]),
        ]
        .concat(),
        vec![
            s("solve"),
            s("--instance"),
            o("out.json"),
            s("--template"),
            d("k2k2.json"),
            s("--side"),
            s("relaxed"),
            s("--out"),
            o("sol.json"),
        ],
        [
            vec![s("decode")],
            pcsp_src(&[
                s("--output"),
                o("out.json"),
                s("--layout"),
                o("layout.json"),
                s("--solution"),
                o("sol.json"),
                s("--out"),
                o("seq.json"),
                s("--extract"),
                o("ext.json"),
            ]),
        ]
        .concat(),
        vec![
            s("gap"),
            s("extract"),
            s("--pas"),
            o("seq.json"),
            s("--m"),
            s("2"),
            s("--values"),
            s("1,1"),
            s("--out"),
            o("ex2.json"),
        ],
        vec![
            s("verify"),
            s("--sequence"),
            o("seq.json"),
            s("--extraction"),
            o("ex2.json"),
            s("--m"),
            s("2"),
        ],
        vec![
            s("verify"),
            s("--instance"),
            d("edge.json"),
            s("--template"),
            d("k2.json"),
            s("--assignment"),
            o("solve.json"),
        ],
    ];
    runs.iter()
        .enumerate()
        .map(|(i, args)| {
            let out = pcsp()
                .args(args)
                .arg("--report")
                .arg(dir.join(format!("report{i:02}.json")))
                .output()
                .unwrap();
            (out.status.code().unwrap_or(-1), out.stdout)
        })
        .collect()
}

//! Command-line front end: one subcommand per pipeline stage.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use pcsp_core::csp::{evaluate, mcsp_structure, Budget, Instance, PcspTemplate, RelationalStructure, Side, Solver};
use pcsp_core::format::{
    assignment_from_json, assignment_to_json, function_for_template, function_to_json, instance_from_json,
    instance_to_json, layout_from_json, layout_to_json, llc_to_json, params_from_json, pas_sequence_from_json,
    pas_sequence_to_json, template_from_json, FunctionLabels, ParamsRequest, PasLabels,
};
use pcsp_core::labelcover::reduce_mcsp_to_llc;
use pcsp_core::minion::{
    check_dr_homomorphism, check_minor_closure, enumerate_polymorphisms, polymorphism_violation, MinionSlice,
    PolymorphismMinion, SetValuedMinionMap,
};
use pcsp_core::pas::{
    check_consistent, csp_value_witness, extract_solution, gap_parameters_with, is_m_solution, K0Mode, DEFAULT_MAX_BITS,
};
use pcsp_core::reduction::{decode_relaxed_solution, pipeline_reduce, CMode, LongCode};
use pcsp_core::report::CommandReport;
use pcsp_core::{format, Error, GapParams, Result};

#[derive(Parser)]
#[command(name = "pcsp", version, about = "Promise CSP reductions, checked by brute force")]
struct Cli {
    /// Node budget for every exhaustive search.
    #[arg(long, global = true, default_value_t = Budget::default().max_nodes)]
    budget: u64,
    /// Where to write the JSON report.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Seed recorded in the report; no command draws random numbers.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Record stage timings in the report (makes reports run-dependent).
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find the lexicographically first solution of an instance.
    Solve(SolveArgs),
    #[command(subcommand)]
    Poly(PolyCommand),
    #[command(subcommand)]
    Gap(GapCommand),
    #[command(subcommand)]
    Reduce(ReduceCommand),
    /// Decode a relaxed solution of a reduced instance into a PAS sequence.
    Decode(DecodeArgs),
    /// Re-check stored artifacts without recomputing anything.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    template: PathBuf,
    #[arg(long, value_parser = parse_side, default_value = "strict")]
    side: Side,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum PolyCommand {
    /// All polymorphisms of one arity.
    Enum {
        #[arg(long)]
        template: PathBuf,
        #[arg(long)]
        arity: usize,
        /// Also check minor closure over arities 1..=arity.
        #[arg(long)]
        audit_closure: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a function against a template, or a (d, r) table against the
    /// polymorphisms of its templates.
    Check {
        #[arg(long)]
        template: Option<PathBuf>,
        #[arg(long)]
        function: Option<PathBuf>,
        #[arg(long)]
        dr_table: Option<PathBuf>,
        /// Template whose polymorphisms the table maps from.
        #[arg(long)]
        target_template: Option<PathBuf>,
        /// Template whose polymorphisms the table maps to.
        #[arg(long)]
        source_template: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "1,2")]
        arities: Vec<usize>,
    },
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long)]
    m: usize,
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<usize>,
    #[arg(long, value_parser = parse_k0_mode, default_value = "paper")]
    mode: K0Mode,
    #[arg(long, default_value_t = DEFAULT_MAX_BITS)]
    max_bits: u64,
}

#[derive(Subcommand)]
enum GapCommand {
    /// The parameter recursion for a value sequence.
    Params {
        #[arg(long)]
        domain_size: usize,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extract an m-solution from a consistent PAS sequence.
    Extract {
        #[arg(long)]
        pas: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether val_k(instance) <= d by exhaustive search.
    Oracle {
        #[arg(long)]
        instance: PathBuf,
        /// Structure of the instance; defaults to the m-CSP structure.
        #[arg(long)]
        template: Option<PathBuf>,
        #[arg(long)]
        domain_size: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<usize>,
        #[arg(long)]
        d: usize,
        /// Where to write a witnessing PAS sequence.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ReduceCommand {
    /// m-CSP instance to layered label cover.
    Llc {
        #[arg(long)]
        instance: PathBuf,
        /// Structure of the instance; defaults to the m-CSP structure named
        /// by the parameter file.
        #[arg(long)]
        template: Option<PathBuf>,
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Instance of one PCSP to an instance of another through the long code.
    Pcsp(PcspArgs),
}

#[derive(Args)]
struct PipelineInputs {
    #[arg(long)]
    source: PathBuf,
    #[arg(long)]
    source_template: PathBuf,
    #[arg(long)]
    target_template: PathBuf,
    #[arg(long)]
    dr_table: PathBuf,
    /// Parameter file; defaults to the recursion for |B2|, the largest
    /// arity of A2 and r + 1 copies of d.
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long, value_parser = parse_k0_mode, default_value = "paper")]
    k0_mode: K0Mode,
}

#[derive(Args)]
struct PcspArgs {
    #[command(flatten)]
    inputs: PipelineInputs,
    /// `fitted`, `paper`, or an explicit size of C.
    #[arg(long, value_parser = parse_c_mode, default_value = "fitted")]
    mode: CMode,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    layout: PathBuf,
}

#[derive(Args)]
struct DecodeArgs {
    #[command(flatten)]
    inputs: PipelineInputs,
    /// The reduced instance written by `reduce pcsp`.
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    layout: PathBuf,
    /// Assignment to the reduced instance over the relaxed target domain.
    #[arg(long)]
    solution: PathBuf,
    /// Where to write the decoded PAS sequence.
    #[arg(long)]
    out: PathBuf,
    /// Also extract a solution of the source's relaxed side and write it here.
    #[arg(long)]
    extract: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long)]
    template: Option<PathBuf>,
    /// Assignment to check with `evaluate`; its side tag picks the structure.
    #[arg(long)]
    assignment: Option<PathBuf>,
    /// PAS sequence to check for consistency.
    #[arg(long)]
    sequence: Option<PathBuf>,
    /// Extraction result (from `gap extract`) to check against `--sequence`.
    #[arg(long)]
    extraction: Option<PathBuf>,
    #[arg(long)]
    m: Option<usize>,
}

fn parse_side(s: &str) -> std::result::Result<Side, String> {
    match s {
        "strict" => Ok(Side::Strict),
        "relaxed" => Ok(Side::Relaxed),
        _ => Err(format!("expected `strict` or `relaxed`, got `{s}`")),
    }
}

fn parse_k0_mode(s: &str) -> std::result::Result<K0Mode, String> {
    match s {
        "paper" => Ok(K0Mode::Paper),
        "conservative" => Ok(K0Mode::Conservative),
        _ => Err(format!("expected `paper` or `conservative`, got `{s}`")),
    }
}

fn parse_c_mode(s: &str) -> std::result::Result<CMode, String> {
    match s {
        "fitted" => Ok(CMode::Fitted),
        "paper" => Ok(CMode::Paper),
        n => n
            .parse()
            .map(CMode::Explicit)
            .map_err(|_| format!("expected `fitted`, `paper` or a size, got `{s}`")),
    }
}

/// What a command concluded, before the report is finished.
struct Outcome {
    code: i32,
    message: String,
    /// Stdout already carries a JSON document; send the message to stderr.
    stdout_taken: bool,
}

impl Outcome {
    fn ok(message: impl Into<String>) -> Self {
        Outcome {
            code: 0,
            message: message.into(),
            stdout_taken: false,
        }
    }

    fn negative(message: impl Into<String>) -> Self {
        Outcome {
            code: 1,
            message: message.into(),
            stdout_taken: false,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let budget = Budget { max_nodes: cli.budget };
    let name = command_name(&cli.command);
    let mut report = CommandReport::new(name, cli.timings, cli.seed);
    let (outcome, errored) = match run(&cli.command, budget, &mut report) {
        Ok(o) => (o, false),
        Err(e) => (Outcome::negative(format!("error: {e}")), true),
    };
    let to_stderr = errored || outcome.stdout_taken;
    let failed = report.failed_checks().join(", ");
    let (code, message) = if outcome.code == 0 && !failed.is_empty() {
        (1, format!("{} (failed checks: {failed})", outcome.message))
    } else {
        (outcome.code, outcome.message)
    };
    report.outcome = message.clone();
    report.exit_code = code;
    // a closed pipe is not worth a panic
    let _ = if !to_stderr {
        writeln!(std::io::stdout(), "{message}")
    } else {
        writeln!(std::io::stderr(), "{message}")
    };
    if let Some(path) = &cli.report {
        if let Err(e) = format::write_json(path, &report.to_json()) {
            eprintln!("error: cannot write the report: {e}");
            return ExitCode::from(1);
        }
    }
    ExitCode::from(code as u8)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Solve(_) => "solve",
        Command::Poly(PolyCommand::Enum { .. }) => "poly enum",
        Command::Poly(PolyCommand::Check { .. }) => "poly check",
        Command::Gap(GapCommand::Params { .. }) => "gap params",
        Command::Gap(GapCommand::Extract { .. }) => "gap extract",
        Command::Gap(GapCommand::Oracle { .. }) => "gap oracle",
        Command::Reduce(ReduceCommand::Llc { .. }) => "reduce llc",
        Command::Reduce(ReduceCommand::Pcsp(_)) => "reduce pcsp",
        Command::Decode(_) => "decode",
        Command::Verify(_) => "verify",
    }
}

fn run(command: &Command, budget: Budget, rep: &mut CommandReport) -> Result<Outcome> {
    match command {
        Command::Solve(a) => solve(a, budget, rep),
        Command::Poly(PolyCommand::Enum {
            template,
            arity,
            audit_closure,
            out,
        }) => poly_enum(template, *arity, *audit_closure, out.as_deref(), budget, rep),
        Command::Poly(PolyCommand::Check {
            template,
            function,
            dr_table,
            target_template,
            source_template,
            arities,
        }) => match (template, function, dr_table, target_template, source_template) {
            (Some(t), Some(f), None, None, None) => poly_check_function(t, f, rep),
            (None, None, Some(x), Some(t1), Some(t2)) => poly_check_table(x, t1, t2, arities, budget, rep),
            _ => Err(Error::Input(
                "give --template with --function, or --dr-table with --target-template and --source-template".into(),
            )),
        },
        Command::Gap(GapCommand::Params {
            domain_size,
            params,
            out,
        }) => gap_params(*domain_size, params, out.as_deref(), rep),
        Command::Gap(GapCommand::Extract { pas, params, out }) => gap_extract(pas, params, out.as_deref(), rep),
        Command::Gap(GapCommand::Oracle {
            instance,
            template,
            domain_size,
            m,
            k,
            d,
            out,
        }) => {
            let inst = instance_from_json(&rep.read(instance)?)?;
            let side = structure_or_mcsp(template.as_deref(), *domain_size, *m, rep)?;
            let witness = rep.stage("oracle", || csp_value_witness(&inst, &side, k, *d, budget))?;
            rep.result = json!({"k": k, "d": d, "at_most_d": witness.is_some()});
            match witness {
                Some(seq) => {
                    rep.check("consistent", check_consistent(&seq)?.is_consistent());
                    if let Some(path) = out {
                        let labels = PasLabels {
                            variables: inst.variables().to_vec(),
                            domain: side.domain().to_vec(),
                        };
                        rep.write(path, &pas_sequence_to_json(&seq, &labels))?;
                    }
                    Ok(Outcome::ok(format!("value at most {d}")))
                }
                None => Ok(Outcome::negative(format!("value above {d}"))),
            }
        }
        Command::Reduce(ReduceCommand::Llc {
            instance,
            template,
            params,
            out,
        }) => reduce_llc(instance, template.as_deref(), params, out, budget, rep),
        Command::Reduce(ReduceCommand::Pcsp(a)) => reduce_pcsp(a, budget, rep),
        Command::Decode(a) => decode(a, budget, rep),
        Command::Verify(a) => verify(a, rep),
    }
}

fn solve(a: &SolveArgs, budget: Budget, rep: &mut CommandReport) -> Result<Outcome> {
    let inst = instance_from_json(&rep.read(&a.instance)?)?;
    let template = template_from_json(&rep.read(&a.template)?)?;
    let side = template.side(a.side);
    let found = rep.stage("search", || Solver::new(budget).solve(&inst, side))?;
    match found {
        Some(f) => {
            rep.check("evaluate", evaluate(&inst, side, &f)?.is_empty());
            let value = assignment_to_json(&inst, side.domain(), Some(a.side), &f);
            rep.result = json!({"satisfiable": true, "assignment": value});
            if let Some(path) = &a.out {
                rep.write(path, &value)?;
            }
            Ok(Outcome::ok("satisfiable"))
        }
        None => {
            rep.result = json!({"satisfiable": false});
            Ok(Outcome::negative("unsatisfiable"))
        }
    }
}

fn poly_enum(
    path: &Path,
    arity: usize,
    audit: bool,
    out: Option<&Path>,
    budget: Budget,
    rep: &mut CommandReport,
) -> Result<Outcome> {
    let template = template_from_json(&rep.read(path)?)?;
    let fns = rep.stage("enumerate", || enumerate_polymorphisms(&template, arity, budget))?;
    let labels = FunctionLabels::numbered(arity, template.strict().domain(), template.relaxed().domain());
    if audit {
        let minion = PolymorphismMinion {
            template: template.clone(),
            budget,
        };
        let arities: Vec<usize> = (1..=arity).collect();
        let slice = MinionSlice::from_minion(&minion, &arities)?;
        let witness = rep.stage("closure", || check_minor_closure(&slice))?;
        rep.check("minor_closure", witness.is_none());
    }
    let value = json!({
        "arity": arity,
        "count": fns.len(),
        "functions": fns.iter().map(|t| function_to_json(t, &labels)).collect::<Vec<_>>(),
    });
    rep.result = json!({"arity": arity, "count": fns.len()});
    if let Some(path) = out {
        rep.write(path, &value)?;
    }
    Ok(Outcome::ok(format!("{} polymorphisms of arity {arity}", fns.len())))
}

fn poly_check_function(template: &Path, function: &Path, rep: &mut CommandReport) -> Result<Outcome> {
    let template = template_from_json(&rep.read(template)?)?;
    let t = function_for_template(&rep.read(function)?, &template)?;
    match polymorphism_violation(&t, &template)? {
        None => {
            rep.result = json!({"polymorphism": true});
            Ok(Outcome::ok("polymorphism"))
        }
        Some(v) => {
            let strict = template.strict().domain();
            let columns: Vec<Vec<&str>> = v
                .columns
                .iter()
                .map(|c| c.iter().map(|&a| strict[a].as_str()).collect())
                .collect();
            rep.result = json!({"polymorphism": false, "relation": v.relation, "columns": columns});
            Ok(Outcome::negative(format!(
                "not a polymorphism: relation {} with columns {columns:?}",
                v.relation
            )))
        }
    }
}

fn poly_check_table(
    table: &Path,
    target: &Path,
    source: &Path,
    arities: &[usize],
    budget: Budget,
    rep: &mut CommandReport,
) -> Result<Outcome> {
    let target = template_from_json(&rep.read(target)?)?;
    let source = template_from_json(&rep.read(source)?)?;
    let map = format::dr_table_from_json(&rep.read(table)?, &target, &source)?;
    let minion = PolymorphismMinion {
        template: target.clone(),
        budget,
    };
    let slice = MinionSlice::from_minion(&minion, arities)?;
    let violation = rep.stage("chains", || check_dr_homomorphism(map.as_ref(), &slice))?;
    rep.result = json!({"d": map.d(), "r": map.r(), "arities": arities, "holds": violation.is_none()});
    match violation {
        None => Ok(Outcome::ok(format!(
            "({}, {})-homomorphism on arities {arities:?}",
            map.d(),
            map.r()
        ))),
        Some(v) => Ok(Outcome::negative(format!(
            "chain of {} minors with maps {:?} is not weakly preserved",
            v.functions.len(),
            v.maps
        ))),
    }
}

fn gap_parameters(q: usize, p: &ParamArgs) -> Result<GapParams> {
    gap_parameters_with(q, p.m, &p.values, p.mode, p.max_bits)
}

fn gap_params(q: usize, p: &ParamArgs, out: Option<&Path>, rep: &mut CommandReport) -> Result<Outcome> {
    let params = rep.stage("recursion", || gap_parameters(q, p))?;
    let value = params.to_json();
    rep.result = json!({"k": value["k"].clone(), "l": value["l"].clone()});
    let mut outcome = Outcome::ok(format!("k = {}", value["k"]));
    if let Some(path) = out {
        rep.write(path, &value)?;
    } else {
        let _ = write!(std::io::stdout(), "{}", format::canonical(&value));
        outcome.stdout_taken = true;
    }
    Ok(outcome)
}

fn gap_extract(pas: &Path, p: &ParamArgs, out: Option<&Path>, rep: &mut CommandReport) -> Result<Outcome> {
    let (seq, labels) = pas_sequence_from_json(&rep.read(pas)?)?;
    let params = gap_parameters(labels.domain.len(), p)?;
    let ex = rep.stage("extract", || extract_solution(&seq, &params, p.m))?;
    let m = p.m.min(seq.num_variables());
    rep.check("m_solution", is_m_solution(&ex.solution, &seq.systems()[ex.index], m)?);
    let solution: serde_json::Map<String, Value> = labels
        .variables
        .iter()
        .zip(&ex.solution)
        .map(|(v, &a)| (v.clone(), Value::String(labels.domain[a].clone())))
        .collect();
    let value = json!({"index": ex.index, "m": p.m, "solution": solution, "trace": ex.trace});
    rep.result = json!({"index": ex.index, "solution": solution});
    if let Some(path) = out {
        rep.write(path, &value)?;
    }
    Ok(Outcome::ok(format!("{}-solution of system {}", p.m, ex.index)))
}

fn structure_or_mcsp(
    template: Option<&Path>,
    q: Option<usize>,
    m: Option<usize>,
    rep: &mut CommandReport,
) -> Result<RelationalStructure> {
    match (template, q, m) {
        (Some(path), _, _) => Ok(template_from_json(&rep.read(path)?)?.strict().clone()),
        (None, Some(q), Some(m)) => mcsp_structure(q, m),
        _ => Err(Error::Input(
            "give a template, or the domain size and m of the m-CSP structure".into(),
        )),
    }
}

fn reduce_llc(
    instance: &Path,
    template: Option<&Path>,
    params: &Path,
    out: &Path,
    budget: Budget,
    rep: &mut CommandReport,
) -> Result<Outcome> {
    let inst = instance_from_json(&rep.read(instance)?)?;
    let req = params_from_json(&rep.read(params)?)?;
    let side = structure_or_mcsp(template, req.domain_size, req.m, rep)?;
    let k = match (&req.k, req.domain_size, req.m, &req.values) {
        (Some(k), _, _, _) => k.clone(),
        (None, Some(q), Some(m), Some(values)) => {
            let p: GapParams = gap_parameters_with(q, m, values, req.mode, DEFAULT_MAX_BITS)?;
            p.arities_capped(usize::MAX)
        }
        _ => return Err(Error::Input("the parameter file names neither k nor values".into())),
    };
    let red = rep.stage("reduce", || reduce_mcsp_to_llc(&inst, &side, &k, budget))?;
    rep.write(out, &llc_to_json(&red.instance))?;
    rep.result = json!({
        "arities": red.arities,
        "variables": red.instance.num_variables(),
        "constraints": red.instance.constraints().count(),
        "has_empty_domain": red.instance.has_empty_domain(),
    });
    Ok(Outcome::ok(format!(
        "{} variables on {} layers",
        red.instance.num_variables(),
        red.arities.len()
    )))
}

/// Templates, source, table and parameters shared by `reduce pcsp` and `decode`.
struct Loaded {
    phi: Instance,
    source: PcspTemplate,
    target: PcspTemplate,
    map: Box<dyn SetValuedMinionMap>,
    params: GapParams,
}

fn load_pipeline(inputs: &PipelineInputs, rep: &mut CommandReport) -> Result<Loaded> {
    let phi = instance_from_json(&rep.read(&inputs.source)?)?;
    let source = template_from_json(&rep.read(&inputs.source_template)?)?;
    let target = template_from_json(&rep.read(&inputs.target_template)?)?;
    let map = format::dr_table_from_json(&rep.read(&inputs.dr_table)?, &target, &source)?;
    let (q, m) = (source.relaxed().domain_size(), source.strict().max_arity());
    let values = vec![map.d(); map.r() + 1];
    let req = match &inputs.params {
        Some(path) => params_from_json(&rep.read(path)?)?,
        None => ParamsRequest {
            domain_size: None,
            m: None,
            values: None,
            mode: inputs.k0_mode,
            k: None,
        },
    };
    if req.domain_size.is_some_and(|x| x != q)
        || req.m.is_some_and(|x| x != m)
        || req.values.as_ref().is_some_and(|v| *v != values)
    {
        return Err(Error::Parameter(format!(
            "the parameter file disagrees with |B2| = {q}, m = {m}, values = {values:?}"
        )));
    }
    let params: GapParams = gap_parameters_with(q, m, &values, req.mode, DEFAULT_MAX_BITS)?;
    if let Some(k) = &req.k {
        if *k != params.arities_capped(usize::MAX) {
            return Err(Error::Parameter(format!(
                "the parameter file's k = {k:?} is not the computed one"
            )));
        }
    }
    Ok(Loaded {
        phi,
        source,
        target,
        map,
        params,
    })
}

fn reduce_pcsp(a: &PcspArgs, budget: Budget, rep: &mut CommandReport) -> Result<Outcome> {
    let l = load_pipeline(&a.inputs, rep)?;
    let p = rep.stage("pipeline", || {
        pipeline_reduce(&l.phi, &l.source, &l.target, l.map.as_ref(), &l.params, a.mode, budget)
    })?;
    rep.write(&a.out, &instance_to_json(&p.longcode.instance))?;
    rep.write(
        &a.layout,
        &layout_to_json(&l.phi, l.source.strict(), &p.auxiliary, &p.longcode.layout),
    )?;
    rep.result = serde_json::to_value(&p.metadata)?;
    Ok(Outcome::ok(format!(
        "{} variables, {} constraints, |C| = {}",
        p.metadata.output_variables, p.metadata.output_constraints, p.metadata.c_size
    )))
}

fn decode(a: &DecodeArgs, budget: Budget, rep: &mut CommandReport) -> Result<Outcome> {
    let l = load_pipeline(&a.inputs, rep)?;
    let output = instance_from_json(&rep.read(&a.output)?)?;
    let (aux, layout) = layout_from_json(&rep.read(&a.layout)?, &l.phi, l.source.strict())?;
    if output.num_variables() != layout.num_classes() {
        return Err(Error::Input("the reduced instance does not match the layout".into()));
    }
    let b1 = l.target.relaxed();
    let (side, sol) = assignment_from_json(&rep.read(&a.solution)?, &output, b1.domain())?;
    if side == Some(Side::Strict) {
        return Err(Error::Input(
            "decoding needs an assignment over the relaxed side".into(),
        ));
    }
    let longcode = LongCode {
        instance: output,
        layout,
    };
    let seq = rep.stage("decode", || {
        decode_relaxed_solution(
            &aux,
            &longcode,
            &sol.values,
            &l.phi,
            &l.source,
            &l.target,
            l.map.as_ref(),
            budget,
        )
    })?;
    rep.check("consistent", check_consistent(&seq)?.is_consistent());
    let labels = PasLabels {
        variables: l.phi.variables().to_vec(),
        domain: l.source.relaxed().domain().to_vec(),
    };
    rep.write(&a.out, &pas_sequence_to_json(&seq, &labels))?;
    rep.result = json!({"value": seq.value(), "arities": seq.arities()});
    if let Some(path) = &a.extract {
        let ex = rep.stage("extract", || extract_solution(&seq, &l.params, l.params.m))?;
        let f = pcsp_core::csp::Assignment::new(ex.solution);
        let ok = evaluate(&l.phi, l.source.relaxed(), &f)?.is_empty();
        rep.check("relaxed_solution", ok);
        rep.write(
            path,
            &assignment_to_json(&l.phi, &labels.domain, Some(Side::Relaxed), &f),
        )?;
    }
    Ok(Outcome::ok(format!("decoded a sequence of value {}", seq.value())))
}

fn verify(a: &VerifyArgs, rep: &mut CommandReport) -> Result<Outcome> {
    let mut checked = 0;
    if let Some(path) = &a.assignment {
        let (Some(ip), Some(tp)) = (&a.instance, &a.template) else {
            return Err(Error::Input("--assignment needs --instance and --template".into()));
        };
        let inst = instance_from_json(&rep.read(ip)?)?;
        let template = template_from_json(&rep.read(tp)?)?;
        let value = rep.read(path)?;
        let side = match value.get("side") {
            Some(v) => parse_side(v.as_str().unwrap_or_default()).map_err(Error::Input)?,
            None => Side::Strict,
        };
        let (_, f) = assignment_from_json(&value, &inst, template.side(side).domain())?;
        rep.check("evaluate", evaluate(&inst, template.side(side), &f)?.is_empty());
        checked += 1;
    }
    if let Some(path) = &a.sequence {
        let (seq, labels) = pas_sequence_from_json(&rep.read(path)?)?;
        rep.check("consistent", check_consistent(&seq)?.is_consistent());
        checked += 1;
        if let Some(ep) = &a.extraction {
            let ex = rep.read(ep)?;
            let m =
                a.m.or_else(|| ex.get("m").and_then(Value::as_u64).map(|m| m as usize))
                    .ok_or_else(|| Error::Input("give --m or an extraction file that records m".into()))?;
            let index = ex
                .get("index")
                .and_then(Value::as_u64)
                .map(|i| i as usize)
                .filter(|&i| i < seq.len())
                .ok_or_else(|| Error::Input("the extraction names no valid system".into()))?;
            let atoms: std::collections::HashMap<&str, usize> =
                labels.domain.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
            let f = labels
                .variables
                .iter()
                .map(|v| {
                    ex["solution"][v]
                        .as_str()
                        .and_then(|a| atoms.get(a).copied())
                        .ok_or_else(|| Error::Input(format!("no usable value for `{v}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            let m = m.min(seq.num_variables());
            rep.check("m_solution", is_m_solution(&f, &seq.systems()[index], m)?);
            checked += 1;
        }
    } else if a.extraction.is_some() {
        return Err(Error::Input("--extraction needs --sequence".into()));
    }
    if checked == 0 {
        return Err(Error::Input("nothing to verify".into()));
    }
    rep.result = json!({"checks": rep.verification.clone()});
    Ok(Outcome::ok(format!("{checked} checks run")))
}

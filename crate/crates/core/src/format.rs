//! JSON file formats. Every writer goes through [`canonical`], which sorts
//! object keys and ends the text with a newline.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::csp::{Assignment, Constraint, Instance, PcspTemplate, Relation, RelationalStructure, Side};
use crate::error::{Error, Result};
use crate::labelcover::{LlcConstraint, LlcInstance};
use crate::minion::{DrHomomorphismTable, FiniteFunction, IdentityMap, SetValuedMinionMap};
use crate::pas::{Pas, PasSequence};
use crate::reduction::{AuxLink, AuxiliaryInstance, CMode, Cloud, CloudLayout};
use crate::subset::{k_subsets, Subset};

/// Pretty JSON with sorted keys and a trailing newline.
pub fn canonical(value: &Value) -> String {
    // serde_json's map is ordered, so re-serializing sorts keys
    let mut text = serde_json::to_string_pretty(value).expect("values always serialize");
    text.push('\n');
    text
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    std::fs::write(path, canonical(value))?;
    Ok(())
}

fn parse<T: for<'de> Deserialize<'de>>(value: &Value, what: &str) -> Result<T> {
    T::deserialize(value).map_err(|e| Error::input(format!("bad {what} file: {e}")))
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("values always serialize")
}

fn index_of(labels: &[String]) -> HashMap<&str, usize> {
    labels.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect()
}

fn lookup(map: &HashMap<&str, usize>, label: &str, what: &str) -> Result<usize> {
    map.get(label)
        .copied()
        .ok_or_else(|| Error::input(format!("unknown {what} `{label}`")))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RelationFile {
    arity: usize,
    tuples: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StructureFile {
    domain: Vec<String>,
    relations: BTreeMap<String, RelationFile>,
}

pub fn structure_to_json(s: &RelationalStructure) -> Value {
    let label = |t: &Vec<usize>| t.iter().map(|&a| s.domain()[a].clone()).collect();
    to_value(&StructureFile {
        domain: s.domain().to_vec(),
        relations: s
            .relations()
            .iter()
            .map(|(name, r)| {
                (
                    name.clone(),
                    RelationFile {
                        arity: r.arity(),
                        tuples: r.tuples().iter().map(label).collect(),
                    },
                )
            })
            .collect(),
    })
}

pub fn structure_from_json(value: &Value) -> Result<RelationalStructure> {
    let file: StructureFile = parse(value, "structure")?;
    let atoms = index_of(&file.domain);
    let mut relations = BTreeMap::new();
    for (name, r) in &file.relations {
        let tuples = r
            .tuples
            .iter()
            .map(|t| t.iter().map(|a| lookup(&atoms, a, "atom")).collect())
            .collect::<Result<Vec<Vec<usize>>>>()?;
        relations.insert(name.clone(), Relation::new(r.arity, tuples)?);
    }
    RelationalStructure::new(file.domain, relations)
}

pub fn template_to_json(t: &PcspTemplate) -> Value {
    json!({"strict": structure_to_json(t.strict()), "relaxed": structure_to_json(t.relaxed())})
}

/// A template file, or a bare structure read as the CSP template `(A, A)`.
pub fn template_from_json(value: &Value) -> Result<PcspTemplate> {
    match (value.get("strict"), value.get("relaxed")) {
        (Some(s), Some(r)) => PcspTemplate::new(structure_from_json(s)?, structure_from_json(r)?),
        _ => Ok(PcspTemplate::csp(structure_from_json(value)?)),
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstraintFile {
    scope: Vec<String>,
    relation: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    variables: Vec<String>,
    constraints: Vec<ConstraintFile>,
}

pub fn instance_to_json(inst: &Instance) -> Value {
    let vars = inst.variables();
    to_value(&InstanceFile {
        variables: vars.to_vec(),
        constraints: inst
            .constraints()
            .iter()
            .map(|c| ConstraintFile {
                scope: c.scope.iter().map(|&v| vars[v].clone()).collect(),
                relation: c.relation.clone(),
            })
            .collect(),
    })
}

pub fn instance_from_json(value: &Value) -> Result<Instance> {
    let file: InstanceFile = parse(value, "instance")?;
    let vars = index_of(&file.variables);
    let constraints = file
        .constraints
        .iter()
        .map(|c| {
            Ok(Constraint {
                scope: c
                    .scope
                    .iter()
                    .map(|v| lookup(&vars, v, "variable"))
                    .collect::<Result<_>>()?,
                relation: c.relation.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Instance::new(file.variables, constraints)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AssignmentFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    side: Option<Side>,
    values: BTreeMap<String, String>,
}

pub fn assignment_to_json(inst: &Instance, domain: &[String], side: Option<Side>, f: &Assignment) -> Value {
    to_value(&AssignmentFile {
        side,
        values: inst
            .variables()
            .iter()
            .zip(&f.values)
            .map(|(v, &a)| (v.clone(), domain[a].clone()))
            .collect(),
    })
}

/// Reads an assignment to the variables of `inst` over `domain`. Every
/// variable must be assigned, and no others.
pub fn assignment_from_json(value: &Value, inst: &Instance, domain: &[String]) -> Result<(Option<Side>, Assignment)> {
    let file: AssignmentFile = parse(value, "assignment")?;
    let atoms = index_of(domain);
    let values = inst
        .variables()
        .iter()
        .map(|v| {
            let a = file
                .values
                .get(v)
                .ok_or_else(|| Error::input(format!("variable `{v}` is unassigned")))?;
            lookup(&atoms, a, "atom")
        })
        .collect::<Result<Vec<_>>>()?;
    if file.values.len() != inst.num_variables() {
        return Err(Error::input("the assignment names variables outside the instance"));
    }
    Ok((file.side, Assignment::new(values)))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryFile {
    set: Vec<String>,
    assignments: Vec<BTreeMap<String, String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PasFile {
    arity: usize,
    domain: Vec<String>,
    variables: Vec<String>,
    entries: Vec<EntryFile>,
}

/// Labels for the variables and domain of a PAS.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PasLabels {
    pub variables: Vec<String>,
    pub domain: Vec<String>,
}

impl PasLabels {
    /// Variables `v0, v1, …` and atoms `0, 1, …`.
    pub fn numbered(n: usize, q: usize) -> Self {
        PasLabels {
            variables: (0..n).map(|v| format!("v{v}")).collect(),
            domain: (0..q).map(|a| a.to_string()).collect(),
        }
    }
}

pub fn pas_to_json(pas: &Pas, labels: &PasLabels) -> Value {
    let entries = pas
        .entries()
        .map(|(u, maps)| {
            let members = u.members();
            EntryFile {
                set: members.iter().map(|&v| labels.variables[v].clone()).collect(),
                assignments: maps
                    .iter()
                    .map(|g| {
                        members
                            .iter()
                            .zip(g)
                            .map(|(&v, &a)| (labels.variables[v].clone(), labels.domain[a].clone()))
                            .collect()
                    })
                    .collect(),
            }
        })
        .collect();
    to_value(&PasFile {
        arity: pas.arity(),
        domain: labels.domain.clone(),
        variables: labels.variables.clone(),
        entries,
    })
}

pub fn pas_from_json(value: &Value) -> Result<(Pas, PasLabels)> {
    let file: PasFile = parse(value, "PAS")?;
    let vars = index_of(&file.variables);
    let atoms = index_of(&file.domain);
    let mut entries = Vec::with_capacity(file.entries.len());
    for e in &file.entries {
        let members = e
            .set
            .iter()
            .map(|v| lookup(&vars, v, "variable"))
            .collect::<Result<Vec<_>>>()?;
        let u = Subset::from_indices(members.iter().copied());
        if u.len() != members.len() {
            return Err(Error::input(format!("entry {:?} repeats a variable", e.set)));
        }
        let maps = e
            .assignments
            .iter()
            .map(|g| {
                if g.len() != u.len() {
                    return Err(Error::input(format!(
                        "a map in entry {:?} has the wrong support",
                        e.set
                    )));
                }
                u.iter()
                    .map(|v| {
                        let a = g.get(&file.variables[v]).ok_or_else(|| {
                            Error::input(format!("a map in entry {:?} misses `{}`", e.set, file.variables[v]))
                        })?;
                        lookup(&atoms, a, "atom")
                    })
                    .collect()
            })
            .collect::<Result<Vec<Vec<usize>>>>()?;
        entries.push((u, maps));
    }
    let pas = Pas::new(file.variables.len(), file.domain.len(), file.arity, entries)?;
    Ok((
        pas,
        PasLabels {
            variables: file.variables,
            domain: file.domain,
        },
    ))
}

pub fn pas_sequence_to_json(seq: &PasSequence, labels: &PasLabels) -> Value {
    json!({"systems": seq.systems().iter().map(|p| pas_to_json(p, labels)).collect::<Vec<_>>()})
}

/// A sequence file; every system must use the same labels.
pub fn pas_sequence_from_json(value: &Value) -> Result<(PasSequence, PasLabels)> {
    let systems = value
        .get("systems")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::input("a PAS sequence file needs a `systems` array"))?;
    let mut labels: Option<PasLabels> = None;
    let mut out = Vec::with_capacity(systems.len());
    for s in systems {
        let (pas, l) = pas_from_json(s)?;
        match &labels {
            Some(prev) if *prev != l => return Err(Error::input("systems use different variables or domains")),
            _ => labels = Some(l),
        }
        out.push(pas);
    }
    let labels = labels.ok_or_else(|| Error::input("the sequence has no systems"))?;
    Ok((PasSequence::new(out)?, labels))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionFile {
    arity_set: Vec<String>,
    in_domain: Vec<String>,
    out_domain: Vec<String>,
    table: Vec<String>,
}

/// Domain labels of a function file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionLabels {
    pub arity_set: Vec<String>,
    pub in_domain: Vec<String>,
    pub out_domain: Vec<String>,
}

impl FunctionLabels {
    /// Coordinates `0, 1, …` over the given domains.
    pub fn numbered(arity: usize, in_domain: &[String], out_domain: &[String]) -> Self {
        FunctionLabels {
            arity_set: (0..arity).map(|x| x.to_string()).collect(),
            in_domain: in_domain.to_vec(),
            out_domain: out_domain.to_vec(),
        }
    }
}

pub fn function_to_json(t: &FiniteFunction, labels: &FunctionLabels) -> Value {
    to_value(&FunctionFile {
        arity_set: labels.arity_set.clone(),
        in_domain: labels.in_domain.clone(),
        out_domain: labels.out_domain.clone(),
        table: t.table().iter().map(|&b| labels.out_domain[b].clone()).collect(),
    })
}

pub fn function_from_json(value: &Value) -> Result<(FiniteFunction, FunctionLabels)> {
    let file: FunctionFile = parse(value, "function")?;
    let out = index_of(&file.out_domain);
    let table = file
        .table
        .iter()
        .map(|b| lookup(&out, b, "output atom"))
        .collect::<Result<Vec<_>>>()?;
    if file.arity_set.is_empty() {
        return Err(Error::input("the arity set must be nonempty"));
    }
    let t = FiniteFunction::new(file.arity_set.len(), file.in_domain.len(), file.out_domain.len(), table)?;
    Ok((
        t,
        FunctionLabels {
            arity_set: file.arity_set,
            in_domain: file.in_domain,
            out_domain: file.out_domain,
        },
    ))
}

/// A function read for use with `template`; its domains must match.
pub fn function_for_template(value: &Value, template: &PcspTemplate) -> Result<FiniteFunction> {
    let (t, labels) = function_from_json(value)?;
    if labels.in_domain != template.strict().domain() || labels.out_domain != template.relaxed().domain() {
        return Err(Error::input("the function's domains differ from the template's"));
    }
    Ok(t)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DrFile {
    d: usize,
    r: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    builtin: Option<String>,
    #[serde(default)]
    functions: BTreeMap<String, Value>,
    #[serde(default)]
    map: BTreeMap<String, Vec<String>>,
}

/// Reads a `(d, r)` table from `Pol(target)` to `Pol(source)`: function
/// ids in `map` refer to `functions`. `{"builtin":"identity"}` stands for
/// the identity, which needs equal templates.
pub fn dr_table_from_json(
    value: &Value,
    target: &PcspTemplate,
    source: &PcspTemplate,
) -> Result<Box<dyn SetValuedMinionMap>> {
    let file: DrFile = parse(value, "(d, r) table")?;
    if let Some(name) = &file.builtin {
        if name != "identity" {
            return Err(Error::input(format!("unknown builtin table `{name}`")));
        }
        if file.d != 1 {
            return Err(Error::input("the identity table has d = 1"));
        }
        if target.strict().domain() != source.strict().domain()
            || target.relaxed().domain() != source.relaxed().domain()
        {
            return Err(Error::input("the identity table needs templates over the same domains"));
        }
        return Ok(Box::new(IdentityMap { r: file.r }));
    }
    let read = |id: &str, t: &PcspTemplate| -> Result<FiniteFunction> {
        let v = file
            .functions
            .get(id)
            .ok_or_else(|| Error::input(format!("unknown function id `{id}`")))?;
        function_for_template(v, t)
    };
    let entries = file
        .map
        .iter()
        .map(|(id, image)| {
            Ok((
                read(id, target)?,
                image.iter().map(|g| read(g, source)).collect::<Result<Vec<_>>>()?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Box::new(DrHomomorphismTable::new(file.d, file.r, entries)?))
}

pub fn dr_table_to_json(table: &DrHomomorphismTable, target: &PcspTemplate, source: &PcspTemplate) -> Value {
    let mut functions = BTreeMap::new();
    let mut ids: HashMap<(bool, FiniteFunction), String> = HashMap::new();
    let mut name = |image_side: bool, f: &FiniteFunction| -> String {
        if let Some(id) = ids.get(&(image_side, f.clone())) {
            return id.clone();
        }
        let (prefix, tpl) = if image_side { ("g", source) } else { ("t", target) };
        let id = format!("{prefix}{}", ids.len());
        let labels = FunctionLabels::numbered(f.arity(), tpl.strict().domain(), tpl.relaxed().domain());
        functions.insert(id.clone(), function_to_json(f, &labels));
        ids.insert((image_side, f.clone()), id.clone());
        id
    };
    let mut map = BTreeMap::new();
    for (t, image) in table.entries() {
        let key = name(false, t);
        map.insert(key, image.iter().map(|g| name(true, g)).collect());
    }
    to_value(&DrFile {
        d: table.d(),
        r: table.r(),
        builtin: None,
        functions,
        map,
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LlcConstraintFile {
    from: String,
    to: String,
    map: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LlcFile {
    layers: Vec<Vec<String>>,
    domains: BTreeMap<String, Vec<String>>,
    constraints: Vec<LlcConstraintFile>,
    has_empty_domain: bool,
}

pub fn llc_to_json(inst: &LlcInstance) -> Value {
    to_value(&LlcFile {
        layers: inst
            .layers()
            .iter()
            .map(|layer| layer.iter().map(|&v| inst.name(v).to_owned()).collect())
            .collect(),
        domains: (0..inst.num_variables())
            .map(|v| (inst.name(v).to_owned(), inst.domain(v).to_vec()))
            .collect(),
        constraints: inst
            .constraints()
            .sorted_by(|a, b| (inst.name(a.from), inst.name(a.to)).cmp(&(inst.name(b.from), inst.name(b.to))))
            .map(|c| LlcConstraintFile {
                from: inst.name(c.from).to_owned(),
                to: inst.name(c.to).to_owned(),
                map: c
                    .map
                    .iter()
                    .enumerate()
                    .map(|(a, &b)| (inst.domain(c.from)[a].clone(), inst.domain(c.to)[b].clone()))
                    .collect(),
            })
            .collect(),
        has_empty_domain: inst.has_empty_domain(),
    })
}

pub fn llc_from_json(value: &Value) -> Result<LlcInstance> {
    let file: LlcFile = parse(value, "LLC")?;
    let mut variables = Vec::new();
    for (i, layer) in file.layers.iter().enumerate() {
        for name in layer {
            let domain = file
                .domains
                .get(name)
                .ok_or_else(|| Error::input(format!("no domain for `{name}`")))?;
            variables.push((name.clone(), i, domain.clone()));
        }
    }
    if variables.len() != file.domains.len() {
        return Err(Error::input("domains name variables outside the layers"));
    }
    let names: Vec<String> = variables.iter().map(|v| v.0.clone()).collect();
    let index = index_of(&names);
    let constraints = file
        .constraints
        .iter()
        .map(|c| {
            let from = lookup(&index, &c.from, "variable")?;
            let to = lookup(&index, &c.to, "variable")?;
            let target = index_of(&variables[to].2);
            let map = variables[from]
                .2
                .iter()
                .map(|a| {
                    let b = c
                        .map
                        .get(a)
                        .ok_or_else(|| Error::input(format!("the map from `{}` misses `{a}`", c.from)))?;
                    lookup(&target, b, "label")
                })
                .collect::<Result<Vec<_>>>()?;
            if c.map.len() != map.len() {
                return Err(Error::input(format!(
                    "the map from `{}` has labels outside its domain",
                    c.from
                )));
            }
            Ok(LlcConstraint { from, to, map })
        })
        .collect::<Result<Vec<_>>>()?;
    let inst = LlcInstance::new(file.layers.len(), variables, constraints)?;
    if inst.has_empty_domain() != file.has_empty_domain {
        return Err(Error::input("`has_empty_domain` disagrees with the domains"));
    }
    Ok(inst)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AuxVariableFile {
    name: String,
    set: Vec<String>,
    /// `σ_U`: label `i` encodes `partial[i]`.
    partial: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayoutFile {
    source_variables: Vec<String>,
    source_domain: Vec<String>,
    arities: Vec<usize>,
    c_size: usize,
    c_mode: CMode,
    auxiliary: Vec<AuxVariableFile>,
    links: Vec<AuxLink>,
    in_size: usize,
    clouds: Vec<Cloud>,
    class_of: Vec<usize>,
    representatives: Vec<usize>,
}

/// Everything decoding needs besides the templates and the output instance.
pub fn layout_to_json(
    phi: &Instance,
    strict: &RelationalStructure,
    aux: &AuxiliaryInstance,
    layout: &CloudLayout,
) -> Value {
    let vars = phi.variables();
    let dom = strict.domain();
    to_value(&LayoutFile {
        source_variables: vars.to_vec(),
        source_domain: dom.to_vec(),
        arities: aux.arities.clone(),
        c_size: aux.c_size,
        c_mode: aux.mode,
        auxiliary: aux
            .sets
            .iter()
            .zip(&aux.partial)
            .enumerate()
            .map(|(i, (u, partial))| AuxVariableFile {
                name: aux.instance.variables()[i].clone(),
                set: u.iter().map(|v| vars[v].clone()).collect(),
                partial: partial
                    .iter()
                    .map(|g| g.iter().map(|&a| dom[a].clone()).collect())
                    .collect(),
            })
            .collect(),
        links: aux.links.clone(),
        in_size: layout.in_size,
        clouds: layout.clouds.clone(),
        class_of: layout.class_of.clone(),
        representatives: layout.representatives.clone(),
    })
}

/// Reads a layout written for `phi` over `strict`, rebuilding `Ψ` and
/// checking the stored links and clouds against it.
pub fn layout_from_json(
    value: &Value,
    phi: &Instance,
    strict: &RelationalStructure,
) -> Result<(AuxiliaryInstance, CloudLayout)> {
    let file: LayoutFile = parse(value, "layout")?;
    if file.source_variables != phi.variables() || file.source_domain != strict.domain() {
        return Err(Error::input("the layout was written for another source instance"));
    }
    let vars = index_of(phi.variables());
    let atoms = index_of(strict.domain());
    let mut names = Vec::new();
    let mut sets = Vec::new();
    let mut partial = Vec::new();
    for v in &file.auxiliary {
        let set = Subset::from_indices(
            v.set
                .iter()
                .map(|x| lookup(&vars, x, "variable"))
                .collect::<Result<Vec<_>>>()?,
        );
        let dom = v
            .partial
            .iter()
            .map(|g| g.iter().map(|a| lookup(&atoms, a, "atom")).collect())
            .collect::<Result<Vec<Vec<usize>>>>()?;
        names.push(v.name.clone());
        sets.push(set);
        partial.push(dom);
    }
    let n = phi.num_variables();
    for &k in &file.arities {
        if k_subsets(n, k).any(|u| sets.binary_search_by_key(&u.0, |s| s.0).is_err()) {
            return Err(Error::input(format!("the layout misses a subset of size {k}")));
        }
    }
    let aux = AuxiliaryInstance::from_tables(names, n, file.arities, file.c_size, file.c_mode, sets, partial)?;
    if aux.links != file.links {
        return Err(Error::input("stored links differ from the rebuilt ones"));
    }
    let layout = CloudLayout {
        in_size: file.in_size,
        clouds: file.clouds,
        class_of: file.class_of,
        representatives: file.representatives,
    };
    let mut offset = 0;
    for cl in &layout.clouds {
        if cl.offset != offset || Some(cl.size) != file.in_size.checked_pow(cl.arity as u32) {
            return Err(Error::input(format!("cloud `{}` is misplaced or mis-sized", cl.label)));
        }
        offset += cl.size;
    }
    let classes = layout.representatives.len();
    if layout.class_of.len() != offset || layout.class_of.iter().any(|&c| c >= classes) {
        return Err(Error::input("class table does not match the clouds"));
    }
    if layout
        .representatives
        .iter()
        .enumerate()
        .any(|(c, &p)| layout.class_of.get(p) != Some(&c))
    {
        return Err(Error::input("a representative lies outside its class"));
    }
    Ok((aux, layout))
}

/// What a parameter file asks for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamsRequest {
    pub domain_size: Option<usize>,
    pub m: Option<usize>,
    pub values: Option<Vec<usize>>,
    pub mode: crate::pas::K0Mode,
    /// Arities, when written in the file.
    pub k: Option<Vec<usize>>,
}

/// Reads either a full parameter record or a bare `{"k": [...]}`.
/// Arities too large for a machine word are an input error.
pub fn params_from_json(value: &Value) -> Result<ParamsRequest> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::input("a parameter file is a JSON object"))?;
    let int = |v: &Value| -> Result<usize> {
        match v {
            Value::Number(n) => n.as_u64().and_then(|x| usize::try_from(x).ok()),
            Value::String(s) => s.parse().ok(),
            _ => None,
        }
        .ok_or_else(|| Error::input(format!("`{v}` is not a usable nonnegative integer")))
    };
    let list = |key: &str| -> Result<Option<Vec<usize>>> {
        obj.get(key)
            .map(|v| {
                v.as_array()
                    .ok_or_else(|| Error::input(format!("`{key}` must be an array")))?
                    .iter()
                    .map(int)
                    .collect()
            })
            .transpose()
    };
    Ok(ParamsRequest {
        domain_size: obj.get("domain_size").map(int).transpose()?,
        m: obj.get("m").map(int).transpose()?,
        values: list("values")?,
        mode: match obj.get("mode") {
            None => Default::default(),
            Some(v) => parse(v, "parameter")?,
        },
        k: list("k")?,
    })
}

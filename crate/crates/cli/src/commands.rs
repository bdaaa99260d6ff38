use std::path::Path;
use std::sync::Arc;

use serde::Serialize;

use nplectic::io::{self, Element, ElementFile, ElementKind, PairOrStructure};
use nplectic::pair::{validate_morphism, Check};
use nplectic::report::Report;
use nplectic::{suite, Cotensor, Error, NPlecticStructure, Pair, Result, Tensor};

use crate::{Command, Common, Inputs};

/// Windows above this are refused before any slice is built.
pub const MAX_WINDOW: u32 = 6;

pub fn name(c: &Command) -> &'static str {
    match c {
        Command::ValidatePair { .. } => "validate-pair",
        Command::ValidateMorphism { .. } => "validate-morphism",
        Command::Bracket { .. } => "bracket",
        Command::Differential { .. } => "differential",
        Command::Contract { .. } => "contract",
        Command::LieDerivative { .. } => "lie-derivative",
        Command::NplecticCheck { .. } => "nplectic-check",
        Command::Jacobi { .. } => "jacobi",
        Command::Cohomology { .. } => "cohomology",
        Command::Poisson { .. } => "poisson",
        Command::MomentumCheck { .. } => "momentum-check",
        Command::Identities { .. } => "identities",
    }
}

fn read(path: &Path) -> Result<String> {
    io::read_file(path)
}

/// Prefixes file errors with the path they came from.
fn in_file<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { line, column, message } => Error::Parse {
            line,
            column,
            message: format!("{}: {message}", path.display()),
        },
        Error::Argument(m) => Error::Argument(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn load(inputs: &Inputs) -> Result<PairOrStructure> {
    match (&inputs.structure, &inputs.pair) {
        (Some(_), Some(_)) => Err(Error::Argument("give either --pair or --structure, not both".into())),
        (Some(p), None) => in_file(p, io::parse_structure(&read(p)?)).map(PairOrStructure::Structure),
        (None, Some(p)) => in_file(p, io::parse_pair_or_structure(&read(p)?)),
        (None, None) => Err(Error::Argument("an input is required: --pair or --structure".into())),
    }
}

fn load_structure(inputs: &Inputs, cap: usize) -> Result<NPlecticStructure> {
    match load(inputs)? {
        PairOrStructure::Structure(s) => Ok(s.with_arity_cap(cap)),
        PairOrStructure::Pair(_) => Err(Error::Argument("this command needs a structure file (with omega)".into())),
    }
}

fn load_elements(path: &Path, pair: &Pair) -> Result<Vec<Element>> {
    in_file(path, io::parse_elements(&read(path)?, pair))
}

fn require_arity(arity: usize, cap: usize) -> Result<()> {
    if arity > cap {
        return Err(Error::ResourceLimit(format!("arity {arity} exceeds the arity cap {cap}")));
    }
    Ok(())
}

fn arities(lo: usize, max: usize) -> Vec<usize> {
    (lo..=max).collect()
}

fn tensor_file(x: &Tensor) -> ElementFile {
    ElementFile {
        kind: ElementKind::Tensor,
        terms: io::terms_of(x),
    }
}

fn cotensor_file(f: &Cotensor) -> ElementFile {
    ElementFile {
        kind: ElementKind::Cotensor,
        terms: io::terms_of(f),
    }
}

fn tensors(es: &[Element]) -> Result<Vec<Tensor>> {
    es.iter()
        .map(|e| match e {
            Element::Tensor(x) => Ok(x.clone()),
            Element::Cotensor(_) => Err(Error::Argument("expected only tensors".into())),
        })
        .collect()
}

fn cotensors(es: &[Element]) -> Result<Vec<Cotensor>> {
    es.iter()
        .map(|e| match e {
            Element::Cotensor(f) => Ok(f.clone()),
            Element::Tensor(_) => Err(Error::Argument("expected only cotensors".into())),
        })
        .collect()
}

fn tensor_cotensor_pairs(es: &[Element]) -> Result<Vec<(Tensor, Cotensor)>> {
    if !es.len().is_multiple_of(2) {
        return Err(Error::Argument("expected (tensor, cotensor) pairs".into()));
    }
    es.chunks(2)
        .map(|c| match (&c[0], &c[1]) {
            (Element::Tensor(x), Element::Cotensor(f)) => Ok((x.clone(), f.clone())),
            _ => Err(Error::Argument("expected (tensor, cotensor) pairs".into())),
        })
        .collect()
}

#[derive(Serialize)]
struct Computed {
    input: String,
    display: String,
    value: ElementFile,
}

#[derive(Serialize)]
struct TensorInfo {
    tensor: String,
    degree: Option<i64>,
    symplectic: bool,
    in_kernel: bool,
    potential: Option<ElementFile>,
}

#[derive(Serialize)]
struct StructureSummary {
    n: usize,
    family: &'static str,
    omega: String,
    omega_poly_degree: Option<u32>,
    symplectic_degrees: Vec<i64>,
    tensors: Vec<TensorInfo>,
    checks: Vec<Check>,
}

fn emit<T: Serialize>(command: &Command, c: &Common, passed: bool, results: T) -> (bool, String) {
    let r = Report {
        command: name(command).to_string(),
        seed: c.seed,
        arity_cap: c.arity_cap,
        window: c.window as i64,
        passed,
        results,
    };
    (passed, r.to_json())
}

/// Runs one command and returns whether its checks passed and the report.
pub fn run(command: &Command, c: &Common) -> Result<(bool, String)> {
    if c.window > MAX_WINDOW {
        return Err(Error::ResourceLimit(format!("window {} exceeds the limit {MAX_WINDOW}", c.window)));
    }
    let window = c.window as i64;
    let out = match command {
        Command::ValidatePair { inputs, samples } => {
            let input = load(inputs)?;
            let r = input.pair().validate(c.seed, *samples);
            emit(command, c, r.passed(), r)
        }
        Command::ValidateMorphism { morphism, samples } => {
            let m = in_file(morphism, io::parse_pair_morphism(&read(morphism)?))?;
            let r = validate_morphism(&m, c.seed, *samples);
            emit(command, c, r.passed(), r)
        }
        Command::Bracket { inputs, elements } => {
            let input = load(inputs)?;
            let pair = input.pair();
            let xs = tensors(&load_elements(elements, pair)?)?;
            require_arity(xs.len(), c.arity_cap)?;
            let b = match xs.len() {
                0 => return Err(Error::Argument("the bracket needs at least one tensor".into())),
                1 => Tensor::zero(),
                _ => pair.higher_bracket_with_cap(&xs, c.arity_cap)?,
            };
            let shown: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
            let r = Computed {
                input: format!("[{}]", shown.join(", ")),
                display: b.to_string(),
                value: tensor_file(&b),
            };
            emit(command, c, true, r)
        }
        Command::Differential { inputs, elements } => {
            let input = load(inputs)?;
            let pair = input.pair();
            let mut rs = Vec::new();
            for f in cotensors(&load_elements(elements, pair)?)? {
                let d = pair.ce_differential(&f)?;
                rs.push(Computed {
                    input: f.to_string(),
                    display: d.to_string(),
                    value: cotensor_file(&d),
                });
            }
            emit(command, c, true, rs)
        }
        Command::Contract { inputs, elements } | Command::LieDerivative { inputs, elements } => {
            let input = load(inputs)?;
            let pair = input.pair();
            let lie = matches!(command, Command::LieDerivative { .. });
            let mut rs = Vec::new();
            for (x, f) in tensor_cotensor_pairs(&load_elements(elements, pair)?)? {
                let v = if lie { pair.lie_derivative(&x, &f)? } else { pair.contract(&x, &f)? };
                rs.push(Computed {
                    input: format!("x = {x}, f = {f}"),
                    display: v.to_string(),
                    value: cotensor_file(&v),
                });
            }
            emit(command, c, true, rs)
        }
        Command::NplecticCheck { inputs, elements, instances } => {
            let st = load_structure(inputs, c.arity_cap)?;
            require_arity(4, c.arity_cap)?;
            let mut infos = Vec::new();
            if let Some(path) = elements {
                for x in tensors(&load_elements(path, st.pair())?)? {
                    let symplectic = st.is_symplectic(&x)?;
                    let potential = if symplectic { st.hamiltonian_potential(&x)? } else { None };
                    infos.push(TensorInfo {
                        tensor: x.to_string(),
                        degree: x.homogeneous_degree(),
                        symplectic,
                        in_kernel: st.in_kernel(&x)?,
                        potential: potential.as_ref().map(cotensor_file),
                    });
                }
            }
            let mut checks = suite::fundamental_pairing(&st, c.seed, &[2, 3, 4], *instances)?;
            checks.extend(suite::symplectic_closure(&st, c.seed.wrapping_add(1), &[2, 3], *instances)?);
            let passed = checks.iter().all(|k| k.passed);
            let r = StructureSummary {
                n: st.n(),
                family: st.pair().family_name(),
                omega: st.omega().to_string(),
                omega_poly_degree: st.omega_poly_degree(),
                symplectic_degrees: suite::symplectic_degrees(&st, window)?,
                tensors: infos,
                checks,
            };
            emit(command, c, passed, r)
        }
        Command::Jacobi {
            inputs,
            linf,
            max_arity,
            instances,
        } => {
            require_arity(*max_arity, c.arity_cap)?;
            if let Some(path) = linf {
                if inputs.pair.is_some() || inputs.structure.is_some() {
                    return Err(Error::Argument("give either --linf or a pair/structure".into()));
                }
                let l = in_file(path, io::parse_linf(&read(path)?))?;
                let r = nplectic::linf::check_linf(&l, *max_arity)?;
                emit(command, c, r.passed, r)
            } else {
                match load(inputs)? {
                    PairOrStructure::Pair(p) => {
                        let r = suite::tensor_jacobi(&Arc::new(p), c.seed, &arities(2, *max_arity), *instances)?;
                        emit(command, c, r.passed, vec![r])
                    }
                    PairOrStructure::Structure(st) => {
                        let st = st.with_arity_cap(c.arity_cap);
                        let t = suite::tensor_jacobi(&st.shared_pair(), c.seed, &arities(2, *max_arity), *instances)?;
                        let e = suite::extension_jacobi(&st, c.seed, &arities(1, *max_arity), *instances)?;
                        emit(command, c, t.passed && e.passed, vec![t, e])
                    }
                }
            }
        }
        Command::Cohomology { inputs } => match load(inputs)? {
            PairOrStructure::Pair(p) => {
                let table = nplectic::cohomology::ce_cohomology_table(&p, window)?;
                emit(command, c, true, table)
            }
            PairOrStructure::Structure(st) => {
                let r = suite::cohomology(&st, window)?;
                emit(command, c, r.bounds.passed, r)
            }
        },
        Command::Poisson {
            inputs,
            max_arity,
            instances,
        } => {
            require_arity(*max_arity, c.arity_cap)?;
            let st = load_structure(inputs, c.arity_cap)?;
            let r = suite::poisson(&st, c.seed, &arities(3, *max_arity), *instances, window)?;
            emit(command, c, r.passed, r)
        }
        Command::MomentumCheck {
            inputs,
            momentum,
            max_arity,
        } => {
            require_arity(*max_arity, c.arity_cap)?;
            let st = load_structure(inputs, c.arity_cap)?;
            let (dom, j) = in_file(momentum, io::parse_momentum(&read(momentum)?, &st))?;
            let r = nplectic::linf::check_momentum_map(&dom, &st, &j, *max_arity)?;
            emit(command, c, r.certified, r)
        }
        Command::Identities { inputs, instances } => {
            require_arity(4, c.arity_cap)?;
            let input = load(inputs)?;
            let st = match &input {
                PairOrStructure::Structure(s) => Some(s),
                PairOrStructure::Pair(_) => None,
            };
            let r = suite::identities(input.pair(), st, c.seed, *instances)?;
            emit(command, c, r.passed, r)
        }
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arity_cap_is_a_resource_limit() {
        assert!(require_arity(4, 4).is_ok());
        assert!(matches!(require_arity(5, 4), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn elements_pair_up() {
        let x = Element::Tensor(Tensor::zero());
        let f = Element::Cotensor(Cotensor::zero());
        assert_eq!(tensor_cotensor_pairs(&[x.clone(), f.clone()]).unwrap().len(), 1);
        assert!(tensor_cotensor_pairs(&[f, x]).is_err());
    }

    #[test]
    fn file_errors_name_the_file() {
        let e = in_file::<()>(Path::new("m.json"), Err(Error::Argument("bad".into()))).unwrap_err();
        assert_eq!(e.to_string(), "argument error: m.json: bad");
    }
}

//! JSON input and output formats. Indices in files are 1-based; exact
//! numbers are strings such as `"-3/2"` or `"x1^2 - 1/2*x2"`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use crate::calculus::{Cotensor, Graded, Kind, Tensor, Word};
use crate::error::{Error, Result};
use crate::linf::{FiniteLInfinity, MomentumCandidate};
use crate::nplectic::{ExtensionElement, NPlecticStructure};
use crate::pair::{Pair, PairDescriptor, PairMorphismCandidate, StructureConstant};
use crate::scalar::{Poly, Rational};

/// A 1-based index in a file, stored 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Index(pub usize);

impl Serialize for Index {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u64(self.0 as u64 + 1)
    }
}

impl<'de> Deserialize<'de> for Index {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = u64::deserialize(d)?;
        if v == 0 {
            return Err(de::Error::custom("indices are 1-based; found 0"));
        }
        Ok(Index(v as usize - 1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairFile {
    /// `"constant"` or `"poly_vector_field"`.
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    /// Entries `[i, j, k, c]` meaning `[e_i, e_j]` has coefficient `c` on `e_k`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub structure_constants: Vec<(Index, Index, Index, Rational)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variables: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermFile {
    pub word: Vec<Index>,
    pub coeff: Poly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureFile {
    pub pair: PairFile,
    pub n: usize,
    pub omega: Vec<TermFile>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementKind {
    Tensor,
    Cotensor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementFile {
    pub kind: ElementKind,
    pub terms: Vec<TermFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementsFile {
    pub elements: Vec<ElementFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperationFile {
    pub inputs: Vec<Index>,
    pub output: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinfFile {
    #[serde(default)]
    pub name: String,
    pub degrees: Vec<i64>,
    #[serde(default)]
    pub operations: Vec<OperationFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentumComponentFile {
    pub inputs: Vec<Index>,
    #[serde(default)]
    pub potential: Vec<TermFile>,
    #[serde(default)]
    pub tensor: Vec<TermFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentumFile {
    pub domain: LinfFile,
    pub components: Vec<MomentumComponentFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairMorphismFile {
    pub domain: PairFile,
    pub codomain: PairFile,
    pub f_generators: Vec<Poly>,
    pub g_basis: Vec<Vec<TermFile>>,
}

/// A parsed element of either kind.
#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    Tensor(Tensor),
    Cotensor(Cotensor),
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Tensor(x) => x.fmt(f),
            Element::Cotensor(g) => g.fmt(f),
        }
    }
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn pair_from_file(p: &PairFile) -> Result<Pair> {
    match p.family.as_str() {
        "constant" => {
            let dimension = p
                .dimension
                .ok_or_else(|| Error::Argument("constant pairs need a dimension".into()))?;
            if p.variables.is_some() {
                return Err(Error::Argument("constant pairs take no variables".into()));
            }
            let constants = p
                .structure_constants
                .iter()
                .map(|(i, j, k, c)| {
                    // [e_j, e_i] = -[e_i, e_j]
                    let (i, j, value) = if i.0 > j.0 { (j.0, i.0, -c.clone()) } else { (i.0, j.0, c.clone()) };
                    StructureConstant { i, j, k: k.0, value }
                })
                .collect();
            Pair::new(PairDescriptor::Constant {
                dimension,
                constants,
            })
        }
        "poly_vector_field" => {
            let variables = p
                .variables
                .ok_or_else(|| Error::Argument("polynomial pairs need a number of variables".into()))?;
            if p.dimension.is_some() || !p.structure_constants.is_empty() {
                return Err(Error::Argument(
                    "polynomial pairs take only a number of variables".into(),
                ));
            }
            Pair::poly(variables)
        }
        other => Err(Error::Argument(format!(
            "unknown pair family {other:?}; expected \"constant\" or \"poly_vector_field\""
        ))),
    }
}

pub fn pair_to_file(pair: &Pair) -> PairFile {
    match pair.descriptor() {
        PairDescriptor::Constant {
            dimension,
            constants,
        } => PairFile {
            family: "constant".into(),
            dimension: Some(*dimension),
            structure_constants: constants
                .iter()
                .map(|c| (Index(c.i), Index(c.j), Index(c.k), c.value.clone()))
                .collect(),
            variables: None,
        },
        PairDescriptor::PolyVectorField { variables } => PairFile {
            family: "poly_vector_field".into(),
            dimension: None,
            structure_constants: Vec::new(),
            variables: Some(*variables),
        },
    }
}

pub fn graded_from_terms<K: Kind>(pair: &Pair, terms: &[TermFile]) -> Result<Graded<K>> {
    let mut g = Graded::zero();
    for t in terms {
        let idx: Vec<usize> = t.word.iter().map(|i| i.0).collect();
        if let Some(&bad) = idx.iter().find(|&&i| i >= pair.dim()) {
            return Err(Error::Argument(format!(
                "basis index {} exceeds the rank {}",
                bad + 1,
                pair.dim()
            )));
        }
        let (w, odd) = Word::from_indices(&idx)
            .ok_or_else(|| Error::Argument(format!("repeated index in word {:?}", t.word)))?;
        let c = if odd { -t.coeff.clone() } else { t.coeff.clone() };
        g.add_term(w, &c);
    }
    pair.check(&g)?;
    Ok(g)
}

pub fn terms_of<K: Kind>(g: &Graded<K>) -> Vec<TermFile> {
    g.terms()
        .map(|(w, c)| TermFile {
            word: w.indices().map(Index).collect(),
            coeff: c.clone(),
        })
        .collect()
}

pub fn parse_pair(text: &str) -> Result<Pair> {
    pair_from_file(&serde_json::from_str(text)?)
}

pub fn structure_from_file(f: &StructureFile) -> Result<NPlecticStructure> {
    let pair = pair_from_file(&f.pair)?;
    let omega = graded_from_terms(&pair, &f.omega)?;
    NPlecticStructure::new(pair, f.n, omega)
}

pub fn structure_to_file(s: &NPlecticStructure) -> StructureFile {
    StructureFile {
        pair: pair_to_file(s.pair()),
        n: s.n(),
        omega: terms_of(s.omega()),
    }
}

pub fn parse_structure(text: &str) -> Result<NPlecticStructure> {
    structure_from_file(&serde_json::from_str(text)?)
}

/// Either file kind; structure files are recognized by their `omega` key.
#[derive(Debug, Clone)]
pub enum PairOrStructure {
    Pair(Pair),
    Structure(NPlecticStructure),
}

impl PairOrStructure {
    pub fn pair(&self) -> &Pair {
        match self {
            PairOrStructure::Pair(p) => p,
            PairOrStructure::Structure(s) => s.pair(),
        }
    }
}

pub fn parse_pair_or_structure(text: &str) -> Result<PairOrStructure> {
    let v: serde_json::Value = serde_json::from_str(text)?;
    if v.get("omega").is_some() {
        parse_structure(text).map(PairOrStructure::Structure)
    } else {
        parse_pair(text).map(PairOrStructure::Pair)
    }
}

pub fn parse_elements(text: &str, pair: &Pair) -> Result<Vec<Element>> {
    let f: ElementsFile = serde_json::from_str(text)?;
    f.elements
        .iter()
        .map(|e| match e.kind {
            ElementKind::Tensor => graded_from_terms(pair, &e.terms).map(Element::Tensor),
            ElementKind::Cotensor => graded_from_terms(pair, &e.terms).map(Element::Cotensor),
        })
        .collect()
}

pub fn elements_to_file(es: &[Element]) -> ElementsFile {
    ElementsFile {
        elements: es
            .iter()
            .map(|e| match e {
                Element::Tensor(x) => ElementFile {
                    kind: ElementKind::Tensor,
                    terms: terms_of(x),
                },
                Element::Cotensor(g) => ElementFile {
                    kind: ElementKind::Cotensor,
                    terms: terms_of(g),
                },
            })
            .collect(),
    }
}

pub fn linf_from_file(f: &LinfFile) -> Result<FiniteLInfinity> {
    let entries = f
        .operations
        .iter()
        .map(|o| (o.inputs.iter().map(|i| i.0).collect(), o.output.clone()))
        .collect();
    FiniteLInfinity::new(&f.name, f.degrees.clone(), entries)
}

pub fn linf_to_file(l: &FiniteLInfinity) -> LinfFile {
    LinfFile {
        name: l.name.clone(),
        degrees: l.degrees().to_vec(),
        operations: l
            .entries()
            .map(|(k, v)| OperationFile {
                inputs: k.iter().copied().map(Index).collect(),
                output: v.clone(),
            })
            .collect(),
    }
}

pub fn parse_linf(text: &str) -> Result<FiniteLInfinity> {
    linf_from_file(&serde_json::from_str(text)?)
}

pub fn parse_momentum(text: &str, s: &NPlecticStructure) -> Result<(FiniteLInfinity, MomentumCandidate)> {
    let f: MomentumFile = serde_json::from_str(text)?;
    let dom = linf_from_file(&f.domain)?;
    let mut components = BTreeMap::new();
    for c in &f.components {
        let mut idx: Vec<usize> = c.inputs.iter().map(|i| i.0).collect();
        if idx.is_empty() || idx.iter().any(|&i| i >= dom.dimension()) {
            return Err(Error::Argument(format!(
                "momentum component inputs {:?} do not name domain basis elements",
                c.inputs
            )));
        }
        if idx.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Argument("momentum component inputs must be nondecreasing".into()));
        }
        idx.shrink_to_fit();
        let e = ExtensionElement::new(
            graded_from_terms(s.pair(), &c.potential)?,
            graded_from_terms(s.pair(), &c.tensor)?,
        );
        if components.insert(idx, e).is_some() {
            return Err(Error::Argument(format!("duplicate momentum component {:?}", c.inputs)));
        }
    }
    Ok((dom, MomentumCandidate { components }))
}

pub fn momentum_to_file(dom: &FiniteLInfinity, j: &MomentumCandidate) -> MomentumFile {
    MomentumFile {
        domain: linf_to_file(dom),
        components: j
            .components
            .iter()
            .map(|(k, e)| MomentumComponentFile {
                inputs: k.iter().copied().map(Index).collect(),
                potential: terms_of(&e.potential),
                tensor: terms_of(&e.tensor),
            })
            .collect(),
    }
}

pub fn parse_pair_morphism(text: &str) -> Result<PairMorphismCandidate> {
    let f: PairMorphismFile = serde_json::from_str(text)?;
    let domain = pair_from_file(&f.domain)?;
    let codomain = pair_from_file(&f.codomain)?;
    let g = f
        .g_basis
        .iter()
        .map(|t| graded_from_terms(&codomain, t))
        .collect::<Result<Vec<Tensor>>>()?;
    PairMorphismCandidate::new(domain, codomain, f.f_generators, g)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report values serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const PLANE: &str = r#"{
  "pair": {"family": "poly_vector_field", "variables": 2},
  "n": 1,
  "omega": [{"word": [1, 2], "coeff": "1"}]
}"#;

    #[test]
    fn structure_round_trip() {
        let s = parse_structure(PLANE).unwrap();
        let back = to_json(&structure_to_file(&s));
        let again = parse_structure(&back).unwrap();
        assert_eq!(again.omega(), s.omega());
        assert_eq!(to_json(&structure_to_file(&again)), back);
    }

    #[test]
    fn constant_pair_and_word_signs() {
        let text = r#"{"family": "constant", "dimension": 3,
            "structure_constants": [[1, 2, 3, "1"], [2, 3, 1, "1"], [3, 1, 2, "1"]]}"#;
        let p = parse_pair(text).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(p.basis_bracket(i, j), Pair::su2().basis_bracket(i, j));
            }
        }
        let es = parse_elements(r#"{"elements": [{"kind": "tensor", "terms": [{"word": [2, 1], "coeff": "3"}]}]}"#, &p).unwrap();
        assert_eq!(es[0], Element::Tensor(Tensor::basis(Word::from_bits(0b11)).scale(&Rational::from(-3))));
    }

    #[test]
    fn parse_errors_carry_positions() {
        let text = "{\"family\": \"constant\", \"dimension\": 3,\n \"structure_constants\": [[1, 2, 3, \"1/0\"]]}";
        match parse_pair(text) {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 2);
                assert!(column > 0);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_pair("{\"family\": \"constant\", \"dimension\": 3,\n \"structure_constants\": [[0, 2, 3, \"1\"]]}"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_pair("{"), Err(Error::Parse { .. })));
        assert!(matches!(parse_pair(r#"{"family": "lie"}"#), Err(Error::Argument(_))));
    }

    #[test]
    fn constant_coefficients_enforced() {
        let p = Pair::su2();
        let text = r#"{"elements": [{"kind": "cotensor", "terms": [{"word": [1], "coeff": "x1"}]}]}"#;
        assert!(parse_elements(text, &p).is_err());
    }

    #[test]
    fn linf_round_trip() {
        let l = FiniteLInfinity::from_lie_algebra(&Pair::su2()).unwrap();
        let text = to_json(&linf_to_file(&l));
        assert_eq!(parse_linf(&text).unwrap(), l);
    }
}

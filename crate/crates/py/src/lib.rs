//! Python bindings: tables, confusable structures, expansions, tabulated
//! schemes and exact verification.

use confuse_core::blockcode::entropy_of_u;
use confuse_core::expansion::{self, CarrierKind, SearchBounds};
use confuse_core::protocol::{
    bundled, bundled_table, optimize_additive_randomness, tabulate, CrtEqualScheme, FknScheme,
    LinearScheme, Scheme as _, TabulatedScheme,
};
use confuse_core::structures::{catalog_fields, catalog_rings};
use confuse_core::verify::InputDistribution;
use confuse_core::{ConfusableStructure, FeasibleExpansion, FunctionTable};
use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyAny;

fn err(e: confuse_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn from_json<T: serde::de::DeserializeOwned>(s: &str) -> PyResult<T> {
    serde_json::from_str(s).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn to_py<'py>(py: Python<'py>, v: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn distribution(table: &FunctionTable, weights: Option<Vec<Vec<u64>>>) -> InputDistribution {
    match weights {
        Some(weights) => InputDistribution { weights },
        None => InputDistribution::uniform(table.m1(), table.m2()),
    }
}

/// A finite function `f(w1, w2)` with outputs labeled `0..k`.
#[pyclass(name = "Table", module = "confuse", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyTable(FunctionTable);

#[pymethods]
impl PyTable {
    #[new]
    fn new(outputs: Vec<Vec<u32>>) -> PyResult<Self> {
        FunctionTable::new(outputs).map(Self).map_err(err)
    }

    #[staticmethod]
    fn bundled(name: &str) -> PyResult<Self> {
        bundled_table(name)
            .map(Self)
            .ok_or_else(|| PyKeyError::new_err(name.to_string()))
    }

    #[staticmethod]
    fn equal(m: u32) -> Self {
        Self(FunctionTable::equal(m))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        from_json(text).map(Self)
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0).unwrap_or_default()
    }

    #[getter]
    fn m1(&self) -> u32 {
        self.0.m1()
    }

    #[getter]
    fn m2(&self) -> u32 {
        self.0.m2()
    }

    #[getter]
    fn outputs(&self) -> Vec<Vec<u32>> {
        self.0.outputs().to_vec()
    }

    fn __call__(&self, w1: u32, w2: u32) -> PyResult<u32> {
        if w1 >= self.0.m1() || w2 >= self.0.m2() {
            return Err(PyValueError::new_err("input out of range"));
        }
        Ok(self.0.get(w1, w2))
    }

    fn __repr__(&self) -> String {
        format!("Table({:?})", self.0.outputs())
    }
}

/// A carrier with a partition into confusable sets and a randomizer group.
#[pyclass(name = "Structure", module = "confuse", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyStructure {
    inner: ConfusableStructure,
    #[pyo3(get)]
    trivial: bool,
}

#[pymethods]
impl PyStructure {
    #[getter]
    fn size(&self) -> u32 {
        self.inner.carrier().size()
    }

    #[getter]
    fn is_field(&self) -> bool {
        self.inner.carrier().is_field()
    }

    #[getter]
    fn carrier(&self) -> String {
        self.inner.carrier().label()
    }

    #[getter]
    fn sets(&self) -> Vec<Vec<u32>> {
        self.inner.sets().to_vec()
    }

    #[getter]
    fn randomizer(&self) -> Vec<u32> {
        self.inner.randomizer().to_vec()
    }

    fn add(&self, a: u32, b: u32) -> u32 {
        self.inner.carrier().add(a, b)
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        self.inner.carrier().mul(a, b)
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).unwrap_or_default()
    }

    fn __repr__(&self) -> String {
        format!("Structure({})", self.inner.describe())
    }
}

/// Injective relabelings of both inputs so that `f` is read off the
/// confusable set containing the sum.
#[pyclass(name = "Expansion", module = "confuse", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyExpansion(FeasibleExpansion);

#[pymethods]
impl PyExpansion {
    #[getter]
    fn map1(&self) -> Vec<u32> {
        self.0.map1.clone()
    }

    #[getter]
    fn map2(&self) -> Vec<u32> {
        self.0.map2.clone()
    }

    #[getter]
    fn out_map(&self) -> Vec<Option<u32>> {
        self.0.out_map.clone()
    }

    #[getter]
    fn structure(&self) -> PyStructure {
        PyStructure {
            inner: self.0.structure.clone(),
            trivial: false,
        }
    }

    fn validate(&self, table: &PyTable) -> PyResult<()> {
        self.0.validate(&table.0).map_err(err)
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0).unwrap_or_default()
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        from_json(text).map(Self)
    }

    fn __repr__(&self) -> String {
        format!(
            "Expansion({}, map1={:?}, map2={:?})",
            self.0.structure.describe(),
            self.0.map1,
            self.0.map2
        )
    }
}

/// A scheme held as explicit encoder and decoder tables.
#[pyclass(name = "Scheme", module = "confuse", skip_from_py_object)]
#[derive(Clone)]
struct PyScheme(TabulatedScheme);

#[pymethods]
impl PyScheme {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        TabulatedScheme::from_json(text).map(Self).map_err(err)
    }

    #[staticmethod]
    fn bundled(name: &str) -> PyResult<Self> {
        let text = match name {
            "table_masking_2x3" => bundled::TABLE_MASKING_2X3,
            "reveal_key" => bundled::REVEAL_KEY,
            _ => return Err(PyKeyError::new_err(name.to_string())),
        };
        Self::from_json(text)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[getter]
    fn name(&self) -> String {
        self.0.name()
    }

    #[getter]
    fn atom_count(&self) -> u64 {
        self.0.atom_count()
    }

    /// Rates in bits as exact strings, such as `("2", "log2 3")`.
    #[getter]
    fn rates(&self) -> (String, String) {
        let (a, b) = self.0.rates();
        (a.symbolic(), b.symbolic())
    }

    #[getter]
    fn rate_bits(&self) -> (f64, f64) {
        let (a, b) = self.0.rates();
        (a.bits(), b.bits())
    }

    fn encode1(&self, w1: u32, atom: u64) -> PyResult<Vec<u32>> {
        self.check(w1, 0, atom)?;
        Ok(self.0.encode1(w1, atom).to_vec())
    }

    fn encode2(&self, w2: u32, atom: u64) -> PyResult<Vec<u32>> {
        self.check(0, w2, atom)?;
        Ok(self.0.encode2(w2, atom).to_vec())
    }

    fn decode(&self, x1: Vec<u32>, x2: Vec<u32>) -> Option<u32> {
        self.0
            .decode(&x1.into_iter().collect(), &x2.into_iter().collect())
    }

    fn set_decoder_entry(&mut self, x1: Vec<u32>, x2: Vec<u32>, label: u32) -> PyResult<()> {
        self.0.set_decoder_entry(&x1, &x2, label).map_err(err)
    }

    fn __repr__(&self) -> String {
        let (a, b) = self.rates();
        format!("Scheme({:?}, rates=({a}, {b}))", self.0.name())
    }
}

impl PyScheme {
    fn check(&self, w1: u32, w2: u32, atom: u64) -> PyResult<()> {
        let (m1, m2) = self.0.input_sizes();
        if w1 >= m1 || w2 >= m2 || atom >= self.0.atom_count() {
            return Err(PyValueError::new_err("input or atom out of range"));
        }
        Ok(())
    }
}

/// Confusable structures over fields (`"field"`) or rings (`"ring"`) of size
/// at most `max`.
#[pyfunction]
#[pyo3(signature = (kind, max = 20))]
fn catalog(kind: &str, max: u32) -> PyResult<Vec<PyStructure>> {
    let entries = match kind {
        "field" => catalog_fields(max),
        "ring" => catalog_rings(max),
        _ => return Err(PyValueError::new_err("kind must be 'field' or 'ring'")),
    }
    .map_err(err)?;
    Ok(entries
        .into_iter()
        .map(|e| PyStructure {
            inner: e.structure,
            trivial: e.trivial,
        })
        .collect())
}

#[pyfunction]
fn find_expansion(table: &PyTable, structure: &PyStructure) -> PyResult<Option<PyExpansion>> {
    expansion::find_expansion(&table.0, &structure.inner)
        .map(|e| e.map(PyExpansion))
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (table, structure, limit = usize::MAX))]
fn all_expansions(
    table: &PyTable,
    structure: &PyStructure,
    limit: usize,
) -> PyResult<Vec<PyExpansion>> {
    expansion::all_expansions(&table.0, &structure.inner, limit)
        .map(|v| v.into_iter().map(PyExpansion).collect())
        .map_err(err)
}

/// First expansions over carriers of increasing size, fields first.
#[pyfunction]
#[pyo3(signature = (table, max_carrier = 16, kind = "any", limit = 1))]
fn search(
    table: &PyTable,
    max_carrier: u32,
    kind: &str,
    limit: usize,
) -> PyResult<Vec<PyExpansion>> {
    let kind = match kind {
        "any" => CarrierKind::Any,
        "field" => CarrierKind::Field,
        "ring" => CarrierKind::Ring,
        _ => {
            return Err(PyValueError::new_err(
                "kind must be 'any', 'field' or 'ring'",
            ))
        }
    };
    let bounds = SearchBounds {
        max_carrier,
        kind,
        limit,
    };
    expansion::search_expansions(&table.0, bounds)
        .map(|v| v.into_iter().map(PyExpansion).collect())
        .map_err(err)
}

/// The randomized linear scheme of an expansion. With `optimize_for`, the
/// additive mask is shrunk as far as exact verification against that table
/// allows.
#[pyfunction]
#[pyo3(signature = (expansion, optimize_for = None))]
fn linear_scheme(expansion: &PyExpansion, optimize_for: Option<&PyTable>) -> PyResult<PyScheme> {
    let s = match optimize_for {
        Some(t) => optimize_additive_randomness(&expansion.0, &t.0, false),
        None => LinearScheme::new(expansion.0.clone()),
    };
    tabulate(&s).map(PyScheme).map_err(err)
}

/// The generic one-time-pad masking of the whole table.
#[pyfunction]
fn table_masking(table: &PyTable) -> PyResult<PyScheme> {
    let s = FknScheme::new(table.0.clone()).map_err(err)?;
    tabulate(&s).map(PyScheme).map_err(err)
}

/// Equality of `m`-ary inputs by residues; every permutation is an atom.
#[pyfunction]
fn crt_equal(m: u32) -> PyResult<PyScheme> {
    let s = CrtEqualScheme::new(m).map_err(err)?;
    tabulate(&s).map(PyScheme).map_err(err)
}

/// Exact correctness and security, plus leakage under the given input
/// weights (uniform if omitted). Returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (scheme, table, weights = None))]
fn verify<'py>(
    py: Python<'py>,
    scheme: &PyScheme,
    table: &PyTable,
    weights: Option<Vec<Vec<u64>>>,
) -> PyResult<Bound<'py, PyAny>> {
    let dist = distribution(&table.0, weights);
    let report = confuse_core::verify::verify(&scheme.0, &table.0, Some(&dist)).map_err(err)?;
    to_py(py, &report)
}

/// Distribution and entropy of the value Carol decodes from, for a field
/// expansion.
#[pyfunction]
#[pyo3(signature = (expansion, weights = None))]
fn entropy<'py>(
    py: Python<'py>,
    expansion: &PyExpansion,
    weights: Option<Vec<Vec<u64>>>,
) -> PyResult<Bound<'py, PyAny>> {
    let m1 = expansion.0.map1.len() as u32;
    let m2 = expansion.0.map2.len() as u32;
    let dist = match weights {
        Some(weights) => InputDistribution { weights },
        None => InputDistribution::uniform(m1, m2),
    };
    let report = entropy_of_u(&LinearScheme::new(expansion.0.clone()), &dist).map_err(err)?;
    to_py(py, &report)
}

#[pymodule]
pub fn confuse(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTable>()?;
    m.add_class::<PyStructure>()?;
    m.add_class::<PyExpansion>()?;
    m.add_class::<PyScheme>()?;
    m.add_function(wrap_pyfunction!(catalog, m)?)?;
    m.add_function(wrap_pyfunction!(find_expansion, m)?)?;
    m.add_function(wrap_pyfunction!(all_expansions, m)?)?;
    m.add_function(wrap_pyfunction!(search, m)?)?;
    m.add_function(wrap_pyfunction!(linear_scheme, m)?)?;
    m.add_function(wrap_pyfunction!(table_masking, m)?)?;
    m.add_function(wrap_pyfunction!(crt_equal, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(entropy, m)?)?;
    Ok(())
}

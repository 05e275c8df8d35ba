use cohwit_py::cohwit_py;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn run(code: &str) {
    let code = std::ffi::CString::new(code).unwrap();
    Python::attach(|py| {
        let globals = PyDict::new(py);
        globals
            .set_item("cw", py.import("cohwit").unwrap())
            .unwrap();
        if let Err(e) = py.run(&code, Some(&globals), None) {
            e.print(py);
            panic!("python snippet failed");
        }
    });
}

fn init() {
    static ONCE: std::sync::Once = std::sync::Once::new();
    ONCE.call_once(|| {
        pyo3::append_to_inittab!(cohwit_py);
        Python::initialize();
    });
}

#[test]
fn module_surface() {
    init();
    run(r#"
rho = cw.canonical_coherent(2)
w = cw.lemma2_witness(2, 0.0, 1.0)
rep = w.evaluate(rho)
assert rep.value == 2.0 and rep.detected and rep.verdict == "Detected"
assert rep.interval == (0.0, 1.0)
assert cw.generator(2, 1) == [[1, 0], [0, -1]]
assert cw.offdiag_support(rho) == [2]
fam = cw.finite_family(3, 0.5, [1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
assert len(fam) == 6 and fam.label == "C~^3"
assert all(v == "NotDetected" for v in fam.verdicts(cw.incoherent_state([0.2, 0.3, 0.5])))
"#);
}

#[test]
fn errors_become_value_errors() {
    init();
    run(r#"
for thunk in (
    lambda: cw.lemma2_witness(1, 0.0, 1.0),
    lambda: cw.lemma2_witness(2, 1.0, 0.0),
    lambda: cw.sample_ginibre(0, 1),
    lambda: cw.incoherent_state([0.5, 0.6]),
    lambda: cw.Witness([[0, 1], [2, 0]]),
    lambda: cw.Witness.from_json("{}"),
    lambda: cw.theorem2_witness(cw.incoherent_state([0.5, 0.5]), 0.0),
):
    try:
        thunk()
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError")
"#);
}

#[test]
fn reports_are_dicts() {
    init();
    run(r#"
rep = cw.verify_coverage(cw.finite_family(3), 100, 11)
assert rep["passed"] and rep["n_states"] == 100 and rep["seed"] == 11
assert rep == cw.verify_coverage(cw.finite_family(3), 100, 11)
geo = cw.qubit_geometry_check(0.0, 1.0, 0.0, 0.0, 6)
assert geo["passed"]
"#);
}

import json

from cbf.verify import bundled_suite, load_cases, verify_all, KINDS


def write(tmp_path, cases):
    (tmp_path / "cases.json").write_text(json.dumps(cases))
    return tmp_path


def test_bundled_suite_shape():
    cases = load_cases(bundled_suite())
    kinds = {c["kind"] for c in cases}
    assert kinds == set(KINDS)
    assert len({c["name"] for c in cases}) == len(cases)


def test_planted_wrong_expectation_names_case(tmp_path):
    suite = write(tmp_path, [
        {"name": "blowup_wrong", "kind": "discriminant",
         "model": {"exponents": [[1], [1]], "r": {"w1": "1/2", "w2": "-1/2"}}, "expected": {"z1": "1/3"}},
        {"name": "fine", "kind": "kodaira", "multiple": 4, "expected": "3/4"},
    ])
    report = verify_all(suite)
    assert not report.passed
    assert [r.name for r in report.failures] == ["blowup_wrong"]
    assert report.failures[0].observed == "z1=1/2"


def test_case_errors_become_failures(tmp_path):
    suite = write(tmp_path, [
        {"name": "invalid", "kind": "discriminant", "model": {"exponents": [[1], [0]], "r": {"w2": "1"}},
         "expected": {}},
        {"name": "mystery", "kind": "nope"},
    ])
    report = verify_all(suite)
    assert {r.name for r in report.failures} == {"invalid", "mystery"}


def test_crosscheck_and_ray_cases(tmp_path):
    node = {"exponents": [[1], [1]]}
    suite = write(tmp_path, [
        {"name": "x", "kind": "crosscheck", "model": node, "points": [[0.05]], "samples": 200000},
        {"name": "r", "kind": "ray", "model": node, "u": [1], "grid": [0.1, 1e-4, 10]},
    ])
    report = verify_all(suite, out_dir=tmp_path / "out", seed=4)
    assert report.passed
    rays = (tmp_path / "out" / "rays.csv").read_text().splitlines()
    assert rays[0] == "# cbf-csv v1 seed=4 command=verify-all"
    assert rays[1] == "case,s,V,psi_hat" and len(rays) == 12
    assert len((tmp_path / "out" / "crosscheck.csv").read_text().splitlines()) == 3


def test_single_file_suite(tmp_path):
    path = write(tmp_path, {"name": "one", "kind": "kodaira", "type": "IV*", "expected": "2/3"}) / "cases.json"
    assert verify_all(path).passed

import pytest

from bexp.suite import ACCEPTANCE, PROPERTIES, Status, SuiteConfig, exit_code, run_check


@pytest.mark.parametrize("group,name,fn", PROPERTIES, ids=[f"{g}:{n}" for g, n, _ in PROPERTIES])
def test_property(group, name, fn):
    result = run_check(group, name, fn, SuiteConfig())
    assert result.status is Status.PASS, result.detail


def test_same_seed_same_result():
    group, name, fn = next(p for p in PROPERTIES if p[1] == "reflect involution")
    a = run_check(group, name, fn, SuiteConfig(seed=7)).to_json(timing=False)
    b = run_check(group, name, fn, SuiteConfig(seed=7)).to_json(timing=False)
    assert a == b


def test_shallow_depth_reports_instead_of_failing():
    # at depth 8 the borderline cases become UNDECIDED or are counted, never FAIL
    cfg = SuiteConfig(depth=8)
    picked = [(n, f) for n, f in ACCEPTANCE if n.startswith(("A3", "A9"))]
    results = [run_check("acceptance", n, f, cfg) for n, f in picked]
    assert all(r.status is not Status.FAIL for r in results)
    a3, a9 = results
    assert a9.status is Status.UNDECIDED
    assert sum(v["borderline"] for v in a3.detail["per_m"].values()) > 0
    assert exit_code(results) == 4

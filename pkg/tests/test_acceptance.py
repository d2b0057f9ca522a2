"""One line per acceptance criterion: PASS or FAIL followed by its name."""
import pytest

from bexp.suite import ACCEPTANCE, Status, SuiteConfig, run_check


@pytest.mark.parametrize("name,fn", ACCEPTANCE, ids=[n.split()[0] for n, _ in ACCEPTANCE])
def test_criterion(name, fn, capsys):
    result = run_check("acceptance", name, fn, SuiteConfig())
    with capsys.disabled():
        print(f"\n{'PASS' if result.status is Status.PASS else 'FAIL'} {name}  {result.detail}"[:400])
    assert result.status is Status.PASS, result.detail

"""Acceptance criteria 1-9, each at its stated tolerance and runtime limit.

Every test records a ``PASS``/``FAIL`` line; ``conftest.py`` prints them in
the terminal summary, one per criterion.
"""
import pytest

from nesslab import hyl
from nesslab.lattice import LatticeMomentum
from nesslab.verify import CHECKS, check_determinism, exact_split_excess, run_check

LINES: dict[str, str] = {}


def record(cid, ok, text):
    LINES[cid] = f"[{'PASS' if ok else 'FAIL'}] criterion {cid}: {text}"
    print(LINES[cid])


def criterion(cid):
    res = run_check(cid, jobs=1)
    failed = [p for p, ok in res.parts.items() if not ok]
    text = f"{res.name}: {res.detail} ({res.seconds:.1f}s"
    text += f", limit {res.limit:.0f}s)" if res.limit else ")"
    if failed:
        text += " failed parts: " + "; ".join(failed)
    record(cid, res.passed, text)
    return res


@pytest.mark.parametrize("cid", [c for c in CHECKS if c != "5"])
def test_criterion(cid):
    res = criterion(cid)
    assert res.passed, res.detail


def test_criterion_5_hyl_brute_force():
    # the split-excess coefficient as stated cannot hold: see the ledger
    res = criterion("5")
    assert res.passed, "; ".join(p for p, ok in res.parts.items() if not ok)


def test_criterion_5_exact_split_identity():
    params = hyl.HylParams(6, 6, 1, 1)
    for j in (-3, -1, 2):
        v = LatticeMomentum((j,), 6)
        for n in range(2, 7):
            for c in hyl.enumerate_configs(params, 3, fixed_depletion=n):
                if sum(1 for k, _ in c.modes if any(k)) == 2:
                    assert hyl.split_excess(c, params, v) == exact_split_excess(c, params, v)


def test_criterion_9_determinism():
    res = check_determinism(list(CHECKS), jobs_values=(1, 4))
    failed = [p for p, ok in res.parts.items() if not ok]
    record("9", res.passed, f"{res.name}: {res.detail}" + (f" differing: {failed}" if failed else ""))
    assert res.passed

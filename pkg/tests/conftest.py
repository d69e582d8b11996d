import json
import subprocess
import sys
from fractions import Fraction

import pytest

from liesym.algebra import structure_constants
from liesym.determine import EvolutionPDE, solve_symmetries
from liesym.presets import PRESETS


@pytest.fixture(scope="session")
def tube():
    return EvolutionPDE.from_expr(PRESETS["viscoelastic-tube"], name="viscoelastic-tube")


@pytest.fixture(scope="session")
def tube_basis(tube):
    return solve_symmetries(tube, degree=3)


@pytest.fixture(scope="session")
def tube_algebra(tube_basis):
    return structure_constants(tube_basis.fields)


@pytest.fixture(scope="session")
def burgers():
    return EvolutionPDE.from_expr(PRESETS["burgers"], name="burgers")


@pytest.fixture(scope="session")
def burgers_basis(burgers):
    return solve_symmetries(burgers, degree=3)


TUBE_POINT = {k: Fraction(v) for k, v in zip("abcde", (2, 3, 5, 7, 11))}


def run_cli(*args, json_out=True):
    cmd = [sys.executable, "-m", "liesym", *args]
    if json_out:
        cmd.append("--json")
    proc = subprocess.run(cmd, capture_output=True, text=True, timeout=300)
    payload = json.loads(proc.stdout) if json_out and proc.stdout.strip() else None
    return proc.returncode, payload, proc


def pytest_terminal_summary(terminalreporter):
    import sys

    test_acceptance = sys.modules.get("test_acceptance")
    if test_acceptance is not None and test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[n])

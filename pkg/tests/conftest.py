import json
from pathlib import Path

import numpy as np
import pytest
import sympy

DATA = Path(__file__).parent / "data"

D_SYM, J_SYM, W_SYM, T_SYM = sympy.symbols("D J w t")
SYMBOLS = {"D": D_SYM, "J": J_SYM, "w": W_SYM, "t": T_SYM}


@pytest.fixture(scope="session")
def reference():
    """Reference values transcribed from the reference tables and matrices."""
    return json.loads((DATA / "reference.json").read_text())


def expr(text: str):
    return sympy.sympify(text, locals=SYMBOLS)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE_LINES: list[str] = []


def report(number: int, title: str, ok: bool, detail: str) -> None:
    """Record and print one acceptance line."""
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)

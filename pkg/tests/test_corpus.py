"""Every case in the corpus manifest reproduces its golden tokens."""
import shlex
import subprocess
import sys

import pytest
from conftest import CORPUS

ERROR_TOKENS = {"BUDGET", "UNSUPPORTED", "ALGEBRAIC_LOOP", "NOT_CAUSAL", "IO_ERROR"}


def _cases():
    for line in (CORPUS / "cases.txt").read_text().splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            name, args = (s.strip() for s in line.split("|", 1))
            yield pytest.param(name, shlex.split(args), id=name)


def _expected_exit(tokens):
    first = tokens[0] if tokens else ""
    if first in {"INVALID", "DIFFERENT"}:
        return 1
    if first in ERROR_TOKENS:
        return 2
    return 0


@pytest.mark.parametrize("name, args", list(_cases()))
def test_golden(name, args):
    golden = (CORPUS / f"{name}.golden").read_text().split()
    proc = subprocess.run([sys.executable, "-m", "streamlogic", *args], cwd=CORPUS,
                          capture_output=True, text=True, timeout=120)
    assert proc.stdout.split() == golden, proc.stderr
    assert proc.returncode == _expected_exit(golden)


def test_every_golden_has_a_case():
    names = {p.values[0] for p in _cases()}
    goldens = {p.stem for p in CORPUS.glob("*.golden")}
    assert goldens == names

import os
import random
import subprocess
import sys

import pytest

from qinstanton import _kernels_py, kernels
from qinstanton.ncengine import MAX_PASSES
from qinstanton.qalgebras import AlgebraId, build
from qinstanton.scalar import ONE, PMode

try:
    from qinstanton import _kernels as _kernels_c
except ImportError:  # pragma: no cover - extension not built
    _kernels_c = None

needs_c = pytest.mark.skipif(_kernels_c is None, reason="compiled kernels not built")


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")


@needs_c
@pytest.mark.parametrize("aid,mode", [(AlgebraId.SL2q_ext, None), (AlgebraId.Fpq, PMode.P_EQ_Q),
                                      (AlgebraId.Mpq, PMode.P_EQ_QINV)])
def test_reduce_agrees(aid, mode):
    P = build(aid, mode)
    rng = random.Random(1)
    gens = [P.index[n] for n in P.base_generators]
    for _ in range(40):
        terms = {tuple(rng.choice(gens) for _ in range(rng.randint(1, 5))): ONE for _ in range(3)}
        a = _kernels_py.reduce_terms(dict(terms), P._rules, P._lengths, MAX_PASSES)
        b = _kernels_c.reduce_terms(dict(terms), P._rules, P._lengths, MAX_PASSES)
        assert a == b
        assert _kernels_py.multiply_terms(terms, a) == _kernels_c.multiply_terms(terms, a)


@needs_c
def test_irreducible_words_agree():
    P = build(AlgebraId.Mpq, PMode.P_EQ_Q)
    alphabet = tuple(range(len(P.names)))
    assert _kernels_py.irreducible_words(alphabet, P._rules, P._lengths, 4) == \
        _kernels_c.irreducible_words(alphabet, P._rules, P._lengths, 4)


def test_forced_python_backend():
    env = dict(os.environ, QINSTANTON_BACKEND="python")
    out = subprocess.run([sys.executable, "-c", "from qinstanton import BACKEND; print(BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_python_backend_suite():
    env = dict(os.environ, QINSTANTON_BACKEND="python")
    out = subprocess.run([sys.executable, "-m", "qinstanton.cli", "verify", "--suite", "rmatrix",
                          "--quiet"], env=env, capture_output=True, text=True)
    assert out.returncode == 0

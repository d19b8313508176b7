import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from whitham_kdv import BACKEND, _pykernels

_ckernels = pytest.importorskip("whitham_kdv._ckernels", reason="compiled extension not built")


def test_compiled_backend_selected():
    assert BACKEND == "cython"


def test_pure_backend_by_environment():
    env = dict(os.environ, WHITHAM_KDV_PURE="1")
    out = subprocess.run([sys.executable, "-c", "import whitham_kdv; print(whitham_kdv.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@given(st.floats(0.0, 1.0 - 1e-12))
@settings(max_examples=100, deadline=None)
def test_elliptic_kernels_agree(m):
    assert np.allclose(_ckernels.agm_ke(m), _pykernels.agm_ke(m), rtol=1e-15, atol=0)
    assert _ckernels.ellipk(m) == pytest.approx(_pykernels.ellipk(m), rel=1e-15)
    if m > 0:
        assert _ckernels.ellipkc(m) == pytest.approx(_pykernels.ellipkc(m), rel=1e-15)


@given(st.floats(0.0, 0.999))
@settings(max_examples=30, deadline=None)
def test_cn_kernels_agree(m):
    z = np.linspace(-30, 30, 257)
    K = _pykernels.ellipk(m)
    assert np.allclose(_ckernels.cn_array(z, m, K), _pykernels.cn_array(z, m, K), atol=1e-14, rtol=0)


@given(st.floats(0.05, 3.0), st.integers(2, 12))
@settings(max_examples=30, deadline=None)
def test_theta_kernels_agree(imtau, nterms):
    z = np.linspace(-2, 2, 101)
    for a, b in zip(_ckernels.theta3_derivs(z, imtau, nterms), _pykernels.theta3_derivs(z, imtau, nterms)):
        assert np.allclose(a, b, rtol=1e-13, atol=1e-13)

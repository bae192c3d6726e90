"""The jitted kernels must give the same numbers without numba."""
import subprocess
import sys
import textwrap

import numpy as np

from hidden_ou._kernels import HAS_NUMBA, h2_objective_scalar


def test_fallback_matches_jitted_kernel():
    rng = np.random.default_rng(0)
    dy = rng.normal(0.0, 1e-3, 400)
    args = dict(decay=0.985, gain=13.4, c=1.0, sigma_inv=2500.0, h=1e-3,
                m0=0.3, burn_in=5)
    here = h2_objective_scalar(dy, args["decay"], args["gain"], args["c"],
                               args["sigma_inv"], args["h"], args["m0"],
                               args["burn_in"])
    code = textwrap.dedent("""
        import sys
        sys.modules["numba"] = None  # force the ImportError fallback
        import numpy as np
        from hidden_ou import _kernels
        assert not _kernels.HAS_NUMBA
        rng = np.random.default_rng(0)
        dy = rng.normal(0.0, 1e-3, 400)
        val = _kernels.h2_objective_scalar(dy, 0.985, 13.4, 1.0, 2500.0, 1e-3, 0.3, 5)
        print(repr(float(val)))
    """)
    out = subprocess.run([sys.executable, "-c", code], capture_output=True,
                         text=True, check=True)
    fallback = float(out.stdout.strip())
    assert fallback == float(here)
    assert HAS_NUMBA  # the test environment itself runs the jitted path

"""Numba fast path vs pure-numpy fallback equivalence.

Both implementations are importable regardless of the SOCO_DISABLE_NUMBA
flag, so their outputs can be compared directly in-process; a subprocess
test additionally verifies the environment flag switches the dispatch.
"""

import os
import subprocess
import sys

import numpy as np

from soco import _kernels


def _group_data(rng, d=6):
    groups = [np.array([0, 1, 2]), np.array([2, 3]), np.array([3, 4, 5])]
    group_idx = np.concatenate(groups)
    group_start = np.cumsum([0] + [len(g) for g in groups]).astype(np.int64)
    counts = np.zeros(d)
    np.add.at(counts, group_idx, 1.0)
    r = rng.normal(size=d)
    lo = np.full(d, -5.0)
    hi = np.full(d, 5.0)
    return r, lo, hi, group_start, group_idx, counts


def test_admm_paths_agree(rng):
    for _ in range(5):
        r, lo, hi, gs, gi, cnt = _group_data(rng)
        args = (r, 1.7, 0.9, lo, hi, gs, gi, cnt, 1.0, 1e-10, 100_000)
        x_py, it_py, p_py, d_py = _kernels._admm_group_prox_py(*args)
        x_loop, it_loop, p_loop, d_loop = _kernels._admm_group_prox_loop(*args)
        assert np.allclose(x_py, x_loop, atol=1e-12)
        assert it_py == it_loop
        x_disp, *_ = _kernels.admm_group_prox_kernel(r, 1.7, 0.9, lo, hi,
                                                     gs, gi, cnt)
        assert np.allclose(x_py, x_disp, atol=1e-12)


def test_rhapd_s_sweep_paths_agree(rng):
    n, d = 7, 3
    x_prev = rng.normal(size=(n, d))
    grads = rng.normal(size=(n, d))
    x0 = rng.normal(size=d)
    lo = np.full(d, -2.0)
    hi = np.full(d, 2.0)
    ref = _kernels._rhapd_s_sweep_py(x_prev, x0, grads, lo, hi, 1.3, 0.4)
    got = _kernels.rhapd_s_sweep(x_prev, x0, grads, lo, hi, 1.3, 0.4)
    assert np.array_equal(ref, got)


def test_tracking_am_paths_agree(rng):
    n, d = 9, 2
    u = rng.normal(size=(n, d))
    x0 = rng.normal(size=d)
    lo = np.full(d, -4.0)
    hi = np.full(d, 4.0)
    init = rng.normal(size=(n, d))
    ref = _kernels._tracking_am_solve_py(u, x0, lo, hi, 2.0, init.copy(),
                                         1e-12, 100_000)
    got = _kernels.tracking_am_solve(u, x0, lo, hi, 2.0, init, 1e-12, 100_000)
    assert np.array_equal(ref[0], got[0])
    assert ref[1] == got[1] and ref[2] == got[2] and ref[3] == got[3]


def test_env_flag_selects_fallback():
    code = ("import soco._kernels as k; "
            "print(k.USE_NUMBA)")
    env = dict(os.environ, SOCO_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "False"


def test_fallback_run_matches_numba_run(rng, tmp_path):
    """Full algorithm run under the fallback equals the in-process result."""
    script = tmp_path / "run_fallback.py"
    script.write_text(
        "import numpy as np\n"
        "from soco.experiments import build_instance, get_spec\n"
        "from soco.algorithms import rhapd_s\n"
        "inst = build_instance(get_spec('E4'), 3, W=4)\n"
        "print(repr(float(rhapd_s(inst).objective)))\n")
    env = dict(os.environ, SOCO_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, str(script)], env=env,
                         capture_output=True, text=True, check=True)
    from soco.algorithms import rhapd_s
    from soco.experiments import build_instance, get_spec
    inst = build_instance(get_spec("E4"), 3, W=4)
    assert float(out.stdout.strip()) == float(rhapd_s(inst).objective)

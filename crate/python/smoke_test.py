"""Smoke test for the Python bindings.

Build and install first:
    pip install -e crates/python --no-build-isolation
then run:
    python python/smoke_test.py
"""

import math

import numpy as np

import hyperwave_py as hw


def main():
    n = 128
    g = np.array(hw.synth("planewave:f0=0.08,angle=30", n, n))
    assert g.shape == (n, n)
    assert abs(g[0, 0] - 1.0) < 1e-12

    r, i, j, k = (np.array(p) for p in hw.monogenic(g.tolist()))
    assert np.abs(k).max() == 0.0
    amp = np.sqrt(r**2 + i**2 + j**2)
    inner = amp[24:-24, 24:-24]
    assert abs(np.median(inner) - 1.0) < 0.02, np.median(inner)

    scales = [2.0 * 2 ** (v / 12) for v in range(int(12 * math.log2(n / 12)) + 1)]
    pts = hw.ridges(g.tolist(), scales, [0.0])
    inner_pts = [p for p in pts if 24 <= p["b1"] < n - 24 and 24 <= p["b2"] < n - 24]
    nu = np.degrees(np.array([p["orientation"] for p in inner_pts]))
    freq = np.array([p["freq"] for p in inner_pts])
    assert abs(np.median(nu) - 30.0) < 1.0, np.median(nu)
    assert abs(np.median(freq) / 0.08 - 1.0) < 0.03, np.median(freq)

    slabs = hw.transform(g.tolist(), [4.0, 8.0], [0.0, 45.0], kind="separable-hypercomplexing")
    assert len(slabs) == 4 and len(slabs[0][2]) == 4

    noise = hw.synth("bandnoise:fmin=0.05,fmax=0.35,seed=7", 64, 64)
    passed, worst = hw.verify(noise)
    assert passed and worst < 1e-9, worst

    try:
        hw.transform(g.tolist(), [4.0], [0.0], kind="no-such-kind")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown kind accepted")

    print("python smoke test passed")


if __name__ == "__main__":
    main()

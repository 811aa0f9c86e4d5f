"""The compiled kernel and the numpy fallback must agree bit-for-bit up to
floating reassociation slack on every opcode path."""

import numpy as np
import pytest

from hopial import funcspace as fs
from hopial._kernel import backends

pytestmark = pytest.mark.skipif(
    "compiled" not in backends(), reason="compiled kernel not built"
)

UNIT = fs.Interval(0.0, 1.0)

SPECS = [
    fs.Constant(2.5),
    fs.PowerLaw(1.5, -0.49),
    fs.PowerLaw(2.0, 3.0),  # integer fast path
    fs.ShiftedPowerLaw(1.0, 2.0),
    fs.Exponential(0.7, -1.3),
    fs.PiecewiseLinear([(0, 0.0), (0.21, 1.7), (0.7, 0.2), (1, 1.0)]),
    fs.Step([0.0, 0.3, 0.55, 1.0], [2.0, -1.0, 0.5]),
    fs.PiecewisePolynomial([0.0, 0.4, 1.0], [(0.1, 1.0, -0.5), (0.3, 0.0, 0.25, 1.0)]),
    fs.Sum([fs.Constant(1.0), fs.PowerLaw(1.0, 1.0), fs.Exponential(0.5, 0.5)]),
    fs.Product([fs.PiecewiseLinear([(0, 1), (0.5, 2), (1, 1)]), fs.Constant(0.5)]),
    fs.Power(fs.Sum([fs.Constant(1.0), fs.PowerLaw(-0.9, 1.0)]), -1.5),
    fs.Power(fs.Sum([fs.Constant(2.0), fs.PowerLaw(-1.0, 1.0)]), 3.0),
    fs.AbsVal(fs.Step([0.0, 0.5, 1.0], [1.0, -2.0])),
]


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: type(s).__name__)
def test_eval_program_agreement(spec):
    prog = fs.compile_program(spec, UNIT)
    rng = np.random.default_rng(11)
    xs = np.concatenate([rng.uniform(0, 1, 400), np.linspace(0, 1, 37)])
    outs = {}
    for name, impl in backends().items():
        outs[name] = impl.eval_program(
            prog.ops, prog.fargs, prog.iargs, prog.data, xs, prog.stack_depth
        )
    finite = np.isfinite(outs["pure"])
    assert np.array_equal(finite, np.isfinite(outs["compiled"]))
    scale = np.maximum(np.abs(outs["pure"][finite]), 1.0)
    np.testing.assert_allclose(outs["pure"][finite] / scale,
                               outs["compiled"][finite] / scale,
                               rtol=0, atol=5e-13)


def test_singular_inf_marker_agrees():
    prog = fs.compile_program(fs.PowerLaw(1.0, -0.5), UNIT)
    xs = np.array([0.0, 0.25, 1.0])
    for impl in backends().values():
        out = impl.eval_program(prog.ops, prog.fargs, prog.iargs, prog.data,
                                xs, prog.stack_depth)
        assert np.isposinf(out[0])
        assert out[1] == 2.0


def test_shoot_agreement():
    n = 512
    grid = np.linspace(0.0, 1.0, 2 * n + 1)
    r_half = 1.0 + 0.5 * np.sin(3.0 * grid) ** 2
    m_half = 1.0 + grid
    for lam in (1.0, 9.0, 25.0):
        for p in (1.0, 2.0):
            res = {
                name: impl.shoot_quasilinear(r_half, m_half, lam, 1.0 / n, p)
                for name, impl in backends().items()
            }
            u_p, w_p, c_p = res["pure"]
            u_c, w_c, c_c = res["compiled"]
            assert c_p == c_c
            assert u_p == pytest.approx(u_c, rel=1e-12, abs=1e-12)
            assert w_p == pytest.approx(w_c, rel=1e-12, abs=1e-12)

import pytest

from hopial import funcspace as fs


@pytest.fixture
def unit() -> fs.Interval:
    return fs.Interval(0.0, 1.0)


@pytest.fixture
def one() -> fs.Constant:
    return fs.Constant(1.0)

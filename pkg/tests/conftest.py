"""
测试公共夹具
a = 1, E = 3 的曲线与 BA 上下文每个会话只构造一次
"""

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from baker import build_context, time_scale
from curve import COMPACT, NONCOMPACT, build_curve
from dynamics import RotatorState

A = 1.0
ENERGY = 3.0


@pytest.fixture(scope="session")
def compact_curve():
    return build_curve(A, ENERGY, COMPACT)


@pytest.fixture(scope="session")
def noncompact_curve():
    return build_curve(A, ENERGY, NONCOMPACT)


@pytest.fixture(scope="session")
def compact_state():
    return RotatorState.from_energy(COMPACT, A, ENERGY, 0.0)


@pytest.fixture(scope="session")
def noncompact_state():
    return RotatorState.from_energy(NONCOMPACT, A, ENERGY, 0.0)


@pytest.fixture(scope="session")
def compact_ctx(compact_curve, compact_state):
    return build_context(compact_curve, compact_state)


@pytest.fixture(scope="session")
def noncompact_ctx(noncompact_curve, noncompact_state):
    return build_context(noncompact_curve, noncompact_state)


@pytest.fixture(scope="session")
def period(compact_ctx):
    return time_scale(compact_ctx)


@pytest.fixture(scope="session")
def blowup_time(noncompact_ctx):
    return time_scale(noncompact_ctx)

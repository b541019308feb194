from __future__ import annotations

from fractions import Fraction as F

import pytest

from wallcross import PipelineConfig, ScatteringPolynomial, run_pipeline
from wallcross.algebra import CurveClass
from wallcross.pipeline import build_structure
from wallcross.presets import dp4


def mono(z=(0, 0), t: str = "0", coeff: int = 1, qhalf: int = 0) -> ScatteringPolynomial:
    """``coeff q^(qhalf/2) t^t z^z`` with ``t`` in additive notation."""
    return ScatteringPolynomial.monomial(z, CurveClass.parse(t), coeff=coeff, qhalf=qhalf)


def poly(*terms) -> ScatteringPolynomial:
    out = ScatteringPolynomial.zero()
    for term in terms:
        out = out + mono(*term)
    return out


PRESET_P = (F(-4), F(-19, 10))


@pytest.fixture(scope="session")
def model():
    return dp4()


@pytest.fixture(scope="session")
def structures(model):
    """``(perturbed, completed)`` for the preset."""
    return build_structure(model, 20)


@pytest.fixture(scope="session")
def completed(structures):
    return structures[1]


@pytest.fixture(scope="session")
def result():
    return run_pipeline(PipelineConfig())


@pytest.fixture(scope="session")
def thetas(result):
    return result.thetas


@pytest.fixture(scope="session")
def qthetas(result):
    return result.qthetas

import sys
from fractions import Fraction
from pathlib import Path

import pytest

# Same path setup as build.py: make 'app' importable from src/
SRC = Path(__file__).resolve().parent.parent / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

from app.services import uqsl2 as uq  # noqa: E402
from app.services.builders import (  # noqa: E402
    diagonal,
    group_standard_form,
    group_twist,
    matrix_frobenius,
    s3,
    s3_special_inverse_twist,
)
from app.services.frobenius import twist  # noqa: E402
from app.services.scalars import FieldSpec  # noqa: E402


@pytest.fixture(scope="session")
def Q():
    return FieldSpec.rational()


@pytest.fixture(scope="session")
def Q3():
    return FieldSpec.cyclotomic(3)


@pytest.fixture(scope="session")
def m2_diag():
    """M_2 with eps = Tr(diag(1, 2) .)."""
    return matrix_frobenius(2, diagonal([1, 2]))


@pytest.fixture(scope="session")
def S3():
    return s3()


@pytest.fixture(scope="session")
def s3_base(S3):
    return group_standard_form(S3)


@pytest.fixture(scope="session")
def s3_special(S3, s3_base):
    """Asymmetric special twist: u^-1 = e/6 + (rs - sr)/6."""
    family = s3_special_inverse_twist(s3_base.algebra, Fraction(1, 6), 0, 0)
    return group_twist(S3, family.predicted, s3_base)


@pytest.fixture(scope="session")
def n2_generic():
    p = uq.N2Parameters.of(2, 1, 1, 1, 1, 1, 1, 1)
    return twist(uq.uqsl2_integral_form(2), uq.n2_element(p))


@pytest.fixture(scope="session")
def uq3_integral():
    return uq.uqsl2_integral_form(3)

import numpy as np
import pytest
from hypothesis import strategies as st

from pavelab import DenseMatrix

finite_floats = st.floats(
    min_value=-10.0, max_value=10.0, allow_nan=False, allow_infinity=False
)


@st.composite
def square_matrices(draw, min_n=1, max_n=6):
    n = draw(st.integers(min_n, max_n))
    entries = draw(
        st.lists(finite_floats, min_size=n * n, max_size=n * n)
    )
    return DenseMatrix(np.array(entries).reshape(n, n))


@pytest.fixture
def rng():
    return np.random.default_rng(20240)

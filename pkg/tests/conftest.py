import numpy as np
import pytest

from pathsig import GroupElement, TensorShape, TruncatedTensor, tensor_exp


def random_tensor(shape: TensorShape, rng, scale=1.0) -> TruncatedTensor:
    return TruncatedTensor(
        shape, [scale * rng.uniform(-1, 1, shape.level_size(k)) for k in range(shape.N + 1)]
    )


def random_group_element(shape: TensorShape, rng, scale=1.0) -> GroupElement:
    levels = [scale * rng.uniform(-1, 1, shape.level_size(k)) for k in range(shape.N + 1)]
    levels[0][0] = 0.0
    return tensor_exp(TruncatedTensor(shape, levels))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)

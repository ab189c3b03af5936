import numpy as np
import pytest

from wktprobe.errors import EmptyInputError
from wktprobe.metrics import (
    mape_excluded_count,
    metric_accuracy,
    metric_mape,
    metric_precision_at_k,
    metric_rmse,
)


def test_perfect_predictions():
    assert metric_accuracy(["a", "b"], ["a", "b"]) == 100.0
    assert metric_mape([1.0, 2.0], [1.0, 2.0]) == 0.0
    assert metric_rmse([1.0, 2.0], [1.0, 2.0]) == 0.0


def test_accuracy_hand_value():
    assert metric_accuracy([0, 1, 1, 0], [0, 1, 0, 0]) == 75.0


def test_mape_hand_value():
    assert metric_mape([110.0], [100.0]) == pytest.approx(10.0, abs=1e-12)


def test_mape_excludes_zero_targets():
    # Only the nonzero target contributes: |5-10|/10 = 50%.
    assert metric_mape([3.0, 5.0], [0.0, 10.0]) == pytest.approx(50.0)
    assert mape_excluded_count([0.0, 10.0]) == 1


def test_mape_all_zero_targets_errors():
    with pytest.raises(EmptyInputError):
        metric_mape([1.0], [0.0])


def test_rmse_hand_value():
    # errors: 3, 4 -> sqrt((9+16)/2) = 2.5 * sqrt(2)
    assert metric_rmse([3.0, 4.0], [0.0, 0.0]) == pytest.approx(
        np.sqrt(12.5), abs=1e-12
    )


def test_rmse_flattens_multidim():
    preds = np.array([[0.01, 0.0], [0.01, 0.0]])
    targets = np.zeros((2, 2))
    assert metric_rmse(preds, targets) == pytest.approx(0.01 / np.sqrt(2), abs=1e-15)


def test_precision_at_k_hand_count():
    assert metric_precision_at_k(["a", "b", "c", "d", "e"], {"a", "c"}, 5) == 0.4


def test_precision_at_k_validation():
    with pytest.raises(EmptyInputError):
        metric_precision_at_k(["a"], {"a"}, 2)
    with pytest.raises(EmptyInputError):
        metric_precision_at_k(["a"], {"a"}, 0)


def test_empty_inputs_error():
    with pytest.raises(EmptyInputError):
        metric_accuracy([], [])
    with pytest.raises(EmptyInputError):
        metric_rmse([], [])
    with pytest.raises(EmptyInputError):
        metric_accuracy([1], [1, 2])

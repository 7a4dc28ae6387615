import numpy as np


STEP = 1e-5


def numeric_grad(f, x: np.ndarray) -> np.ndarray:
    """Central differences of scalar f() with respect to x, perturbed in place"""
    grad = np.zeros_like(x)
    for idx in np.ndindex(x.shape):
        saved = x[idx]
        x[idx] = saved + STEP
        plus = f()
        x[idx] = saved - STEP
        minus = f()
        x[idx] = saved
        grad[idx] = (plus - minus) / (2 * STEP)
    return grad


def assert_grad_close(test, analytic, numeric):
    tolerance = 1e-4 * np.maximum(np.abs(analytic), np.abs(numeric)) + 1e-7
    test.assertTrue(np.all(np.abs(analytic - numeric) <= tolerance),
                    f'analytic {analytic} vs numeric {numeric}')


def random_probabilities(rng, pixels, classes, low=0.05, high=0.95):
    return rng.uniform(low, high, size=(pixels, classes))

import numba as nb
import numpy as np


@nb.njit(cache=True)
def fuzzy_and_norm(a, b):
    ret = 0.0
    for i in range(a.shape[0]):
        ret += min(a[i], b[i])
    return ret


@nb.njit(cache=True)
def city_block_norm(a):
    ret = 0.0
    for i in range(a.shape[0]):
        ret += abs(a[i])
    return ret


@nb.njit(cache=True)
def activations(coded, weights, alpha):
    ret = np.zeros(weights.shape[0], dtype=np.float64)
    for j in range(weights.shape[0]):
        ret[j] = fuzzy_and_norm(coded, weights[j]) / (alpha + city_block_norm(weights[j]))
    return ret


@nb.njit(cache=True)
def learning_law(weight, coded, beta):
    ret = np.zeros_like(weight)
    for i in range(weight.shape[0]):
        ret[i] = beta * min(coded[i], weight[i]) + (1 - beta) * weight[i]
        # guards against w_new > w_old by rounding of the blend
        if ret[i] > weight[i]:
            ret[i] = weight[i]
    return ret


@nb.njit(cache=True)
def max_abs_difference(a, b):
    ret = 0.0
    for i in range(a.shape[0]):
        ret = max(ret, abs(a[i] - b[i]))
    return ret

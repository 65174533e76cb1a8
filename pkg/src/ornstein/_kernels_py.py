"""Pure numpy implementation of the structured-product kernels."""

import numpy as np

TWO_PI_OVER_2_64 = 2.0 * np.pi / 2.0**64


def product_form_dyadic(c1, c2, w, sine, u1, u2, out):
    acc = np.zeros(u1.shape[0])
    prod = np.ones(u1.shape[0])
    with np.errstate(over="ignore"):
        for k in range(c1.shape[0]):
            ph = c1[k] * u1 + c2[k] * u2  # uint64, wraps mod 2^64
            theta = ph.view(np.int64).astype(np.float64) * TWO_PI_OVER_2_64
            c = np.cos(theta)
            if w[k] != 0.0:
                acc += w[k] * (np.sin(theta) if sine else c) * prod
            prod *= 1.0 + c
    out[:] = acc


def product_form_grid(ca, sa, cb, sb, w, sine, out):
    acc = np.zeros(out.shape)
    prod = np.ones(out.shape)
    for k in range(ca.shape[0]):
        c = np.multiply.outer(ca[k], cb[k]) - np.multiply.outer(sa[k], sb[k])
        if w[k] != 0.0:
            if sine:
                s = np.multiply.outer(sa[k], cb[k]) + np.multiply.outer(ca[k], sb[k])
                acc += w[k] * s * prod
            else:
                acc += w[k] * c * prod
        prod *= 1.0 + c
    out[:] = acc

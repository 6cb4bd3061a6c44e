# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled sliding-window engine.

The accumulation order (left to right over the window, delay rows before the
two statistics passes) is part of the contract: the pure-Python fallback in
_core_py.py follows the same order and the build disables FP contraction, so
both backends produce bit-identical float64 results.
"""

from libc.math cimport sqrt


def eval_windows_raw(
    double[:, ::1] weights,
    double[::1] signal,
    double[:, ::1] out_vnu,
    double[::1] out_sigma,
    double[::1] out_rms,
):
    """Fill v_nu, window sigma and window rms for every full window position.

    Returns the number of positions written: len(signal) - window + 1.
    """
    cdef Py_ssize_t nv = weights.shape[0]
    cdef Py_ssize_t window = weights.shape[1]
    cdef Py_ssize_t npos = signal.shape[0] - window + 1
    cdef Py_ssize_t k, v, i
    cdef double acc, acc0, acc1, ssum, ssq, mean, dev, var, x
    if npos < 0:
        npos = 0
    with nogil:
        for k in range(npos):
            ssum = 0.0
            ssq = 0.0
            if nv == 2:
                # common case: interleave the four independent accumulator
                # chains in one window pass (each chain keeps its own
                # left-to-right order, so results are unchanged bitwise)
                acc0 = 0.0
                acc1 = 0.0
                for i in range(window):
                    x = signal[k + i]
                    acc0 = acc0 + weights[0, i] * x
                    acc1 = acc1 + weights[1, i] * x
                    ssum = ssum + x
                    ssq = ssq + x * x
                out_vnu[0, k] = acc0
                out_vnu[1, k] = acc1
            else:
                for v in range(nv):
                    acc = 0.0
                    for i in range(window):
                        acc = acc + weights[v, i] * signal[k + i]
                    out_vnu[v, k] = acc
                for i in range(window):
                    x = signal[k + i]
                    ssum = ssum + x
                    ssq = ssq + x * x
            mean = ssum / window
            var = 0.0
            for i in range(window):
                dev = signal[k + i] - mean
                var = var + dev * dev
            out_sigma[k] = sqrt(var / window)
            out_rms[k] = sqrt(ssq / window)
    return npos

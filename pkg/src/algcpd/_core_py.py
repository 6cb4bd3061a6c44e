"""Pure-Python sliding-window engine, import-time fallback for the compiled
core. Must match _core.pyx bit for bit: same accumulation order, plain float
multiply-add (Python has no FMA), math.sqrt for both statistics."""

from __future__ import annotations

import math


def eval_windows_raw(weights, signal, out_vnu, out_sigma, out_rms):
    nv = weights.shape[0]
    window = weights.shape[1]
    npos = signal.shape[0] - window + 1
    if npos < 0:
        npos = 0
    wrows = [list(map(float, weights[v])) for v in range(nv)]
    sig = list(map(float, signal))
    for k in range(npos):
        for v in range(nv):
            acc = 0.0
            row = wrows[v]
            for i in range(window):
                acc = acc + row[i] * sig[k + i]
            out_vnu[v, k] = acc
        ssum = 0.0
        ssq = 0.0
        for i in range(window):
            x = sig[k + i]
            ssum = ssum + x
            ssq = ssq + x * x
        mean = ssum / window
        var = 0.0
        for i in range(window):
            dev = sig[k + i] - mean
            var = var + dev * dev
        out_sigma[k] = math.sqrt(var / window)
        out_rms[k] = math.sqrt(ssq / window)
    return npos

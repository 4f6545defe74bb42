"""Jitted inner loops over the flat arrays of an EnergyModel.

Both kernels keep a per-clause count of true literals and update it through the
variable occurrence lists, so one flip touches only the clauses that contain
the flipped variable.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def true_counts(x, lit_var, lit_neg):
    n = lit_var.shape[0]
    tc = np.zeros(n, np.int64)
    for c in range(n):
        for s in range(3):
            if x[lit_var[c, s]] != lit_neg[c, s]:
                tc[c] += 1
    return tc


@njit(cache=True, nogil=True)
def flip_delta_counts(v, x, tc, lit_neg, occ_ptr, occ_clause, occ_slot, levels):
    d = 0.0
    for q in range(occ_ptr[v], occ_ptr[v + 1]):
        c = occ_clause[q]
        k = tc[c]
        if x[v] != lit_neg[c, occ_slot[q]]:
            d += levels[k - 1] - levels[k]
        else:
            d += levels[k + 1] - levels[k]
    return d


@njit(cache=True, nogil=True)
def _apply_flip(v, x, tc, lit_neg, occ_ptr, occ_clause, occ_slot, hist):
    for q in range(occ_ptr[v], occ_ptr[v + 1]):
        c = occ_clause[q]
        k = tc[c]
        if x[v] != lit_neg[c, occ_slot[q]]:
            tc[c] = k - 1
        else:
            tc[c] = k + 1
        hist[k] -= 1
        hist[tc[c]] += 1
    x[v] ^= 1


@njit(cache=True, nogil=True)
def gray_walk(prefix, m_low, m, lit_var, lit_neg, occ_ptr, occ_clause, occ_slot,
              levels, out):
    """Energies of the subcube whose high ``m - m_low`` bits equal ``prefix``.

    ``out[low]`` receives the energy of assignment ``(prefix << m_low) | low``
    (bit i = variable i + 1). States are visited in reflected Gray order.
    """
    x = np.zeros(m, np.int8)
    for j in range(m - m_low):
        x[m_low + j] = (prefix >> j) & 1
    tc = true_counts(x, lit_var, lit_neg)
    hist = np.zeros(4, np.int64)
    for c in range(tc.shape[0]):
        hist[tc[c]] += 1
    out[0] = (hist[0] * levels[0] + hist[1] * levels[1]
              + hist[2] * levels[2] + hist[3] * levels[3])
    g = 0
    for i in range(1, 1 << m_low):
        v = 0
        while not (i >> v) & 1:
            v += 1
        _apply_flip(v, x, tc, lit_neg, occ_ptr, occ_clause, occ_slot, hist)
        g ^= 1 << v
        out[g] = (hist[0] * levels[0] + hist[1] * levels[1]
                  + hist[2] * levels[2] + hist[3] * levels[3])


@njit(cache=True, nogil=True)
def metropolis_accept(d, T, u):
    """Downhill and flat moves always pass; uphill with probability exp(-d/T)."""
    if d <= 0.0:
        return True
    if T <= 0.0:
        return False
    return u < math.exp(-d / T)


# indices into the integer state vector of metropolis_block
STEP, ACCEPTS, REJECTS, UP_PROPOSED, UP_ACCEPTED, NTRACE, DONE, HIT = range(8)


@njit(cache=True, nogil=True)
def metropolis_block(props, unif, max_steps, x, tc, best_x, fstate, istate,
                     lit_neg, occ_ptr, occ_clause, occ_slot, levels,
                     T0, ratio, stage, target, record_every, trace_step, trace_e):
    """Advance a run by up to ``len(props)`` steps.

    ``fstate`` = [energy, best_energy]; ``istate`` is indexed by the module
    constants above. ``HIT`` holds the step at which the target was reached
    (-1 if not yet). Trace samples are appended to ``trace_step/trace_e``
    starting at ``istate[NTRACE]``.
    """
    energy = fstate[0]
    best = fstate[1]
    for i in range(props.shape[0]):
        t = istate[STEP]
        if t >= max_steps:
            istate[DONE] = 1
            break
        T = T0 * ratio ** (t // stage)
        v = props[i]
        d = flip_delta_counts(v, x, tc, lit_neg, occ_ptr, occ_clause, occ_slot, levels)
        if d > 0.0:
            istate[UP_PROPOSED] += 1
        if metropolis_accept(d, T, unif[i]):
            for q in range(occ_ptr[v], occ_ptr[v + 1]):
                c = occ_clause[q]
                if x[v] != lit_neg[c, occ_slot[q]]:
                    tc[c] -= 1
                else:
                    tc[c] += 1
            x[v] ^= 1
            energy += d
            istate[ACCEPTS] += 1
            if d > 0.0:
                istate[UP_ACCEPTED] += 1
            if energy < best:
                best = energy
                best_x[:] = x
        else:
            istate[REJECTS] += 1
        t += 1
        istate[STEP] = t
        hit = energy <= target
        if t % record_every == 0 or hit or t == max_steps:
            k = istate[NTRACE]
            trace_step[k] = t
            trace_e[k] = energy
            istate[NTRACE] = k + 1
        if hit:
            istate[HIT] = t
            istate[DONE] = 1
            break
        if t >= max_steps:
            istate[DONE] = 1
            break
    fstate[0] = energy
    fstate[1] = best

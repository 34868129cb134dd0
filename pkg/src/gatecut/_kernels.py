"""Statevector update kernels.

Two interchangeable backends operate on a flat complex128 amplitude array of
length ``2**n`` (qubit ``q`` = bit ``q`` of the index):

* ``numba``: ``@njit`` loops over amplitude strides (default when numba
  imports cleanly),
* ``numpy``: reshape/fancy-index implementations of the same updates.

Select with ``GATECUT_KERNEL=numpy`` or ``GATECUT_KERNEL=numba``; anything
else (or unset) autodetects. ``benchmarks/kernel_bench.py`` compares the two.
All kernels mutate ``state`` in place.
"""

from __future__ import annotations

import os

import numpy as np

_CHOICE = os.environ.get("GATECUT_KERNEL", "auto").lower()

if _CHOICE in ("auto", "numba"):
    try:
        from numba import njit

        _HAVE_NUMBA = True
    except ImportError:
        if _CHOICE == "numba":
            raise
        _HAVE_NUMBA = False
else:
    _HAVE_NUMBA = False

USE_NUMBA = _HAVE_NUMBA and _CHOICE in ("auto", "numba")


# ---------------------------------------------------------------- numpy path

def _np_apply_1q(state, q, m00, m01, m10, m11):
    view = state.reshape(-1, 2, 1 << q)
    a = view[:, 0, :].copy()
    b = view[:, 1, :]
    view[:, 0, :] = m00 * a + m01 * b
    view[:, 1, :] = m10 * a + m11 * b


def _np_apply_cx(state, control, target):
    idx = np.arange(state.size)
    sel = (((idx >> control) & 1) == 1) & (((idx >> target) & 1) == 0)
    src = idx[sel]
    dst = src | (1 << target)
    tmp = state[src].copy()
    state[src] = state[dst]
    state[dst] = tmp


def _np_apply_cz(state, a, b):
    idx = np.arange(state.size)
    both = ((idx >> a) & 1 & ((idx >> b) & 1)) == 1
    state[both] *= -1.0


def _np_apply_rzz(state, a, b, theta):
    idx = np.arange(state.size)
    parity = ((idx >> a) & 1) ^ ((idx >> b) & 1)
    half = theta / 2.0
    state[parity == 0] *= np.exp(-1j * half)
    state[parity == 1] *= np.exp(1j * half)


def _np_apply_swap(state, a, b):
    idx = np.arange(state.size)
    sel = (((idx >> a) & 1) == 1) & (((idx >> b) & 1) == 0)
    src = idx[sel]
    dst = src ^ ((1 << a) | (1 << b))
    tmp = state[src].copy()
    state[src] = state[dst]
    state[dst] = tmp


def _np_project_z(state, q, keep_bit):
    view = state.reshape(-1, 2, 1 << q)
    view[:, 1 - keep_bit, :] = 0.0


def _np_expect_z_mask(state, mask):
    idx = np.arange(state.size)
    bits = idx & mask
    parity = np.zeros(state.size, dtype=np.int64)
    while mask:
        parity ^= bits & 1
        bits >>= 1
        mask >>= 1
    sign = 1.0 - 2.0 * parity
    return float(np.real(np.sum(sign * (state.real**2 + state.imag**2))))


# ---------------------------------------------------------------- numba path

if USE_NUMBA:
    _OPTS = dict(cache=True, nogil=True)

    @njit(**_OPTS)
    def _nb_apply_1q(state, q, m00, m01, m10, m11):  # pragma: no cover - jit
        stride = 1 << q
        n = state.size
        for base in range(0, n, stride << 1):
            for off in range(stride):
                i0 = base + off
                i1 = i0 + stride
                a = state[i0]
                b = state[i1]
                state[i0] = m00 * a + m01 * b
                state[i1] = m10 * a + m11 * b

    @njit(**_OPTS)
    def _nb_apply_cx(state, control, target):  # pragma: no cover - jit
        n = state.size
        cm = 1 << control
        tm = 1 << target
        for i in range(n):
            if (i & cm) and not (i & tm):
                j = i | tm
                tmp = state[i]
                state[i] = state[j]
                state[j] = tmp

    @njit(**_OPTS)
    def _nb_apply_cz(state, a, b):  # pragma: no cover - jit
        am = 1 << a
        bm = 1 << b
        for i in range(state.size):
            if (i & am) and (i & bm):
                state[i] = -state[i]

    @njit(**_OPTS)
    def _nb_apply_rzz(state, a, b, theta):  # pragma: no cover - jit
        am = 1 << a
        bm = 1 << b
        minus = np.exp(-1j * theta / 2.0)
        plus = np.exp(1j * theta / 2.0)
        for i in range(state.size):
            pa = 1 if (i & am) else 0
            pb = 1 if (i & bm) else 0
            state[i] *= plus if pa ^ pb else minus

    @njit(**_OPTS)
    def _nb_apply_swap(state, a, b):  # pragma: no cover - jit
        am = 1 << a
        bm = 1 << b
        for i in range(state.size):
            if (i & am) and not (i & bm):
                j = (i ^ am) | bm
                tmp = state[i]
                state[i] = state[j]
                state[j] = tmp

    @njit(**_OPTS)
    def _nb_project_z(state, q, keep_bit):  # pragma: no cover - jit
        qm = 1 << q
        for i in range(state.size):
            bit = 1 if (i & qm) else 0
            if bit != keep_bit:
                state[i] = 0.0

    @njit(**_OPTS)
    def _nb_expect_z_mask(state, mask):  # pragma: no cover - jit
        total = 0.0
        for i in range(state.size):
            bits = i & mask
            parity = 0
            while bits:
                parity ^= bits & 1
                bits >>= 1
            p = state[i].real ** 2 + state[i].imag ** 2
            total += -p if parity else p
        return total


if USE_NUMBA:
    apply_1q = _nb_apply_1q
    apply_cx = _nb_apply_cx
    apply_cz = _nb_apply_cz
    apply_rzz = _nb_apply_rzz
    apply_swap = _nb_apply_swap
    project_z = _nb_project_z
    expect_z_mask = _nb_expect_z_mask
else:
    apply_1q = _np_apply_1q
    apply_cx = _np_apply_cx
    apply_cz = _np_apply_cz
    apply_rzz = _np_apply_rzz
    apply_swap = _np_apply_swap
    project_z = _np_project_z
    expect_z_mask = _np_expect_z_mask

NUMPY_KERNELS = {
    "apply_1q": _np_apply_1q,
    "apply_cx": _np_apply_cx,
    "apply_cz": _np_apply_cz,
    "apply_rzz": _np_apply_rzz,
    "apply_swap": _np_apply_swap,
    "project_z": _np_project_z,
    "expect_z_mask": _np_expect_z_mask,
}

ACTIVE_KERNELS = {
    "apply_1q": apply_1q,
    "apply_cx": apply_cx,
    "apply_cz": apply_cz,
    "apply_rzz": apply_rzz,
    "apply_swap": apply_swap,
    "project_z": project_z,
    "expect_z_mask": expect_z_mask,
}

backend_name = "numba" if USE_NUMBA else "numpy"

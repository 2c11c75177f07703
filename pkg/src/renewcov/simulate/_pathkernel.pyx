# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled simulation kernel: one tight C loop per path.

Shares the event semantics of ``_kernel_py`` (see its docstring) but walks
each path to completion before starting the next, drawing variates through
numpy's C distribution API on the block's bit generator.  The per-block
stream is therefore consumed in path order rather than round order, which is
why the two backends agree statistically rather than bit-for-bit.

Grid recording, like the Python kernel, uses the strict predicate
``grid[g] < S`` so a grid time equal to a renewal epoch includes that
epoch's reward.
"""

import numpy as np

from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from numpy.random cimport bitgen_t
from numpy.random.c_distributions cimport (
    random_gamma,
    random_standard_exponential,
    random_standard_uniform,
)

from ..errors import RunawayPathError

name = "compiled"

cdef enum:
    KIND_EXPONENTIAL = 0
    KIND_GAMMA = 1
    KIND_UNIFORM = 2
    KIND_DETERMINISTIC = 3


cdef inline double _draw_component(bitgen_t *bg, int kind, double p1, double p2) noexcept nogil:
    if kind == KIND_EXPONENTIAL:
        return p1 * random_standard_exponential(bg)
    elif kind == KIND_GAMMA:
        return random_gamma(bg, p1, p2)
    elif kind == KIND_UNIFORM:
        return p1 + (p2 - p1) * random_standard_uniform(bg)
    return p1


cdef inline double _draw_cycle(
    bitgen_t *bg,
    Py_ssize_t nc,
    const int *kinds,
    const double *p1,
    const double *p2,
    double t_const,
    const double *t_coef,
    Py_ssize_t L,
    const double *r_const,
    const double *r_coef,
    double *x_out,
    double *u_buf,
) noexcept nogil:
    cdef Py_ssize_t c, j
    cdef double u, t, acc
    t = t_const
    for c in range(nc):
        u = _draw_component(bg, kinds[c], p1[c], p2[c])
        u_buf[c] = u
        t += t_coef[c] * u
    for j in range(L):
        acc = r_const[j]
        for c in range(nc):
            acc += r_coef[j * nc + c] * u_buf[c]
        x_out[j] = acc
    return t


def run_block(cm, bit_generator, Py_ssize_t n_paths, grid, long long max_cycles):
    """Simulate one block; returns R at each grid time, shape (n_paths, G, L)."""
    cdef const char *capsule_name = "BitGenerator"
    capsule = bit_generator.capsule
    if not PyCapsule_IsValid(capsule, capsule_name):
        raise ValueError("expected a numpy BitGenerator")
    cdef bitgen_t *bg = <bitgen_t *> PyCapsule_GetPointer(capsule, capsule_name)

    cycle = cm.cycle
    delay = cm.delay
    cdef Py_ssize_t L = cm.L
    cdef int delay_mode = cm.delay_mode

    cdef const int[::1] c_kinds = cycle.kinds
    cdef const double[::1] c_p1 = cycle.p1
    cdef const double[::1] c_p2 = cycle.p2
    cdef const double[::1] c_tcoef = cycle.t_coef
    cdef const double[::1] c_rconst = cycle.r_const
    cdef const double[:, ::1] c_rcoef = cycle.r_coef
    cdef double c_tconst = cycle.t_const
    cdef Py_ssize_t c_n = cycle.n

    cdef const int[::1] d_kinds = delay.kinds
    cdef const double[::1] d_p1 = delay.p1
    cdef const double[::1] d_p2 = delay.p2
    cdef const double[::1] d_tcoef = delay.t_coef
    cdef const double[::1] d_rconst = delay.r_const
    cdef const double[:, ::1] d_rcoef = delay.r_coef
    cdef double d_tconst = delay.t_const
    cdef Py_ssize_t d_n = delay.n

    grid_arr = np.ascontiguousarray(grid, dtype=np.float64)
    cdef const double[::1] gv = grid_arr
    cdef Py_ssize_t G = gv.shape[0]

    out = np.zeros((n_paths, G, L))
    cdef double[:, :, ::1] ov = out

    # Scratch buffers sized once per block.
    nbuf = max(c_n, d_n, 1)
    u_arr = np.zeros(nbuf)
    x_arr = np.zeros(L)
    r_arr = np.zeros(L)
    cdef double[::1] u_buf = u_arr
    cdef double[::1] x_buf = x_arr
    cdef double[::1] r_buf = r_arr

    cdef Py_ssize_t p, g, j
    cdef double s, t
    cdef long long ncyc
    cdef bint runaway = 0

    with bit_generator.lock, nogil:
        for p in range(n_paths):
            s = 0.0
            g = 0
            for j in range(L):
                r_buf[j] = 0.0
            if delay_mode != 0:
                if delay_mode == 2:
                    t = _draw_cycle(bg, d_n, &d_kinds[0], &d_p1[0], &d_p2[0],
                                    d_tconst, &d_tcoef[0], L, &d_rconst[0],
                                    &d_rcoef[0, 0], &x_buf[0], &u_buf[0])
                else:
                    t = _draw_cycle(bg, c_n, &c_kinds[0], &c_p1[0], &c_p2[0],
                                    c_tconst, &c_tcoef[0], L, &c_rconst[0],
                                    &c_rcoef[0, 0], &x_buf[0], &u_buf[0])
                s += t
                while g < G and gv[g] < s:
                    for j in range(L):
                        ov[p, g, j] = r_buf[j]
                    g += 1
                for j in range(L):
                    r_buf[j] += x_buf[j]
            ncyc = 0
            while g < G:
                t = _draw_cycle(bg, c_n, &c_kinds[0], &c_p1[0], &c_p2[0],
                                c_tconst, &c_tcoef[0], L, &c_rconst[0],
                                &c_rcoef[0, 0], &x_buf[0], &u_buf[0])
                s += t
                while g < G and gv[g] < s:
                    for j in range(L):
                        ov[p, g, j] = r_buf[j]
                    g += 1
                for j in range(L):
                    r_buf[j] += x_buf[j]
                ncyc += 1
                if ncyc > max_cycles:
                    runaway = 1
                    break
            if runaway:
                break

    if runaway:
        raise RunawayPathError(
            f"a path exceeded the {max_cycles}-cycle budget"
        )
    return out

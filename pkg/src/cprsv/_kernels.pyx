# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Fused forward-Euler step loop.

Mirrors the numpy path in cprsv.driver exactly: same flux formulas, same
adaptive-epsilon branch logic and constants, same record definitions.
Covers advection on all bases and Burgers on nodal bases; everything else
stays on the numpy path.
"""

import numpy as np

from libc.math cimport sqrt, fabs

cdef int PROBLEM_ADVECTION = 0
cdef int PROBLEM_BURGERS = 1
cdef int FLUX_CENTRAL = 0
cdef int FLUX_UPWIND = 1
cdef int FLUX_LLF = 2
cdef int MODE_OFF = 0
cdef int MODE_FIXED = 1
cdef int MODE_ADAPTIVE = 2

cdef double TINY_A = 1e-300
cdef double DISC_SNAP = 1e-14


cdef inline double _num_flux(int flux, double um, double up) nogil:
    cdef double lam
    if flux == FLUX_CENTRAL:
        return 0.5 * (um + up)
    if flux == FLUX_UPWIND:
        return um
    lam = fabs(um)
    if fabs(up) > lam:
        lam = fabs(up)
    return 0.25 * (um * um + up * up) - 0.5 * lam * (up - um)


cdef inline double _solve_eps(double a, double b, double c, int* clamped) nogil:
    cdef double disc, eps
    clamped[0] = 0
    if a < TINY_A:
        if c != 0.0:
            clamped[0] = 1
        return 0.0
    disc = b * b - 4.0 * a * c
    if disc < 0.0 and disc >= -DISC_SNAP * b * b:
        disc = 0.0
    if disc < 0.0 or b > 0.0:
        clamped[0] = 1
        return 0.0
    eps = (-b - sqrt(disc)) / (2.0 * a)
    if eps < 0.0:
        eps = 0.0
    return eps


def run_euler_chunk(
    double[:, ::1] u,
    double[:, ::1] D,
    double[:, ::1] R,
    double[:, ::1] C,
    double[:, ::1] As,
    double[:] m,
    double[:] wm,
    double jac,
    double dt,
    int problem,
    int flux,
    int diss_mode,
    double fixed_eps,
    double energy_limit,
    double[:] out_energy,
    double[:] out_mass,
    double[:] out_eps_min,
    double[:] out_eps_max,
    long[:] out_clamped,
):
    """Advance *u* in place by len(out_energy) Euler steps.

    Returns (steps_recorded, blew_up).  On blow-up the failing step is the
    last recorded one.
    """
    cdef Py_ssize_t n_el = u.shape[0]
    cdef Py_ssize_t n = u.shape[1]
    cdef Py_ssize_t n_steps = out_energy.shape[0]
    cdef Py_ssize_t s, i, j, k, q, jprev

    scratch = np.empty((7, n_el, n), dtype=np.float64)
    cdef double[:, ::1] unew = scratch[0]
    cdef double[:, ::1] uu = scratch[1]
    cdef double[:, ::1] rhs = scratch[2]
    tr = np.empty((6, n_el), dtype=np.float64)
    cdef double[:] trace_l = tr[0]
    cdef double[:] trace_r = tr[1]
    cdef double[:] trace_l2 = tr[2]
    cdef double[:] trace_r2 = tr[3]
    cdef double[:] fnum = tr[4]
    cdef double[:] asu = np.empty(n, dtype=np.float64)

    cdef double inv_jac = 1.0 / jac
    cdef double tl, tr_, acc, acc2, um_, up_, fl, fr, gl, gr
    cdef double aq, bq, cq, bu, bd, eps, en, ma, emin, emax, un
    cdef int clamped, nclamp
    cdef bint blew = False

    for s in range(n_steps):
        # face traces of u (and of u*u for burgers)
        for i in range(n_el):
            tl = 0.0
            tr_ = 0.0
            for k in range(n):
                tl += R[0, k] * u[i, k]
                tr_ += R[1, k] * u[i, k]
            trace_l[i] = tl
            trace_r[i] = tr_
        if problem == PROBLEM_BURGERS:
            for i in range(n_el):
                for k in range(n):
                    uu[i, k] = u[i, k] * u[i, k]
            for i in range(n_el):
                tl = 0.0
                tr_ = 0.0
                for k in range(n):
                    tl += R[0, k] * uu[i, k]
                    tr_ += R[1, k] * uu[i, k]
                trace_l2[i] = tl
                trace_r2[i] = tr_
        # interface fluxes; interface i joins element i to i+1 (periodic)
        for i in range(n_el):
            um_ = trace_r[i]
            up_ = trace_l[i + 1] if i + 1 < n_el else trace_l[0]
            fnum[i] = _num_flux(flux, um_, up_)

        emin = 0.0
        emax = 0.0
        nclamp = 0
        for i in range(n_el):
            jprev = i - 1 if i > 0 else n_el - 1
            fl = fnum[jprev]
            fr = fnum[i]
            if problem == PROBLEM_ADVECTION:
                gl = fl - trace_l[i]
                gr = fr - trace_r[i]
                for k in range(n):
                    acc = 0.0
                    for q in range(n):
                        acc += D[k, q] * u[i, q]
                    rhs[i, k] = (-acc - (C[k, 0] * gl + C[k, 1] * gr)) * inv_jac
            else:
                gl = fl - trace_l2[i] / 3.0 - trace_l[i] * trace_l[i] / 6.0
                gr = fr - trace_r2[i] / 3.0 - trace_r[i] * trace_r[i] / 6.0
                for k in range(n):
                    acc = 0.0
                    acc2 = 0.0
                    for q in range(n):
                        acc += D[k, q] * u[i, q]
                        acc2 += D[k, q] * uu[i, q]
                    rhs[i, k] = (
                        -acc2 / 3.0
                        - u[i, k] * acc / 3.0
                        - (C[k, 0] * gl + C[k, 1] * gr)
                    ) * inv_jac

            clamped = 0
            if diss_mode == MODE_OFF:
                eps = 0.0
                for k in range(n):
                    unew[i, k] = u[i, k] + dt * rhs[i, k]
            else:
                for k in range(n):
                    acc = 0.0
                    for q in range(n):
                        acc += As[k, q] * u[i, q]
                    asu[k] = acc
                if diss_mode == MODE_FIXED:
                    eps = fixed_eps
                else:
                    aq = 0.0
                    bu = 0.0
                    bd = 0.0
                    cq = 0.0
                    for k in range(n):
                        aq += m[k] * asu[k] * asu[k]
                        bu += m[k] * u[i, k] * asu[k]
                        bd += m[k] * rhs[i, k] * asu[k]
                        cq += m[k] * rhs[i, k] * rhs[i, k]
                    aq *= dt
                    bq = -2.0 * bu - 2.0 * dt * bd
                    cq *= dt
                    eps = _solve_eps(aq, bq, cq, &clamped)
                for k in range(n):
                    unew[i, k] = u[i, k] + dt * (rhs[i, k] - eps * asu[k])

            if i == 0:
                emin = eps
                emax = eps
            else:
                if eps < emin:
                    emin = eps
                if eps > emax:
                    emax = eps
            nclamp += clamped

        en = 0.0
        ma = 0.0
        for i in range(n_el):
            for k in range(n):
                u[i, k] = unew[i, k]
                en += m[k] * u[i, k] * u[i, k]
                ma += wm[k] * u[i, k]
        en *= jac
        ma *= jac
        out_energy[s] = en
        out_mass[s] = ma
        out_eps_min[s] = emin
        out_eps_max[s] = emax
        out_clamped[s] = nclamp
        if not en <= energy_limit:
            blew = True
            return s + 1, True
    return n_steps, False

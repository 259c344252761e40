# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twin of the active-set update loop.

Mirrors asqp.solver._update_loop_python operation for operation: same
branch conditions, same first-occurrence argmin/argmax tie-breaking, same
in-place bordering/downdating of the maintained inverse.  Only the
summation order inside dot products differs from BLAS.
"""

from libc.stdint cimport int64_t, uint64_t

cdef uint64_t _HASH_SALT_J = <uint64_t> 0x9E3779B97F4A7C15
cdef uint64_t _HASH_SALT_A = <uint64_t> 0xBF58476D1CE4E5B9


cdef inline uint64_t _fingerprint(Py_ssize_t j, int64_t[::1] active,
                                  Py_ssize_t c) noexcept nogil:
    cdef uint64_t h = (<uint64_t> (j + 1)) * _HASH_SALT_J
    cdef Py_ssize_t i
    for i in range(c):
        h ^= (<uint64_t> (active[i] + 1)) * _HASH_SALT_A
    return h


cdef inline double _dot(double[::1] a, double[::1] b, Py_ssize_t n) noexcept nogil:
    cdef double s = 0.0
    cdef Py_ssize_t i
    for i in range(n):
        s += a[i] * b[i]
    return s


cdef void _gather_column(double[:, ::1] h, int64_t[::1] active, Py_ssize_t c,
                         Py_ssize_t j, double[::1] out) noexcept nogil:
    # symmetric H: read along row j (contiguous) instead of down column j
    cdef Py_ssize_t i
    for i in range(c):
        out[i] = h[j, active[i]]


cdef void _matvec_block(double[:, ::1] hinv, double[::1] x, Py_ssize_t c,
                        double[::1] out) noexcept nogil:
    cdef Py_ssize_t row, col
    cdef double val
    for row in range(c):
        val = 0.0
        for col in range(c):
            val += hinv[row, col] * x[col]
        out[row] = val


cdef void _border_add(double[:, ::1] hinv, double[::1] lam, int64_t[::1] active,
                      Py_ssize_t c, Py_ssize_t j, double q, double k_j,
                      double[::1] hbuf, double[::1] ybuf) noexcept nogil:
    cdef double r = k_j + _dot(hbuf, lam, c)
    cdef double rq = r / q
    cdef Py_ssize_t row, col
    for row in range(c):
        for col in range(c):
            hinv[row, col] += ybuf[row] * ybuf[col] / q
        hinv[row, c] = -ybuf[row] / q
        hinv[c, row] = hinv[row, c]
        lam[row] += ybuf[row] * rq
    hinv[c, c] = 1.0 / q
    lam[c] = -rq
    active[c] = j


cdef void _downdate_remove(double[:, ::1] hinv, double[::1] lam, int64_t[::1] active,
                           Py_ssize_t c, Py_ssize_t i, double[::1] scratch) noexcept nogil:
    cdef double h = hinv[i, i]
    cdef double lam_i = lam[i]
    cdef Py_ssize_t row, col, r2, c2
    for row in range(c):
        scratch[row] = hinv[row, i]
    for row in range(c):
        if row == i:
            continue
        r2 = row - (1 if row > i else 0)
        lam[r2] = lam[row] - (lam_i / h) * scratch[row]
        for col in range(c):
            if col == i:
                continue
            c2 = col - (1 if col > i else 0)
            hinv[r2, c2] = hinv[row, col] - scratch[row] * scratch[col] / h
    for col in range(c):
        hinv[c - 1, col] = 0.0
        hinv[col, c - 1] = 0.0
    lam[c - 1] = 0.0
    for row in range(i, c - 1):
        active[row] = active[row + 1]
    active[c - 1] = 0


def update_loop(double[:, ::1] h, double[::1] k0, double[::1] k,
                int64_t[::1] active, double[:, ::1] hinv, double[::1] lam,
                double[::1] hbuf, double[::1] ybuf, uint64_t[::1] state_hashes,
                Py_ssize_t j0, double eps_q, double max_iter, Py_ssize_t w_cap):
    """Run the update phase; phase 1 (k0, initial argmin j0) is the
    caller's.  Returns (status, c, m, dependent_adds, plain_adds, removals)
    with status 0=optimal, 1=infeasible, 2=iteration limit, 3=cycle guard,
    -1=capacity exceeded, 4=numerical breakdown (non-positive bordering
    scalar inside a dependence swap), 5=exact state revisit (degenerate
    cycle; the caller runs the perturbed-restart recovery)."""
    cdef Py_ssize_t p = k0.shape[0]
    cdef Py_ssize_t memory = state_hashes.shape[0]
    cdef Py_ssize_t state_count = 0
    cdef Py_ssize_t c = 0
    cdef long long m = 1
    cdef long long dependent_adds = 0, plain_adds = 0, removals = 0
    cdef Py_ssize_t j = j0, i, f, row, idx, limit
    cdef double kmin = k[j0]
    cdef double q, h_jj, ymax, lmin, val
    cdef uint64_t fp
    cdef int status = 0
    cdef bint repeated, stop

    with nogil:
        stop = False
        while kmin < 0.0 and not stop:
            repeated = False
            for i in range(c):
                if active[i] == j:
                    repeated = True
                    break
            if repeated:
                status = 3
                break
            fp = _fingerprint(j, active, c)
            limit = state_count if state_count < memory else memory
            for i in range(limit):
                if state_hashes[i] == fp:
                    repeated = True
                    break
            if repeated:
                status = 5
                break
            state_hashes[state_count % memory] = fp
            state_count += 1
            if (<double> m) >= max_iter:
                status = 2
                break
            m += 1
            if c == 0:
                if w_cap < 1:
                    status = -1
                    break
                h_jj = h[j, j]
                if h_jj <= eps_q:
                    # zero row violated at the seed: vacuously infeasible
                    status = 1
                    break
                hinv[0, 0] = 1.0 / h_jj
                lam[0] = -k0[j] / h_jj
                active[0] = j
                c = 1
                plain_adds += 1
            else:
                _gather_column(h, active, c, j, hbuf)
                _matvec_block(hinv, hbuf, c, ybuf)
                q = h[j, j] - _dot(hbuf, ybuf, c)
                if q <= eps_q:
                    f = 0
                    ymax = ybuf[0]
                    for i in range(1, c):
                        if ybuf[i] > ymax:
                            ymax = ybuf[i]
                            f = i
                    if ymax <= 0.0:
                        status = 1
                        break
                    _downdate_remove(hinv, lam, active, c, f, hbuf)
                    c -= 1
                    _gather_column(h, active, c, j, hbuf)
                    _matvec_block(hinv, hbuf, c, ybuf)
                    q = h[j, j] - _dot(hbuf, ybuf, c)
                    if q <= 0.0:
                        status = 4
                        break
                    _border_add(hinv, lam, active, c, j, q, k0[j], hbuf, ybuf)
                    c += 1
                    dependent_adds += 1
                else:
                    if c >= w_cap:
                        status = -1
                        break
                    _border_add(hinv, lam, active, c, j, q, k0[j], hbuf, ybuf)
                    c += 1
                    plain_adds += 1
            while c > 0:
                i = 0
                lmin = lam[0]
                for idx in range(1, c):
                    if lam[idx] < lmin:
                        lmin = lam[idx]
                        i = idx
                if lmin >= 0.0:
                    break
                if (<double> m) >= max_iter:
                    status = 2
                    stop = True
                    break
                m += 1
                _downdate_remove(hinv, lam, active, c, i, hbuf)
                c -= 1
                removals += 1
            if stop:
                break
            for row in range(p):
                k[row] = k0[row]
            for idx in range(c):
                row = active[idx]
                val = lam[idx]
                for i in range(p):
                    k[i] += h[row, i] * val
            j = 0
            kmin = k[0]
            for row in range(1, p):
                if k[row] < kmin:
                    kmin = k[row]
                    j = row
    return status, int(c), int(m), int(dependent_adds), int(plain_adds), int(removals)

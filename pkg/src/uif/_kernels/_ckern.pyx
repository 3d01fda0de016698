# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the numpy kernels in ``pykern``.

Same contracts, same padding rules, same tie-breaking. Keep the two files in
sync; ``tests/test_kernels.py`` checks them against each other.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, sqrt

cnp.import_array()


def box_stats(plane, int radius):
    """Per-pixel mean/stddev over a (2r+1)^2 box with symmetric padding."""
    cdef cnp.float64_t[:, ::1] padded = np.pad(
        np.ascontiguousarray(plane, dtype=np.float64), radius, mode="symmetric"
    )
    cdef Py_ssize_t ph = padded.shape[0], pw = padded.shape[1]
    cdef Py_ssize_t size = 2 * radius + 1
    cdef Py_ssize_t h = ph - size + 1, w = pw - size + 1

    hs1_arr = np.empty((ph, w), dtype=np.float64)
    hs2_arr = np.empty((ph, w), dtype=np.float64)
    cdef cnp.float64_t[:, ::1] hs1 = hs1_arr
    cdef cnp.float64_t[:, ::1] hs2 = hs2_arr

    cdef Py_ssize_t x, y
    cdef double acc1, acc2, v
    for y in range(ph):
        acc1 = 0.0
        acc2 = 0.0
        for x in range(size):
            v = padded[y, x]
            acc1 += v
            acc2 += v * v
        hs1[y, 0] = acc1
        hs2[y, 0] = acc2
        for x in range(1, w):
            v = padded[y, x + size - 1]
            acc1 += v
            acc2 += v * v
            v = padded[y, x - 1]
            acc1 -= v
            acc2 -= v * v
            hs1[y, x] = acc1
            hs2[y, x] = acc2

    mean_arr = np.empty((h, w), dtype=np.float64)
    std_arr = np.empty((h, w), dtype=np.float64)
    cdef cnp.float64_t[:, ::1] mean = mean_arr
    cdef cnp.float64_t[:, ::1] std = std_arr
    cdef double n = <double>(size * size)
    cdef double s1, s2, mu, var
    for x in range(w):
        s1 = 0.0
        s2 = 0.0
        for y in range(size):
            s1 += hs1[y, x]
            s2 += hs2[y, x]
        mu = s1 / n
        var = s2 / n - mu * mu
        if var < 0.0:
            var = 0.0
        mean[0, x] = mu
        std[0, x] = sqrt(var)
        for y in range(1, h):
            s1 += hs1[y + size - 1, x] - hs1[y - 1, x]
            s2 += hs2[y + size - 1, x] - hs2[y - 1, x]
            mu = s1 / n
            var = s2 / n - mu * mu
            if var < 0.0:
                var = 0.0
            mean[y, x] = mu
            std[y, x] = sqrt(var)
    return mean_arr, std_arr


def canny_nms(mag, sector):
    """Keep pixels >= both neighbors along the gradient sector, magnitude > 0."""
    cdef cnp.float64_t[:, ::1] m = np.ascontiguousarray(mag, dtype=np.float64)
    cdef cnp.int8_t[:, ::1] sec = np.ascontiguousarray(sector, dtype=np.int8)
    cdef Py_ssize_t h = m.shape[0], w = m.shape[1]
    out_arr = np.zeros((h, w), dtype=np.bool_)
    cdef cnp.uint8_t[:, ::1] out = out_arr.view(np.uint8)

    cdef Py_ssize_t x, y, dy, dx, ny, nx
    cdef double v, n1, n2
    for y in range(h):
        for x in range(w):
            v = m[y, x]
            if v <= 0.0:
                continue
            if sec[y, x] == 0:
                dy = 0
                dx = 1
            elif sec[y, x] == 1:
                dy = 1
                dx = 1
            elif sec[y, x] == 2:
                dy = 1
                dx = 0
            else:
                dy = 1
                dx = -1
            ny = y + dy
            nx = x + dx
            n1 = m[ny, nx] if 0 <= ny < h and 0 <= nx < w else 0.0
            ny = y - dy
            nx = x - dx
            n2 = m[ny, nx] if 0 <= ny < h and 0 <= nx < w else 0.0
            if v >= n1 and v >= n2:
                out[y, x] = 1
    return out_arr


def hysteresis(weak, strong):
    """8-connected flood fill over ``weak`` seeded at ``strong`` pixels."""
    weak_u8 = np.ascontiguousarray(weak, dtype=np.uint8)
    strong_u8 = np.ascontiguousarray(strong, dtype=np.uint8)
    cdef cnp.uint8_t[:, ::1] wk = weak_u8
    cdef cnp.uint8_t[:, ::1] st = strong_u8
    cdef Py_ssize_t h = wk.shape[0], w = wk.shape[1]
    out_arr = np.zeros((h, w), dtype=np.bool_)
    cdef cnp.uint8_t[:, ::1] visited = out_arr.view(np.uint8)

    stack_arr = np.empty(h * w, dtype=np.intp)
    cdef cnp.intp_t[::1] stack = stack_arr
    cdef Py_ssize_t sp = 0
    cdef Py_ssize_t x, y, ny, nx, idx, dy, dx

    for y in range(h):
        for x in range(w):
            if st[y, x] and not visited[y, x]:
                visited[y, x] = 1
                stack[sp] = y * w + x
                sp += 1
    while sp > 0:
        sp -= 1
        idx = stack[sp]
        y = idx // w
        x = idx - y * w
        for dy in range(-1, 2):
            for dx in range(-1, 2):
                if dy == 0 and dx == 0:
                    continue
                ny = y + dy
                nx = x + dx
                if 0 <= ny < h and 0 <= nx < w and wk[ny, nx] and not visited[ny, nx]:
                    visited[ny, nx] = 1
                    stack[sp] = ny * w + nx
                    sp += 1
    return out_arr


def smo_solve(gram, y, double c, double epsilon, double tol, long max_iter):
    """Dense SMO for the epsilon-SVR dual; see pykern.smo_solve."""
    cdef cnp.float64_t[:, ::1] K = np.ascontiguousarray(gram, dtype=np.float64)
    cdef cnp.float64_t[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t n = yv.shape[0]
    cdef Py_ssize_t n2 = 2 * n

    z_arr = np.zeros(n2, dtype=np.float64)
    grad_arr = np.empty(n2, dtype=np.float64)
    cdef cnp.float64_t[::1] z = z_arr
    cdef cnp.float64_t[::1] grad = grad_arr

    cdef Py_ssize_t t
    for t in range(n):
        grad[t] = epsilon - yv[t]
        grad[t + n] = epsilon + yv[t]

    cdef long it = 0
    cdef bint converged = 0
    cdef Py_ssize_t i, j, ii, jj
    cdef double m_up, m_low, viol, st, eta, cap_i, cap_j, lam, scale
    cdef double ki, kj

    while True:
        m_up = -INFINITY
        m_low = INFINITY
        i = -1
        j = -1
        for t in range(n2):
            st = 1.0 if t < n else -1.0
            viol = -st * grad[t]
            if (st > 0.0 and z[t] < c) or (st < 0.0 and z[t] > 0.0):
                if viol > m_up:
                    m_up = viol
                    i = t
            if (st > 0.0 and z[t] > 0.0) or (st < 0.0 and z[t] < c):
                if viol < m_low:
                    m_low = viol
                    j = t
        if m_up - m_low <= tol:
            converged = 1
            break
        if it >= max_iter:
            break
        it += 1

        ii = i % n
        jj = j % n
        eta = K[ii, ii] + K[jj, jj] - 2.0 * K[ii, jj]
        cap_i = (c - z[i]) if i < n else z[i]
        cap_j = z[j] if j < n else (c - z[j])
        lam = (m_up - m_low) / eta if eta > 1e-12 else INFINITY
        if cap_i < lam:
            lam = cap_i
        if cap_j < lam:
            lam = cap_j

        if lam >= cap_i:
            z[i] = c if i < n else 0.0
        else:
            z[i] = z[i] + lam if i < n else z[i] - lam
        if lam >= cap_j:
            z[j] = 0.0 if j < n else c
        else:
            z[j] = z[j] - lam if j < n else z[j] + lam

        for t in range(n):
            ki = K[t, ii]
            kj = K[t, jj]
            grad[t] = grad[t] + lam * (ki - kj)
            grad[t + n] = grad[t + n] - lam * (ki - kj)

    beta_arr = z_arr[:n] - z_arr[n:]
    cdef double bias
    if m_up == -INFINITY and m_low == INFINITY:
        bias = 0.0
    elif m_up == -INFINITY:
        bias = m_low
    elif m_low == INFINITY:
        bias = m_up
    else:
        bias = 0.5 * (m_up + m_low)
    return beta_arr, bias, it, bool(converged)

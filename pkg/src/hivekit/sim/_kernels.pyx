# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled simulation kernels.

Same operations in the same order as ``_kernels_py`` (the pure-Python
reference); compiled with -ffp-contract=off so results stay bit-identical.
"""

from libc.math cimport cos, sin, sqrt
from libc.stdlib cimport free, malloc

MODE_POSITION = 0
MODE_VELOCITY = 1
MODE_TORQUE = 2

KIND_ARM = 0
KIND_PENDULUM = 1


cdef inline void _ee(double[::1] q, double[::1] L, Py_ssize_t n,
                     double* out_x, double* out_y) nogil:
    cdef double acc = 0.0
    cdef double x = 0.0
    cdef double y = 0.0
    cdef Py_ssize_t k
    for k in range(n):
        acc = acc + q[k]
        x = x + L[k] * cos(acc)
        y = y + L[k] * sin(acc)
    out_x[0] = x
    out_y[0] = y


def step_chain(
    double[::1] q,
    double[::1] qd,
    int mode,
    double[::1] cmd,
    double[::1] L,
    double[::1] lim_lo,
    double[::1] lim_hi,
    double[::1] torque_lim,
    double[:, ::1] opos,
    double[:, ::1] ovel,
    double[::1] orad,
    int grasped,
    int kind,
    double dt,
    int n_sub,
    double kp,
    double kd,
    double obj_damping,
    double gravity,
    double pend_mass,
    double pend_damping,
    double ee_radius,
):
    """Advance the chain and the discs by n_sub substeps of dt, in place."""
    cdef Py_ssize_t n = q.shape[0]
    cdef Py_ssize_t m = opos.shape[0]
    cdef Py_ssize_t sub, j, i
    cdef double ee_old_x, ee_old_y, ee_x, ee_y
    cdef double qj, qdj, u, tl, length, inertia, a, lo, hi
    cdef double fac, vx, vy, px, py, r, dx, dy, d2, s

    with nogil:
        for sub in range(n_sub):
            _ee(q, L, n, &ee_old_x, &ee_old_y)

            for j in range(n):
                qj = q[j]
                qdj = qd[j]
                if mode == 0:  # position
                    u = kp * (cmd[j] - qj) - kd * qdj
                elif mode == 1:  # velocity
                    u = kd * (cmd[j] - qdj)
                else:
                    u = cmd[j]
                tl = torque_lim[j]
                if u > tl:
                    u = tl
                elif u < -tl:
                    u = -tl

                if kind == 1:  # pendulum
                    length = L[j]
                    inertia = pend_mass * length * length
                    u = u - pend_mass * gravity * length * cos(qj) - pend_damping * qdj
                    a = u / inertia
                else:
                    a = u

                qdj = qdj + a * dt
                qj = qj + qdj * dt

                lo = lim_lo[j]
                hi = lim_hi[j]
                if qj < lo:
                    qj = lo
                    if qdj < 0.0:
                        qdj = 0.0
                elif qj > hi:
                    qj = hi
                    if qdj > 0.0:
                        qdj = 0.0
                q[j] = qj
                qd[j] = qdj

            _ee(q, L, n, &ee_x, &ee_y)

            fac = 1.0 - obj_damping * dt
            for i in range(m):
                if i == grasped:
                    dx = ee_x - ee_old_x
                    dy = ee_y - ee_old_y
                    opos[i, 0] = opos[i, 0] + dx
                    opos[i, 1] = opos[i, 1] + dy
                    ovel[i, 0] = dx / dt
                    ovel[i, 1] = dy / dt
                    continue
                vx = ovel[i, 0] * fac
                vy = ovel[i, 1] * fac
                px = opos[i, 0] + vx * dt
                py = opos[i, 1] + vy * dt
                r = orad[i] + ee_radius
                dx = px - ee_x
                dy = py - ee_y
                d2 = dx * dx + dy * dy
                if d2 < r * r:
                    if d2 > 0.0:
                        s = r / sqrt(d2)
                        px = ee_x + dx * s
                        py = ee_y + dy * s
                    else:
                        px = ee_x + r
                        py = ee_y
                ovel[i, 0] = vx
                ovel[i, 1] = vy
                opos[i, 0] = px
                opos[i, 1] = py


def raster_scene(
    double[::1] out,
    int width,
    int height,
    double extent,
    double[::1] q,
    double[::1] L,
    double[:, ::1] opos,
    double[::1] orad,
    int[::1] ocolor,
    double half_width,
    int palette,
):
    """Occupancy rasterization onto a width x height grid, row-major."""
    cdef Py_ssize_t n = q.shape[0]
    cdef Py_ssize_t m = opos.shape[0]
    cdef Py_ssize_t i, j, k, o
    cdef double acc, cw, ch, hw2, px, py, value
    cdef double ax, ay, bx, by, abx, aby, t, dx, dy, r
    cdef double* fx = <double*> malloc((n + 1) * sizeof(double))
    cdef double* fy = <double*> malloc((n + 1) * sizeof(double))
    if fx == NULL or fy == NULL:
        free(fx)
        free(fy)
        raise MemoryError()

    try:
        with nogil:
            fx[0] = 0.0
            fy[0] = 0.0
            acc = 0.0
            for k in range(n):
                acc = acc + q[k]
                fx[k + 1] = fx[k] + L[k] * cos(acc)
                fy[k + 1] = fy[k] + L[k] * sin(acc)

            cw = 2.0 * extent / width
            ch = 2.0 * extent / height
            hw2 = half_width * half_width

            for i in range(height):
                py = extent - (i + 0.5) * ch
                for j in range(width):
                    px = -extent + (j + 0.5) * cw
                    value = 0.0
                    for k in range(n):
                        ax = fx[k]
                        ay = fy[k]
                        bx = fx[k + 1]
                        by = fy[k + 1]
                        abx = bx - ax
                        aby = by - ay
                        t = ((px - ax) * abx + (py - ay) * aby) / (abx * abx + aby * aby)
                        if t < 0.0:
                            t = 0.0
                        elif t > 1.0:
                            t = 1.0
                        dx = ax + t * abx - px
                        dy = ay + t * aby - py
                        if dx * dx + dy * dy <= hw2:
                            value = 1.0
                            break
                    if value == 0.0:
                        for o in range(m):
                            dx = px - opos[o, 0]
                            dy = py - opos[o, 1]
                            r = orad[o]
                            if dx * dx + dy * dy <= r * r:
                                value = (ocolor[o] + 1.0) / palette
                                break
                    out[i * width + j] = value
    finally:
        free(fx)
        free(fy)

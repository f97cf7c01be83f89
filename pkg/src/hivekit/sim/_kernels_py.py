"""Pure-Python simulation kernels.

Reference implementation of the hot loops.  The compiled twin in
``_kernels.pyx`` performs the same 64-bit float operations in the same
order, so both produce bit-identical results on one platform (both call
the platform libm for sin/cos/sqrt/log and the extension is compiled with
FMA contraction disabled).

Update order per substep, frozen (see docs/sim_model.md):

1. ee_old from forward kinematics of the current joint positions
2. per joint: control torque per mode, clamped to torque limits
     position: u = kp*(cmd - q) - kd*qd
     velocity: u = kd*(cmd - qd)
     torque:   u = cmd
3. acceleration (arm: unit inertia per joint, no coupling, no gravity;
   pendulum: I = m*L^2, gravity torque -m*g*L*cos(q), viscous -b*qd)
4. semi-implicit Euler: qd += a*dt, then q += qd*dt
5. joint limits: clamp position, zero outward velocity
6. ee_new from forward kinematics
7. objects: the grasped disc translates by (ee_new - ee_old) and takes
   velocity delta/dt; every other disc damps (vel *= 1 - damping*dt),
   integrates, then is projected out of the end-effector paddle (overlap
   when center distance < disc radius + ee_radius; position projection
   only, no impulse)
"""

from __future__ import annotations

import math

MODE_POSITION = 0
MODE_VELOCITY = 1
MODE_TORQUE = 2

KIND_ARM = 0
KIND_PENDULUM = 1


def _ee(q, L, n):
    acc = 0.0
    x = 0.0
    y = 0.0
    for k in range(n):
        acc = acc + q[k]
        x = x + L[k] * math.cos(acc)
        y = y + L[k] * math.sin(acc)
    return x, y


def step_chain(
    q,
    qd,
    mode,
    cmd,
    L,
    lim_lo,
    lim_hi,
    torque_lim,
    opos,
    ovel,
    orad,
    grasped,
    kind,
    dt,
    n_sub,
    kp,
    kd,
    obj_damping,
    gravity,
    pend_mass,
    pend_damping,
    ee_radius,
):
    """Advance the chain and the discs by n_sub substeps of dt, in place."""
    n = q.shape[0]
    m = opos.shape[0]
    for _ in range(n_sub):
        ee_old_x, ee_old_y = _ee(q, L, n)

        for j in range(n):
            qj = float(q[j])
            qdj = float(qd[j])
            if mode == MODE_POSITION:
                u = kp * (float(cmd[j]) - qj) - kd * qdj
            elif mode == MODE_VELOCITY:
                u = kd * (float(cmd[j]) - qdj)
            else:
                u = float(cmd[j])
            tl = float(torque_lim[j])
            if u > tl:
                u = tl
            elif u < -tl:
                u = -tl

            if kind == KIND_PENDULUM:
                length = float(L[j])
                inertia = pend_mass * length * length
                u = u - pend_mass * gravity * length * math.cos(qj) - pend_damping * qdj
                a = u / inertia
            else:
                a = u

            qdj = qdj + a * dt
            qj = qj + qdj * dt

            lo = float(lim_lo[j])
            hi = float(lim_hi[j])
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

        ee_x, ee_y = _ee(q, L, n)

        fac = 1.0 - obj_damping * dt
        for i in range(m):
            if i == grasped:
                dx = ee_x - ee_old_x
                dy = ee_y - ee_old_y
                opos[i, 0] = float(opos[i, 0]) + dx
                opos[i, 1] = float(opos[i, 1]) + dy
                ovel[i, 0] = dx / dt
                ovel[i, 1] = dy / dt
                continue
            vx = float(ovel[i, 0]) * fac
            vy = float(ovel[i, 1]) * fac
            px = float(opos[i, 0]) + vx * dt
            py = float(opos[i, 1]) + vy * dt
            r = float(orad[i]) + ee_radius
            dx = px - ee_x
            dy = py - ee_y
            d2 = dx * dx + dy * dy
            if d2 < r * r:
                if d2 > 0.0:
                    s = r / math.sqrt(d2)
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
    out,
    width,
    height,
    extent,
    q,
    L,
    opos,
    orad,
    ocolor,
    half_width,
    palette,
):
    """Occupancy rasterization onto a width x height grid, row-major.

    Pixel centers sample the square [-extent, extent]^2, y up.  A cell
    covered by a link gets 1.0; else, if covered by a disc, the shade
    (color_index + 1) / palette of the lowest-index covering disc; else 0.
    """
    n = q.shape[0]
    m = opos.shape[0]

    # chain frame points, base at the origin
    fx = [0.0] * (n + 1)
    fy = [0.0] * (n + 1)
    acc = 0.0
    for k in range(n):
        acc = acc + q[k]
        fx[k + 1] = fx[k] + L[k] * math.cos(acc)
        fy[k + 1] = fy[k] + L[k] * math.sin(acc)

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
                    dx = px - float(opos[o, 0])
                    dy = py - float(opos[o, 1])
                    r = float(orad[o])
                    if dx * dx + dy * dy <= r * r:
                        value = (float(ocolor[o]) + 1.0) / palette
                        break
            out[i * width + j] = value

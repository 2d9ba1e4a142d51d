# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled simulation kernel.

Twin of ``_simloop.py``; keep the arithmetic expression-for-expression
identical (the build also disables FP contraction) so both backends
agree to rounding.
"""

from libc.math cimport asin, cos, isfinite, sin

cdef double PI = 3.141592653589793
cdef double JACOBIAN_TOL = 1e-6

OK = 0
SINGULAR = 1
NONFINITE = 2


def simulate(
    double[::1] out_theta,
    double[::1] out_tau,
    int n_ticks,
    int n_sub,
    double dt,
    double ctrl_period,
    double link_len,
    double mass,
    double g,
    double kp,
    double kd,
    double h0,
    double amp,
    double omega,
    double mu,
    double alpha0,
    bint has_spring,
    double torque_limit,
    bint has_limit,
    double theta0,
    double dtheta0,
):
    """See ``springsim._simloop.simulate``."""
    cdef double two_l = 2.0 * link_len
    cdef double theta = theta0
    cdef double dtheta = dtheta0
    cdef double t_k, h_ref, theta_ref, dh_ref, dtheta_ref, u
    cdef double dh, m_eff, tau_spring, acc
    cdef Py_ssize_t k, j
    for k in range(n_ticks):
        t_k = k * ctrl_period
        h_ref = h0 + amp * sin(omega * t_k)
        theta_ref = 2.0 * asin(h_ref / two_l)
        dh_ref = amp * omega * cos(omega * t_k)
        dtheta_ref = dh_ref / (link_len * cos(0.5 * theta_ref))
        u = kp * (theta_ref - theta) + kd * (dtheta_ref - dtheta)
        if has_limit:
            if u > torque_limit:
                u = torque_limit
            elif u < -torque_limit:
                u = -torque_limit
        out_theta[k] = theta
        out_tau[k] = -u
        for j in range(n_sub):
            if j > 0:
                u = kp * (theta_ref - theta) + kd * (dtheta_ref - dtheta)
                if has_limit:
                    if u > torque_limit:
                        u = torque_limit
                    elif u < -torque_limit:
                        u = -torque_limit
            dh = link_len * cos(0.5 * theta)
            if dh < JACOBIAN_TOL and dh > -JACOBIAN_TOL:
                return SINGULAR, t_k + j * dt, theta
            m_eff = mass * dh * dh
            tau_spring = -mu * (theta - alpha0) if has_spring else 0.0
            acc = (u + tau_spring - mass * g * dh) / m_eff
            dtheta = dtheta + dt * acc
            theta = theta + dt * dtheta
            if not (isfinite(theta) and isfinite(dtheta)):
                return NONFINITE, t_k + (j + 1) * dt, theta
            if theta <= 0.0 or theta >= PI:
                return SINGULAR, t_k + (j + 1) * dt, theta
    return OK, 0.0, 0.0

"""Jitted inner loops of the stochastic integrator.

One kernel advances a single trajectory over a span of constant drive.
Atoms get a symplectic kick-drift update (momenta first, with the
pre-step field; positions with the fresh momenta), then the field is
advanced either by Euler-Maruyama or by the exact Ornstein-Uhlenbeck
update for atoms frozen over the step. Standard normals for the field
noise are drawn by the caller, two per step, so that the stream order
never depends on how a run is chunked.
"""

import math

import numba
import numpy as np

TWO_PI = 2.0 * math.pi

EULER_MARUYAMA = 0
SPLIT_EXPONENTIAL = 1


@numba.njit(cache=True)
def integrate_span(
    x,                # float64[N], mutated in place, wrapped to [0, 2*pi)
    p,                # float64[N], mutated in place
    alpha,            # complex128
    n_steps,          # int64, >= 1
    dt,               # nominal step
    dt_last,          # duration of the final step (lands exactly on span end)
    t0,               # span start time
    t1,               # span end time
    eta, u0, kappa, delta_c,
    eta_p,            # complex128, constant over the span
    noise,            # float64[n_steps, 2] standard normals, or [0, 2] if unused
    use_noise,        # bool
    freeze_atoms,     # bool: hold x, p fixed (diagnostics)
    freeze_field,     # bool: hold alpha fixed (diagnostics)
    scheme,           # EULER_MARUYAMA or SPLIT_EXPONENTIAL
    record_stride,    # record after global steps divisible by this
    step_offset,      # global step count before this span
    out_t, out_theta, out_bunch, out_re, out_im,  # preallocated record buffers
):
    """Advance one trajectory across [t0, t1]; returns (alpha, n_records)."""
    n_atoms = x.shape[0]
    n_rec = 0
    sqrt_half_kappa = math.sqrt(0.5 * kappa)
    for k in range(n_steps):
        h = dt if k < n_steps - 1 else dt_last

        # field coefficients use the pre-step configuration
        sum_sin = 0.0
        sum_sin2 = 0.0
        aa = alpha.real * alpha.real + alpha.imag * alpha.imag
        c_latt = -u0 * aa              # prefactor of sin(2x) in the force
        c_pump = -2.0 * eta * alpha.real  # prefactor of cos(x)
        if freeze_atoms:
            for j in range(n_atoms):
                s = math.sin(x[j])
                sum_sin += s
                sum_sin2 += s * s
        else:
            for j in range(n_atoms):
                s = math.sin(x[j])
                c = math.cos(x[j])
                sum_sin += s
                sum_sin2 += s * s
                p[j] += (c_latt * 2.0 * s * c + c_pump * c) * h
                xn = (x[j] + 2.0 * p[j] * h) % TWO_PI  # dx/dt = p/m, m = 1/2
                if xn >= TWO_PI:  # % can round up to the modulus itself
                    xn -= TWO_PI
                x[j] = xn

        if not freeze_field:
            a_lin = complex(-kappa, delta_c - u0 * sum_sin2)
            drive = eta_p - 1j * (eta * sum_sin)
            if scheme == EULER_MARUYAMA:
                alpha = alpha + (a_lin * alpha + drive) * h
                if use_noise:
                    w = sqrt_half_kappa * math.sqrt(h)
                    alpha += complex(w * noise[k, 0], w * noise[k, 1])
            else:
                decay = np.exp(a_lin * h)
                alpha = decay * alpha + ((decay - 1.0) / a_lin) * drive
                if use_noise:
                    w = math.sqrt(0.25 * (1.0 - math.exp(-2.0 * kappa * h)))
                    alpha += complex(w * noise[k, 0], w * noise[k, 1])

        g = step_offset + k + 1
        if g % record_stride == 0:
            ss = 0.0
            s2 = 0.0
            for j in range(n_atoms):
                s = math.sin(x[j])
                ss += s
                s2 += s * s
            out_t[n_rec] = t0 + (k + 1) * dt if k < n_steps - 1 else t1
            out_theta[n_rec] = ss / n_atoms
            out_bunch[n_rec] = s2 / n_atoms
            out_re[n_rec] = alpha.real
            out_im[n_rec] = alpha.imag
            n_rec += 1

    return alpha, n_rec

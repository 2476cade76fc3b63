"""Pure-NumPy twin of the compiled stepping kernel (same signatures)."""
import numpy as np


def _laplacian(coupling_row, phi_row):
    right = np.roll(phi_row, -1, axis=-1)
    left = np.roll(phi_row, 1, axis=-1)
    c_left = np.roll(coupling_row, 1)
    return coupling_row * (right - phi_row) - c_left * (phi_row - left)


def step_retarded(coupling, mass, mask, src):
    k, n_t, n_x = src.shape
    phi = np.zeros((k, n_t, n_x))
    for t in range(n_t - 1):
        cur = phi[:, t, :]
        prev = phi[:, t - 1, :] if t > 0 else 0.0
        nxt = src[:, t, :] + 2.0 * cur + _laplacian(coupling[t], cur) - prev - mass[t] * cur
        phi[:, t + 1, :] = np.where(mask[t + 1].astype(bool), nxt, 0.0)
    return phi


def step_advanced(coupling, mass, mask, src):
    k, n_t, n_x = src.shape
    phi = np.zeros((k, n_t, n_x))
    for t in range(n_t - 1, 0, -1):
        cur = phi[:, t, :]
        nxt_row = phi[:, t + 1, :] if t < n_t - 1 else 0.0
        prev = src[:, t, :] + 2.0 * cur + _laplacian(coupling[t], cur) - nxt_row - mass[t] * cur
        phi[:, t - 1, :] = np.where(mask[t - 1].astype(bool), prev, 0.0)
    return phi

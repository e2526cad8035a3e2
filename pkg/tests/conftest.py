"""Shared builders for the test suite."""

import numpy as np

from pulsenet import Branch, Network, Waveform


def random_network(rng, max_nodes=20, max_branches=40):
    """Random directed multigraph; self-loops and isolated nodes allowed."""
    n_nodes = int(rng.integers(2, max_nodes + 1))
    n_branches = int(rng.integers(1, max_branches + 1))
    nodes = [f"n{k}" for k in range(n_nodes)]
    branches = []
    for k in range(n_branches):
        start = nodes[int(rng.integers(n_nodes))]
        end = nodes[int(rng.integers(n_nodes))]
        branches.append(Branch(f"b{k}", start, end))
    return Network.from_branches(branches, extra_nodes=nodes)


def gaussian_wave(sigma, dt, center=None, t0=0.0, half_span=None,
                  amplitude=1.0, unit=""):
    """Sampled Gaussian pulse; the analytic FWHM is 2*sqrt(2 ln 2)*sigma."""
    if half_span is None:
        half_span = 6.0 * sigma
    if center is None:
        center = t0 + half_span
    n = int(round(2.0 * half_span / dt)) + 1
    t = t0 + dt * np.arange(n)
    return Waveform(t0, dt, amplitude * np.exp(-0.5 * ((t - center) / sigma) ** 2),
                    unit)


def triangle_wave(base, dt, center=None, t0=0.0, amplitude=1.0):
    """Symmetric triangle of the given base width (FWHM = base / 2)."""
    half_span = base
    if center is None:
        center = t0 + half_span
    n = int(round(2.0 * half_span / dt)) + 1
    t = t0 + dt * np.arange(n)
    s = amplitude * np.clip(1.0 - np.abs(t - center) / (0.5 * base), 0.0, None)
    return Waveform(t0, dt, s)

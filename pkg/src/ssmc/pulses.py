"""Time grids, sampled control fields, and pump-pulse generators.

A sampled control field stores one value per grid time t_k = t_start + k*dt;
the value at index k is the nominal field at t_k.  Segment concatenation is
sample-exact (no resampling, no boundary smoothing).
"""

import enum
from dataclasses import dataclass

import numpy as np

from .units import DEFAULT_UNITS


class FieldKind(enum.Enum):
    ELECTRIC_FIELD = "electric_field"
    PEIERLS_PHASE = "peierls_phase"


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid: sample k sits at t_start + k*dt, k in [0, n_steps)."""

    t_start: float
    dt: float
    n_steps: int

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.n_steps < 1:
            raise ValueError(f"n_steps must be >= 1, got {self.n_steps}")

    @property
    def t_end(self):
        """End of the covered window [t_start, t_end)."""
        return self.t_start + self.n_steps * self.dt

    def times(self):
        return self.t_start + self.dt * np.arange(self.n_steps)


@dataclass(frozen=True, eq=False)
class SampledField:
    """Control signal on a uniform grid (E(t) for molecules, Phi(t) for lattices)."""

    grid: TimeGrid
    values: np.ndarray
    kind: FieldKind

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.shape != (self.grid.n_steps,):
            raise ValueError(
                f"values length {values.shape} does not match grid n_steps {self.grid.n_steps}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")


def make_time_grid(t_start, dt, n_steps):
    """Build a uniform grid of ``n_steps`` samples starting at ``t_start``."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    n_steps = int(n_steps)
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    return TimeGrid(float(t_start), float(dt), n_steps)


def pump_pulse_molecular(E0, T, we, grid):
    """Transform-limited pump E0 sin^2(pi t / T) cos(we t) sampled on ``grid``.

    ``we`` is the carrier angular frequency in a.u. (hbar = 1).  The grid must
    lie inside [0, T).
    """
    t = grid.times()
    if t[0] < 0.0 or grid.t_end > T * (1 + 1e-12):
        raise ValueError(f"grid [{t[0]}, {grid.t_end}) extends beyond pump window [0, {T})")
    values = E0 * np.sin(np.pi * t / T) ** 2 * np.cos(we * t)
    return SampledField(grid, values, FieldKind.ELECTRIC_FIELD)


def pump_phase_hubbard(E0_mv_cm, omega0_thz, a_angstrom, t0_ev, T, grid,
                       units=DEFAULT_UNITS):
    """Peierls-phase pump a*(E0/w0) sin^2(pi t / T) sin(w0 t) on ``grid``.

    Laboratory inputs are converted through atomic units; the returned samples
    are dimensionless phases on the lattice model's internal time grid, whose
    unit is hbar / t0.  ``T`` is in internal time units (two pump periods by
    default upstream).
    """
    if not omega0_thz > 0:
        raise ValueError(f"omega0 must be positive, got {omega0_thz}")
    omega_au = units.convert(omega0_thz, "THz", "au_angfreq")
    t0_au = units.convert(t0_ev, "eV", "hartree")
    a_au = units.convert(a_angstrom, "angstrom", "bohr")
    E0_au = units.convert(E0_mv_cm, "MV/cm", "au_field")
    amp = a_au * E0_au / omega_au          # dimensionless peak phase
    omega_int = omega_au / t0_au           # angular frequency, energies in t0
    t = grid.times()
    if t[0] < 0.0 or grid.t_end > T * (1 + 1e-12):
        raise ValueError(f"grid [{t[0]}, {grid.t_end}) extends beyond pump window [0, {T})")
    values = amp * np.sin(np.pi * t / T) ** 2 * np.sin(omega_int * t)
    return SampledField(grid, values, FieldKind.PEIERLS_PHASE)


def hubbard_pump_frequency(omega0_thz, t0_ev, units=DEFAULT_UNITS):
    """Pump angular frequency in lattice internal units (energy scale t0)."""
    return units.convert(omega0_thz, "THz", "au_angfreq") / units.convert(
        t0_ev, "eV", "hartree"
    )


def concat_pulses(segments):
    """Concatenate contiguous same-kind segments into one field, sample-exact."""
    if not segments:
        raise ValueError("need at least one segment")
    first = segments[0]
    dt, kind = first.grid.dt, first.kind
    t_next = first.grid.t_start
    for seg in segments:
        if seg.kind is not kind:
            raise ValueError(f"mixed field kinds: {seg.kind} vs {kind}")
        if abs(seg.grid.dt - dt) > 1e-15 * dt:
            raise ValueError(f"mismatched dt: {seg.grid.dt} vs {dt}")
        if abs(seg.grid.t_start - t_next) > 1e-9 * dt:
            raise ValueError(
                f"segment starting at {seg.grid.t_start} does not continue from {t_next}"
            )
        t_next = seg.grid.t_end
    n_total = sum(s.grid.n_steps for s in segments)
    grid = TimeGrid(first.grid.t_start, dt, n_total)
    values = np.concatenate([s.values for s in segments])
    return SampledField(grid, values, kind)

"""Experiment configuration: file parsing and model construction.

Config files are flat ``key = value`` text ('#' starts a comment).  Values
are typed per key; list-valued keys take comma-separated entries.  See the
README for the full schema and defaults.
"""

from dataclasses import dataclass, field, fields

import numpy as np

from . import pulses
from .morse import MorseSpec
from .hubbard import HubbardSpec
from .protocol import make_ensemble
from .units import DEFAULT_UNITS

SCAN_AXES = ("T", "n_s", "dm", "dU", "sigma")


@dataclass
class ExperimentConfig:
    """All knobs for one library build or parameter scan."""

    family: str = "morse"
    n_species: int = 2
    T: float | None = None         # segment duration, model time units
    dt: float | None = None        # time step, model time units
    order: str | list = "ascending"
    sigma_rel: float = 0.001
    n_seeds: int = 10
    seed0: int = 0
    scan_axis: str | None = None
    scan_values: list = field(default_factory=list)

    # molecular family
    m_ref: float = 1800.0          # a.u.
    delta_m: float = 0.05
    E0: float = 1e-5               # a.u. field amplitude
    we_cm1: float = 3000.0
    Be_cm1: float = 11.0
    D_cm1: float = 37000.0
    r_e_angstrom: float = 1.3
    M0_debye: float = 0.5
    e1: float = 2.0
    e2: float = 2.0
    e3: float = 2.0
    e4: float = 12.0
    n_r: int = 100
    r_min: float = 0.25
    r_max: float = 12.25

    # lattice family
    L: int = 6
    t0_ev: float = 0.52
    a_angstrom: float = 4.0
    U0: float = 1.0                # units of t0
    delta_U: float = 0.01          # units of t0
    U_max: float | None = None     # defaults to 1.01 * U0 for n_species > 2
    E0_mv_cm: float = 10.0
    omega0_thz: float = 32.9
    steps_per_period: int = 2000

    def __post_init__(self):
        if self.family not in ("morse", "hubbard"):
            raise ValueError(f"unknown family {self.family!r}")
        if self.n_species < 1:
            raise ValueError("n_species must be >= 1")
        if self.scan_axis is not None and self.scan_axis not in SCAN_AXES:
            raise ValueError(f"scan axis must be one of {SCAN_AXES}")
        if self.family == "morse":
            if self.T is None:
                self.T = 2500.0
            if self.dt is None:
                self.dt = 2.5
        else:
            period = 2.0 * np.pi / pulses.hubbard_pump_frequency(
                self.omega0_thz, self.t0_ev)
            if self.T is None:
                self.T = 2.0 * period      # two pump periods
            if self.dt is None:
                self.dt = period / self.steps_per_period
        if not self.dt > 0 or not self.T > 0:
            raise ValueError("T and dt must be positive")

    @property
    def n_t(self):
        return int(round(self.T / self.dt))

    def suppression_order(self):
        """Ascending mass / onsite repulsion by default (species index order)."""
        if self.order == "ascending":
            return list(range(self.n_species))
        return [int(i) for i in self.order]

    # -- model construction -------------------------------------------------

    def morse_specs(self):
        D = DEFAULT_UNITS.convert(self.D_cm1, "cm^-1", "hartree")
        r_e = DEFAULT_UNITS.convert(self.r_e_angstrom, "angstrom", "bohr")
        # wavenumber units cancel in the width ratio
        alpha = self.we_cm1 / (2.0 * r_e * np.sqrt(self.Be_cm1 * self.D_cm1))
        M0 = DEFAULT_UNITS.convert(self.M0_debye, "debye", "au_dipole")
        masses = np.linspace((1.0 - self.delta_m) * self.m_ref, self.m_ref,
                             self.n_species)
        return [MorseSpec(m=float(m), D=D, alpha=alpha, r_e=r_e, M0=M0,
                          e=(self.e1, self.e2, self.e3, self.e4),
                          n_r=self.n_r, r_min=self.r_min, r_max=self.r_max)
                for m in masses]

    def hubbard_specs(self):
        if self.L % 2:
            raise ValueError("half filling needs an even site count")
        n_sigma = self.L // 2
        if self.n_species == 2:
            U_values = [self.U0, self.U0 + self.delta_U]
        else:
            u_max = self.U_max if self.U_max is not None else 1.01 * self.U0
            U_values = np.linspace(self.U0, u_max, self.n_species)
        return [HubbardSpec(L=self.L, n_up=n_sigma, n_down=n_sigma,
                            U=float(U)) for U in U_values]

    def build_ensemble(self):
        specs = (self.morse_specs() if self.family == "morse"
                 else self.hubbard_specs())
        if self.family == "morse":
            labels = [f"m={s.m:g}" for s in specs]
        else:
            labels = [f"U={s.U:g}t0" for s in specs]
        return make_ensemble(self.family, specs, self.dt, labels=labels)

    def pump(self, duration=None):
        """Pump field over one segment (or ``duration`` for the naive pulse)."""
        T = self.T if duration is None else duration
        grid = pulses.make_time_grid(0.0, self.dt, int(round(T / self.dt)))
        if self.family == "morse":
            we = DEFAULT_UNITS.convert(self.we_cm1, "cm^-1", "hartree")
            return pulses.pump_pulse_molecular(self.E0, T, we, grid)
        return pulses.pump_phase_hubbard(self.E0_mv_cm, self.omega0_thz,
                                         self.a_angstrom, self.t0_ev, T, grid)

    def naive_pulse(self):
        return self.pump(duration=self.n_species * self.T)


_LIST_KEYS = {"scan_values", "order"}
_STR_KEYS = {"family", "scan_axis", "order"}
_INT_KEYS = {"n_species", "n_seeds", "seed0", "n_r", "L", "steps_per_period"}


def parse_config(path, **overrides):
    """Read ``key = value`` lines into an :class:`ExperimentConfig`."""
    known = {f.name for f in fields(ExperimentConfig)}
    raw = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, eq, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if not eq or not key or not value:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            if key not in known:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            raw[key] = value
    kwargs = {}
    for key, value in raw.items():
        if key == "order" and value != "ascending":
            kwargs[key] = [int(v) for v in value.split(",")]
        elif key == "scan_values":
            kwargs[key] = [float(v) for v in value.split(",")]
        elif key in _STR_KEYS:
            kwargs[key] = value
        elif key in _INT_KEYS:
            kwargs[key] = int(value)
        else:
            kwargs[key] = float(value)
    kwargs.update(overrides)
    return ExperimentConfig(**kwargs)

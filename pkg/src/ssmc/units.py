"""Physical-unit conversions between laboratory units and model units.

The molecular stack works in Hartree atomic units (hbar = m_e = e = 1); the
lattice stack works in dimensionless units with the hopping energy as the
energy scale and hbar = 1.  Laboratory inputs (cm^-1, Angstrom, Debye, eV,
THz, MV/cm) are converted to atomic units here, and the lattice code derives
its dimensionless ratios from those.

Frequencies quoted in THz are treated as ordinary frequencies and converted
to *angular* frequencies in atomic units (a factor of 2*pi is included).
"""

from dataclasses import dataclass, field

# CODATA 2018
HARTREE_PER_CM1 = 4.556335252912e-6
BOHR_PER_ANGSTROM = 1.0 / 0.529177210903
DEBYE_PER_AU_DIPOLE = 2.541746473
HARTREE_PER_EV = 1.0 / 27.211386245988
ATOMIC_TIME_S = 2.4188843265857e-17
# ordinary THz -> angular frequency in a.u.: 2*pi * 1e12 * t_au
AU_ANGFREQ_PER_THZ = 6.283185307179586 * 1.0e12 * ATOMIC_TIME_S
AU_FIELD_V_PER_CM = 5.14220674763e9
AU_FIELD_PER_MV_CM = 1.0e6 / AU_FIELD_V_PER_CM


def _default_factors():
    # factors from the named unit into the atomic-unit partner
    return {
        ("cm^-1", "hartree"): HARTREE_PER_CM1,
        ("angstrom", "bohr"): BOHR_PER_ANGSTROM,
        ("debye", "au_dipole"): 1.0 / DEBYE_PER_AU_DIPOLE,
        ("eV", "hartree"): HARTREE_PER_EV,
        ("THz", "au_angfreq"): AU_ANGFREQ_PER_THZ,
        ("MV/cm", "au_field"): AU_FIELD_PER_MV_CM,
    }


@dataclass(frozen=True)
class UnitSystem:
    """Registry of pairwise unit conversions, closed under inversion."""

    factors: dict = field(default_factory=_default_factors)

    def __post_init__(self):
        for pair, f in self.factors.items():
            if not f > 0.0:
                raise ValueError(f"conversion factor for {pair} must be positive")

    def convert(self, value, src, dst):
        if src == dst:
            return value
        f = self.factors.get((src, dst))
        if f is not None:
            return value * f
        f = self.factors.get((dst, src))
        if f is not None:
            return value / f
        raise ValueError(f"unknown unit pair: {src!r} -> {dst!r}")


DEFAULT_UNITS = UnitSystem()


def convert(value, src, dst, units=DEFAULT_UNITS):
    """Convert ``value`` from unit ``src`` to unit ``dst``."""
    return units.convert(value, src, dst)

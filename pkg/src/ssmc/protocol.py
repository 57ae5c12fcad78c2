"""Sequential response-suppression protocol over a family of species.

``run_ssmc`` drives an ensemble through a pump segment followed by one
tracked segment per species, during which that species' optical response is
held at zero by its tracking control.  The resulting pulse and per-species
response traces form a ``ResponseLibrary`` that is independent of any
concentration vector.  ``run_naive`` produces the transform-limited baseline,
``extend_library`` appends a species at linear cost, and ``assemble_A``
builds the least-squares matrix used for concentration recovery.
"""

from dataclasses import dataclass, replace

import numpy as np

from .morse import MorseEnsemble, MorseSpec
from .hubbard import HubbardEnsemble, HubbardSpec

FORMAT_VERSION = 1

FAMILIES = {
    "morse": (MorseEnsemble, MorseSpec),
    "hubbard": (HubbardEnsemble, HubbardSpec),
}


def make_ensemble(family, specs, dt, labels=None):
    try:
        ens_cls, _ = FAMILIES[family]
    except KeyError:
        raise ValueError(f"unknown model family {family!r}") from None
    return ens_cls(specs, dt, labels=labels)


def spec_from_dict(family, d):
    try:
        _, spec_cls = FAMILIES[family]
    except KeyError:
        raise ValueError(f"unknown model family {family!r}") from None
    return spec_cls.from_dict(d)


@dataclass(frozen=True, eq=False)
class ResponseLibrary:
    """A control pulse plus every species' sampled optical response.

    ``pulse`` holds the nominal field samples at grid times; ``applied``
    holds the per-step values actually fed to the propagators (these differ
    for the molecular stack, whose stepping averages adjacent samples).
    Playback and extension consume ``applied`` so that replayed trajectories
    are bit-identical to the original run.

    For an SSMC library the pulse spans (n_s + 1) segments of n_t samples
    (pump first); segment i >= 1 suppresses species ``order[i - 1]``.  A
    naive library spans n_s * n_t samples with no segment map.
    """

    family: str
    kind: str                      # "ssmc" | "naive"
    control_kind: str              # SampledField kind value
    labels: list
    species: list                  # list of spec dicts
    dt: float
    n_t: int
    order: list | None
    pulse: np.ndarray
    applied: np.ndarray
    traces: np.ndarray             # (n_species, len(pulse))
    final_states: list | None = None
    step_count: int = 0
    extension_step_count: int = 0
    format_version: int = FORMAT_VERSION

    @property
    def n_species(self):
        return len(self.species)

    @property
    def n_segments(self):
        return self.pulse.size // self.n_t

    def segment(self, i):
        """Sample range [lo, hi) of segment i (segment 0 is the pump)."""
        return i * self.n_t, (i + 1) * self.n_t

    def specs(self):
        return [spec_from_dict(self.family, d) for d in self.species]


def run_ssmc(ensemble, pump, order=None, save_states=True):
    """Build the suppression pulse and response library for ``ensemble``.

    ``pump`` is the pump-segment field; the segment duration T and n_t are
    taken from its grid.  ``order`` is the suppression order (a permutation
    of species indices; identity by default, matching ensembles constructed
    in ascending mass / onsite-repulsion order).
    """
    n = len(ensemble)
    if n < 2:
        raise ValueError("need at least two species (a single response column "
                         "would be structurally near-zero)")
    if abs(pump.grid.dt - ensemble.dt) > 1e-15 * ensemble.dt:
        raise ValueError("pump grid dt does not match ensemble dt")
    order = list(range(n)) if order is None else [int(i) for i in order]
    if sorted(order) != list(range(n)):
        raise ValueError(f"order {order} is not a permutation of 0..{n - 1}")

    n_t = pump.grid.n_steps
    applied_pump = ensemble.effective_fields(pump.values)
    pulse_parts = [np.asarray(pump.values, dtype=float)]
    applied_parts = [applied_pump]
    resp_parts = [ensemble.run_driven_segment(pump.values, applied_pump)]
    for s in order:
        samples, applied, resp = ensemble.run_tracked_segment(s, n_t)
        pulse_parts.append(samples)
        applied_parts.append(applied)
        resp_parts.append(resp)

    return ResponseLibrary(
        family=ensemble.family, kind="ssmc", control_kind=pump.kind.value,
        labels=list(ensemble.labels), species=ensemble.spec_dicts(),
        dt=ensemble.dt, n_t=n_t, order=order,
        pulse=np.concatenate(pulse_parts),
        applied=np.concatenate(applied_parts),
        traces=np.concatenate(resp_parts, axis=1),
        final_states=ensemble.get_states() if save_states else None,
        step_count=ensemble.step_count)


def run_naive(ensemble, pulse, save_states=False):
    """Drive all species with one transform-limited pulse spanning n_s * T."""
    n = len(ensemble)
    if n < 2:
        raise ValueError("need at least two species")
    total = pulse.grid.n_steps
    if total % n != 0:
        raise ValueError(f"pulse length {total} not divisible by {n} species")
    applied = ensemble.effective_fields(pulse.values)
    traces = ensemble.run_driven_segment(pulse.values, applied)
    return ResponseLibrary(
        family=ensemble.family, kind="naive", control_kind=pulse.kind.value,
        labels=list(ensemble.labels), species=ensemble.spec_dicts(),
        dt=ensemble.dt, n_t=total // n, order=None,
        pulse=np.asarray(pulse.values, dtype=float).copy(), applied=applied,
        traces=traces,
        final_states=ensemble.get_states() if save_states else None,
        step_count=ensemble.step_count)


def extend_library(lib, new_species, label=None, save_states=True):
    """Append one species to an SSMC library without rebuilding it.

    The new species is replayed through the stored applied fields, then
    tracked for one fresh segment while the saved species resume from their
    stored final states.  The returned library's pulse and traces are
    bit-identical to a full rebuild with the same suppression order.
    """
    if lib.kind != "ssmc":
        raise ValueError("only SSMC libraries can be extended")
    if lib.final_states is None:
        raise ValueError("library was built without saved final states")
    if isinstance(new_species, dict):
        new_species = spec_from_dict(lib.family, new_species)
    label = label if label is not None else f"species-{lib.n_species}"

    # replay the existing pulse over the newcomer
    solo = make_ensemble(lib.family, [new_species], lib.dt, labels=[label])
    new_trace_parts = []
    for i in range(lib.n_segments):
        lo, hi = lib.segment(i)
        new_trace_parts.append(
            solo.run_driven_segment(lib.pulse[lo:hi], lib.applied[lo:hi]))
    ext_steps = solo.step_count

    # one fresh tracked segment with everybody stepping
    combined = make_ensemble(lib.family, lib.specs() + [new_species], lib.dt,
                             labels=list(lib.labels) + [label])
    combined.step_count = 0
    combined.set_states(lib.final_states + solo.get_states())
    samples, applied, resp = combined.run_tracked_segment(lib.n_species,
                                                          lib.n_t)
    ext_steps += combined.step_count

    new_trace = np.concatenate([np.concatenate(new_trace_parts, axis=1),
                                resp[-1:, :]], axis=1)
    old_traces = np.concatenate([lib.traces, resp[:-1, :]], axis=1)
    return replace(
        lib,
        labels=list(lib.labels) + [label],
        species=lib.species + [new_species.to_dict()],
        order=list(lib.order) + [lib.n_species],
        pulse=np.concatenate([lib.pulse, samples]),
        applied=np.concatenate([lib.applied, applied]),
        traces=np.concatenate([old_traces, new_trace], axis=0),
        final_states=combined.get_states() if save_states else None,
        step_count=lib.step_count + ext_steps,
        extension_step_count=ext_steps)


def assemble_A(lib, hard_zero_blocks=False):
    """Stack the library traces into the (n_s * n_t x n_s) recovery matrix.

    SSMC: column s stacks species-s segment vectors in segment order, pump
    window excluded; suppressed blocks keep their computed (near-zero)
    values unless ``hard_zero_blocks`` idealizes them to exact zeros.
    Naive: column s is the species' full trace.
    """
    n_s, n_t = lib.n_species, lib.n_t
    if lib.traces.shape != (n_s, lib.pulse.size):
        raise ValueError("library traces are incomplete")
    if lib.kind == "naive":
        return lib.traces.T.copy()
    A = np.empty((n_s * n_t, n_s))
    for i in range(1, lib.n_segments):
        lo, hi = lib.segment(i)
        A[(i - 1) * n_t:i * n_t, :] = lib.traces[:, lo:hi].T
        if hard_zero_blocks:
            A[(i - 1) * n_t:i * n_t, lib.order[i - 1]] = 0.0
    return A

"""Versioned text persistence for response libraries.

The format is line oriented and human readable: a header of ``key value``
lines, species parameter lines, then one line per numeric array with values
encoded at 17 significant digits (which round-trips IEEE doubles exactly).
"""

import numpy as np

from .protocol import FORMAT_VERSION, ResponseLibrary

MAGIC = "ssmc-library"


def _fmt(x):
    return format(float(x), ".17g")


def _fmt_array(a):
    return " ".join(_fmt(x) for x in np.asarray(a).ravel())


def _parse_array(text):
    parts = text.split()
    if not parts:
        return np.array([])
    return np.array(parts, dtype=float)


def save_library(lib, path):
    """Write ``lib`` to ``path``; load(save(lib)) is numerically bit-exact."""
    lines = [f"{MAGIC} {lib.format_version}",
             f"family {lib.family}",
             f"kind {lib.kind}",
             f"control {lib.control_kind}",
             f"n_species {lib.n_species}",
             f"n_t {lib.n_t}",
             f"dt {_fmt(lib.dt)}",
             f"step_count {lib.step_count}",
             f"extension_step_count {lib.extension_step_count}",
             "order " + (" ".join(str(i) for i in lib.order)
                         if lib.order is not None else "-")]
    for i, label in enumerate(lib.labels):
        lines.append(f"label {i} {label}")
    for i, d in enumerate(lib.species):
        pairs = " ".join(f"{k}={_fmt(v) if isinstance(v, float) else v}"
                         for k, v in d.items())
        lines.append(f"species {i} {pairs}")
    lines.append("pulse " + _fmt_array(lib.pulse))
    lines.append("applied " + _fmt_array(lib.applied))
    for i in range(lib.n_species):
        lines.append(f"trace {i} " + _fmt_array(lib.traces[i]))
    if lib.final_states is not None:
        for i, psi in enumerate(lib.final_states):
            interleaved = np.empty(2 * psi.size)
            interleaved[0::2] = np.real(psi)
            interleaved[1::2] = np.imag(psi)
            lines.append(f"state {i} " + _fmt_array(interleaved))
    lines.append("end")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_library(path):
    """Read a library written by :func:`save_library`."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith(MAGIC):
        raise ValueError(f"{path}: not a response-library file")
    version = int(lines[0].split()[1])
    if version > FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported format version {version}")

    header = {}
    labels = {}
    species = {}
    traces = {}
    states = {}
    pulse = applied = None
    for line in lines[1:]:
        if line == "end":
            break
        key, _, rest = line.partition(" ")
        if key == "label":
            i, _, text = rest.partition(" ")
            labels[int(i)] = text
        elif key == "species":
            i, _, pairs = rest.partition(" ")
            d = {}
            for pair in pairs.split():
                k, _, v = pair.partition("=")
                d[k] = v
            species[int(i)] = d
        elif key == "pulse":
            pulse = _parse_array(rest)
        elif key == "applied":
            applied = _parse_array(rest)
        elif key == "trace":
            i, _, text = rest.partition(" ")
            traces[int(i)] = _parse_array(text)
        elif key == "state":
            i, _, text = rest.partition(" ")
            flat = _parse_array(text)
            states[int(i)] = flat[0::2] + 1j * flat[1::2]
        else:
            header[key] = rest
    else:
        raise ValueError(f"{path}: truncated library file (missing 'end')")

    n_species = int(header["n_species"])
    if pulse is None or applied is None or len(traces) != n_species:
        raise ValueError(f"{path}: missing arrays")
    order = header["order"]
    return ResponseLibrary(
        family=header["family"], kind=header["kind"],
        control_kind=header["control"],
        labels=[labels[i] for i in range(n_species)],
        species=[species[i] for i in range(n_species)],
        dt=float(header["dt"]), n_t=int(header["n_t"]),
        order=None if order == "-" else [int(i) for i in order.split()],
        pulse=pulse, applied=applied,
        traces=np.vstack([traces[i] for i in range(n_species)]),
        final_states=([states[i] for i in range(n_species)]
                      if len(states) == n_species else None),
        step_count=int(header["step_count"]),
        extension_step_count=int(header["extension_step_count"]),
        format_version=version)

"""Figure spec files: flat ``key = value`` text naming kind, inputs, output.

Example::

    # half-chain entropy growth, two protocols overlaid
    kind   = hcee_evolution
    hcee   = runs/hcee_nn_thermal.csv, runs/hcee_mbl.csv
    output = figs/hcee.png
    title  = Half-chain entropy growth

One input role per data kind (``fits``, ``results``, ``points``,
``spectral``, ``hcee``, ``mi``); only ``hcee`` accepts a comma-separated
list of files. ``time`` selects one time slice where the data carries
several; ``xscale``/``yscale`` override the axis defaults. Referenced
input files must exist when the spec is parsed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import SpecError

KINDS = ("omega_profile", "scatter_S_vs_n1", "parity_S_vs_fit",
         "ratio_histogram", "hcee_evolution", "mutual_info_profile")

# role -> (kinds that require it, kinds that may carry it, multi-file?)
_REQUIRED_ROLES = {
    "omega_profile": ("fits",),
    "scatter_S_vs_n1": ("results",),
    "parity_S_vs_fit": ("points",),
    "ratio_histogram": ("spectral",),
    "hcee_evolution": ("hcee",),
    "mutual_info_profile": ("mi",),
}
_OPTIONAL_KEYS = {
    "omega_profile": ("time",),
    "scatter_S_vs_n1": ("haar", "time"),
    "parity_S_vs_fit": ("time",),
    "ratio_histogram": (),
    "hcee_evolution": ("xscale",),
    "mutual_info_profile": ("time", "yscale"),
}
_MULTI_ROLES = ("hcee",)
_ROLE_KEYS = ("fits", "results", "haar", "points", "spectral", "hcee", "mi")
_COMMON_KEYS = ("kind", "output", "title")
_SCALES = ("linear", "log")


@dataclass(frozen=True)
class FigureSpec:
    """One figure to render: kind, input files by role, output image path."""

    kind: str
    output: Path
    inputs: dict[str, tuple[Path, ...]] = field(default_factory=dict)
    title: str | None = None
    time: float | None = None
    xscale: str | None = None
    yscale: str | None = None

    def input_path(self, role: str) -> Path:
        return self.inputs[role][0]


def _parse_lines(path: Path) -> dict[str, str]:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecError(f"{path}: cannot read: {exc}") from exc
    pairs: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpecError(f"{path}: line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise SpecError(f"{path}: line {lineno}: expected 'key = value', got {raw!r}")
        if key in pairs:
            raise SpecError(f"{path}: line {lineno}: duplicate key '{key}'")
        pairs[key] = value
    return pairs


def parse_spec_file(path: str | Path) -> FigureSpec:
    path = Path(path)
    pairs = _parse_lines(path)

    if "kind" not in pairs:
        raise SpecError(f"{path}: missing required key 'kind'")
    kind = pairs.pop("kind")
    if kind not in KINDS:
        raise SpecError(f"{path}: unknown figure kind '{kind}'; choose one of "
                        f"{', '.join(KINDS)}")
    if "output" not in pairs:
        raise SpecError(f"{path}: missing required key 'output'")
    output = Path(pairs.pop("output"))

    allowed = set(_REQUIRED_ROLES[kind]) | set(_OPTIONAL_KEYS[kind]) | {"title"}
    for key in pairs:
        if key not in allowed:
            hint = (f"not used by kind '{kind}'" if key in _ROLE_KEYS + _COMMON_KEYS
                    + ("time", "xscale", "yscale") else "unknown key")
            raise SpecError(f"{path}: key '{key}': {hint}; allowed here: "
                            f"{', '.join(sorted(allowed))}")

    inputs: dict[str, tuple[Path, ...]] = {}
    for role in _REQUIRED_ROLES[kind] + tuple(r for r in _OPTIONAL_KEYS[kind]
                                              if r in _ROLE_KEYS):
        if role not in pairs:
            if role in _REQUIRED_ROLES[kind]:
                raise SpecError(f"{path}: missing required key '{role}' "
                                f"for kind '{kind}'")
            continue
        files = tuple(Path(p.strip()) for p in pairs.pop(role).split(","))
        if len(files) > 1 and role not in _MULTI_ROLES:
            raise SpecError(f"{path}: key '{role}' takes a single file, got {len(files)}")
        for file in files:
            if not file.is_file():
                raise SpecError(f"{path}: key '{role}': input file not found: {file}")
        inputs[role] = files

    time = None
    if "time" in pairs:
        text = pairs.pop("time")
        try:
            time = float(text)
        except ValueError as exc:
            raise SpecError(f"{path}: key 'time': cannot parse {text!r} as a number") from exc

    scales = {}
    for key in ("xscale", "yscale"):
        if key in pairs:
            value = pairs.pop(key)
            if value not in _SCALES:
                raise SpecError(f"{path}: key '{key}' must be one of {', '.join(_SCALES)}, "
                                f"got '{value}'")
            scales[key] = value

    return FigureSpec(kind=kind, output=output, inputs=inputs,
                      title=pairs.pop("title", None), time=time,
                      xscale=scales.get("xscale"), yscale=scales.get("yscale"))

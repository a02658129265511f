"""Config-driven ensemble campaigns over the dynamical protocols.

One sample = one jointly drawn (disorder realization, initial state,
circuit stream), evolved to every requested time point and measured
across all representative bipartitions, the two-point mutual-information
separations, and the contiguous half-chain cut. Sample s always uses the
RNG stream seeded by [master_seed, s] with a fixed draw order (disorder,
then initial state, then gates), so outputs are bitwise reproducible no
matter how samples are scheduled across threads.
"""
from __future__ import annotations

import csv
import io
import json
import time as _time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from ._version import __version__
from .basis import SectorBasis, StateVector, build_sector_basis, sample_random_product_state
from .bipartitions import RepresentativeSet, enumerate_representatives
from .entanglement import MaskEntropyEvaluator, haar_sector_entropy_mc, page_entropy_bits
from .errors import ParameterError, SchemaError
from .evolution import (DEFAULT_DIM_CAP, apply_gate_at, diagonalize, energy_expectation,
                        evolve_spectral, FloquetMap, floquet_step, make_floquet_map,
                        materialize_floquet_unitary)
from .operators import (CouplingParams, DisorderRealization, build_floquet_parts, build_h_mf,
                        build_h_nn, build_h_nnn, sample_disorder)
from .spectral_stats import (HISTOGRAM_BINS, level_spacing_ratios, middle_third,
                             reference_means)
from .tomography import FitResult, fit_geometry

HAMILTONIAN_PROTOCOLS = ("nn_thermal", "nnn_thermal", "mbl", "mixed_field", "nn_random_product")
PROTOCOLS = HAMILTONIAN_PROTOCOLS + ("rqc", "floquet")

# sector-resident protocols; the rest evolve in the full 2^L space
SECTOR_PROTOCOLS = ("nn_thermal", "nnn_thermal", "mbl", "rqc", "floquet")

_DEFAULT_TIMES = {
    "nn_thermal": (0.1, 2.0, 1000.0),
    "nnn_thermal": (0.1, 2.0, 1000.0),
    "mixed_field": (0.1, 2.0, 1000.0),
    "nn_random_product": (0.1, 2.0, 1000.0),
    "mbl": (0.1, 10.0, 1e12),
    "rqc": (5, 100, 2000),
    "floquet": (1, 3, 200),
}



@dataclass(frozen=True)
class ExperimentConfig:
    """Flat campaign description; every field maps to one config-file key."""

    protocol: str = "nn_thermal"
    L: int = 12
    n0_list: tuple[int, ...] | None = None
    time_points: tuple[float, ...] | None = None
    n_samples: int = 200
    master_seed: int = 0
    Jz: float = 0.5
    gamma: float = 24.0 / 25.0
    W: float | None = None
    W_g: float | None = None
    T0: float = 1.0
    T1: float = 2.5
    orbit_average: bool = True
    out_dir: str = "results"
    threads: int = 1
    cap: int = DEFAULT_DIM_CAP
    n_up: int | None = None       # haar subcommand: sector size, None = full space
    haar_mask: int | None = None  # haar subcommand: cut, default contiguous half chain

    def normalized(self) -> "ExperimentConfig":
        """Resolve protocol-dependent defaults and validate."""
        if self.protocol not in PROTOCOLS:
            raise ParameterError(
                f"unknown protocol '{self.protocol}'; choose one of {', '.join(PROTOCOLS)}")
        if self.L % 2 or not 4 <= self.L <= 16:
            raise ParameterError(f"L must be even with 4 <= L <= 16, got {self.L}")
        if self.n_samples < 1:
            raise ParameterError("n_samples must be positive")
        if self.threads < 1:
            raise ParameterError("threads must be positive")
        W = self.W if self.W is not None else (5.0 if self.protocol in ("mbl", "floquet") else 0.5)
        W_g = self.W_g if self.W_g is not None else 0.5
        n0_list = tuple(self.n0_list) if self.n0_list else (self.L // 2,)
        for n0 in n0_list:
            if not 1 <= n0 <= self.L // 2:
                raise ParameterError(f"n0 must lie in [1, L/2], got {n0}")
        times = tuple(self.time_points) if self.time_points else _DEFAULT_TIMES[self.protocol]
        if self.protocol in ("rqc", "floquet"):
            steps = tuple(int(t) for t in times)
            if any(s != t for s, t in zip(steps, times)) or any(s < 0 for s in steps):
                raise ParameterError("circuit depths / period counts must be nonnegative integers")
            if any(b <= a for a, b in zip(steps, steps[1:])):
                raise ParameterError("circuit depths / period counts must be strictly ascending")
            times = steps
        elif any(t < 0 for t in times):
            raise ParameterError("evolution times must be nonnegative")
        return replace(self, W=W, W_g=W_g, n0_list=n0_list, time_points=times)

    def params(self) -> CouplingParams:
        return CouplingParams(Jz=self.Jz, gamma=self.gamma, W=self.W, W_g=self.W_g,
                              T0=self.T0, T1=self.T1)

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, tuple):
                value = list(value)
            out[f.name] = value
        return out


_BOOL_WORDS = {"true": True, "yes": True, "on": True, "1": True,
               "false": False, "no": False, "off": False, "0": False}


def _parse_value(key: str, text: str):
    kind = {
        "protocol": str, "out_dir": str,
        "L": int, "n_samples": int, "master_seed": int, "threads": int, "cap": int,
        "haar_mask": int,
        "Jz": float, "gamma": float, "W": float, "W_g": float, "T0": float, "T1": float,
        "orbit_average": bool,
        "n0_list": "int_list", "time_points": "float_list",
        "n_up": "n_up",
    }.get(key)
    if kind is None:
        raise SchemaError(f"unknown config key '{key}'")
    try:
        if kind is str:
            return text
        if kind is int:
            return int(text)
        if kind is float:
            return float(text)
        if kind is bool:
            return _BOOL_WORDS[text.lower()]
        if kind == "int_list":
            return tuple(int(part) for part in text.split(","))
        if kind == "float_list":
            return tuple(float(part) for part in text.split(","))
        if kind == "n_up":
            return None if text.lower() == "full" else int(text)
    except (ValueError, KeyError) as exc:
        raise SchemaError(f"config key '{key}': cannot parse value '{text}'") from exc
    raise AssertionError(f"unhandled kind for {key}")


def parse_config_file(path: str | Path) -> dict:
    """Flat key = value config; '#' starts a comment, blank lines ignored."""
    values: dict = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SchemaError(f"{path}:{lineno}: expected 'key = value', got '{raw.strip()}'")
        key, text = (part.strip() for part in line.split("=", 1))
        values[key] = _parse_value(key, text)
    return values


def load_config(path: str | Path | None, **overrides) -> ExperimentConfig:
    """Config from file plus command-line overrides, normalized."""
    values = parse_config_file(path) if path else {}
    values.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(**values).normalized()


# ---------------------------------------------------------------------------
# measurement plan


class _MeasurementPlan:
    """Flat mask list shared by every (sample, time) evaluation, plus the
    index bookkeeping to scatter entropies back to representatives, the
    mutual-information separations, and the half-chain cut."""

    def __init__(self, cfg: ExperimentConfig):
        L = cfg.L
        self.L = L
        self.rep_sets: dict[int, RepresentativeSet] = {
            n0: enumerate_representatives(L, n0) for n0 in cfg.n0_list}
        masks: list[int] = []
        self.rep_slices: dict[int, list[slice]] = {}
        for n0, rep_set in self.rep_sets.items():
            slices = []
            for rep, orbit in zip(rep_set.reps, rep_set.orbits):
                members = orbit if cfg.orbit_average else np.array([rep])
                slices.append(slice(len(masks), len(masks) + len(members)))
                masks.extend(int(m) for m in members)
            self.rep_slices[n0] = slices
        self.mi_triples: list[tuple[int, int, int]] = []
        for j in range(1, L // 2 + 1):
            base = len(masks)
            masks.extend([1, 1 << j, 1 | (1 << j)])
            self.mi_triples.append((base, base + 1, base + 2))
        self.hcee_index = len(masks)
        masks.append((1 << (L // 2)) - 1)
        self.masks = masks
        self._evaluate = MaskEntropyEvaluator(masks, L)

    def measure(self, full_amplitudes: np.ndarray):
        ent = self._evaluate(full_amplitudes)
        reps = {n0: np.array([ent[s].mean() for s in slices])
                for n0, slices in self.rep_slices.items()}
        mi = np.array([ent[a] + ent[b] - ent[c] for a, b, c in self.mi_triples])
        return reps, mi, float(ent[self.hcee_index])


# ---------------------------------------------------------------------------
# protocol runners


@dataclass
class SeriesStats:
    """Mean and standard error over samples, per time point."""

    times: tuple
    mean: np.ndarray
    stderr: np.ndarray


@dataclass
class ProtocolResult:
    config: ExperimentConfig
    rep_sets: dict[int, RepresentativeSet]
    records: dict[int, SeriesStats]           # mean/stderr shaped (n_times, n_reps)
    mutual_information: SeriesStats           # shaped (n_times, L/2)
    half_chain: SeriesStats                   # shaped (n_times,)
    audits: dict
    wall_seconds: float


def _stats(values: np.ndarray, times) -> SeriesStats:
    n = values.shape[0]
    mean = values.mean(axis=0)
    stderr = (values.std(axis=0, ddof=1) / np.sqrt(n)) if n > 1 else np.zeros_like(mean)
    return SeriesStats(times=tuple(times), mean=mean, stderr=stderr)


def _initial_sector_state(basis: SectorBasis, rng: np.random.Generator) -> StateVector:
    amplitudes = np.zeros(basis.dim, dtype=complex)
    amplitudes[rng.integers(basis.dim)] = 1.0
    return StateVector(basis.L, amplitudes, basis)


def _block_weights(full_amplitudes: np.ndarray, popcounts: np.ndarray, L: int) -> np.ndarray:
    weights = np.zeros(L + 1)
    np.add.at(weights, popcounts, np.abs(full_amplitudes) ** 2)
    return weights


def _build_hamiltonian(cfg: ExperimentConfig, disorder: DisorderRealization,
                       basis: SectorBasis | None):
    params = cfg.params()
    if cfg.protocol == "nnn_thermal":
        return build_h_nnn(cfg.L, params, disorder, basis)
    if cfg.protocol == "mixed_field":
        return build_h_mf(cfg.L, params, disorder, basis)
    return build_h_nn(cfg.L, params, disorder, basis)


def run_protocol(config: ExperimentConfig) -> ProtocolResult:
    """Ensemble campaign for one protocol; see the module docstring."""
    cfg = config.normalized()
    started = _time.perf_counter()
    plan = _MeasurementPlan(cfg)
    L, n_samples = cfg.L, cfg.n_samples
    times = cfg.time_points
    n_times = len(times)
    sector = build_sector_basis(L, L // 2) if cfg.protocol in SECTOR_PROTOCOLS else None
    popcounts = None
    if cfg.protocol == "nn_random_product":
        masks = np.arange(1 << L)
        popcounts = np.array([int(m).bit_count() for m in masks])
    shared_floquet = None
    if cfg.protocol == "floquet":
        # the hopping part carries no disorder, so its eigenbasis is shared
        _, h1 = build_floquet_parts(L, DisorderRealization(h=np.zeros(L)), sector)
        shared_floquet = (h1, diagonalize(h1, cfg.cap))

    rep_values = {n0: np.zeros((n_samples, n_times, len(plan.rep_sets[n0])))
                  for n0 in cfg.n0_list}
    mi_values = np.zeros((n_samples, n_times, L // 2))
    hcee_values = np.zeros((n_samples, n_times))
    norm_drift = np.zeros(n_samples)
    energy_drift = np.full(n_samples, np.nan)
    energy_scale = np.full(n_samples, np.nan)
    block_drift = np.full(n_samples, np.nan)

    def record(sample: int, ti: int, state: StateVector):
        full = state.to_full_array()
        reps, mi, hcee = plan.measure(full)
        for n0 in cfg.n0_list:
            rep_values[n0][sample, ti] = reps[n0]
        mi_values[sample, ti] = mi
        hcee_values[sample, ti] = hcee
        norm_drift[sample] = max(norm_drift[sample], abs(state.norm() - 1.0))
        return full

    def run_hamiltonian_sample(sample: int, rng: np.random.Generator):
        needs_g = cfg.protocol == "mixed_field"
        disorder = sample_disorder(cfg.W, L, rng, cfg.W_g if needs_g else None)
        hamiltonian = _build_hamiltonian(cfg, disorder, sector)
        if cfg.protocol in ("mixed_field", "nn_random_product"):
            psi0 = sample_random_product_state(L, rng)
        else:
            psi0 = _initial_sector_state(sector, rng)
        decomposition = diagonalize(hamiltonian, cfg.cap)
        e0 = energy_expectation(hamiltonian, psi0)
        energy_scale[sample] = decomposition.spectral_norm
        weights0 = None
        if popcounts is not None:
            weights0 = _block_weights(psi0.amplitudes, popcounts, L)
        drift_e = 0.0
        drift_b = 0.0
        for ti, t in enumerate(times):
            state = evolve_spectral(decomposition, psi0, float(t))
            full = record(sample, ti, state)
            drift_e = max(drift_e, abs(energy_expectation(hamiltonian, state) - e0))
            if weights0 is not None:
                drift_b = max(drift_b, float(np.abs(
                    _block_weights(full, popcounts, L) - weights0).max()))
        energy_drift[sample] = drift_e
        if weights0 is not None:
            block_drift[sample] = drift_b

    def run_rqc_sample(sample: int, rng: np.random.Generator):
        state = _initial_sector_state(sector, rng)
        depth = 0
        for ti, target in enumerate(times):
            while depth < target:
                state = apply_gate_at(state, int(rng.integers(L)))
                depth += 1
            record(sample, ti, state)

    def run_floquet_sample(sample: int, rng: np.random.Generator):
        disorder = sample_disorder(cfg.W, L, rng)
        h0, _ = build_floquet_parts(L, disorder, sector)
        diag = np.zeros(h0.dim)
        diag[h0.rows] = h0.vals.real
        h1, h1_spectral = shared_floquet
        fmap = FloquetMap(T0=cfg.T0, T1=cfg.T1, h0_diagonal=diag,
                          h1=h1, h1_spectral=h1_spectral)
        state = _initial_sector_state(sector, rng)
        period = 0
        for ti, target in enumerate(times):
            while period < target:
                state = floquet_step(state, fmap)
                period += 1
            record(sample, ti, state)

    runner = {"rqc": run_rqc_sample, "floquet": run_floquet_sample}.get(
        cfg.protocol, run_hamiltonian_sample)

    def run_sample(sample: int):
        runner(sample, np.random.default_rng([cfg.master_seed, sample]))

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            # materialize to surface worker exceptions
            list(pool.map(run_sample, range(n_samples)))
    else:
        for sample in range(n_samples):
            run_sample(sample)

    audits = {
        "max_norm_drift": float(norm_drift.max()),
        "norm_tolerance": 1e-10,
    }
    if cfg.protocol in HAMILTONIAN_PROTOCOLS:
        audits["max_energy_drift"] = float(np.nanmax(energy_drift))
        audits["energy_tolerance"] = float(1e-8 * np.nanmax(energy_scale))
    if cfg.protocol in SECTOR_PROTOCOLS:
        # sector-resident states embed with exact zeros outside the sector
        audits["sector_leak"] = 0.0
    if popcounts is not None:
        audits["max_magnetization_block_drift"] = float(np.nanmax(block_drift))

    records = {n0: _stats(rep_values[n0], times) for n0 in cfg.n0_list}
    return ProtocolResult(
        config=cfg,
        rep_sets=plan.rep_sets,
        records=records,
        mutual_information=_stats(mi_values, times),
        half_chain=_stats(hcee_values, times),
        audits=audits,
        wall_seconds=_time.perf_counter() - started,
    )


# ---------------------------------------------------------------------------
# persistence


def _write_csv(path: Path, header: list[str], rows) -> None:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    path.write_text(buffer.getvalue(), encoding="utf-8")


def _fmt(value: float) -> str:
    # shortest decimal that round-trips the float64 exactly
    return repr(float(value))


def results_csv_path(out_dir: str | Path, protocol: str, n0: int) -> Path:
    return Path(out_dir) / f"results_{protocol}_n0{n0}.csv"


def persist_protocol_result(result: ProtocolResult) -> list[Path]:
    """Write the per-slice results CSVs, MI/HCEE series, and the manifest."""
    cfg = result.config
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    half = cfg.L // 2
    for n0, rep_set in result.rep_sets.items():
        stats = result.records[n0]
        header = (["time", "rep_id", "mask"] + [f"n_{j}" for j in range(1, half + 1)]
                  + ["mean_S", "stderr"])
        rows = []
        for ti, t in enumerate(stats.times):
            for ri, rep in enumerate(rep_set.reps):
                rows.append([_fmt(float(t)), ri, rep,
                             *[int(x) for x in rep_set.geometry[ri]],
                             _fmt(stats.mean[ti, ri]), _fmt(stats.stderr[ti, ri])])
        path = results_csv_path(out, cfg.protocol, n0)
        _write_csv(path, header, rows)
        written.append(path)

    mi = result.mutual_information
    path = out / f"mi_{cfg.protocol}.csv"
    _write_csv(path, ["time", "j", "mean_I", "stderr"],
               [[_fmt(float(t)), j + 1, _fmt(mi.mean[ti, j]), _fmt(mi.stderr[ti, j])]
                for ti, t in enumerate(mi.times) for j in range(half)])
    written.append(path)

    hc = result.half_chain
    path = out / f"hcee_{cfg.protocol}.csv"
    _write_csv(path, ["time", "mean_S", "stderr"],
               [[_fmt(float(t)), _fmt(hc.mean[ti]), _fmt(hc.stderr[ti])]
                for ti, t in enumerate(hc.times)])
    written.append(path)

    manifest = {
        "version": __version__,
        "config": cfg.to_dict(),
        "sample_seeds": [[cfg.master_seed, s] for s in range(cfg.n_samples)],
        "audits": result.audits,
        "outputs": [p.name for p in written],
        "timing": {"wall_seconds": result.wall_seconds},
    }
    path = out / f"manifest_{cfg.protocol}.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    written.append(path)
    return written


def simulate(config: ExperimentConfig) -> tuple[ProtocolResult, list[Path]]:
    result = run_protocol(config)
    return result, persist_protocol_result(result)


# ---------------------------------------------------------------------------
# tomography over persisted or in-memory records


def load_result_records(out_dir: str | Path, protocol: str, n0: int):
    """Parse one results CSV back into arrays (times, masks, geometry, mean, stderr)."""
    path = results_csv_path(out_dir, protocol, n0)
    if not path.exists():
        raise SchemaError(f"missing results file {path}; run simulate first")
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path} holds no data rows")
    geometry_cols = [key for key in rows[0] if key.startswith("n_")]
    times = sorted({float(row["time"]) for row in rows})
    masks_by_time = {}
    for row in rows:
        masks_by_time.setdefault(float(row["time"]), []).append(row)
    first = masks_by_time[times[0]]
    masks = [int(row["mask"]) for row in first]
    geometry = np.array([[int(row[col]) for col in geometry_cols] for row in first])
    mean = np.array([[float(row["mean_S"]) for row in masks_by_time[t]] for t in times])
    stderr = np.array([[float(row["stderr"]) for row in masks_by_time[t]] for t in times])
    return times, masks, geometry, mean, stderr


def run_tomography(config: ExperimentConfig,
                   result: ProtocolResult | None = None) -> tuple[list[FitResult], list[Path]]:
    """Fit every (time, n0) slice and persist fits plus per-point predictions."""
    cfg = config.normalized()
    out = Path(cfg.out_dir)
    fits: list[FitResult] = []
    point_rows = []
    for n0 in cfg.n0_list:
        if result is not None:
            rep_set = result.rep_sets[n0]
            stats = result.records[n0]
            times = [float(t) for t in stats.times]
            masks = list(rep_set.reps)
            geometry = rep_set.geometry
            mean = stats.mean
        else:
            times, masks, geometry, mean, _ = load_result_records(out, cfg.protocol, n0)
        for ti, t in enumerate(times):
            fit = fit_geometry(geometry, mean[ti], L=cfg.L, n0=n0,
                               protocol=cfg.protocol, time=float(t))
            fits.append(fit)
            for ri, mask in enumerate(masks):
                point_rows.append([_fmt(float(t)), n0, ri, mask,
                                   _fmt(float(mean[ti, ri])), _fmt(float(fit.predicted[ri])),
                                   _fmt(float(fit.residuals[ri]))])
    out.mkdir(parents=True, exist_ok=True)
    fits_path = out / f"fits_{cfg.protocol}.json"
    payload = [dict(fit.to_record(), hierarchy=_json_safe(fit.hierarchy)) for fit in fits]
    fits_path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    points_path = out / f"fit_points_{cfg.protocol}.csv"
    _write_csv(points_path, ["time", "n0", "rep_id", "mask", "mean_S", "fitted_S", "residual"],
               point_rows)
    return fits, [fits_path, points_path]


def _json_safe(value: float):
    return value if np.isfinite(value) else None


# ---------------------------------------------------------------------------
# spectral diagnostics


def run_spectral_diagnostics(config: ExperimentConfig) -> tuple[dict, list[Path]]:
    """Per-realization gap-ratio statistics for the protocol's operator.

    Hamiltonian protocols use the middle third of each sorted spectrum;
    the driven protocol uses all quasienergies of the materialized period
    unitary. Circuit dynamics has no operator to diagonalize.
    """
    cfg = config.normalized()
    if cfg.protocol == "rqc":
        raise ParameterError("the random-circuit protocol has no spectrum to diagnose")
    L = cfg.L
    sector = build_sector_basis(L, L // 2) if cfg.protocol in SECTOR_PROTOCOLS else None
    shared_floquet = None
    if cfg.protocol == "floquet":
        _, h1 = build_floquet_parts(L, DisorderRealization(h=np.zeros(L)), sector)
        shared_floquet = (h1, diagonalize(h1, cfg.cap))

    per_sample_mean = np.zeros(cfg.n_samples)
    pooled: list[np.ndarray] = []
    for sample in range(cfg.n_samples):
        rng = np.random.default_rng([cfg.master_seed, sample])
        needs_g = cfg.protocol == "mixed_field"
        disorder = sample_disorder(cfg.W, L, rng, cfg.W_g if needs_g else None)
        if cfg.protocol == "floquet":
            h0, _ = build_floquet_parts(L, disorder, sector)
            diag = np.zeros(h0.dim)
            diag[h0.rows] = h0.vals.real
            h1, h1_spectral = shared_floquet
            fmap = FloquetMap(T0=cfg.T0, T1=cfg.T1, h0_diagonal=diag,
                              h1=h1, h1_spectral=h1_spectral)
            _, levels = materialize_floquet_unitary(fmap, cfg.cap)
        else:
            hamiltonian = _build_hamiltonian(cfg, disorder, sector)
            decomposition = diagonalize(hamiltonian, cfg.cap)
            levels = middle_third(decomposition.energies)
        stats = level_spacing_ratios(levels)
        per_sample_mean[sample] = stats.mean_r
        pooled.append(stats.ratios)

    ratios = np.concatenate(pooled)
    densities, bin_edges = np.histogram(ratios, bins=HISTOGRAM_BINS, range=(0.0, 1.0),
                                        density=True)
    r_goe, r_coe, r_poisson = reference_means()
    aggregate = {
        "protocol": cfg.protocol,
        "L": L,
        "W": cfg.W,
        "n_realizations": cfg.n_samples,
        "mean_r": float(ratios.mean()),
        "mean_of_realization_means": float(per_sample_mean.mean()),
        "histogram": {"bin_edges": [float(x) for x in bin_edges],
                      "densities": [float(x) for x in densities]},
        "references": {"goe": r_goe, "coe": r_coe, "poisson": r_poisson},
    }
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"ratios_{cfg.protocol}.csv"
    _write_csv(csv_path, ["seed", "mean_r"],
               [[s, _fmt(per_sample_mean[s])] for s in range(cfg.n_samples)])
    json_path = out / f"spectral_{cfg.protocol}.json"
    json_path.write_text(json.dumps(aggregate, indent=2) + "\n", encoding="utf-8")
    return aggregate, [csv_path, json_path]


# ---------------------------------------------------------------------------
# Haar reference


def run_haar_reference(config: ExperimentConfig) -> tuple[dict, list[Path]]:
    """Monte Carlo sector-Haar (or full-space Haar) entropy for one cut."""
    cfg = config.normalized()
    L = cfg.L
    mask = cfg.haar_mask if cfg.haar_mask is not None else (1 << (L // 2)) - 1
    rng = np.random.default_rng([cfg.master_seed, 0])
    mean, stderr = haar_sector_entropy_mc(L, cfg.n_up, mask, cfg.n_samples, rng)
    n0 = int(mask).bit_count()
    payload = {
        "L": L,
        "n_up": cfg.n_up,
        "mask": mask,
        "n_samples": cfg.n_samples,
        "mean_entropy_bits": mean,
        "stderr": stderr,
        "page_full_space_bits": page_entropy_bits(1 << n0, 1 << (L - n0)),
    }
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "haar.json"
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return payload, [path]

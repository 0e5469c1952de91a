"""Subcommand implementations.

Each command takes a validated :class:`RunConfig`, writes its report files
atomically into the output directory and returns the process exit code:
0 when every check passed, 1 on a failed check, 3 when a resource limit cut a
run short. Configuration problems raise :class:`ConfigError` (exit 2).
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field
import numpy as np

from mwmw.cli.utils import BOLD, CYAN, RESET, dump_json, persist_atomic, status, write_table
from mwmw.criterion.report import CSV_COLUMNS
from mwmw.criterion.sweep import SweepConfig, sweep
from mwmw.cutoff.profile import CutoffProfile
from mwmw.cutoff.taylor import check_slab_derivatives
from mwmw.errors import ConfigError
from mwmw.geometry.lattice import Lattice, estimate_gamma, verify_growth
from mwmw.model.charges import ChargeFamily, builtin_charges, verify_charge_family
from mwmw.model.decay import check_decay_k, check_simple_decay
from mwmw.model.ffunction import check_f_function, f_function_series, is_power_law_f_function, power_law
from mwmw.model.interaction import Interaction
from mwmw.model.io import interaction_from_spec, load_interaction
from mwmw.schemas.lattice import LatticeSpec
from mwmw.schemas.run_config import RunConfig
from mwmw.symmetry.checks import check_generators_commute, check_k_symmetric
from mwmw.symmetry.multiindex import MultiIndex, multi_indices
from mwmw.thermal.suite import SuiteRow, entropy_identity_suite, kms_suite, tracial_suite, uhlmann_suite


EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_RESOURCE = 3

# Largest Hilbert-space dimension of the volume used for generator commutators.
_GENERATOR_VOLUME_DIM = 256


class RunContext(BaseModel):
    """Objects built once from a configuration and shared by the checks."""

    config: RunConfig
    lattice: Lattice
    cf: ChargeFamily
    profile: CutoffProfile
    phi: Optional[Interaction] = None
    model_config = ConfigDict(arbitrary_types_allowed=True)

    @property
    def index_set_I(self) -> Tuple[int, ...]:
        if self.config.symmetry.I:
            return tuple(sorted(self.config.symmetry.I))
        return tuple(self.phi.index_set_I) if self.phi is not None else ()

    @property
    def k(self) -> int:
        if self.config.symmetry.k is not None:
            return self.config.symmetry.k
        if self.phi is not None and self.phi.k_claimed is not None:
            return self.phi.k_claimed
        raise ConfigError("no symmetry order: set symmetry.k or a claimed order on the interaction")

    def indices(self) -> List[MultiIndex]:
        if self.config.symmetry.a:
            return [MultiIndex.of(a) for a in self.config.symmetry.a]
        return multi_indices(self.lattice.dim_ambient, self.k, self.index_set_I)

    def require_interaction(self) -> Interaction:
        if self.phi is None:
            raise ConfigError(f"config {self.config.name!r} has no interaction")
        return self.phi


class CheckItem(BaseModel):
    name: str
    passed: Optional[bool] = Field(description="None when the check does not apply.")
    report: Dict[str, Any] = Field(default_factory=dict)


def build_context(config: RunConfig) -> RunContext:
    try:
        lat = config.lattice.build()
        cf = builtin_charges(config.charges.kind, lat, config.charges.cutoff)
    except (ValueError, OverflowError) as exc:
        raise ConfigError(f"cannot build lattice or charges: {exc}") from exc
    phi = None
    try:
        if config.interaction is not None:
            phi = interaction_from_spec(config.interaction, lat)
        elif config.interaction_file is not None:
            phi = load_interaction(config.interaction_file, lat)
    except ValueError as exc:
        raise ConfigError(f"cannot build interaction: {exc}") from exc
    k = config.symmetry.k if config.symmetry.k is not None else (phi.k_claimed if phi is not None else None)
    orders = [config.cutoff.derivative_order_max] + [sum(a) + 1 for a in config.symmetry.a]
    if k is not None:
        orders.append(k + 1)
    profile = CutoffProfile(
        dim=lat.dim_ambient,
        derivative_order_max=max(orders),
        grid_resolution=config.cutoff.grid_resolution,
        safety=config.cutoff.safety,
    )
    ctx = RunContext(config=config, lattice=lat, cf=cf, profile=profile, phi=phi)
    logging.info(
        "Context %s: %d sites, charges %s, interaction %s",
        config.name,
        lat.n_sites,
        cf.kind,
        phi.name if phi is not None else None,
    )
    return ctx


def _growth_constants(ctx: RunContext) -> Tuple[float, float]:
    geometry = ctx.config.geometry
    recorded = ctx.lattice.growth
    C = geometry.C if geometry.C is not None else (recorded.C if recorded is not None else None)
    gamma = geometry.gamma if geometry.gamma is not None else (recorded.gamma if recorded is not None else None)
    if C is None or gamma is None:
        raise ConfigError("growth constants C and gamma are neither configured nor recorded on the lattice")
    return float(C), float(gamma)


def _central_volume(ctx: RunContext):
    order = np.argsort(np.linalg.norm(ctx.lattice.coords, axis=1), kind="stable")
    sites: List[int] = []
    dim = 1
    for x in order:
        local = ctx.cf.site_dims[int(x)]
        if sites and dim * local > _GENERATOR_VOLUME_DIM:
            break
        sites.append(int(x))
        dim *= local
    return ctx.cf.volume(sorted(sites))


def _summarise(title: str, items: List[CheckItem]) -> None:
    print(f"\n{BOLD}{CYAN}{title}{RESET}")
    for item in items:
        print(f"  {status(item.passed)}  {item.name}")


def cmd_verify(config: RunConfig, progress: bool = False) -> int:
    """Run every assumption check and write one JSON report.

    Covers the growth condition, the charge family, ``k``-symmetry, both decay
    conditions, the F-function (when configured), commuting generators and,
    on slabs, the vanishing cutoff derivatives.
    """
    ctx = build_context(config)
    phi = ctx.require_interaction()
    k, I = ctx.k, ctx.index_set_I
    tol = config.run.tolerances
    C, gamma = _growth_constants(ctx)
    items: List[CheckItem] = []

    growth = verify_growth(ctx.lattice, C, gamma, config.geometry.r0, config.geometry.r_grid)
    items.append(CheckItem(name="growth", passed=growth.passed, report=growth.model_dump(mode="json")))

    charges = verify_charge_family(ctx.cf, ctx.lattice, tol=tol.charge)
    items.append(CheckItem(name="charge_family", passed=charges.passed, report=charges.model_dump(mode="json")))

    symmetric = check_k_symmetric(phi, ctx.cf, k, I, tol=tol.symmetry)
    items.append(
        CheckItem(
            name=f"k_symmetric(k={k})",
            passed=symmetric.passed,
            report=symmetric.model_dump(mode="json", exclude={"records"}),
        )
    )

    decay_k = check_decay_k(phi, ctx.cf, k)
    items.append(
        CheckItem(name="decay_k", passed=bool(np.isfinite(decay_k.sup_value)), report=decay_k.model_dump(mode="json"))
    )

    simple = check_simple_decay(phi, k, gamma, ctx.cf)
    simple_ok = bool(np.isfinite(simple.value)) and simple.consistent is not False
    items.append(CheckItem(name="simple_decay", passed=simple_ok, report=simple.model_dump(mode="json")))

    if config.ffunction is not None:
        F = power_law(config.ffunction.lam)
        ff = check_f_function(F, ctx.lattice, convolution_sites=config.ffunction.convolution_sites)
        admissible = is_power_law_f_function(config.ffunction.lam, gamma)
        report = {**ff.model_dump(mode="json"), "admissible": admissible}
        items.append(CheckItem(name="f_function", passed=ff.monotone and admissible, report=report))

    generators = check_generators_commute(ctx.cf, multi_indices(ctx.lattice.dim_ambient, k, I), _central_volume(ctx))
    items.append(
        CheckItem(name="generators_commute", passed=generators.passed, report=generators.model_dump(mode="json"))
    )

    if ctx.lattice.slab_bounds and I:
        m_values = config.run.resolved_m() or [max(ctx.lattice.slab_bounds.values()) + 1.0]
        for a in ctx.indices():
            for m in m_values:
                slab = check_slab_derivatives(ctx.profile, m, a.a, I, lat=ctx.lattice, tol=tol.slab)
                items.append(
                    CheckItem(
                        name=f"slab_derivatives(a={a}, m={m:g})",
                        passed=slab.certified,
                        report=slab.model_dump(mode="json"),
                    )
                )

    passed = all(item.passed is not False for item in items)
    payload = {
        "config": config.name,
        "interaction": phi.name,
        "k": k,
        "index_set_I": list(I),
        "lattice": LatticeSpec.from_lattice(ctx.lattice).model_dump(mode="json", exclude={"points"}),
        "passed": passed,
        "checks": [item.model_dump(mode="json") for item in items],
    }
    persist_atomic(Path(config.output.dir) / f"{config.name}_verify.json", dump_json(payload))
    _summarise(f"verify {config.name}", items)
    logging.info("verify %s: %s", config.name, "passed" if passed else "failed")
    return EXIT_OK if passed else EXIT_FAILED


def _truncated_row(m: float, a: MultiIndex, config: RunConfig) -> Dict[str, Any]:
    row: Dict[str, Any] = {column: None for column in CSV_COLUMNS}
    row.update(m=float(m), a=str(a), s=float(config.run.s), beta=config.run.beta, verdict="truncated")
    return row


def cmd_sweep(config: RunConfig, threads: int = 1, progress: bool = False) -> int:
    """One :class:`MWBoundReport` row per ``(a, m)`` plus a verdict per ``a``.

    Rows stopped by a resource limit are kept with verdict ``truncated`` and
    the command exits with 3.
    """
    ctx = build_context(config)
    phi = ctx.require_interaction()
    m_values = config.run.resolved_m()
    if not m_values:
        raise ConfigError("sweep needs run.m_values or run.m_range")
    modes = set(config.run.modes)
    beta = config.run.beta if "entropy" in modes else None
    tol = config.run.tolerances

    rows: List[Dict[str, Any]] = []
    verdicts: Dict[str, Any] = {}
    failures: List[str] = []
    truncated = False
    for a in ctx.indices():
        result = sweep(
            SweepConfig(
                phi=phi,
                cf=ctx.cf,
                profile=ctx.profile,
                a=a,
                k=config.symmetry.k,
                s=config.run.s,
                m_values=m_values,
                beta=beta,
                exact="exact" in modes,
                exact_max_m=config.run.exact_max_m,
                threshold=config.run.threshold,
                burn_in=config.run.burn_in,
            ),
            threads=threads,
            progress=progress,
        )
        for report in result.reports:
            rows.append(report.to_row())
            if not report.exact_within_triangle(tol.triangle_slack):
                failures.append(f"a={a} m={report.m:g}: exact norm above triangle sum")
            if not report.equality_holds(tol.equality):
                failures.append(f"a={a} m={report.m:g}: entropy equality defect {report.equality_defect:.3e}")
        rows.extend(_truncated_row(m, a, config) for m in result.truncated_m)
        truncated = truncated or result.truncated
        verdicts[str(a)] = {
            "verdict": result.verdict.model_dump(mode="json") if result.verdict is not None else None,
            "truncated_m": result.truncated_m,
            "notes": result.notes,
        }

    rows.sort(key=lambda r: (r["a"], r["m"]))
    meta = {
        "config": config.name,
        "interaction": phi.name,
        "m_range": [m_values[0], m_values[-1]],
        "modes": sorted(modes),
        "verdicts": verdicts,
        "failures": failures,
        "truncated": truncated,
    }
    write_table(rows, Path(config.output.dir), f"{config.name}_sweep", config.output.format, CSV_COLUMNS, meta)

    print(f"\n{BOLD}{CYAN}sweep {config.name}{RESET}")
    for a, entry in verdicts.items():
        v = entry["verdict"]
        label = v["verdict"] if v is not None else "no rows"
        print(f"  a={a}: {label} (exponent {v['exponent'] if v is not None else None})")
    for failure in failures:
        logging.warning("sweep %s: %s", config.name, failure)
    if truncated:
        return EXIT_RESOURCE
    return EXIT_FAILED if failures else EXIT_OK


def _tracial_indices(config: RunConfig, d: int) -> List[MultiIndex]:
    if config.entropy.tracial_a:
        return [MultiIndex.of(a) for a in config.entropy.tracial_a]
    return [MultiIndex(a=(order,) + (0,) * (d - 1)) for order in range(3)]


def cmd_entropy(config: RunConfig, progress: bool = False) -> int:
    """Seeded suites for the entropy identities, KMS, monotonicity and tracial invariance."""
    if config.entropy is None:
        raise ConfigError(f"config {config.name!r} has no entropy section")
    spec = config.entropy
    ctx = build_context(config)
    rows: List[SuiteRow] = []
    rows += entropy_identity_suite(
        spec.n_instances, spec.n_qubits, spec.betas, spec.seed, tol=spec.tol, progress=progress
    )
    rows += kms_suite(spec.kms_pairs, spec.n_qubits, spec.betas, spec.seed, tol=spec.tol, progress=progress)
    rows += uhlmann_suite(
        spec.uhlmann_pairs, spec.uhlmann_qubits, spec.uhlmann_kept, spec.seed, slack=spec.tol, progress=progress
    )
    rows += tracial_suite(
        ctx.cf,
        spec.tracial_samples,
        _tracial_indices(config, ctx.lattice.dim_ambient),
        spec.tracial_s,
        spec.seed,
        tol=spec.tracial_tol,
        progress=progress,
    )

    summary: Dict[str, Dict[str, Any]] = {}
    for row in rows:
        entry = summary.setdefault(row.check, {"rows": 0, "failed": 0, "max_defect": 0.0})
        entry["rows"] += 1
        entry["failed"] += int(not row.passed)
        entry["max_defect"] = max(entry["max_defect"], row.defect)
    meta = {"config": config.name, "seed": spec.seed, "betas": spec.betas, "checks": summary}
    columns = list(SuiteRow.model_fields)
    out_dir = Path(config.output.dir)
    write_table([r.model_dump() for r in rows], out_dir, f"{config.name}_entropy", config.output.format, columns, meta)

    items = [
        CheckItem(name=f"{name} ({entry['rows']} rows)", passed=entry["failed"] == 0) for name, entry in summary.items()
    ]
    _summarise(f"entropy {config.name}", items)
    return EXIT_OK if all(row.passed for row in rows) else EXIT_FAILED


def cmd_geometry(config: RunConfig, progress: bool = False) -> int:
    """Growth-condition certificate and a log-log estimate of ``gamma``."""
    ctx = build_context(config)
    C, gamma = _growth_constants(ctx)
    geometry = config.geometry
    report = verify_growth(ctx.lattice, C, gamma, geometry.r0, geometry.r_grid)
    estimate = estimate_gamma(ctx.lattice, geometry.r_grid)
    row = {
        "C": report.C,
        "gamma": report.gamma,
        "r0": report.r0,
        "r_min": report.tested_range[0],
        "r_max": report.tested_range[1],
        "n_sites": report.n_sites,
        "lattice_extent": report.lattice_extent,
        "passed": report.passed,
        "worst_ratio": report.worst_ratio,
        "witness_center": None if report.witness is None else report.witness.center_index,
        "witness_r": None if report.witness is None else report.witness.r,
        "gamma_estimate": estimate.gamma,
        "log_C_estimate": estimate.log_C,
    }
    meta = {"config": config.name, "note": report.note, "estimate_label": estimate.label, "r_grid": geometry.r_grid}
    write_table([row], Path(config.output.dir), f"{config.name}_geometry", config.output.format, list(row), meta)
    _summarise(f"geometry {config.name}", [CheckItem(name=f"growth C={C:g} gamma={gamma:g}", passed=report.passed)])
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_ffunction(config: RunConfig, progress: bool = False) -> int:
    """``norm_F`` and ``C_F`` of a power law over growing truncations.

    The run fails when the measured growth contradicts the admissibility
    criterion ``lam > 1 + d``.
    """
    if config.ffunction is None:
        raise ConfigError(f"config {config.name!r} has no ffunction section")
    spec = config.ffunction
    series = f_function_series(
        power_law(spec.lam), spec.d, spec.truncations, growth_tol=spec.growth_tol, progress=progress
    )
    rows = [
        {
            "truncation": h,
            "n_sites": r.n_sites,
            "norm_F": r.norm_F,
            "C_F": r.C_F,
            "C_F_window": r.C_F_window,
            "monotone": r.monotone,
        }
        for h, r in zip(series.truncations, series.reports)
    ]
    admissible = is_power_law_f_function(spec.lam, float(spec.d))
    consistent = series.growing != admissible
    meta = {
        "config": config.name,
        "label": series.label,
        "d": spec.d,
        "truncations": series.truncations,
        "growth_ratio": series.growth_ratio,
        "growing": series.growing,
        "growth_tol": series.growth_tol,
        "admissible": admissible,
        "consistent": consistent,
    }
    write_table(rows, Path(config.output.dir), f"{config.name}_ffunction", config.output.format, list(rows[0]), meta)
    trend = "growing" if series.growing else "bounded"
    label = f"lam={spec.lam:g} d={spec.d}: ratio {series.growth_ratio:.6g} ({trend})"
    _summarise(f"ffunction {config.name}", [CheckItem(name=label, passed=consistent)])
    return EXIT_OK if consistent else EXIT_FAILED

"""Запись результатов: спектры подвижности в CSV/JSON, траектории и текстовые отчёты.

Числа пишутся через repr (кратчайшее обратимое представление, точка как
разделитель), поэтому одинаковый запуск даёт побайтно одинаковый вывод.
"""

from __future__ import annotations

import csv
import io
import sys
from dataclasses import asdict
from pathlib import Path
from typing import IO, Iterable, List, Optional, Sequence

import orjson
import structlog

from trap_kohn.services.model import DerivedConstants, ModelParams
from trap_kohn.services.response import MobilitySample, MobilitySpectrum
from trap_kohn.services.timedomain import Trajectory
from trap_kohn.utils.exceptions import OutputError

log = structlog.get_logger(__name__)

__all__ = [
    "format_float",
    "spectrum_rows",
    "render_csv",
    "render_json",
    "render_spectrum",
    "write_text",
    "write_trajectory_csv",
    "constants_report",
]

CSV_FIELDS = ["omega", "re_mu", "im_mu", "method"]


def format_float(value: float) -> str:
    """Кратчайшее обратимое представление; -0.0 пишется как 0.0"""
    value = float(value)
    if value == 0.0:
        value = 0.0
    return repr(value)


def _has_rel_diff(samples: Sequence[MobilitySample]) -> bool:
    return any(s.rel_diff is not None for s in samples)


def spectrum_rows(spectrum: MobilitySpectrum) -> List[dict]:
    """Строки CSV в порядке частот"""
    with_rel = _has_rel_diff(spectrum.samples)
    rows = []
    for s in spectrum.samples:
        row = {
            "omega": format_float(s.freq.omega),
            "re_mu": format_float(s.value.real),
            "im_mu": format_float(s.value.imag),
            "method": s.method.value,
        }
        if with_rel:
            row["rel_diff"] = "" if s.rel_diff is None else format_float(s.rel_diff)
        rows.append(row)
    return rows


def render_csv(spectrum: MobilitySpectrum) -> str:
    """CSV со схемой omega,re_mu,im_mu,method[,rel_diff]"""
    fields = CSV_FIELDS + (["rel_diff"] if _has_rel_diff(spectrum.samples) else [])
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    writer.writerows(spectrum_rows(spectrum))
    return buffer.getvalue()


def _sample_dict(s: MobilitySample) -> dict:
    return {
        "z": s.z,
        "z0": s.z0,
        "omega": s.freq.omega,
        "eta": s.freq.eta,
        "re_mu": s.value.real,
        "im_mu": s.value.imag,
        "method": s.method.value,
        "near_pole": s.near_pole,
        "rel_diff": s.rel_diff,
    }


def render_json(spectrum: MobilitySpectrum) -> str:
    """JSON: объект params, объект meta и массив samples"""
    payload = {
        "params": asdict(spectrum.params),
        "meta": spectrum.meta,
        "samples": [_sample_dict(s) for s in spectrum.samples],
    }
    return orjson.dumps(payload, option=orjson.OPT_INDENT_2 | orjson.OPT_SERIALIZE_NUMPY).decode() + "\n"


def render_spectrum(spectrum: MobilitySpectrum, fmt: str) -> str:
    if fmt == "csv":
        return render_csv(spectrum)
    if fmt == "json":
        return render_json(spectrum)
    raise OutputError(f"unknown output format {fmt!r}")


def write_text(text: str, path: Optional[str] = None, stream: Optional[IO[str]] = None) -> None:
    """Пишет текст в файл или в stdout; ошибки ввода-вывода превращаются в OutputError"""
    if path is None:
        (stream or sys.stdout).write(text)
        return
    try:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        with target.open("w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as e:
        log.error("output_write_failed", path=str(path), error=str(e))
        raise OutputError(f"cannot write {path}: {e}", path=str(path)) from e
    log.info("output_written", path=str(path), size=len(text))


def write_trajectory_csv(path: Optional[str], trajectory: Trajectory, columns: Iterable[int]) -> None:
    """CSV со столбцами t, phi[j] для узлов j по записанным снимкам траектории"""
    columns = list(columns)
    if not trajectory.snapshots:
        raise OutputError("trajectory has no snapshots; set record_every", path=str(path))
    size = trajectory.snapshots[0].nodes.size
    for j in columns:
        if not 0 <= j < size:
            raise OutputError(f"node {j} outside grid of {size} nodes", path=str(path))
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["t"] + [f"phi[{j}]" for j in columns])
    for snap in trajectory.snapshots:
        writer.writerow([format_float(snap.time)] + [format_float(snap.phi[j]) for j in columns])
    write_text(buffer.getvalue(), path)


def constants_report(params: ModelParams, dc: DerivedConstants) -> str:
    """Текстовый отчёт о константах модели"""
    res = dc.identity_residuals
    lines = [
        f"vtilde_c = {format_float(params.vtilde_c)}",
        f"K = {format_float(dc.k_lutt)}",
        f"eps_tilde = {format_float(dc.eps_tilde)}",
        f"eps_form_residual = {format_float(dc.eps_form_residual)}",
        f"identity_splitting_residual = {format_float(res.splitting)}",
        f"identity_product_residual = {format_float(res.product)}",
    ]
    if params.k_fermi is not None:
        lines.append(f"l_fermi = {format_float(params.l_fermi)}")
        lines.append(f"k_fermi = {format_float(params.k_fermi)}")
    return "\n".join(lines) + "\n"

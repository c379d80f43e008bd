"""Comparison pipeline and its machine-readable report (text, CSV, JSON)."""
from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields

from . import __version__
from .errors import ConfigError, PKMError
from .kinetostatics import KinetostaticBounds
from .mechanism import Architecture
from .synthesis import SynthesisResult, scale_design, synthesize
from .workspace import DEFAULT_RESOLUTION, best_rectangle, envelope

THREADS_ENV = "PKM_SYNTH_THREADS"


def sig9(x):
    """Round to 9 significant digits (the precision shared by CSV and JSON)."""
    if x is None:
        return None
    x = float(x)
    return float(f"{x:.9g}") if math.isfinite(x) else x


# --- configuration ------------------------------------------------------------

_CONFIG_KEYS = {
    "arch": str,
    "alpha1": float,
    "alpha2": float,
    "lambda_min": float,
    "lambda_max": float,
    "target_area": float,
    "resolution": int,
    "square": bool,
    "axis_aligned": bool,
    "out": str,
    "format": str,
}


@dataclass
class RunConfig:
    architectures: list = field(default_factory=lambda: [a.label for a in Architecture])
    alpha1: float | None = None
    alpha2: float | None = None
    lambda_min: float = 1.0 / 3.0
    lambda_max: float = 3.0
    target_area: float = 1.0
    resolution: int = DEFAULT_RESOLUTION
    square_mode: bool = False
    axis_aligned: bool = False
    out_dir: str | None = None
    fmt: str = "text"

    def validate(self) -> "RunConfig":
        names = {a.label for a in Architecture} | {"custom"}
        for name in self.architectures:
            if name not in names:
                raise ConfigError(f"arch: unknown architecture {name!r}")
        if "custom" in self.architectures and (self.alpha1 is None or self.alpha2 is None):
            raise ConfigError("arch: custom architecture needs alpha1 and alpha2")
        if not (0 < self.lambda_min < self.lambda_max and math.isfinite(self.lambda_max)):
            raise ConfigError("lambda_min/lambda_max: need 0 < lambda_min < lambda_max")
        if not (self.target_area > 0 and math.isfinite(self.target_area)):
            raise ConfigError("target_area: must be a positive number")
        if self.resolution < 32:
            raise ConfigError("resolution: must be at least 32")
        if self.fmt not in ("text", "csv", "json"):
            raise ConfigError(f"format: expected text, csv or json, got {self.fmt!r}")
        return self

    @property
    def bounds(self) -> KinetostaticBounds:
        return KinetostaticBounds(self.lambda_min, self.lambda_max)

    def arch_specs(self):
        out = []
        for name in self.architectures:
            if name == "custom":
                out.append(("custom", (self.alpha1, self.alpha2)))
            else:
                out.append((name, Architecture.from_name(name)))
        return out


def _parse_bool(text):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Parse flat ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        conv = _CONFIG_KEYS[key]
        try:
            values[key] = _parse_bool(val) if conv is bool else conv(val)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key}: {exc}") from None
    return values


def load_config_file(path) -> dict:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    return parse_config_text(text, str(path))


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV}: expected an integer, got {raw!r}") from None
    if n < 0:
        raise ConfigError(f"{THREADS_ENV}: must be >= 0")
    return n or (os.cpu_count() or 1)


# --- report -------------------------------------------------------------------

@dataclass
class SquareVariant:
    S_over_L2: float
    L0: float
    L: float
    delta_rho: float
    side_over_L: float
    angle_deg: float


@dataclass
class ArchitectureRecord:
    name: str
    alpha1: float
    alpha2: float
    L0_over_L: float | None = None
    delta_rho_over_L: float | None = None
    S_over_L2: float | None = None
    rect_angle_deg: float | None = None
    rect_width_over_L: float | None = None
    rect_height_over_L: float | None = None
    rect_corners: list | None = None  # normalised world coordinates, 4 x [x, y]
    scale_factor: float | None = None
    L0: float | None = None
    L: float | None = None
    delta_rho: float | None = None
    envelope_area: float | None = None
    envelope_bbox: list | None = None  # [xmin, ymin, xmax, ymax]
    square: SquareVariant | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class ComparisonReport:
    records: list
    metadata: dict

    def to_dict(self) -> dict:
        return {"metadata": dict(self.metadata), "records": [asdict(r) for r in self.records]}

    @classmethod
    def from_dict(cls, data: dict) -> "ComparisonReport":
        records = []
        for raw in data["records"]:
            raw = dict(raw)
            if raw.get("square") is not None:
                raw["square"] = SquareVariant(**raw["square"])
            records.append(ArchitectureRecord(**raw))
        return cls(records, dict(data["metadata"]))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ComparisonReport":
        return cls.from_dict(json.loads(text))

    @property
    def failed(self) -> int:
        return sum(not r.ok for r in self.records)


CSV_COLUMNS = [
    "name", "alpha1", "alpha2", "L0_over_L", "delta_rho_over_L", "S_over_L2", "rect_angle_deg",
    "rect_width_over_L", "rect_height_over_L", "scale_factor", "L0", "L", "delta_rho",
    "envelope_area", "square_S_over_L2", "square_L0", "square_L", "square_delta_rho", "error",
]


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(sig9(v))
    return str(v)


def report_to_csv(report: ComparisonReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in report.records:
        row = {f.name: getattr(r, f.name) for f in fields(r)}
        sq = r.square
        row.update(
            square_S_over_L2=sq.S_over_L2 if sq else None,
            square_L0=sq.L0 if sq else None,
            square_L=sq.L if sq else None,
            square_delta_rho=sq.delta_rho if sq else None,
        )
        writer.writerow([_fmt(row.get(c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def _num(v, spec):
    if v is None:
        width = "".join(ch for ch in spec.split(".")[0] if ch.isdigit())
        return "-".rjust(int(width or 0))
    return format(v, spec)


def format_table1(report: ComparisonReport) -> str:
    lines = [f"{'Mechanism':<12}{'L0/L':>10}{'drho/L':>10}{'S/L^2':>10}"]
    for r in report.records:
        if r.error and r.L0_over_L is None:
            lines.append(f"{r.name:<12}  error: {r.error}")
            continue
        lines.append(f"{r.name:<12}{_num(r.L0_over_L, '10.3f')}{_num(r.delta_rho_over_L, '10.3f')}"
                     f"{_num(r.S_over_L2, '10.3f')}")
    return "\n".join(lines) + "\n"


def format_table2(report: ComparisonReport) -> str:
    area = report.metadata.get("target_area", 1.0)
    lines = [f"Target rectangular workspace: {area:g} m^2",
             f"{'Mechanism':<16}{'L0':>9}{'L':>9}{'drho':>9}{'envelope':>11}"]
    for r in report.records:
        if r.L is None:
            lines.append(f"{r.name:<16}  error: {r.error}")
            continue
        lines.append(f"{r.name:<16}{r.L0:9.3f}{r.L:9.3f}{r.delta_rho:9.3f}{_num(r.envelope_area, '11.2f')}")
    for r in report.records:
        if r.square is not None:
            s = r.square
            lines.append(f"{r.name + ' (sq)':<16}{s.L0:9.3f}{s.L:9.3f}{s.delta_rho:9.3f}{'-':>11}")
    return "\n".join(lines) + "\n"


# --- pipelines ------------------------------------------------------------------

def _alphas_of(spec):
    return (spec.alpha1, spec.alpha2) if isinstance(spec, Architecture) else spec


def synth_record(name, spec, config: RunConfig) -> tuple[ArchitectureRecord, SynthesisResult | None]:
    a1, a2 = _alphas_of(spec)
    rec = ArchitectureRecord(name=name, alpha1=sig9(a1), alpha2=sig9(a2))
    try:
        res = synthesize(spec, config.bounds)
    except PKMError as exc:
        rec.error = f"synthesis: {exc.describe()}: {exc}"
        return rec, None
    rec.L0_over_L = sig9(res.L0_over_L)
    rec.delta_rho_over_L = sig9(res.delta_rho_over_L)
    return rec, res


def compare_record(name, spec, config: RunConfig) -> ArchitectureRecord:
    rec, res = synth_record(name, spec, config)
    if res is None:
        return rec
    angles = [0.0] if config.axis_aligned else None
    stage = "workspace"
    try:
        rect, _ = best_rectangle(res.design, bounds=config.bounds, resolution=config.resolution, angles=angles)
        rec.S_over_L2 = sig9(rect.area)
        rec.rect_angle_deg = sig9(math.degrees(rect.angle))
        rec.rect_width_over_L = sig9(rect.width)
        rec.rect_height_over_L = sig9(rect.height)
        rec.rect_corners = [[sig9(x), sig9(y)] for x, y in rect.corners()]
        stage = "scaling"
        scaled = scale_design(res, rect.area, config.target_area)
        d = scaled.design
        rec.scale_factor = sig9(scaled.scale_factor)
        rec.L0, rec.L, rec.delta_rho = sig9(d.L0), sig9(d.L), sig9(d.delta_rho)
        stage = "envelope"
        env = envelope(d)
        rec.envelope_area = sig9(env.area)
        rec.envelope_bbox = [sig9(v) for v in (*env.bbox_min, *env.bbox_max)]
        if config.square_mode:
            stage = "square"
            sq, _ = best_rectangle(res.design, bounds=config.bounds, resolution=config.resolution,
                                   force_square=True, angles=angles)
            sd = scale_design(res, sq.area, config.target_area).design
            rec.square = SquareVariant(sig9(sq.area), sig9(sd.L0), sig9(sd.L), sig9(sd.delta_rho),
                                       sig9(sq.width), sig9(math.degrees(sq.angle)))
    except PKMError as exc:
        rec.error = f"{stage}: {exc.describe()}: {exc}"
    return rec


def _metadata(config: RunConfig, command: str) -> dict:
    return {
        "command": command,
        "lambda_min": sig9(config.lambda_min),
        "lambda_max": sig9(config.lambda_max),
        "target_area": sig9(config.target_area),
        "resolution": config.resolution,
        "square_mode": config.square_mode,
        "axis_aligned": config.axis_aligned,
        "version": __version__,
    }


def run_synth(config: RunConfig) -> ComparisonReport:
    recs = [synth_record(name, spec, config)[0] for name, spec in config.arch_specs()]
    return ComparisonReport(recs, _metadata(config, "synth"))


def run_compare(config: RunConfig, threads: int | None = None) -> ComparisonReport:
    specs = config.arch_specs()
    threads = worker_count() if threads is None else threads
    if threads > 1 and len(specs) > 1:
        with ThreadPoolExecutor(max_workers=min(threads, len(specs))) as pool:
            # map keeps preset order regardless of completion order
            recs = list(pool.map(lambda s: compare_record(s[0], s[1], config), specs))
    else:
        recs = [compare_record(name, spec, config) for name, spec in specs]
    return ComparisonReport(recs, _metadata(config, "compare"))


def write_outputs(report: ComparisonReport, out_dir) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    written = []
    outputs = {
        "report.json": report.to_json(),
        "report.csv": report_to_csv(report),
        "table1.txt": format_table1(report),
    }
    if report.metadata.get("command") == "compare":
        outputs["table2.txt"] = format_table2(report)
    for fname, text in outputs.items():
        path = os.path.join(out_dir, fname)
        with open(path, "w") as fh:
            fh.write(text)
        written.append(path)
    return written

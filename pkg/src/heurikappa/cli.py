"""Command-line entry point: ``heurikappa {evaluate,validate,analyze,mock-run}``.

Exit codes: 0 success, 1 fatal or usage error, 2 some sessions failed,
3 dataset has exclusions (``validate`` only).
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import os
import random
import sys
import time
from dataclasses import dataclass, fields
from pathlib import Path

from . import __version__
from .catalog import heuristic_catalog
from .client import (
    API_KEY_ENV,
    BASE_URL_ENV,
    HttpBackend,
    MockBackend,
    SessionConfig,
    run_site,
)
from .errors import ConfigurationError, HeurikappaError
from .ingest import (
    CorpusBundle,
    IngestConfig,
    PayloadLimits,
    SourceFile,
    filter_frontend,
    package_payload,
    scan_repository,
)
from .irr import ALPHA_METRICS, WEIGHT_SCHEMES
from .replication import compare_to_reference, render_replication
from .report import REPORT_FILES, build_report, render_report
from .schema import EXCLUSION_POLICIES, parse_or_exclude, validate_dataset
from .store import ANALYSIS_DIR, eval_path, load_dataset, save_results

log = logging.getLogger("heurikappa")

EXIT_OK, EXIT_FATAL, EXIT_PARTIAL, EXIT_EXCLUSIONS = 0, 1, 2, 3


@dataclass
class RunConfig:
    dataset_root: str = "results"
    backend: str = "mock"
    n_sessions: int = 3
    weight_scheme: str = "quadratic"
    alpha_metric: str = "nominal"
    exclusion_policy: str = "split"
    per_file_chars: int = 64_000
    total_chars: int = 512_000
    seed: int = 0
    force: bool = False
    parallel: int = 3
    inject_faults: int = 0
    n_sites: int = 30
    disagreement: float = 0.2
    include_all: bool = False
    model: str = "gpt-4o"
    temperature: float = 0.0
    max_retries: int = 3
    timeout: float = 120.0
    api_key: str | None = None
    base_url: str | None = None
    audit_log: str | None = None

    def check(self):
        if self.n_sessions < 2:
            raise ConfigurationError("--sessions must be at least 2; agreement needs two raters")
        if self.backend not in ("http", "mock"):
            raise ConfigurationError(f"unknown backend {self.backend!r}")
        if self.backend == "http" and not self.api_key:
            raise ConfigurationError(f"backend=http needs a credential ({API_KEY_ENV} or config file api_key)")

    @property
    def analysis_config(self) -> dict:
        return {
            "weights": self.weight_scheme,
            "alpha_metric": self.alpha_metric,
            "exclusion_policy": self.exclusion_policy,
            "n_sessions": self.n_sessions,
        }


# flag dest -> (RunConfig field, environment variable)
_OPTIONS = {
    "root": ("dataset_root", "HEURIKAPPA_ROOT"),
    "backend": ("backend", "HEURIKAPPA_BACKEND"),
    "sessions": ("n_sessions", "HEURIKAPPA_SESSIONS"),
    "weights": ("weight_scheme", "HEURIKAPPA_WEIGHTS"),
    "alpha_metric": ("alpha_metric", "HEURIKAPPA_ALPHA_METRIC"),
    "exclusion_policy": ("exclusion_policy", "HEURIKAPPA_EXCLUSION_POLICY"),
    "per_file_chars": ("per_file_chars", "HEURIKAPPA_PER_FILE_CHARS"),
    "total_chars": ("total_chars", "HEURIKAPPA_TOTAL_CHARS"),
    "seed": ("seed", "HEURIKAPPA_SEED"),
    "force": ("force", None),
    "parallel": ("parallel", "HEURIKAPPA_PARALLEL"),
    "inject_faults": ("inject_faults", None),
    "sites": ("n_sites", None),
    "disagreement": ("disagreement", None),
    "include_all": ("include_all", None),
    "model": ("model", "HEURIKAPPA_MODEL"),
    "temperature": ("temperature", "HEURIKAPPA_TEMPERATURE"),
    "max_retries": ("max_retries", "HEURIKAPPA_MAX_RETRIES"),
    "timeout": ("timeout", "HEURIKAPPA_TIMEOUT"),
    "base_url": ("base_url", BASE_URL_ENV),
    "audit_log": ("audit_log", "HEURIKAPPA_AUDIT_LOG"),
}


def resolve_config(args: argparse.Namespace, environ=None) -> RunConfig:
    """Flags > environment > config file > defaults."""
    environ = os.environ if environ is None else environ
    types = {f.name: f.type for f in fields(RunConfig)}
    values: dict = {}
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            file_values = json.load(fh)
        unknown = set(file_values) - set(types)
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        values.update(file_values)
    for dest, (name, env) in _OPTIONS.items():
        if env and env in environ:
            values[name] = _coerce(environ[env], types[name])
        flag = getattr(args, dest, None)
        if flag is not None and flag is not False:
            values[name] = flag
    if API_KEY_ENV in environ:
        values["api_key"] = environ[API_KEY_ENV]
    return RunConfig(**values)


def _coerce(text: str, type_name):
    t = str(type_name)
    if t.startswith("int"):
        return int(text)
    if t.startswith("float"):
        return float(text)
    if t.startswith("bool"):
        return text.lower() in ("1", "true", "yes")
    return text


def _make_backend(cfg: RunConfig, severity_faults=None):
    if cfg.backend == "http":
        return HttpBackend(cfg.api_key, cfg.base_url, cfg.audit_log)
    return MockBackend(cfg.seed, severity_faults=severity_faults, disagreement=cfg.disagreement)


def _session_config(cfg: RunConfig) -> SessionConfig:
    return SessionConfig(cfg.model, cfg.temperature, cfg.max_retries, cfg.timeout)


def _evaluate_payload(payload, cfg: RunConfig, backend, out=None) -> int:
    out = out or sys.stdout
    run = run_site(payload, backend, cfg.n_sessions, _session_config(cfg), cfg.parallel)
    failed = 0
    for k in range(1, cfg.n_sessions + 1):
        if k in run.errors:
            failed += 1
            print(f"{payload.site_id} eval{k}: FAILED ({run.errors[k]})", file=out)
            continue
        session = parse_or_exclude(run.responses[k], payload.site_id, k, cfg.exclusion_policy)
        path = save_results(session, cfg.dataset_root, force=cfg.force)
        if session.unparseable:
            failed += 1
        print(f"{payload.site_id} eval{k}: {len(session.entries)} entries, "
              f"{len(session.severity_valid)} valid severities, {len(session.exclusions)} exclusions"
              f"{' (unparseable)' if session.unparseable else ''} -> {path.as_posix()}", file=out)
    if failed == cfg.n_sessions:
        return EXIT_FATAL
    return EXIT_PARTIAL if failed else EXIT_OK


def _refuse_existing(cfg: RunConfig, site_id: str):
    if cfg.force:
        return
    for k in range(1, cfg.n_sessions + 1):
        path = eval_path(cfg.dataset_root, site_id, k)
        if path.exists():
            raise HeurikappaError(f"{path.as_posix()} exists; use --force to overwrite")


def cmd_evaluate(site_path, cfg: RunConfig, site_id: str | None = None, out=None) -> int:
    out = out or sys.stdout
    cfg.check()
    backend = _make_backend(cfg)
    ingest_cfg = IngestConfig(include_all=cfg.include_all)
    bundle = filter_frontend(scan_repository(site_path, ingest_cfg, site_id), ingest_cfg)
    _refuse_existing(cfg, bundle.site_id)
    payload = package_payload(bundle, PayloadLimits(cfg.per_file_chars, cfg.total_chars))
    m = payload.manifest
    print(f"{bundle.site_id}: {len(m.included)} files, {len(payload.text)} chars, "
          f"{m.truncation_count} truncated, {len(m.omitted)} omitted", file=out)
    return _evaluate_payload(payload, cfg, backend, out)


def _print_summary(summary, out):
    print(f"sites: {summary.n_sites}  sessions: {summary.n_sessions}", file=out)
    print(f"expected entries: {summary.expected_entries}  raw entries: {summary.raw_entries}  "
          f"usable: {summary.usable_entries}", file=out)
    print(f"valid severities: {summary.valid_severity}  valid issue flags: {summary.valid_issue}  "
          f"unparseable sessions: {summary.unparseable_sessions}", file=out)
    for reason, n in summary.exclusions_by_reason.items():
        print(f"  {reason}: {n}", file=out)


def cmd_validate(root, cfg: RunConfig | None = None, out=None) -> int:
    out = out or sys.stdout
    cfg = cfg or RunConfig(dataset_root=str(root))
    summary = validate_dataset(load_dataset(root, cfg.exclusion_policy))
    _print_summary(summary, out)
    return EXIT_EXCLUSIONS if summary.total_exclusions else EXIT_OK


def cmd_analyze(root, cfg: RunConfig, replicate: bool = False, out=None) -> int:
    out = out or sys.stdout
    dataset = load_dataset(root, cfg.exclusion_policy)
    for site in dataset.insufficient_sites:
        print(f"warning: site {site} has fewer than 2 sessions and is excluded from agreement analyses", file=out)
    start = time.perf_counter()
    report = build_report(dataset, cfg.analysis_config)
    elapsed = time.perf_counter() - start
    out_dir = Path(root) / ANALYSIS_DIR
    written = []
    for fmt in REPORT_FILES:
        written += render_report(report, fmt, out_dir)
    if replicate:
        result = compare_to_reference(report)
        (out_dir / "replication.md").write_text(render_replication(result), encoding="utf-8")
        written.append(out_dir / "replication.md")
        print(f"weight schemes reproducing published values: {', '.join(result.matching_schemes) or 'none'}", file=out)
    h = report.severity_histogram
    print(f"severity histogram {h['counts']} total {h['total']} excluded {h['excluded']}", file=out)
    for r in report.pairwise_issue:
        print(f"issue {r['comparison']}: kappa={r['kappa']} {r['agreed']}/{r['total']}", file=out)
    print(f"analysis took {elapsed:.3f}s; wrote {len(written)} files to {out_dir.as_posix()}", file=out)
    return EXIT_OK


def fault_cells(n_faults: int, site_ids, n_sessions: int, seed: int) -> dict:
    """Choose ``n_faults`` distinct (site, session, heuristic) cells to break."""
    cells = [(s, k, h) for s in site_ids for k in range(1, n_sessions + 1) for h in range(len(heuristic_catalog()))]
    if n_faults > len(cells):
        raise ConfigurationError(f"cannot inject {n_faults} faults into {len(cells)} entries")
    chosen = random.Random(f"faults:{seed}").sample(cells, n_faults)
    out: dict = {}
    for s, k, h in chosen:
        out.setdefault((s, k), set()).add(h)
    return out


def _mock_site(site_id: str) -> CorpusBundle:
    html = (f"<!doctype html>\n<html><head><title>{site_id}</title><link rel=\"stylesheet\" href=\"style.css\"></head>\n"
            f"<body><form><input name=\"q\"><button>Go</button></form></body></html>\n")
    return CorpusBundle(site_id, (SourceFile("index.html", html, "html"),
                                  SourceFile("style.css", "body { margin: 0 }\n", "css")))


def cmd_mock_run(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    cfg.backend = "mock"
    cfg.check()
    site_ids = [f"site-{i:02d}" for i in range(1, cfg.n_sites + 1)]
    faults = fault_cells(cfg.inject_faults, site_ids, cfg.n_sessions, cfg.seed)
    backend = _make_backend(cfg, faults)
    for site_id in site_ids:
        _refuse_existing(cfg, site_id)
    worst = EXIT_OK
    for site_id in site_ids:
        payload = package_payload(_mock_site(site_id), PayloadLimits(cfg.per_file_chars, cfg.total_chars))
        worst = max(worst, _evaluate_payload(payload, cfg, backend, out=io.StringIO()))
    print(f"generated {len(site_ids)} sites x {cfg.n_sessions} sessions under {Path(cfg.dataset_root).as_posix()}"
          f" ({cfg.inject_faults} injected severity faults)", file=out)
    if worst != EXIT_OK:
        return worst
    return cmd_analyze(cfg.dataset_root, cfg, out=out)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--root", help="dataset root directory (results/<site>/eval<k>.json)")
    common.add_argument("--config", help="JSON config file; keys are RunConfig field names")
    common.add_argument("--exclusion-policy", choices=EXCLUSION_POLICIES, dest="exclusion_policy")
    common.add_argument("-v", "--verbose", action="store_true")

    stats = argparse.ArgumentParser(add_help=False)
    stats.add_argument("--weights", choices=WEIGHT_SCHEMES)
    stats.add_argument("--alpha-metric", choices=ALPHA_METRICS, dest="alpha_metric")

    run = argparse.ArgumentParser(add_help=False)
    run.add_argument("--backend", choices=("http", "mock"))
    run.add_argument("--sessions", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--parallel", type=int)
    run.add_argument("--force", action="store_true")
    run.add_argument("--model")
    run.add_argument("--temperature", type=float)
    run.add_argument("--max-retries", type=int, dest="max_retries")
    run.add_argument("--timeout", type=float)
    run.add_argument("--base-url", dest="base_url")
    run.add_argument("--audit-log", dest="audit_log")
    run.add_argument("--per-file-chars", type=int, dest="per_file_chars")
    run.add_argument("--total-chars", type=int, dest="total_chars")

    parser = argparse.ArgumentParser(prog="heurikappa", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"heurikappa {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evaluate", parents=[common, run, stats], help="evaluate one site directory or ZIP")
    p.add_argument("site_path")
    p.add_argument("--site-id", dest="site_id")
    p.add_argument("--include-all", action="store_true", dest="include_all",
                   help="send non-front-end text files too")

    sub.add_parser("validate", parents=[common], help="print the validation summary of a dataset")

    p = sub.add_parser("analyze", parents=[common, stats], help="compute agreement statistics and write reports")
    p.add_argument("--sessions", type=int)
    p.add_argument("--replicate", action="store_true", help="compare against the published values")

    p = sub.add_parser("mock-run", parents=[common, run, stats], help="synthetic end-to-end run with the mock backend")
    p.add_argument("--sites", type=int)
    p.add_argument("--inject-faults", type=int, dest="inject_faults")
    p.add_argument("--disagreement", type=float,
                   help="probability that a mock session shifts a severity by one (default 0.2)")
    return parser


def main(argv=None, environ=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_FATAL
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = resolve_config(args, environ)
        if args.command == "evaluate":
            return cmd_evaluate(args.site_path, cfg, args.site_id)
        if args.command == "validate":
            return cmd_validate(cfg.dataset_root, cfg)
        if args.command == "analyze":
            return cmd_analyze(cfg.dataset_root, cfg, args.replicate)
        return cmd_mock_run(cfg)
    except (HeurikappaError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())

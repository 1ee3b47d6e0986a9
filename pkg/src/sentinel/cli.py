"""Command-line entry point: scan, serve and tools subcommands."""

from __future__ import annotations

import errno
import json
import logging
import socket
import sys
import threading

import click
import yaml

from .dedupe import DedupeConfig
from .model import CycleMetrics, Tool, tool_parse
from .pipeline import DEFAULT_TOOLS, PipelineConfig, run_cycle, run_loop
from .source import SourceConfig, SourceError, SourceMode
from .store import StoreError, open_store
from . import toolmgr

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2


def _setup_logging(level: str) -> None:
    logging.basicConfig(level=getattr(logging, level.upper(), logging.INFO),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")


@click.group(context_settings={"auto_envvar_prefix": "SENTINEL"})
@click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False),
              help="Optional YAML config file; flags and environment override it.")
@click.option("--log-level", default="info", show_default=True)
@click.pass_context
def main(ctx, config_file, log_level):
    """Kubernetes misconfiguration logging: scan, serve, tools."""
    _setup_logging(log_level)
    if config_file:
        with open(config_file) as fh:
            loaded = yaml.safe_load(fh) or {}
        ctx.default_map = loaded


def _parse_tools(tools: str) -> tuple[Tool, ...]:
    if not tools:
        return DEFAULT_TOOLS
    try:
        return tuple(tool_parse(t) for t in tools.split(",") if t.strip())
    except ValueError as exc:
        raise click.UsageError(str(exc))


def _build_source(manifest_dir, kubeconfig, namespaces) -> SourceConfig:
    if manifest_dir and kubeconfig:
        raise click.UsageError("--manifest-dir and --kubeconfig are mutually exclusive")
    if manifest_dir:
        return SourceConfig(mode=SourceMode.DIRECTORY, directory=manifest_dir)
    return SourceConfig(
        mode=SourceMode.CLUSTER,
        kubeconfig_path=kubeconfig,
        namespace_filter=tuple(namespaces) if namespaces else None,
    )


def _print_metrics(metrics: CycleMetrics, metrics_json: bool) -> None:
    if metrics_json:
        click.echo(json.dumps(metrics.to_dict()))
        return
    click.echo(f"{'stage':<12}{'seconds':>10}")
    for stage in ("scan", "dedupe", "normalize", "merge", "persist", "total"):
        click.echo(f"{stage:<12}{getattr(metrics, stage + '_s'):>10.2f}")
    click.echo(f"pods scanned: {metrics.pods_scanned}")
    if metrics.per_tool_s:
        click.echo(f"{'tool':<14}{'seconds':>10}")
        for tool, seconds in metrics.per_tool_s.items():
            name = tool.value if isinstance(tool, Tool) else tool
            click.echo(f"{name:<14}{seconds:>10.2f}")


def _scan_options(fn):
    opts = [
        click.option("--manifest-dir", type=str, default=None, help="Scan local manifests instead of a cluster."),
        click.option("--kubeconfig", type=str, default=None, help="Kubeconfig path for cluster mode."),
        click.option("--namespace", "namespaces", multiple=True, help="Restrict cluster mode to these namespaces."),
        click.option("--tools", default="", help="Comma-separated tool list (default: all four scanners)."),
        click.option("--dedupe-threshold", type=float, default=0.65, show_default=True),
        click.option("--out-dir", default="./output", show_default=True),
        click.option("--interval", type=float, default=None, help="Rescan interval in seconds; omit for one cycle."),
        click.option("--parallelism", type=int, default=4, show_default=True),
        click.option("--store-path", default=None, help="Embedded store directory."),
        click.option("--db-uri", default=None, help="MongoDB URI (alternative to --store-path)."),
        click.option("--bin-dir", default=None, help="Directory holding scanner binaries."),
        click.option("--fixture-dir", default=None, help="Read canned scanner outputs from this directory."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _pipeline_config(manifest_dir, kubeconfig, namespaces, tools, dedupe_threshold,
                     out_dir, interval, parallelism, bin_dir, fixture_dir) -> PipelineConfig:
    tool_list = _parse_tools(tools)
    if Tool.FIXTURE in tool_list and not fixture_dir:
        fixture_dir = manifest_dir
    return PipelineConfig(
        source=_build_source(manifest_dir, kubeconfig, namespaces),
        tools=tool_list,
        dedupe=DedupeConfig(threshold=dedupe_threshold),
        out_dir=out_dir,
        interval_s=interval,
        parallelism=parallelism,
        bin_dir=bin_dir,
        fixture_dir=fixture_dir,
    )


@main.command()
@_scan_options
@click.option("--metrics-json", is_flag=True, help="Emit cycle metrics as JSON.")
def scan(manifest_dir, kubeconfig, namespaces, tools, dedupe_threshold, out_dir,
         interval, parallelism, store_path, db_uri, bin_dir, fixture_dir, metrics_json):
    """Run one scan cycle (or loop with --interval)."""
    config = _pipeline_config(manifest_dir, kubeconfig, namespaces, tools, dedupe_threshold,
                              out_dir, interval, parallelism, bin_dir, fixture_dir)
    store = open_store(store_path, db_uri)
    try:
        if interval is not None:
            run_loop(config, store)
        else:
            metrics = run_cycle(config, store)
            _print_metrics(metrics, metrics_json)
    except (SourceError, StoreError) as exc:
        click.echo(f"cycle aborted: {exc}", err=True)
        sys.exit(EXIT_RUNTIME)
    except KeyboardInterrupt:
        pass


@main.command()
@_scan_options
@click.option("--port", type=int, default=5002, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--with-pipeline", is_flag=True, help="Also run the scan loop in this process.")
def serve(manifest_dir, kubeconfig, namespaces, tools, dedupe_threshold, out_dir, interval,
          parallelism, store_path, db_uri, bin_dir, fixture_dir, port, host, with_pipeline):
    """Serve the triage API (default port 5002)."""
    import uvicorn

    from .api import create_app

    store = open_store(store_path, db_uri)
    app = create_app(store)

    if with_pipeline:
        config = _pipeline_config(manifest_dir, kubeconfig, namespaces, tools, dedupe_threshold,
                                  out_dir, interval or 60.0, parallelism, bin_dir, fixture_dir)
        threading.Thread(target=run_loop, args=(config, store), daemon=True).start()

    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        sock.bind((host, port))
    except OSError as exc:
        if exc.errno == errno.EADDRINUSE:
            click.echo(f"port {port} already in use", err=True)
            sys.exit(EXIT_RUNTIME)
        raise
    sock.listen(128)
    click.echo(f"serving on {host}:{sock.getsockname()[1]}")
    server = uvicorn.Server(uvicorn.Config(app, log_level="warning"))
    server.run(sockets=[sock])


@main.group()
def tools():
    """Inspect and install scanner binaries."""


@tools.command()
@click.option("--bin-dir", default=None)
def check(bin_dir):
    """Report which scanner binaries are resolvable."""
    for status in toolmgr.check_tools(toolmgr.default_specs(), bin_dir):
        if status.found:
            version = f" ({status.version})" if status.version else ""
            click.echo(f"{status.name.value:<14} found  {status.path}{version}")
        else:
            click.echo(f"{status.name.value:<14} missing")


@tools.command()
@click.argument("name")
@click.option("--bin-dir", default="./bin", show_default=True)
@click.option("--stub-host", default=None, help="Replace release hosts with this base URL (testing).")
def install(name, bin_dir, stub_host):
    """Download and install the latest release of one scanner."""
    specs = {s.binary_name: s for s in toolmgr.default_specs()}
    if name not in specs:
        click.echo(f"unknown tool: {name}", err=True)
        sys.exit(EXIT_CONFIG)
    spec = specs[name]
    if stub_host:
        base = stub_host.rstrip("/")

        def swap(url: str) -> str:
            split = url.split("/", 3)
            return f"{base}/{split[3]}" if len(split) == 4 else base

        spec = toolmgr.ToolSpec(spec.name, swap(spec.releases_url), swap(spec.download_template), spec.binary_name)
    try:
        path = toolmgr.install_tool(spec, bin_dir)
    except toolmgr.ToolManagerError as exc:
        click.echo(f"install failed: {exc}", err=True)
        sys.exit(EXIT_RUNTIME)
    click.echo(f"installed {name} at {path}")


if __name__ == "__main__":
    main()

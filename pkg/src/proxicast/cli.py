"""Operator command line: serve, check-profile, replay, analyze.

Machine-readable output goes to stdout only; every diagnostic goes to
stderr. Exit codes: 0 success, 1 validation failure, 2 runtime error.
"""

from __future__ import annotations

import asyncio
import json
import socket
import sys
from pathlib import Path

import click

from . import analytics
from .calibration import ProfileError, load_profile
from .gesture import TraceFormatError, WaveDetector, parse_trace
from .layout import classify_zone
from .server.config import ConfigError, load_config
from .server.protocol import make_message

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2


@click.group()
def main():
    """Spatial telepresence session engine."""


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(), help="Server config JSON.")
def serve(config_path):
    """Run the session server until interrupted."""
    sys.exit(run_server(config_path))


def run_server(config_path) -> int:
    try:
        cfg = load_config(config_path)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        return EXIT_VALIDATION
    try:
        load_profile(Path(cfg.calibration_profile).read_bytes())
    except OSError as exc:
        click.echo(f"calibration profile unreadable: {exc}", err=True)
        return EXIT_VALIDATION
    except ProfileError as exc:
        click.echo(f"calibration profile invalid: {exc}", err=True)
        return EXIT_VALIDATION

    host, port = cfg.host_port()
    try:
        sock = socket.create_server((host, port))
    except OSError as exc:
        click.echo(f"cannot bind {cfg.listen_addr}: {exc}", err=True)
        return EXIT_RUNTIME

    import uvicorn

    from .server.app import create_app

    app = create_app(cfg)
    server = uvicorn.Server(uvicorn.Config(app, log_level="warning", lifespan="on"))

    async def run() -> int:
        task = asyncio.create_task(server.serve(sockets=[sock]))
        while not server.started and not task.done():
            await asyncio.sleep(0.02)
        if task.done() and not server.started:
            await task
            return EXIT_RUNTIME
        bound_host, bound_port = sock.getsockname()[:2]
        click.echo(json.dumps({"event": "ready", "addr": f"{bound_host}:{bound_port}"}))
        sys.stdout.flush()
        await task
        return EXIT_OK

    try:
        return asyncio.run(run())
    except KeyboardInterrupt:
        # uvicorn re-raises the captured SIGINT once shutdown completes.
        return EXIT_OK
    finally:
        sock.close()


@main.command("check-profile")
@click.argument("profile_path", type=click.Path())
def check_profile(profile_path):
    """Validate a calibration profile and summarize each slot."""
    try:
        data = Path(profile_path).read_bytes()
    except OSError as exc:
        click.echo(f"cannot read profile: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    try:
        profile = load_profile(data)
    except ProfileError as exc:
        for problem in exc.problems:
            click.echo(problem, err=True)
        sys.exit(EXIT_VALIDATION)
    summary = {
        "profile": str(profile_path),
        "profile_version": profile.profile_version,
        "slots": [
            {
                "id": s.slot_id,
                "label": s.label,
                "distance_m": s.distance_m,
                "zone": classify_zone(s.distance_m).label,
            }
            for s in profile.slots
        ],
    }
    click.echo(json.dumps(summary))


@main.command()
@click.option("--trace", "trace_path", required=True, type=click.Path(), help="JSONL hand-sample trace.")
@click.option("--addr", required=True, help="Server address, host:port.")
@click.option("--room", "room_id", required=True, help="Room to feed gestures into.")
@click.option("--participant", default="wave-feeder", show_default=True)
@click.option("--drain-s", default=0.5, show_default=True, help="How long to wait for trailing broadcasts.")
def replay(trace_path, addr, room_id, participant, drain_s):
    """Feed a recorded hand trace to a live room as gesture events."""
    try:
        text = Path(trace_path).read_text(encoding="utf-8")
        samples = parse_trace(text)
    except OSError as exc:
        click.echo(f"cannot read trace: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    except TraceFormatError as exc:
        click.echo(f"trace {trace_path}: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    try:
        asyncio.run(_replay(samples, addr, room_id, participant, drain_s))
    except ReplayConnectionError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_RUNTIME)


class ReplayConnectionError(Exception):
    pass


async def _replay(samples, addr, room_id, participant, drain_s) -> None:
    import websockets

    uri = addr if addr.startswith(("ws://", "wss://")) else f"ws://{addr}"
    uri = uri.rstrip("/") + "/ws"
    try:
        conn = await websockets.connect(uri, max_size=2**20)
    except OSError as exc:
        raise ReplayConnectionError(f"cannot reach server at {uri}: {exc}") from exc

    async with conn as ws:
        join = make_message(
            "join",
            room=room_id,
            frm=participant,
            payload={"display_name": participant, "observer": True},
        )
        await ws.send(json.dumps(join))
        reply = json.loads(await ws.recv())
        if reply.get("type") == "error":
            raise ReplayConnectionError(f"join refused: {reply.get('payload')}")

        detector = WaveDetector()
        for sample in samples:
            event = detector.feed(sample)
            if event is None:
                continue
            payload = {
                "kind": "wave",
                "direction": event.direction.value,
                "t_detect": event.t_detect,
                "window": list(event.window),
            }
            await ws.send(
                json.dumps(
                    make_message("gesture-event", room=room_id, frm=participant, payload=payload)
                )
            )
            click.echo(json.dumps({"event": "gesture", **payload}))

        # Broadcasts triggered by our gestures arrive on this same socket.
        while True:
            try:
                raw = await asyncio.wait_for(ws.recv(), timeout=drain_s)
            except Exception:
                break
            msg = json.loads(raw)
            if msg.get("type") == "layout-state":
                click.echo(
                    json.dumps(
                        {
                            "event": "layout-state",
                            "seq": msg.get("seq"),
                            "version": msg["payload"]["version"],
                            "assignment": msg["payload"]["assignment"],
                        }
                    )
                )


@main.command()
@click.option("--log", "log_path", required=True, type=click.Path(), help="Session event log (JSONL).")
@click.option("--declarations", "decl_path", required=True, type=click.Path(), help="Intimacy declarations JSON.")
@click.option("--out", "out_path", required=True, type=click.Path(), help="Where to write the JSON report.")
@click.option("--csv", "csv_path", default=None, type=click.Path(), help="Optionally also write the matrix as CSV.")
def analyze(log_path, decl_path, out_path, csv_path):
    """Cross-tabulate dwell-dominant distance ranks against declared intimacy."""
    try:
        log_text = Path(log_path).read_text(encoding="utf-8")
        decl_text = Path(decl_path).read_text(encoding="utf-8")
    except OSError as exc:
        click.echo(f"cannot read input: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    try:
        events = analytics.parse_event_log(log_text)
        declarations = analytics.load_declarations(decl_text)
        report = analytics.analyze(events, declarations)
    except analytics.AnalyticsError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_VALIDATION)
    Path(out_path).write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    if csv_path:
        matrix = analytics.ConcordanceMatrix(tuple(tuple(r) for r in report["matrix"]))
        Path(csv_path).write_text(analytics.matrix_csv(matrix), encoding="utf-8")
    click.echo(json.dumps(report["matrix"]))


if __name__ == "__main__":
    main()

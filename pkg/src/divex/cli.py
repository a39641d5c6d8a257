"""divex command line: serve the API, build map catalogs, print usage reports."""

from __future__ import annotations

import argparse
import json
import socket
import sys

from . import som
from .colorfeat import load_concept_scores
from .corpus import load_manifest
from .engine import Engine, EngineConfig, merge_concept_scores
from .errors import PortUnavailable


def _parse_grid(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like 16x16, got {text!r}") from None


def cmd_build_maps(args) -> int:
    corpus = load_manifest(args.manifest)
    if args.concepts:
        merge_concept_scores(corpus, load_concept_scores(args.concepts))
    width, height = args.grid
    template = som.SelfOrganizingMap(
        width=width, height=height, epochs=args.epochs, seed=args.seed
    )
    catalog = som.build_map_catalog(
        corpus,
        som=template,
        min_members=args.min_members,
        concept_threshold=args.threshold,
    )
    som.save_catalog(catalog, args.out)
    print(f"built {len(catalog)} maps -> {args.out}")
    for map_id, fmap in catalog.maps.items():
        print(f"  {map_id}: {fmap.member_count} keyframes")
    return 0


def check_port_free(host: str, port: int) -> None:
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((host, port))
    except OSError as exc:
        raise PortUnavailable(f"cannot bind {host}:{port}: {exc}") from None
    finally:
        probe.close()


def cmd_serve(args) -> int:
    import uvicorn

    from .app import create_app

    config = EngineConfig.load(args.config)
    check_port_free(config.host, config.port)  # fail fast, before loading
    engine = Engine.start(config)
    app = create_app(engine)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    return 0


def cmd_report(args) -> int:
    counts: dict[tuple[str, str, str], int] = {}
    with open(args.log, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            event = json.loads(line)
            key = (event["role"], event["task_type"], event["feature"])
            counts[key] = counts.get(key, 0) + 1
    rows = sorted(counts.items())
    if args.format == "json":
        out = [
            {"role": r, "task_type": t, "feature": f, "count": c} for (r, t, f), c in rows
        ]
        print(json.dumps(out, indent=2))
    else:
        print("role,task_type,feature,count")
        for (r, t, f), c in rows:
            print(f"{r},{t},{f},{c}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="divex")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP/WebSocket service")
    serve.add_argument("--config", required=True, help="JSON config file")
    serve.set_defaults(func=cmd_serve)

    build = sub.add_parser("build-maps", help="train the feature-map catalog")
    build.add_argument("--manifest", required=True)
    build.add_argument("--concepts", default=None, help="concept score CSV")
    build.add_argument("--min-members", type=int, default=som.DEFAULT_MIN_MEMBERS)
    build.add_argument("--threshold", type=float, default=som.DEFAULT_CONCEPT_THRESHOLD)
    build.add_argument("--grid", type=_parse_grid, default=(16, 16), help="WxH, default 16x16")
    build.add_argument("--epochs", type=int, default=20)
    build.add_argument("--seed", type=int, default=0)
    build.add_argument("--out", required=True, help="output directory")
    build.set_defaults(func=cmd_build_maps)

    report = sub.add_parser("report", help="aggregate a usage log into a report")
    report.add_argument("--log", required=True, help="usage JSON-lines file")
    report.add_argument("--format", choices=("csv", "json"), default="csv")
    report.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

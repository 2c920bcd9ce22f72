"""Command line interface.

    catbox init      --space space.json --out campaign.json [engine options]
    catbox suggest   --campaign campaign.json
    catbox tell      --campaign campaign.json --point '<json>' --y 1.23
    catbox export    --campaign campaign.json --csv out.csv
    catbox run-bench --study study.json --out results/
    catbox serve     [--config catbox.toml] [--host H] [--port P] [--store-root DIR]

Commands exit 0 on success and nonzero with a one-line diagnostic on stderr;
campaign file mutations are atomic (written to a temp file, then renamed).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .acquisition import AcqSpec
from .engine import Campaign, CampaignError, SuggestConfig, campaign_from_json, campaign_to_json
from .kernels import KernelError
from .benchmarks import BenchmarkError
from .space import MixedPoint, SearchSpace, SpaceError
from .store import atomic_write_json
from .studies import StudyConfig, StudyError, campaign_history_csv, run_study

_USER_ERRORS = (
    SpaceError,
    CampaignError,
    KernelError,
    BenchmarkError,
    StudyError,
    OSError,
    json.JSONDecodeError,
    KeyError,
    ValueError,
)


def _load_campaign(path: str) -> Campaign:
    return campaign_from_json(json.loads(Path(path).read_text()))


def _save_campaign(path: str, campaign: Campaign) -> None:
    atomic_write_json(Path(path), campaign_to_json(campaign))


def _cmd_init(args: argparse.Namespace) -> int:
    space = SearchSpace.from_json(json.loads(Path(args.space).read_text()))
    config = SuggestConfig(n_init=args.n_init, iters=args.iters, seed=args.seed)
    acq = AcqSpec(kind=args.acq, xi=args.xi, beta=args.beta)
    campaign = Campaign.new(space, config=config, acq=acq, direction=args.direction)
    out = Path(args.out)
    if out.exists() and not args.force:
        raise CampaignError(f"{out} already exists (use --force to overwrite)")
    _save_campaign(args.out, campaign)
    print(json.dumps({"campaign": str(out), "initial_design": [p.to_json() for p in campaign.initial_points]}))
    return 0


def _cmd_suggest(args: argparse.Namespace) -> int:
    campaign = _load_campaign(args.campaign)
    point = campaign.suggest()
    _save_campaign(args.campaign, campaign)
    print(json.dumps(point.to_json(), separators=(",", ":")))
    return 0


def _cmd_tell(args: argparse.Namespace) -> int:
    campaign = _load_campaign(args.campaign)
    point = MixedPoint.from_json(json.loads(args.point))
    campaign.tell(point, args.y)
    campaign.refit()
    _save_campaign(args.campaign, campaign)
    inc = campaign.incumbent
    print(
        json.dumps(
            {
                "n_observations": len(campaign.history),
                "incumbent": None if inc is None else {"point": inc[0].to_json(), "y": inc[1]},
            }
        )
    )
    return 0


def _cmd_export(args: argparse.Namespace) -> int:
    campaign = _load_campaign(args.campaign)
    Path(args.csv).write_text(campaign_history_csv(campaign))
    print(f"wrote {args.csv}")
    return 0


def _cmd_run_bench(args: argparse.Namespace) -> int:
    study = StudyConfig.from_json(json.loads(Path(args.study).read_text()))
    metrics = run_study(study, args.out)
    for method, mm in sorted(metrics.per_method.items()):
        print(f"{method}: mean_final={mm.mean_final:.6g} ef={mm.ef:.4g} af={mm.af:.4g}")
    print(f"artifacts in {args.out}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    from .service import load_settings, serve

    settings = load_settings(
        config_path=args.config,
        overrides={
            "host": args.host,
            "port": args.port,
            "store_root": args.store_root,
            "static_dir": args.static_dir,
        },
    )
    serve(settings)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="catbox", description="mixed-space Bayesian optimization")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", help="create a campaign file and print its initial design")
    p.add_argument("--space", required=True, help="path to a search-space JSON file")
    p.add_argument("--out", required=True, help="path of the campaign file to create")
    p.add_argument("--n-init", dest="n_init", type=int, default=20)
    p.add_argument("--iters", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--direction", choices=("maximize", "minimize"), default="maximize")
    p.add_argument("--acq", choices=("ei", "ucb", "pi"), default="ei")
    p.add_argument("--xi", type=float, default=0.01)
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--force", action="store_true")
    p.set_defaults(fn=_cmd_init)

    p = sub.add_parser("suggest", help="print the next point and record it as pending")
    p.add_argument("--campaign", required=True)
    p.set_defaults(fn=_cmd_suggest)

    p = sub.add_parser("tell", help="record an observation and refit")
    p.add_argument("--campaign", required=True)
    p.add_argument("--point", required=True, help="point JSON, e.g. '{\"cat\":[0],\"con\":[1.5]}'")
    p.add_argument("--y", required=True, type=float)
    p.set_defaults(fn=_cmd_tell)

    p = sub.add_parser("export", help="write the observation history as CSV")
    p.add_argument("--campaign", required=True)
    p.add_argument("--csv", required=True)
    p.set_defaults(fn=_cmd_export)

    p = sub.add_parser("run-bench", help="run a benchmark study from a JSON config")
    p.add_argument("--study", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_run_bench)

    p = sub.add_parser("serve", help="start the campaign HTTP service")
    p.add_argument("--config", default=None, help="TOML config file")
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--store-root", dest="store_root", default=None)
    p.add_argument("--static-dir", dest="static_dir", default=None)
    p.set_defaults(fn=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except _USER_ERRORS as exc:
        print(f"catbox: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

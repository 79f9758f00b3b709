"""Run every configuration in configs/ through the command-line interface.

Each ``name.ini`` is dispatched to the subcommand matching its observation
mode and unknown moment; outputs go to ``<out>/<name>``.
"""
import argparse
import configparser
from pathlib import Path

from invsource.cli import main as cli_main

ROOT = Path(__file__).resolve().parents[1]


def command_for(path: Path) -> str:
    cp = configparser.ConfigParser()
    cp.read(path)
    if cp.has_section("scan"):
        return "scan-tmin" if cp.get("source", "unknown", fallback="t_max") == "t_min" else "scan-tmax"
    return "image-near" if cp.get("observations", "mode", fallback="far") == "near" else "image-far"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/configs")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--verify", action="store_true", help="also run the oracle suite per config")
    args = ap.parse_args()
    status = 0
    for cfg in sorted((ROOT / "configs").glob("*.ini")):
        out = Path(args.out) / cfg.stem
        cmds = [command_for(cfg)] + (["verify"] if args.verify else [])
        for cmd in cmds:
            print(f"== {cfg.name}: {cmd}")
            code = cli_main([cmd, "--config", str(cfg), "--out", str(out), "--threads", str(args.threads)])
            status = status or code
    raise SystemExit(status)


if __name__ == "__main__":
    main()

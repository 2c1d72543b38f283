"""Run `analyze --all` over a corpus directory and print a digest per report.

    python scripts/run_corpus.py corpus/ --out reports/
"""

import argparse
import contextlib
import hashlib
import io
from pathlib import Path

from posmap import cli


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("corpus")
    ap.add_argument("--out", default="reports")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for path in sorted(Path(args.corpus).glob("*.json")):
        rep = out / path.name
        with contextlib.redirect_stdout(io.StringIO()):
            rc = cli.main(["analyze", str(path), "--all", "--seed", str(args.seed), "--json", str(rep)])
        digest = hashlib.sha256(rep.read_bytes()).hexdigest()[:16]
        print(f"{path.name:<22} rc={rc} sha256={digest}")


if __name__ == "__main__":
    main()

"""Write the shipped map corpus (hex floats, fixed seeds) to corpus/."""

import argparse
from pathlib import Path

from posmap import cli

ENTRIES = [
    ("choi.json", ["gen", "choi"]),
    ("transpose2.json", ["gen", "transpose", "--dim", "2"]),
    ("identity2.json", ["gen", "identity", "--dim", "2"]),
    ("kraus3.json", ["gen", "kraus", "--k", "3", "--h", "3", "--seed", "7"]),
    ("cokraus23.json", ["gen", "cokraus", "--k", "2", "--h", "3", "--seed", "8"]),
    ("functional32.json", ["gen", "functional", "--k", "3", "--h", "2", "--seed", "9"]),
    ("pos2.json", ["gen", "random_pos", "--k", "2", "--n-kraus", "1", "--n-cokraus", "1", "--seed", "11"]),
    ("pos3.json", ["gen", "random_pos", "--k", "3", "--n-kraus", "2", "--n-cokraus", "2", "--seed", "12"]),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "corpus"))
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, argv in ENTRIES:
        rc = cli.main([*argv, "--float-format", "hex", "-o", str(out / name)])
        if rc:
            raise SystemExit(f"gen failed for {name}")
        print(out / name)


if __name__ == "__main__":
    main()

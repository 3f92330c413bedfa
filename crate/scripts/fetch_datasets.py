#!/usr/bin/env python3
"""Download the two public UCI data sets and normalize them to the CSV
layouts expected by configs/occupancy.json and configs/activity.json.

    python3 scripts/fetch_datasets.py [--out data]

Raw archives are cached in <out>/raw/ and never committed.

Occupancy: datatest.txt (before training), datatraining.txt, datatest2.txt
(after training) are concatenated in time order. Of these the config uses
the last 2000 rows of datatest, the first 8000 of datatraining and the first
2000 of datatest2, so only those rows are written.

Activity: the `standing` and `cycling` recordings (15 files each) are
interleaved file by file (standing 1, cycling 1, standing 2, ...), each file
trimmed to a multiple of 5 rows so that no window straddles two recordings.
Timestamps are re-based to one global 250 ms grid.
"""

import argparse
import csv
import io
import sys
import urllib.request
import zipfile
from pathlib import Path

OCCUPANCY_URL = "https://archive.ics.uci.edu/static/public/357/occupancy+detection.zip"
ACTIVITY_URL = (
    "https://archive.ics.uci.edu/static/public/366/"
    "activity+recognition+system+based+on+multisensor+data+fusion+arem.zip"
)
OCCUPANCY_COLUMNS = ["date", "Temperature", "Humidity", "Light", "CO2", "HumidityRatio", "Occupancy"]
ACTIVITY_FEATURES = ["avg_rss12", "var_rss12", "avg_rss13", "var_rss13", "avg_rss23", "var_rss23"]
WINDOW = 5


def fetch(url: str, raw: Path) -> zipfile.ZipFile:
    raw.mkdir(parents=True, exist_ok=True)
    target = raw / url.rsplit("/", 1)[-1]
    if not target.exists():
        print(f"downloading {url}", file=sys.stderr)
        with urllib.request.urlopen(url, timeout=120) as resp:
            target.write_bytes(resp.read())
    return zipfile.ZipFile(target)


def member(archive: zipfile.ZipFile, suffix: str) -> str:
    for name in archive.namelist():
        if name.replace("\\", "/").endswith(suffix):
            return name
    raise SystemExit(f"{suffix} not found in {archive.filename}")


def occupancy_rows(archive: zipfile.ZipFile, name: str) -> list:
    text = archive.read(member(archive, name)).decode("utf-8")
    reader = csv.DictReader(io.StringIO(text))
    return [[row[c] for c in OCCUPANCY_COLUMNS] for row in reader]


def build_occupancy(out: Path, raw: Path) -> None:
    archive = fetch(OCCUPANCY_URL, raw)
    before = occupancy_rows(archive, "datatest.txt")
    training = occupancy_rows(archive, "datatraining.txt")
    after = occupancy_rows(archive, "datatest2.txt")
    rows = before[-2000:] + training[:8000] + after[:2000]
    with open(out / "occupancy.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(OCCUPANCY_COLUMNS)
        w.writerows(rows)
    print(f"occupancy.csv: {len(rows)} rows", file=sys.stderr)


def activity_rows(archive: zipfile.ZipFile, name: str) -> list:
    rows = []
    for line in archive.read(name).decode("utf-8", errors="replace").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f for f in line.replace(" ", ",").split(",") if f]
        if len(fields) < 7:
            continue
        rows.append(fields[1:7])
    return rows[: len(rows) - len(rows) % WINDOW]


def build_activity(out: Path, raw: Path) -> None:
    archive = fetch(ACTIVITY_URL, raw)
    names = archive.namelist()

    def recordings(activity: str) -> list:
        found = [n for n in names if f"/{activity}/" in "/" + n and n.endswith(".csv")]
        return sorted(found, key=lambda n: int("".join(c for c in Path(n).stem if c.isdigit()) or 0))

    standing, cycling = recordings("standing"), recordings("cycling")
    rows = []
    for s, c in zip(standing, cycling):
        rows += [(r, 0) for r in activity_rows(archive, s)]
        rows += [(r, 1) for r in activity_rows(archive, c)]
    with open(out / "activity.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["time"] + ACTIVITY_FEATURES + ["label"])
        for i, (features, label) in enumerate(rows):
            w.writerow([f"{i * 0.25:.2f}"] + features + [label])
    print(f"activity.csv: {len(rows)} rows ({len(rows) // WINDOW} windows)", file=sys.stderr)
    if len(rows) != 14400:
        print("warning: expected 14400 rows; adjust the splits in configs/activity.json", file=sys.stderr)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=Path("data"))
    parser.add_argument("--only", choices=["occupancy", "activity"])
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    raw = args.out / "raw"
    if args.only in (None, "occupancy"):
        build_occupancy(args.out, raw)
    if args.only in (None, "activity"):
        build_activity(args.out, raw)


if __name__ == "__main__":
    main()

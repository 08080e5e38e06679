# snapshot.py

import json
import os

import pandas as pd

from config import RESULTS_DIR


def _atomic_write_text(path: str, text: str) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    os.replace(tmp, path)


def write_records(records, path: str) -> None:
    """JSON-lines, one record per line."""
    text = "".join(json.dumps(r, ensure_ascii=False, sort_keys=True, default=str) + "\n" for r in records)
    _atomic_write_text(path, text)


def read_records(path: str) -> list:
    with open(path, "r", encoding="utf-8") as f:
        return [json.loads(line) for line in f if line.strip()]


def write_table(rows, path: str) -> None:
    df = pd.DataFrame(rows) if rows else pd.DataFrame([])
    _atomic_write_text(path, df.to_csv(index=False))


def write_frame(df: pd.DataFrame, path: str) -> None:
    _atomic_write_text(path, df.to_csv(index=False))


def write_snapshot(name: str, records, rows, out_dir: str = RESULTS_DIR) -> tuple:
    """<out_dir>/<name>.jsonl and <out_dir>/<name>.csv; returns both paths."""
    os.makedirs(out_dir, exist_ok=True)
    json_path = os.path.join(out_dir, f"{name}.jsonl")
    csv_path = os.path.join(out_dir, f"{name}.csv")
    write_records(records, json_path)
    write_table(rows, csv_path)
    return json_path, csv_path

"""
Output utilities for saving reports and summary tables.
"""

import os
from typing import Dict, List, Optional

import pandas as pd

from .reports import CampaignReport

TABLE_FORMATS = ("csv", "json")


def _ensure_parent(file_path: str) -> None:
    output_dir = os.path.dirname(file_path)
    if output_dir and not os.path.exists(output_dir):
        os.makedirs(output_dir, exist_ok=True)


def save_dataframe(
    df: pd.DataFrame,
    file_path: str,
    format: Optional[str] = None,
    quiet: bool = False,
) -> str:
    """
    Save a single DataFrame as CSV or JSON records.

    Args:
        df: DataFrame to save
        file_path: Path where the file should be saved
        format: Optional format override ('csv' or 'json')
        quiet: Suppress the status line

    Returns:
        Path to the saved file

    Raises:
        ValueError: If the DataFrame has no columns or the format is unsupported
    """
    if len(df.columns) == 0:
        raise ValueError("Nothing to write: the table has no columns")
    if format and format.lower() not in TABLE_FORMATS:
        raise ValueError(f"Unsupported format: {format}. Supported formats are 'csv' and 'json'.")

    if format and not file_path.endswith(f".{format.lower()}"):
        file_path = f"{file_path}.{format.lower()}"
    _ensure_parent(file_path)

    if file_path.endswith(".json"):
        df.to_json(file_path, orient="records", force_ascii=False)
    else:
        if not file_path.endswith(".csv"):
            file_path = f"{file_path}.csv"
        df.to_csv(file_path, index=False)

    if not quiet:
        print(f"[OK] Successfully wrote {len(df)} rows to {file_path}")
    return file_path


def save_dataframes(
    data_dict: Dict[str, pd.DataFrame],
    output_dir: str,
    format: str = "csv",
    quiet: bool = False,
) -> List[str]:
    """Save several tables into ``output_dir``, one file per name."""
    os.makedirs(output_dir, exist_ok=True)
    return [
        save_dataframe(df, os.path.join(output_dir, f"{name.lower()}.{format}"), quiet=quiet)
        for name, df in data_dict.items()
    ]


def save_report(
    report: CampaignReport,
    file_path: str,
    timing: bool = False,
    quiet: bool = False,
) -> str:
    """
    Write a report. ``.csv`` and ``.json`` paths get the per-record table,
    anything else the key=value text form.
    """
    _, ext = os.path.splitext(file_path)
    if ext.lower().lstrip(".") in TABLE_FORMATS:
        return save_dataframe(report.to_dataframe(timing=timing), file_path, quiet=quiet)
    _ensure_parent(file_path)
    with open(file_path, "w", encoding="utf-8") as f:
        f.write(report.render(timing=timing))
    if not quiet:
        print(f"[OK] Successfully wrote {len(report.records)} records to {file_path}")
    return file_path


def load_report(file_path: str) -> CampaignReport:
    if not os.path.exists(file_path):
        raise ValueError(f"Report file not found: {file_path}")
    with open(file_path, "r", encoding="utf-8") as f:
        text = f.read()
    try:
        return CampaignReport.parse(text)
    except ValueError as e:
        raise ValueError(f"Error loading report '{file_path}': {str(e)}")

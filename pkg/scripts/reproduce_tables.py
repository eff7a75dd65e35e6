"""Run every benchmark suite with its configured parameters and save the tables."""
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from config.settings import get_settings
from src.cli.commands.bench import render_table
from src.data.benchmarks import SUITES, run_suite
from src.utils.logging import get_logger

logger = get_logger(__name__)


def main():
    out_dir = Path(get_settings().OUTPUT_DIR)
    out_dir.mkdir(parents=True, exist_ok=True)
    for suite in SUITES:
        print(f"== {suite} ==")
        reports = run_suite(suite)
        table = render_table(reports)
        print(table)
        (out_dir / f"bench_{suite}.txt").write_text(table + "\n")
        (out_dir / f"bench_{suite}.jsonl").write_text(
            "\n".join(r.model_dump_json() for r in reports) + "\n")
        failed = [r for r in reports if r.error]
        if failed:
            logger.warning("Suite had failing rows", suite=suite, failed=len(failed))


if __name__ == "__main__":
    main()

"""Score extraction output against hand-made gold annotations."""

from pathlib import Path

from affilnorm.evaluation import eval_metrics, f_score, read_gold
from affilnorm.extraction import extract
from affilnorm.pubmed import parse_input

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"


def main() -> None:
    print(f"F from P=0.868, R=0.913: {f_score(0.868, 0.913):.3f}\n")
    records = [extract(text, pmid=pmid) for pmid, text in parse_input(DATA / "gold50.tsv")]
    report = eval_metrics(read_gold(DATA / "gold50.gold.tsv"), records)
    print(report.table())


if __name__ == "__main__":
    main()

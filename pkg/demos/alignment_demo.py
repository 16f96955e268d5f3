"""Character and word level similarity on organization names."""

from affilnorm.alignment import ess, nw_score, sw_score, tss_distance, word_sequence, word_similarity
from affilnorm.gazetteers import default_gazetteers

PAIRS = [
    ("ST. LUKE'S AND ROOSEVELT HOSPITAL", "ST LUKES ROOSEVELT HOSPITAL"),
    ("WOMEN AND CHILDREN HOSPITAL LOS ANGELES", "CHILDREN HOSPITAL LOS ANGELES"),
    ("WOMEN AND CHILDREN HOSPITAL LOS ANGELES", "WOMEN'S & CHILDREN'S HOSPITAL"),
]


def main() -> None:
    print("global and local alignment scores (+1 match, -1 mismatch, -1 gap)")
    for a, b in PAIRS:
        print(f"  NW={nw_score(a, b):4d}  SW={sw_score(a, b):3d}  ESS={ess(a, b):.3f}  {a!r} / {b!r}")

    print("\nword similarity decides whether two words are the same word (> 0.85)")
    for a, b in [("GASTROENTEROLOGY", "GASTROENTEROLGY"), ("UNIVERSITY", "UNIVERSTY"), ("CENTER", "CENTRE")]:
        print(f"  {a:18s} {b:18s} WS={word_similarity(a, b):.3f}")

    stop = default_gazetteers().stopwords
    print("\nword-level edit distance between names (same organization when <= 4)")
    for a, b in [
        ("Washington University School of Medicine", "Washington University"),
        ("Washington University School of Medicine", "The Washington University School of Medicine"),
    ]:
        d = tss_distance(word_sequence(a, stop), word_sequence(b, stop))
        print(f"  d={d:2d}  {a!r} / {b!r}")


if __name__ == "__main__":
    main()

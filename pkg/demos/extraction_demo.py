"""Entity extraction from raw affiliation strings."""

from affilnorm.extraction import extract

AFFILIATIONS = [
    "Duke University Medical Center and Duke Clinical Research Institute, Durham, NC 27710, USA.",
    "VA Boston Healthcare System and Beth Israel Deaconess Medical Center, Harvard Medical School, "
    "Boston, MA 02215, USA. XXX @bidmc.harvard.edu",
    "USDA, ARS, Aquatic Animal Health Research Unit, Auburn University, AL, USA.",
    "Auburn University, Auburn, AL, USA",
    "Centaur Science Group, 1513 28th St NW, Washington, DC 20007 USA.",
    "Universität Bonn, Klinik Innere Medizin, Bonn, Germany",
]


def main() -> None:
    for text in AFFILIATIONS:
        r = extract(text)
        print(text)
        for m in r.organizations:
            print(f"  org      {m.raw!r} ({m.kind.value})")
        print(f"  place    {r.gpe.city} / {r.gpe.state} / {r.gpe.country}")
        for label, values in (("email", r.emails), ("address", r.addresses), ("leftover", r.leftovers)):
            for v in values:
                print(f"  {label:8s} {v!r}")
        if r.used_translation:
            print("  (a phrase was recognized only after keyword translation)")
        print()


if __name__ == "__main__":
    main()

"""Write the corpus automata to programs/*.json."""

import pathlib

from effectree import observations as O

OUT = pathlib.Path(__file__).resolve().parent.parent / "programs"


def main() -> None:
    automata = {
        "must.json": O.must(["return(())"], {"Flip": 2}, [], params=["()"]),
        "may.json": O.may(["return(())"], {"Flip": 2}, [], params=["()"]),
        "store_safety.json": O.store_safety({"r": "tt", "q": "tt"}, ["return(())"]),
        "eventually_c.json": O.eventually_c(),
    }
    for name, apt in automata.items():
        (OUT / name).write_text(apt.dumps() + "\n", encoding="utf-8")
        print(f"wrote {OUT / name}: {len(apt.states)} states")


if __name__ == "__main__":
    main()

"""Write the JSON fixtures in fixtures/ from the hand-built instances and catalog languages."""

from pathlib import Path

from planarvcsp import io
from planarvcsp.catalog import LANGUAGES
from planarvcsp.fixtures import four_constraint_instance, star_instance, two_loops_instance

OUT = Path(__file__).resolve().parent.parent / "fixtures"


def main() -> None:
    OUT.mkdir(exist_ok=True)
    docs = {
        "four_constraint.json": io.instance_to_json(four_constraint_instance()),
        "four_constraint_reversed.json": io.instance_to_json(four_constraint_instance(reverse_gamma3=True)),
        "star.json": io.instance_to_json(*star_instance()),
        "two_loops.json": io.instance_to_json(*two_loops_instance()),
    }
    for name, lang in LANGUAGES.items():
        docs[f"{name}.json"] = io.language_to_json(lang)
    for name, doc in sorted(docs.items()):
        (OUT / name).write_text(io.dumps(doc))
        print(name)


if __name__ == "__main__":
    main()

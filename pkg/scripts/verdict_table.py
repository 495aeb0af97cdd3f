"""Print both classifiers' verdicts for every catalog language."""

import time

from planarvcsp import classify_boolean as cb
from planarvcsp import classify_conservative as cc
from planarvcsp.catalog import LANGUAGES


def main() -> None:
    print(f"{'language':16} {'boolean':44} {'conservative':20} seconds")
    for name, lang in sorted(LANGUAGES.items()):
        t0 = time.perf_counter()
        b = cb.classify_boolean(lang)
        c = cc.classify_conservative(lang)
        extra = f" [{' | '.join(b.holding)}]" if b.verdict == cb.TRACTABLE else ""
        print(f"{name:16} {b.verdict + extra:44} {c.verdict:20} {time.perf_counter() - t0:.2f}")


if __name__ == "__main__":
    main()

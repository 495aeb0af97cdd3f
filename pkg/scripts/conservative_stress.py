"""Run the conservative classifier on random languages over domains of size 2 and 3.

Reports verdict counts and the slowest case; every verdict's certificate is re-checked.
"""

import argparse
import collections
import random
import time
from dataclasses import dataclass

from planarvcsp import classify_conservative as cc
from planarvcsp.closure import Budget
from planarvcsp.core import INF, Language, WeightedRelation, is_multimorphism


@dataclass
class StressConfig:
    samples: int = 40
    seed: int = 1
    max_depth: int = 4


def random_language(rng: random.Random) -> Language:
    d = rng.choice((2, 2, 3))
    rels = []
    for k in range(rng.randint(1, 2)):
        r = rng.choice((2, 3)) if d == 2 else 2
        table = [rng.choice((0, 1, 2, INF)) for _ in range(d ** r)]
        if all(v is INF for v in table):
            table[0] = 0
        rels.append((f"g{k}", WeightedRelation(d, r, tuple(table))))
    return Language(d, tuple(rels))


def check(lang: Language, v: cc.ConservativeVerdict) -> None:
    if v.verdict == cc.INTRACTABLE:
        assert v.soft_loop.verify(lang)
    elif v.verdict == cc.TRACTABLE:
        assert is_multimorphism(v.stp, lang).holds
        assert is_multimorphism(v.mjn, lang).status == "holds_with_equality"


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--samples", type=int, default=StressConfig.samples)
    p.add_argument("--seed", type=int, default=StressConfig.seed)
    args = p.parse_args()
    cfg = StressConfig(samples=args.samples, seed=args.seed)
    rng = random.Random(cfg.seed)
    tally, slowest = collections.Counter(), 0.0
    for _ in range(cfg.samples):
        lang = random_language(rng)
        t0 = time.perf_counter()
        v = cc.classify_conservative(lang, Budget(max_depth=cfg.max_depth))
        slowest = max(slowest, time.perf_counter() - t0)
        check(lang, v)
        tally[v.verdict] += 1
    for verdict, n in tally.most_common():
        print(f"{verdict:20} {n}")
    print(f"slowest case: {slowest:.2f}s")


if __name__ == "__main__":
    main()

"""Classify random Boolean languages and tally the verdicts.

Every PlanarlyIntractable verdict is backed by replaying its derivations, so
the tally doubles as a soundness check of the synthesis pipeline.
"""

import argparse
import collections
import random
from dataclasses import dataclass

from planarvcsp import classify_boolean as cb
from planarvcsp.core import INF, Language, WeightedRelation

VALUES = (0, 1, 2, INF)


@dataclass
class CensusConfig:
    samples: int = 200
    max_arity: int = 3
    relations: int = 2
    seed: int = 0


def random_language(rng: random.Random, cfg: CensusConfig) -> Language:
    rels = []
    for k in range(rng.randint(1, cfg.relations)):
        r = rng.randint(1, cfg.max_arity)
        table = [rng.choice(VALUES) for _ in range(2 ** r)]
        if all(v is INF for v in table):
            table[0] = 0
        rels.append((f"g{k}", WeightedRelation(2, r, tuple(table))))
    return Language(2, tuple(rels))


def run(cfg: CensusConfig) -> collections.Counter:
    rng = random.Random(cfg.seed)
    tally = collections.Counter()
    for _ in range(cfg.samples):
        lang = random_language(rng, cfg)
        v = cb.classify_boolean(lang)
        if v.verdict == cb.INTRACTABLE and v.derivations:
            assert cb.verify_derivations(lang, v.derivations) == []
        tally[v.verdict] += 1
    return tally


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--samples", type=int, default=CensusConfig.samples)
    p.add_argument("--seed", type=int, default=CensusConfig.seed)
    args = p.parse_args()
    tally = run(CensusConfig(samples=args.samples, seed=args.seed))
    for verdict, n in tally.most_common():
        print(f"{verdict:24} {n}")


if __name__ == "__main__":
    main()

"""H-bar dimensions, h-vectors and Lefschetz ranks for every pseudo-manifold in the corpus.

The interesting row is the projective plane, where H-bar is a proper quotient
and the dimensions no longer follow the h-vector.
"""
import argparse
from dataclasses import dataclass, field

from anisotropy import checks
from anisotropy.cli import corpus_names, resolve_complex
from anisotropy.complex import NonOrientableError, classify_pseudomanifold
from anisotropy.fields import QQ, BinaryExtField


@dataclass
class SurveyConfig:
    seeds: tuple[int, ...] = (1, 2)
    characteristics: list[int] = field(default_factory=lambda: [0, 2])


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--seeds", type=int, nargs="*", default=[1, 2])
    cfg = SurveyConfig(tuple(p.parse_args().seeds))
    print(f"{'complex':20s} {'char':>4s}  {'h-vector':18s} {'H-bar dims':18s} lefschetz")
    for name in corpus_names():
        c, _ = resolve_complex(name)
        if not classify_pseudomanifold(c).is_pm:
            continue
        for char in cfg.characteristics:
            F = QQ if char == 0 else BinaryExtField(63)
            try:
                r = checks.rank_profile(c, F, cfg.seeds)
            except NonOrientableError:
                print(f"{name:20s} {char:>4d}  (not orientable)")
                continue
            lef = " ".join(f"m={x['m']}:{x['ranks']}" for x in r.details["lefschetz"])
            print(f"{name:20s} {char:>4d}  {str(c.h_vector()):18s} {str(r.details['hbar_dimensions']):18s} {lef}")


if __name__ == "__main__":
    main()

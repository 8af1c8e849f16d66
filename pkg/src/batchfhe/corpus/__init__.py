"""Benchmark programs shipped with the package."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    file: str
    sizes: tuple[int, ...]  # default benchmark sizes (value of N)
    image: bool = False  # N must be a perfect square
    reconstructed: bool = False  # not listed explicitly among the published benchmarks

    def source(self) -> str:
        return resources.files(__name__).joinpath(self.file).read_text()

    def defines(self, n: int | None) -> dict[str, int]:
        return {} if n is None else {"N": n}


CORPUS: dict[str, CorpusEntry] = {e.name: e for e in (
    CorpusEntry("linear-polynomial", "linear_polynomial.heco", (4096,)),
    CorpusEntry("dot-product", "dot_product.heco", (8,)),
    CorpusEntry("l2-distance", "l2_distance.heco", (4,)),
    CorpusEntry("hamming-distance", "hamming_distance.heco", (4, 4096)),
    CorpusEntry("box-blur", "box_blur.heco", (4096,), image=True),
    CorpusEntry("gx-kernel", "gx_kernel.heco", (4096,), image=True, reconstructed=True),
    CorpusEntry("gy-kernel", "gy_kernel.heco", (4096,), image=True, reconstructed=True),
    CorpusEntry("roberts-cross", "roberts_cross.heco", (4096,), image=True),
    CorpusEntry("sharpening-filter", "sharpening_filter.heco", (4096,), image=True),
)}


def lookup(name: str) -> CorpusEntry:
    key = name.replace("_", "-").removesuffix(".heco")
    if key not in CORPUS:
        raise KeyError(f"unknown benchmark {name!r}; known: {', '.join(CORPUS)}")
    return CORPUS[key]

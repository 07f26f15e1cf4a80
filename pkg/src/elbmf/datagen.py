"""Synthetic Boolean matrices with planted rectangular tiles and additive noise."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .boolean import BoolMatrix

MAX_REJECTIONS = 10_000


class PlacementError(RuntimeError):
    """Non-overlapping tiles could not be placed."""


@dataclass(frozen=True)
class TileSpec:
    row_start: int
    row_len: int
    col_start: int
    col_len: int

    @property
    def area(self) -> int:
        return self.row_len * self.col_len

    def overlaps(self, other: "TileSpec") -> bool:
        return (
            self.row_start < other.row_start + other.row_len
            and other.row_start < self.row_start + self.row_len
            and self.col_start < other.col_start + other.col_len
            and other.col_start < self.col_start + self.col_len
        )

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class GenConfig:
    """Generator parameters.

    Extents are inclusive ``(low, high)`` ranges for a tile's number of rows
    and columns. Equal ranges with ``low == high`` give fixed-size (e.g. square)
    tiles.
    """

    n_rows: int
    n_cols: int
    n_tiles: int
    row_extent: tuple[int, int]
    col_extent: tuple[int, int]
    noise_p: float = 0.0
    overlap: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.n_rows < 1 or self.n_cols < 1:
            raise ValueError("matrix dimensions must be positive")
        if self.n_tiles < 0:
            raise ValueError("n_tiles must be non-negative")
        for name, (lo, hi), dim in (
            ("row_extent", self.row_extent, self.n_rows),
            ("col_extent", self.col_extent, self.n_cols),
        ):
            if not 1 <= lo <= hi <= dim:
                raise ValueError(f"{name} {lo}:{hi} does not fit in dimension {dim}")
        if not 0.0 <= self.noise_p <= 1.0:
            raise ValueError(f"noise_p must lie in [0, 1], got {self.noise_p}")


def _draw_tile(rng: np.random.Generator, cfg: GenConfig) -> TileSpec:
    row_len = int(rng.integers(cfg.row_extent[0], cfg.row_extent[1] + 1))
    col_len = int(rng.integers(cfg.col_extent[0], cfg.col_extent[1] + 1))
    row_start = int(rng.integers(0, cfg.n_rows - row_len + 1))
    col_start = int(rng.integers(0, cfg.n_cols - col_len + 1))
    return TileSpec(row_start, row_len, col_start, col_len)


def place_tiles(cfg: GenConfig, rng: np.random.Generator) -> list[TileSpec]:
    tiles: list[TileSpec] = []
    rejections = 0
    while len(tiles) < cfg.n_tiles:
        tile = _draw_tile(rng, cfg)
        if not cfg.overlap and any(tile.overlaps(t) for t in tiles):
            rejections += 1
            if rejections >= MAX_REJECTIONS:
                raise PlacementError(
                    f"placement infeasible: {MAX_REJECTIONS} consecutive rejections "
                    f"after placing {len(tiles)} of {cfg.n_tiles} tiles"
                )
            continue
        rejections = 0
        tiles.append(tile)
    return tiles


def tiles_to_matrix(tiles, n_rows: int, n_cols: int) -> BoolMatrix:
    a = np.zeros((n_rows, n_cols), dtype=bool)
    for t in tiles:
        a[t.row_start:t.row_start + t.row_len, t.col_start:t.col_start + t.col_len] = True
    return BoolMatrix(a)


def generate(cfg: GenConfig) -> tuple[BoolMatrix, BoolMatrix, list[TileSpec]]:
    """Return ``(A, A_star, tiles)``.

    ``A_star`` is the union of the tiles; ``A`` additionally has every cell set
    to one with probability ``noise_p``. Noise never clears a cell.
    """
    rng = np.random.default_rng(cfg.seed)
    tiles = place_tiles(cfg, rng)
    A_star = tiles_to_matrix(tiles, cfg.n_rows, cfg.n_cols)
    noise = rng.random((cfg.n_rows, cfg.n_cols)) < cfg.noise_p
    A = BoolMatrix(A_star.to_dense() | noise)
    return A, A_star, tiles


def planted_rank(tiles, overlap: bool = False) -> int:
    """Number of rank-one components planted.

    Exact for disjoint tiles; an upper bound on the Boolean rank when tiles
    may overlap.
    """
    return len(tiles)


def _span_jaccard(a0: int, alen: int, b0: int, blen: int) -> float:
    inter = max(0, min(a0 + alen, b0 + blen) - max(a0, b0))
    return inter / (alen + blen - inter)


def max_span_similarity(tiles) -> float:
    """Largest Jaccard overlap between the row spans or column spans of two tiles.

    Tiles whose spans nearly coincide in one dimension can be covered by a
    single rank-one component at little cost, so the effective rank of such an
    instance drops below ``len(tiles)``. Values near 0 mean well-separated tiles.
    """
    best = 0.0
    for i, a in enumerate(tiles):
        for b in tiles[i + 1:]:
            best = max(
                best,
                _span_jaccard(a.row_start, a.row_len, b.row_start, b.row_len),
                _span_jaccard(a.col_start, a.col_len, b.col_start, b.col_len),
            )
    return best


def planted_factors(tiles, n_rows: int, n_cols: int) -> tuple[BoolMatrix, BoolMatrix]:
    """Boolean ``U`` (n x t) and ``V`` (t x m) whose product is the tile union."""
    U = np.zeros((n_rows, len(tiles)), dtype=bool)
    V = np.zeros((len(tiles), n_cols), dtype=bool)
    for i, t in enumerate(tiles):
        U[t.row_start:t.row_start + t.row_len, i] = True
        V[i, t.col_start:t.col_start + t.col_len] = True
    return BoolMatrix(U), BoolMatrix(V)

"""
Encoding Service.

This module generates the sign-encoding strings y^i that define each term
J_i of the inequality. The strings are the length-m bit strings with a
leading 0, i.e. the columns of the augmented Hadamard generator matrix.
Row indices are 1-based in every public function.
"""

import json
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import numpy as np

from ..exceptions import CapacityError, EncodingIndexError, InvalidScenarioError

logger = logging.getLogger(__name__)

MAX_TABLE_M = 20

SignVector = Tuple[int, ...]


@dataclass(frozen=True)
class EncodingTable:
    """The 2^(m-1) encoding strings in lexicographic order."""
    m: int
    rows: Tuple[str, ...]

    def __post_init__(self):
        if self.m < 2:
            raise InvalidScenarioError(f"encoding needs m >= 2, got {self.m}")
        if self.m > MAX_TABLE_M:
            raise CapacityError(f"encoding table for m={self.m} has 2^{self.m - 1} rows, limit is m <= {MAX_TABLE_M}")
        if tuple(self.rows) != _canonical_rows(self.m):
            raise InvalidScenarioError(
                f"rows must be the {2 ** (self.m - 1)} length-{self.m} strings with a leading 0 in lexicographic order"
            )

    def __len__(self) -> int:
        return len(self.rows)

    def row(self, i: int) -> str:
        """Return y^i for 1 <= i <= 2^(m-1)."""
        if not 1 <= i <= len(self.rows):
            raise EncodingIndexError(f"row index {i} outside 1..{len(self.rows)} for m={self.m}")
        return self.rows[i - 1]


@lru_cache(maxsize=32)
def _canonical_rows(m: int) -> Tuple[str, ...]:
    # integers below 2^(m-1) are exactly the m-bit strings with a leading 0
    return tuple(format(j, f"0{m}b") for j in range(2 ** (m - 1)))


@lru_cache(maxsize=32)
def generate_table(m: int) -> EncodingTable:
    """
    Generate the encoding table for m settings.

    Args:
        m: Settings per edge party

    Returns:
        EncodingTable with rows sorted lexicographically; row 1 is all zeros

    Raises:
        InvalidScenarioError: If m < 2
        CapacityError: If m > 20
    """
    if m < 2:
        raise InvalidScenarioError(f"encoding needs m >= 2, got {m}")
    if m > MAX_TABLE_M:
        raise CapacityError(f"encoding table for m={m} has 2^{m - 1} rows, limit is m <= {MAX_TABLE_M}")

    rows = _canonical_rows(m)
    logger.debug(f"Generated encoding table for m={m} with {len(rows)} rows")
    return EncodingTable(m=m, rows=rows)


def sign_vector(table: EncodingTable, i: int) -> SignVector:
    """Signs (-1)^(y^i_x) for x = 1..m."""
    return tuple(1 if bit == "0" else -1 for bit in table.row(i))


def hamming_weight(table: EncodingTable, i: int) -> int:
    """Number of 1-bits in y^i."""
    return table.row(i).count("1")


@lru_cache(maxsize=32)
def _sign_matrix(m: int) -> np.ndarray:
    table = generate_table(m)
    bits = np.array([[int(b) for b in row] for row in table.rows], dtype=np.int64)
    signs = 1 - 2 * bits
    signs.setflags(write=False)
    return signs


def sign_matrix(table: EncodingTable) -> np.ndarray:
    """All sign vectors stacked, shape (2^(m-1), m); row i-1 holds sign_vector(table, i)."""
    return _sign_matrix(table.m)


def generator_matrix(table: EncodingTable) -> np.ndarray:
    """The m x 2^(m-1) binary generator matrix whose i-th column is y^i."""
    return ((1 - sign_matrix(table)) // 2).T.copy()


def table_to_json(table: EncodingTable) -> str:
    return json.dumps({"m": table.m, "rows": list(table.rows)})


def table_from_json(payload: str) -> EncodingTable:
    """Load a table exported by table_to_json and check it against the canonical one."""
    data = json.loads(payload)
    table = generate_table(int(data["m"]))
    if tuple(data["rows"]) != table.rows:
        raise InvalidScenarioError(f"rows in payload do not match the canonical table for m={table.m}")
    return table

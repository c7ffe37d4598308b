from fractions import Fraction

import pytest

from cubeflats.core.builders import build_grid
from cubeflats.core.complex import dump_complex, make_cell
from cubeflats.models.complex import CubeComplex
from cubeflats.models.isometry import RationalOrthoAffine

F = Fraction


def rotation_345() -> RationalOrthoAffine:
    return RationalOrthoAffine.from_rows([[F(3, 5), F(-4, 5)], [F(4, 5), F(3, 5)]])


def three_squares_complex() -> CubeComplex:
    """Three squares glued cyclically around the vertex 'o'; its link is an empty triangle."""
    cells = [make_cell(v, 0, {}) for v in ("o", "x", "y", "z", "p", "q", "r")]
    for name in ("ox", "oy", "oz", "xp", "yp", "yq", "zq", "zr", "xr"):
        cells.append(make_cell(name, 1, {"-1": name[0], "+1": name[1]}))
    cells.append(make_cell("s1", 2, {"-1": "oy", "+1": "xp", "-2": "ox", "+2": "yp"}))
    cells.append(make_cell("s2", 2, {"-1": "oz", "+1": "yq", "-2": "oy", "+2": "zq"}))
    cells.append(make_cell("s3", 2, {"-1": "ox", "+1": "zr", "-2": "oz", "+2": "xr"}))
    return CubeComplex(dimension=2, cells=tuple(cells))


@pytest.fixture
def rotation() -> RationalOrthoAffine:
    return rotation_345()


@pytest.fixture
def three_squares() -> CubeComplex:
    return three_squares_complex()


@pytest.fixture
def grid_3x3() -> CubeComplex:
    return build_grid((3, 3))


@pytest.fixture
def write_json(tmp_path):
    """Writes a complex, model or raw text into tmp_path and returns the path as a string."""
    def _write(payload, name: str = "input.json") -> str:
        path = tmp_path / name
        if isinstance(payload, CubeComplex):
            text = dump_complex(payload)
        elif hasattr(payload, "model_dump_json"):
            text = payload.model_dump_json()
        else:
            text = payload
        path.write_text(text, encoding="utf-8")
        return str(path)

    return _write

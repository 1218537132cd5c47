import pytest

from gaspreeb.exceptions import MeshError
from gaspreeb.generators import SHAPES, generate

EULER = {"sphere": 2, "torus": 0, "modified-torus": 0, "genus2": -2, "cone": 2}


@pytest.mark.parametrize("shape", SHAPES)
def test_closed_oriented_normalized(shape):
    m = generate(shape, 40 if shape == "genus2" else None)
    assert m.is_closed and m.is_consistently_oriented
    assert m.euler_characteristic == EULER[shape]
    assert (m.bounds[1] - m.bounds[0]).max() == 2.0
    # outward orientation: positive enclosed volume
    p = m.vertices[m.triangles]
    vol = (p[:, 0] * (p[:, 1][:, [1, 2, 0]] * p[:, 2][:, [2, 0, 1]]
                      - p[:, 1][:, [2, 0, 1]] * p[:, 2][:, [1, 2, 0]])).sum() / 6
    assert vol > 0


def test_torus_grid_spec():
    m = generate("torus", "48x24")
    assert (m.n_vertices, m.n_triangles) == (1152, 2304)


def test_bad_requests():
    with pytest.raises(MeshError):
        generate("klein-bottle")
    with pytest.raises(MeshError):
        generate("sphere", 4)

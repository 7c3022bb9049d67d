import numpy as np
import pytest

from gptshape.errors import InvalidPolygonError, NoCurveFoundError, TooCoarseError
from gptshape.geometry import (
    DiscretizedBoundary,
    ShapeSpec,
    discretize,
    discretize_parametric,
    discretize_polygon,
    lemniscate_poly,
    trace_implicit,
)
from gptshape.polynomial import Poly2

UNIT_CIRCLE = Poly2.from_terms({(2, 0): 1.0, (0, 2): 1.0, (0, 0): -1.0})


def triangle_spec(circumradius=1.2):
    angles = np.deg2rad([90.0, 210.0, 330.0])
    verts = circumradius * np.column_stack([np.cos(angles), np.sin(angles)])
    return ShapeSpec.polygon(verts)


# parametric ---------------------------------------------------------------


def test_unit_disk_nodes():
    b = discretize_parametric(ShapeSpec.disk(), 64)
    assert b.n == 64
    np.testing.assert_allclose(b.curvatures, 1.0, atol=1e-12)
    np.testing.assert_allclose(b.weights, 2 * np.pi / 64, atol=1e-14)
    np.testing.assert_allclose(b.normals, b.nodes, atol=1e-12)
    np.testing.assert_allclose(np.hypot(b.normals[:, 0], b.normals[:, 1]), 1.0, atol=1e-12)


def test_ellipse_area_and_identities():
    b = discretize_parametric(ShapeSpec.ellipse(2.0, 1.0), 256)
    assert b.area() == pytest.approx(2 * np.pi, abs=1e-10)
    flux = (b.normals * b.weights[:, None]).sum(axis=0)
    np.testing.assert_allclose(flux, 0.0, atol=1e-10)


def test_tilted_shifted_ellipse():
    b = discretize_parametric(ShapeSpec.ellipse(2.0, 1.0, center=(0.7, -0.3), tilt=0.5), 256)
    assert b.area() == pytest.approx(2 * np.pi, abs=1e-10)
    assert b.perimeter() == pytest.approx(9.688448, abs=1e-4)  # standard ellipse value


def test_flower_closed_curve_identity():
    b = discretize_parametric(ShapeSpec.flower(1.0, 0.3, 5), 256)
    flux = (b.normals * b.weights[:, None]).sum(axis=0)
    np.testing.assert_allclose(flux, 0.0, atol=1e-10)
    assert b.area() > 0


def test_flower_missing_petal():
    full = discretize_parametric(ShapeSpec.flower(1.0, 0.3, 5), 512)
    partial_flower = discretize_parametric(ShapeSpec.flower(1.0, 0.3, 5, missing_petal=True), 512)
    assert partial_flower.area() < full.area()
    flux = (partial_flower.normals * partial_flower.weights[:, None]).sum(axis=0)
    np.testing.assert_allclose(flux, 0.0, atol=1e-10)
    # the suppressed petal sits at angle 0: radius there stays at the base value
    east = partial_flower.nodes[np.argmax(partial_flower.nodes[:, 0])]
    assert np.hypot(*east) < 1.05


def test_too_coarse_rejected():
    with pytest.raises(TooCoarseError):
        discretize_parametric(ShapeSpec.disk(), 8)


def test_parametric_spectral_perimeter_convergence():
    # periodic trapezoid rule on a smooth curve: errors collapse fast
    ref = discretize_parametric(ShapeSpec.flower(1.0, 0.3, 5), 4096).perimeter()
    errs = [abs(discretize_parametric(ShapeSpec.flower(1.0, 0.3, 5), n).perimeter() - ref)
            for n in (32, 64)]
    assert errs[0] > 0
    assert errs[1] < errs[0] / 16


# polygons -------------------------------------------------------------------


def test_unit_square_area():
    sq = ShapeSpec.polygon([(0, 0), (1, 0), (1, 1), (0, 1)])
    b = discretize_polygon(sq, 64, grading=3.0)
    assert b.area() == pytest.approx(1.0, abs=1e-8)
    np.testing.assert_allclose(b.curvatures, 0.0)


def test_triangle_perimeter():
    tri = ShapeSpec.polygon([(0, 0), (1, 0), (0.5, np.sqrt(3) / 2)])
    b = discretize_polygon(tri, 64, grading=3.0)
    assert b.perimeter() == pytest.approx(3.0, abs=1e-6)
    assert b.n == 3 * 64


def test_polygon_flux_identity_and_orientation():
    diamond = ShapeSpec.polygon([(1.2, 0), (0, 0.8), (-1.2, 0), (0, -0.8)])
    b = discretize_polygon(diamond, 32)
    flux = (b.normals * b.weights[:, None]).sum(axis=0)
    np.testing.assert_allclose(flux, 0.0, atol=1e-10)
    # clockwise input must still receive outward normals
    cw = ShapeSpec.polygon([(0, -0.8), (-1.2, 0), (0, 0.8), (1.2, 0)])
    bcw = discretize_polygon(cw, 32)
    assert bcw.area() > 0


def test_polygon_nodes_avoid_corners():
    tri = triangle_spec()
    b = discretize_polygon(tri, 24)
    verts = np.asarray(tri.params["vertices"])
    dmin = min(np.min(np.linalg.norm(b.nodes - v, axis=1)) for v in verts)
    assert dmin > 1e-8


def test_self_intersecting_polygon_rejected():
    bowtie = ShapeSpec.polygon([(0, 0), (1, 1), (1, 0), (0, 1)])
    with pytest.raises(InvalidPolygonError):
        discretize_polygon(bowtie, 32)


def test_degenerate_polygon_rejected():
    with pytest.raises(InvalidPolygonError):
        discretize_polygon(ShapeSpec.polygon([(0, 0), (0, 0), (1, 0)]), 32)


# implicit tracing ------------------------------------------------------------


def test_trace_circle_accuracy():
    b = trace_implicit(UNIT_CIRCLE, box=(-2, 2, -2, 2), grid=256, n=256)
    assert b.n_components == 1
    # nodes genuinely on the curve
    resid = np.abs(UNIT_CIRCLE(b.nodes))
    assert np.max(resid) <= 1e-10 * np.max(np.abs(UNIT_CIRCLE.coeffs))
    assert b.area() == pytest.approx(np.pi, abs=1e-4)
    assert b.perimeter() == pytest.approx(2 * np.pi, abs=1e-4)
    np.testing.assert_allclose(b.curvatures, 1.0, atol=1e-6)
    # outward normals: positive radial component
    radial = np.sum(b.nodes * b.normals, axis=1)
    assert np.all(radial > 0.9)


def test_trace_orientation_with_flipped_sign():
    # interior is where p > 0 here, so grad p points inward and must be flipped
    inside_pos = Poly2.from_terms({(0, 0): 1.0, (2, 0): -1.0, (0, 2): -1.0})
    b = trace_implicit(inside_pos, box=(-2, 2, -2, 2), grid=128, n=64)
    radial = np.sum(b.nodes * b.normals, axis=1)
    assert np.all(radial > 0.9)
    assert b.area() == pytest.approx(np.pi, abs=1e-3)
    np.testing.assert_allclose(b.curvatures, 1.0, atol=1e-4)


def test_trace_lemniscate_components():
    poles = [(1.0, 0.0), (-1.0, 0.0)]
    two = trace_implicit(lemniscate_poly(poles, 0.2), box=(-2, 2, -2, 2), grid=256, n=128)
    assert two.n_components == 2
    assert two.n == 256
    # per-component closed-curve identity and positive area
    for cid in range(2):
        mask = two.component_id == cid
        flux = (two.normals[mask] * two.weights[mask, None]).sum(axis=0)
        np.testing.assert_allclose(flux, 0.0, atol=1e-8)
    # components sorted by leftmost node
    assert np.min(two.nodes[two.component_id == 0, 0]) < np.min(
        two.nodes[two.component_id == 1, 0])

    one = trace_implicit(lemniscate_poly(poles, 1.5), box=(-3, 3, -3, 3), grid=256, n=128)
    assert one.n_components == 1


def test_trace_open_curves_warn_and_empty_raises():
    hyperbola = Poly2.from_terms({(1, 1): 1.0, (0, 0): -0.1})
    with pytest.raises(NoCurveFoundError):
        with pytest.warns(RuntimeWarning):
            trace_implicit(hyperbola, box=(-2, 2, -2, 2), grid=64, n=32)
    no_zero = Poly2.from_terms({(2, 0): 1.0, (0, 2): 1.0, (0, 0): 1.0})
    with pytest.raises(NoCurveFoundError):
        trace_implicit(no_zero, box=(-2, 2, -2, 2), grid=64, n=32)


# shared structure -------------------------------------------------------------


def test_dispatch_and_csv_round_trip(tmp_path):
    b = discretize(ShapeSpec.lemniscate([(1, 0), (-1, 0)], 0.2), 64,
                   box=(-2, 2, -2, 2), grid=128)
    path = tmp_path / "boundary.csv"
    b.save_csv(path)
    loaded = DiscretizedBoundary.load_csv(path)
    np.testing.assert_allclose(loaded.nodes, b.nodes, atol=1e-12)
    np.testing.assert_allclose(loaded.weights, b.weights, atol=1e-12)
    np.testing.assert_array_equal(loaded.component_id, b.component_id)
    header = path.read_text().splitlines()[0]
    assert header == "x,y,nx,ny,w,kappa,component"


def test_shape_spec_json_round_trip():
    spec = ShapeSpec.ellipse(2.0, 1.0, center=(0.5, 0.0), tilt=0.3)
    again = ShapeSpec.from_json(spec.to_json())
    assert again.kind == "ellipse"
    assert again.params["a"] == 2.0
    imp = ShapeSpec.implicit(UNIT_CIRCLE, box=(-2, 2, -2, 2))
    again = ShapeSpec.from_json(imp.to_json())
    np.testing.assert_array_equal(again.params["poly"].coeffs, UNIT_CIRCLE.coeffs)


def test_lemniscate_poly_values():
    p = lemniscate_poly([(1.0, 0.0), (-1.0, 0.0)], 0.2)
    assert p.degree == 4
    # at (0, 0) the product of squared distances is 1, so p = 1 - 0.2
    assert p(np.zeros(2)) == pytest.approx(0.8)

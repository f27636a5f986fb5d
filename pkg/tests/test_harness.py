"""Error metrics, masking, phantoms, and the sweep driver."""

import numpy as np
import pytest

import specreg as sr
from specreg import harness


def vf_1d(values):
    return sr.VectorField.from_arrays([np.asarray(values, dtype=float)])


# ---------------------------------------------------------------------------
# rmse / mse_paper
# ---------------------------------------------------------------------------

def test_metrics_zero_for_identical_fields():
    u = sr.VectorField.from_arrays([np.arange(6.0).reshape(2, 3),
                                    np.ones((2, 3))])
    assert sr.rmse(u, u) == 0.0
    assert sr.mse_paper(u, u) == 0.0


def test_metrics_single_masked_voxel():
    # one voxel in the mask, off by 2: rmse = 2 and the unrooted form is 4
    t = vf_1d([2.0, 0.0])
    e = vf_1d([0.0, 0.0])
    mask = sr.MaskField.from_array([True, False])
    assert sr.rmse(t, e, mask) == pytest.approx(2.0)
    assert sr.mse_paper(t, e, mask) == pytest.approx(4.0)


def test_metrics_mask_can_exclude_all_error():
    t = vf_1d([2.0, 0.0])
    e = vf_1d([0.0, 0.0])
    mask = sr.MaskField.from_array([False, True])
    assert sr.rmse(t, e, mask) == 0.0


def test_rmse_normalizes_by_components_and_voxels():
    # a single component residual of 3 on a 2-component 2x3 grid:
    # sqrt(9 / (2 * 6))
    a = np.zeros((2, 3))
    b = np.zeros((2, 3))
    b[1, 2] = 3.0
    t = sr.VectorField.from_arrays([a, a])
    e = sr.VectorField.from_arrays([b, a])
    assert sr.rmse(t, e) == pytest.approx(np.sqrt(9.0 / 12.0))
    assert sr.mse_paper(t, e) == pytest.approx(9.0 / 12.0)


def test_metrics_are_symmetric():
    rng = np.random.Generator(np.random.Philox(1))
    t = sr.VectorField.from_arrays([rng.normal(size=(5, 5)) for _ in range(2)])
    e = sr.VectorField.from_arrays([rng.normal(size=(5, 5)) for _ in range(2)])
    assert sr.rmse(t, e) == sr.rmse(e, t)
    assert sr.mse_paper(t, e) == sr.mse_paper(e, t)


def test_mse_is_square_of_rmse():
    rng = np.random.Generator(np.random.Philox(2))
    t = sr.VectorField.from_arrays([rng.normal(size=(4, 6)) for _ in range(2)])
    e = sr.VectorField.from_arrays([rng.normal(size=(4, 6)) for _ in range(2)])
    assert sr.mse_paper(t, e) == pytest.approx(sr.rmse(t, e) ** 2, rel=1e-12)


def test_metrics_reject_empty_mask():
    t = vf_1d([0.0, 0.0])
    mask = sr.MaskField.from_array([False, False])
    with pytest.raises(ValueError):
        sr.rmse(t, t, mask)


def test_metrics_reject_mismatched_grids():
    t = vf_1d([0.0, 0.0])
    e = vf_1d([0.0, 0.0, 0.0])
    with pytest.raises(sr.ShapeMismatchError):
        sr.rmse(t, e)
    mask = sr.MaskField.from_array([True, True, True])
    with pytest.raises(sr.ShapeMismatchError):
        sr.rmse(t, t, mask)


# ---------------------------------------------------------------------------
# threshold_mask
# ---------------------------------------------------------------------------

def test_mask_tau_zero_keeps_positive_image():
    rng = np.random.Generator(np.random.Philox(3))
    img = sr.ScalarField.from_array(rng.uniform(0.1, 1.0, size=(9, 9)))
    assert sr.threshold_mask(img, 0.0).data.all()


def test_mask_tau_one_excludes_everything():
    rng = np.random.Generator(np.random.Philox(4))
    img = sr.ScalarField.from_array(rng.uniform(0.0, 1.0, size=(9, 9)))
    mask = sr.threshold_mask(img, 1.0)
    assert not mask.data.any()


def test_mask_of_disk_phantom_is_the_disk():
    img = sr.disk(sr.GridShape((48, 48)))  # intensity 0.8 on 0 background
    mask = sr.threshold_mask(img, 0.4)
    assert np.array_equal(mask.data, img.data > 0.4)
    assert mask.data.any() and not mask.data.all()


def test_mask_closing_fills_pinholes():
    img_arr = np.full((12, 12), 0.9)
    img_arr[6, 6] = 0.0  # single interior pinhole
    mask = sr.threshold_mask(sr.ScalarField.from_array(img_arr), 0.5)
    assert mask.data.all()


def test_mask_rejects_tau_outside_unit_interval():
    img = sr.disk(sr.GridShape((8, 8)))
    with pytest.raises(ValueError):
        sr.threshold_mask(img, -0.1)
    with pytest.raises(ValueError):
        sr.threshold_mask(img, 1.5)


# ---------------------------------------------------------------------------
# Phantoms
# ---------------------------------------------------------------------------

def test_disk_phantom_is_binary():
    img = sr.disk(sr.GridShape((32, 32)))
    assert set(np.unique(img.data)) == {0.0, 0.8}


def test_rings_phantom_spans_unit_interval():
    img = sr.rings(sr.GridShape((32, 32)))
    assert img.data.min() >= 0.0 and img.data.max() <= 1.0
    assert img.data.std() > 0.1  # actual structure, not a constant


def test_blobs_phantom_determinism_and_range():
    g = sr.GridShape((64, 64))
    a = sr.blobs(g, seed=7)
    b = sr.blobs(g, seed=7)
    c = sr.blobs(g, seed=8)
    assert a.data.tobytes() == b.data.tobytes()
    assert a.data.tobytes() != c.data.tobytes()
    assert a.data.min() >= 0.0 and a.data.max() <= 1.0


def test_blobs_phantom_tapers_to_zero_border():
    img = sr.blobs(sr.GridShape((64, 64)), seed=7)
    assert not img.data[0, :].any() and not img.data[-1, :].any()
    assert not img.data[:, 0].any() and not img.data[:, -1].any()


def test_phantoms_support_3d():
    img = sr.blobs(sr.GridShape((12, 14, 10)), seed=1)
    assert img.data.shape == (12, 14, 10)
    assert sr.disk(sr.GridShape((8, 8, 8))).data.max() == 0.8


# ---------------------------------------------------------------------------
# SweepSpec
# ---------------------------------------------------------------------------

def test_sweep_spec_round_trips_through_json(tmp_path):
    spec = sr.SweepSpec(mode="adaptive", weights=(0.5, 1.0), trials=2,
                        sigma=3.0, spacing_frac=0.15, seeds=(0, 1),
                        image="phantom.ndf")
    p = tmp_path / "spec.json"
    p.write_text(spec.to_json())
    assert sr.load_sweep_spec(p) == spec


def test_sweep_spec_missing_key(tmp_path):
    p = tmp_path / "spec.json"
    p.write_text('{"mode": "adaptive"}')
    with pytest.raises(ValueError):
        sr.load_sweep_spec(p)


def test_sweep_spec_validation():
    base = dict(mode="adaptive", weights=(1.0,), trials=1, sigma=3.0,
                spacing_frac=0.15, seeds=(0,), image="x.ndf")
    with pytest.raises(ValueError):
        sr.SweepSpec(**{**base, "mode": "both"})
    with pytest.raises(ValueError):
        sr.SweepSpec(**{**base, "weights": ()})
    with pytest.raises(ValueError):
        sr.SweepSpec(**{**base, "weights": (0.0,)})
    with pytest.raises(ValueError):
        sr.SweepSpec(**{**base, "seeds": (0, 1)})
    with pytest.raises(ValueError):
        sr.SweepSpec(**{**base, "trials": 0})


# ---------------------------------------------------------------------------
# load_image
# ---------------------------------------------------------------------------

def test_load_image_dispatches_by_extension(tmp_path):
    img = sr.blobs(sr.GridShape((16, 16)), seed=5)
    ndf = tmp_path / "img.ndf"
    pgm = tmp_path / "img.pgm"
    sr.write_ndf(img, ndf)
    sr.write_pgm(img, pgm)
    assert np.array_equal(sr.load_image(ndf).data, img.data)
    assert sr.load_image(pgm).shape.dims == (16, 16)


def test_load_image_rejects_vector_ndf(tmp_path):
    u = sr.VectorField.zeros(sr.GridShape((4, 4)))
    p = tmp_path / "u.ndf"
    sr.write_ndf(u, p)
    with pytest.raises(ValueError):
        sr.load_image(p)


# ---------------------------------------------------------------------------
# run_sweep
# ---------------------------------------------------------------------------

def make_phantom_file(tmp_path, dims=(24, 24), seed=3):
    img = sr.blobs(sr.GridShape(dims), seed=seed)
    p = tmp_path / "phantom.ndf"
    sr.write_ndf(img, p)
    return p


def test_sweep_sigma_zero_scores_zero(tmp_path):
    p = make_phantom_file(tmp_path)
    spec = sr.SweepSpec(mode="adaptive", weights=(1.0,), trials=2, sigma=0.0,
                        spacing_frac=0.25, seeds=(0, 1), image=str(p))
    rows = sr.run_sweep(spec, max_iter=10)
    assert len(rows) == 2
    for row in rows:
        assert row.initial_rmse == 0.0
        assert row.final_rmse == 0.0
        assert row.termination == "tolerance"


def test_sweep_single_pair_gives_single_row(tmp_path):
    p = make_phantom_file(tmp_path)
    spec = sr.SweepSpec(mode="quadratic", weights=(5.0,), trials=1, sigma=1.0,
                        spacing_frac=0.25, seeds=(4,), image=str(p))
    rows = sr.run_sweep(spec, max_iter=5)
    assert len(rows) == 1
    row = rows[0]
    assert (row.mode, row.w, row.seed) == ("quadratic", 5.0, 4)
    assert row.initial_rmse > 0.0
    assert np.isfinite(row.final_rmse)
    assert row.wall_time_seconds > 0.0


def test_sweep_rows_come_in_weight_major_order(tmp_path):
    p = make_phantom_file(tmp_path)
    spec = sr.SweepSpec(mode="adaptive", weights=(0.5, 1.0), trials=2,
                        sigma=1.0, spacing_frac=0.25, seeds=(0, 1), image=str(p))
    rows = sr.run_sweep(spec, max_iter=3)
    assert [(r.w, r.seed) for r in rows] == [(0.5, 0), (0.5, 1), (1.0, 0), (1.0, 1)]


def test_sweep_csv_rerun_is_byte_identical(tmp_path):
    p = make_phantom_file(tmp_path)
    spec = sr.SweepSpec(mode="adaptive", weights=(1.0, 2.0), trials=2,
                        sigma=2.0, spacing_frac=0.25, seeds=(0, 1), image=str(p))
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    sr.write_sweep_csv(sr.run_sweep(spec, max_iter=20), out1)
    sr.write_sweep_csv(sr.run_sweep(spec, max_iter=20), out2)
    assert out1.read_bytes() == out2.read_bytes()


def test_sweep_csv_layout(tmp_path):
    rows = [sr.SweepRow(mode="adaptive", w=0.5, seed=3, initial_rmse=2.5,
                        final_rmse=0.75, iterations=12,
                        termination="tolerance", wall_time_seconds=0.123)]
    out = tmp_path / "rows.csv"
    sr.write_sweep_csv(rows, out)
    text = out.read_text()
    lines = text.split("\n")
    assert lines[0] == ",".join(sr.CSV_COLUMNS)
    assert lines[1] == "adaptive,0.5,3,2.5,0.75,12,tolerance"
    assert "wall" not in text  # timing never enters the canonical artifact


def test_sweep_records_failures_without_aborting(tmp_path, monkeypatch):
    p = make_phantom_file(tmp_path)

    def explode(*args, **kwargs):
        raise RuntimeError("synthetic failure")

    monkeypatch.setattr(harness, "register", explode)
    spec = sr.SweepSpec(mode="adaptive", weights=(1.0,), trials=2, sigma=1.0,
                        spacing_frac=0.25, seeds=(0, 1), image=str(p))
    rows = sr.run_sweep(spec, max_iter=3)
    assert len(rows) == 2
    for row in rows:
        assert row.termination == "error:RuntimeError"
        assert np.isnan(row.final_rmse)
        assert row.iterations == 0


def test_sweep_log_emits_one_line_per_row(tmp_path):
    p = make_phantom_file(tmp_path)
    spec = sr.SweepSpec(mode="adaptive", weights=(1.0,), trials=2, sigma=1.0,
                        spacing_frac=0.25, seeds=(0, 1), image=str(p))
    lines = []
    rows = sr.run_sweep(spec, max_iter=3, log=lines.append)
    assert len(lines) == len(rows)
    assert lines[0].startswith("w=1 seed=0 ")


# ---------------------------------------------------------------------------
# summarize_sweep
# ---------------------------------------------------------------------------

def row(mode, w, seed, final, term="tolerance"):
    return sr.SweepRow(mode=mode, w=w, seed=seed, initial_rmse=2.0,
                       final_rmse=final, iterations=10, termination=term,
                       wall_time_seconds=0.1)


def test_summarize_groups_and_medians():
    rows = [row("adaptive", 1.0, s, f) for s, f in enumerate([0.4, 0.6, 0.8])]
    rows += [row("adaptive", 2.0, s, f) for s, f in enumerate([1.0, 1.2, 1.1])]
    summary = sr.summarize_sweep(rows)
    assert len(summary) == 2
    by_w = {entry["w"]: entry for entry in summary}
    assert by_w[1.0]["median_final_rmse"] == pytest.approx(0.6)
    assert by_w[2.0]["median_final_rmse"] == pytest.approx(1.1)
    assert by_w[1.0]["median_initial_rmse"] == pytest.approx(2.0)
    assert by_w[1.0]["trials"] == 3 and by_w[1.0]["completed"] == 3


def test_summarize_drops_failed_trials():
    rows = [row("adaptive", 1.0, 0, 0.5),
            row("adaptive", 1.0, 1, float("nan"), term="error:RuntimeError"),
            row("adaptive", 1.0, 2, 0.7)]
    (entry,) = sr.summarize_sweep(rows)
    assert entry["trials"] == 3
    assert entry["completed"] == 2
    assert entry["median_final_rmse"] == pytest.approx(0.6)

import numpy as np
import pytest

import spectral_loft as sl


def dice(a, b):
    a = a.astype(bool)
    b = b.astype(bool)
    total = a.sum() + b.sum()
    return 1.0 if total == 0 else 2.0 * (a & b).sum() / total


def test_phantom_is_deterministic():
    a = sl.generate_phantom(seed=3, ghost_specks=40)
    b = sl.generate_phantom(seed=3, ghost_specks=40)
    assert a["image"].dtype == np.uint16
    assert a["image"].shape == (448, 448)
    assert np.array_equal(a["image"], b["image"])
    assert not (a["dark_class"] & ~a["body"]).any()


def test_missing_seed_is_rejected():
    with pytest.raises(sl.SpectralError, match="seed"):
        sl.generate_phantom(width=64, height=64)


def test_tissue_segmentation():
    ph = sl.generate_phantom(seed=9, ghost_specks=40)
    r = sl.segment(ph["image"], "tissue")
    assert 300 < r["threshold"] < 800
    assert r["mask"].dtype == bool
    assert dice(r["mask"], ph["dark_class"]) >= 0.93
    assert r["params"]["schema"] == "spectral.params/1"
    report = sl.evaluate(r["mask"], ph["dark_class"])
    assert report["dsc"] == pytest.approx(dice(r["mask"], ph["dark_class"]), abs=1e-12)


def test_segment_with_overrides_and_preprocess():
    ph = sl.generate_phantom(seed=4, ghost_specks=10)
    pre = sl.preprocess(ph["image"], iterations=5)
    assert pre["image"].shape == ph["image"].shape
    assert pre["k"] > 0
    r = sl.segment(pre["image"], "tissue", pre_done=True, lo=320, hi=790)
    assert r["threshold_info"]["bounds"] == {"lo": 320, "hi": 790}
    with pytest.raises(sl.SpectralError):
        sl.segment(ph["image"], "lesion", lo=300)


def test_find_loft():
    counts = np.full(1000, 9, dtype=np.uint64)
    counts[400:405] = [5, 3, 4, 2, 6]
    t = sl.find_loft(counts, 300, 800, 1)
    assert t["threshold"] == 403
    assert [c["intensity"] for c in t["candidates"]] == [401, 403]
    with pytest.raises(sl.NoLoftFound):
        sl.find_loft(np.arange(1000, dtype=np.uint64), 300, 800, 1)


def test_no_loft_on_flat_image():
    img = np.zeros((64, 64), dtype=np.uint16)
    img[8:56, 8:56] = 1000
    with pytest.raises(sl.NoLoftFound, match="no loft found"):
        sl.segment(img)
    assert issubclass(sl.NoLoftFound, ValueError)


def test_morphology():
    m = np.zeros((7, 7), dtype=bool)
    m[3, 3] = True
    plus = sl.dilate(m, "cross", 1)
    assert plus.sum() == 5
    assert not sl.erode(m, "cross", 1).any()
    assert not sl.opening(m, "disk", 1).any()
    with pytest.raises(sl.SpectralError):
        sl.erode(m, "star", 1)


def test_image_round_trip(tmp_path):
    img = np.arange(12, dtype=np.uint16).reshape(3, 4) * 5000
    for fmt in ("pgm", "png"):
        path = str(tmp_path / f"a.{fmt}")
        sl.write_image(img, path, fmt)
        assert np.array_equal(sl.read_image(path), img)

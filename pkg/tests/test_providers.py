import json
import os
import stat

import pytest

from iconoscope import (
    AttributeInstance,
    BinaryMask,
    BoundingBox,
    ClassMap,
    Detection,
    FixtureProvider,
    ImageDims,
    PixelPoint,
    ProtocolError,
    ProviderResponse,
    ProviderUnavailableError,
    RawRegion,
    SemanticClass,
    SubprocessProvider,
    default_class_map,
    detect_attributes,
    encode_mask,
    rescale_response,
    retain_attributes,
    retain_detections,
    segment_figures,
    sidecar_for_image,
)


def det(label, confidence, box, mask=None):
    return Detection(label=label, confidence=confidence, box=BoundingBox(*box), mask=mask)


def response_doc(width=16, height=16):
    return {
        "dims": {"width": width, "height": height},
        "detections": [{"label": "keys", "confidence": 0.93, "box": [2, 2, 6, 6]}],
        "regions": [
            {"raw_label": "person", "confidence": 0.9,
             "mask": {"width": width, "height": height,
                      "rows": [[[0, 4]]] + [[] for _ in range(height - 1)]}},
        ],
    }


def write_script(path, body):
    path.write_text("#!/bin/sh\n" + body, encoding="utf-8")
    path.chmod(path.stat().st_mode | stat.S_IXUSR | stat.S_IXGRP | stat.S_IXOTH)
    return path


class TestFixtureProvider:
    def test_reads_sidecar_next_to_image(self, tmp_path):
        image = tmp_path / "panel.png"
        image.write_bytes(b"")
        sidecar_for_image(image).write_text(json.dumps(response_doc()), encoding="utf-8")
        provider = FixtureProvider()
        response = provider.perceive(image)
        assert response.dims == ImageDims(16, 16)
        assert provider.perceive(image) == response

    def test_explicit_sidecar_wins(self, tmp_path):
        image = tmp_path / "panel.png"
        image.write_bytes(b"")
        pinned = tmp_path / "other.json"
        pinned.write_text(json.dumps(response_doc(width=8, height=8)), encoding="utf-8")
        provider = FixtureProvider(sidecar_path=pinned)
        assert provider.perceive(image).dims == ImageDims(8, 8)

    def test_missing_sidecar(self, tmp_path):
        with pytest.raises(ProviderUnavailableError):
            FixtureProvider().perceive(tmp_path / "absent.png")

    def test_sidecar_naming(self):
        from pathlib import Path

        assert sidecar_for_image(Path("a/b/panel.png")) == Path("a/b/panel.detections.json")


class TestSubprocessProvider:
    def test_parses_stdout(self, tmp_path):
        payload = tmp_path / "payload.json"
        payload.write_text(json.dumps(response_doc()), encoding="utf-8")
        exe = write_script(tmp_path / "provider.sh", f'cat "{payload}"\n')
        response = SubprocessProvider(exe).perceive(tmp_path / "panel.png")
        assert response.dims == ImageDims(16, 16)
        assert [d.label for d in response.detections] == ["keys"]

    def test_receives_image_path_argument(self, tmp_path):
        exe = write_script(
            tmp_path / "provider.sh",
            'printf \'{"dims": {"width": %s, "height": 1}}\' "$(basename "$1" .png | wc -c)"\n',
        )
        # "abcd" plus the trailing newline from basename gives width 5
        response = SubprocessProvider(exe).perceive(tmp_path / "abcd.png")
        assert response.dims.width == 5

    def test_nonzero_exit_is_protocol_error(self, tmp_path):
        exe = write_script(tmp_path / "provider.sh",
                           'echo "model file corrupt" >&2\nexit 3\n')
        with pytest.raises(ProtocolError, match="model file corrupt"):
            SubprocessProvider(exe).perceive(tmp_path / "panel.png")

    def test_garbage_stdout_is_protocol_error(self, tmp_path):
        exe = write_script(tmp_path / "provider.sh", 'echo "segfault dump"\n')
        with pytest.raises(ProtocolError):
            SubprocessProvider(exe).perceive(tmp_path / "panel.png")

    def test_missing_executable_is_unavailable(self, tmp_path):
        with pytest.raises(ProviderUnavailableError):
            SubprocessProvider(tmp_path / "nope.sh").perceive(tmp_path / "panel.png")

    def test_repeat_perceive_runs_subprocess_once(self, tmp_path):
        counter = tmp_path / "calls.txt"
        payload = tmp_path / "payload.json"
        payload.write_text(json.dumps(response_doc()), encoding="utf-8")
        exe = write_script(tmp_path / "provider.sh",
                           f'echo x >> "{counter}"\ncat "{payload}"\n')
        provider = SubprocessProvider(exe)
        image = tmp_path / "panel.png"
        first = provider.perceive(image)
        second = provider.perceive(image)
        assert first == second
        assert counter.read_text().count("x") == 1

    def test_detect_and_segment_share_one_invocation(self, tmp_path):
        counter = tmp_path / "calls.txt"
        payload = tmp_path / "payload.json"
        payload.write_text(json.dumps(response_doc()), encoding="utf-8")
        exe = write_script(tmp_path / "provider.sh",
                           f'echo x >> "{counter}"\ncat "{payload}"\n')
        provider = SubprocessProvider(exe)
        image = tmp_path / "panel.png"
        dims = ImageDims(16, 16)
        detections = detect_attributes(provider, image, dims)
        regions = segment_figures(provider, image, dims, default_class_map())
        assert detections and regions
        assert counter.read_text().count("x") == 1


class TestClassMap:
    def test_default_map_classes(self):
        cmap = default_class_map()
        assert cmap.classify("person") == SemanticClass.PERSON
        assert cmap.classify("bird") == SemanticClass.ANIMAL
        assert cmap.classify("horse") == SemanticClass.ANIMAL
        assert cmap.classify("chair") == SemanticClass.OTHER

    def test_classify_is_case_insensitive(self):
        assert default_class_map().classify("Person") == SemanticClass.PERSON

    def test_document_round_trip(self):
        cmap = ClassMap(mapping={"person": SemanticClass.PERSON,
                                 "ox": SemanticClass.ANIMAL},
                        default_class=SemanticClass.OTHER)
        assert ClassMap.from_document(cmap.to_document()) == cmap

    def test_unknown_class_name_rejected(self):
        with pytest.raises(ValueError):
            ClassMap.from_document({"map": {"person": "HUMAN"}})


class TestRetention:
    def test_drops_below_threshold(self):
        kept = retain_detections(
            [det("keys", 0.95, (0, 0, 2, 2)), det("ax", 0.89, (0, 0, 2, 2))],
            threshold=0.9, max_count=4,
        )
        assert [d.label for d in kept] == ["keys"]

    def test_threshold_is_inclusive(self):
        kept = retain_detections([det("keys", 0.9, (0, 0, 2, 2))], threshold=0.9, max_count=4)
        assert len(kept) == 1

    def test_sorted_by_confidence_then_label_then_x(self):
        kept = retain_detections(
            [
                det("wheel", 0.92, (10, 0, 14, 4)),
                det("ax", 0.92, (0, 0, 4, 4)),
                det("ax", 0.92, (6, 0, 8, 4)),
                det("keys", 0.97, (0, 0, 4, 4)),
            ],
            threshold=0.5, max_count=10,
        )
        assert [(d.label, d.box.x_min) for d in kept] == [
            ("keys", 0), ("ax", 0), ("ax", 6), ("wheel", 10)]

    def test_cut_at_max_count(self):
        kept = retain_detections(
            [det("a", 0.95, (0, 0, 2, 2)), det("b", 0.92, (0, 0, 2, 2)),
             det("c", 0.50, (0, 0, 2, 2))],
            threshold=0.4, max_count=2,
        )
        assert [d.label for d in kept] == ["a", "b"]

    def test_boundary_tie_with_distinct_labels_keeps_both(self):
        kept = retain_detections(
            [det("dove", 0.99, (0, 0, 2, 2)), det("cross", 0.99, (4, 0, 6, 2))],
            threshold=0.9, max_count=1,
        )
        assert sorted(d.label for d in kept) == ["cross", "dove"]

    def test_boundary_tie_with_same_label_is_cut(self):
        kept = retain_detections(
            [det("ax", 0.95, (0, 0, 2, 2)), det("ax", 0.95, (4, 0, 6, 2))],
            threshold=0.9, max_count=1,
        )
        assert len(kept) == 1
        assert kept[0].box.x_min == 0

    def test_idempotent(self):
        detections = [
            det("a", 0.99, (0, 0, 2, 2)), det("b", 0.99, (2, 0, 4, 2)),
            det("c", 0.95, (4, 0, 6, 2)), det("d", 0.91, (6, 0, 8, 2)),
        ]
        once = retain_detections(detections, threshold=0.9, max_count=2)
        assert retain_detections(once, threshold=0.9, max_count=2) == once

    @pytest.mark.parametrize("threshold,max_count", [(-0.1, 4), (1.1, 4), (0.9, 0)])
    def test_parameter_validation(self, threshold, max_count):
        with pytest.raises(ValueError):
            retain_detections([], threshold=threshold, max_count=max_count)

    def test_empty_input(self):
        assert retain_detections([], threshold=0.9, max_count=4) == []


class TestRetainAttributes:
    def test_locates_at_box_center(self):
        instances = retain_attributes([det("keys", 0.95, (2, 2, 6, 10))])
        assert instances == [
            AttributeInstance(label="keys", location=PixelPoint(4, 6), confidence=0.95)]

    def test_mask_centroid_mode(self):
        mask = BinaryMask([[True, False], [False, False]])
        d = det("dove", 0.95, (0, 0, 2, 2), mask=mask)
        default = retain_attributes([d])
        switched = retain_attributes([d], use_mask_centroid=True)
        assert default[0].location == PixelPoint(1, 1)
        assert switched[0].location == PixelPoint(0.5, 0.5)

    def test_mask_centroid_falls_back_without_mask(self):
        d = det("dove", 0.95, (0, 0, 2, 2))
        assert retain_attributes([d], use_mask_centroid=True)[0].location == PixelPoint(1, 1)

    def test_mask_centroid_falls_back_on_empty_mask(self):
        d = det("dove", 0.95, (0, 0, 2, 2), mask=BinaryMask.zeros(2, 2))
        assert retain_attributes([d], use_mask_centroid=True)[0].location == PixelPoint(1, 1)

    def test_default_parameters_filter_and_cut(self):
        detections = [det(label, conf, (i, 0, i + 1, 1))
                      for i, (label, conf) in enumerate(
                          [("a", 0.99), ("b", 0.97), ("c", 0.95),
                           ("d", 0.93), ("e", 0.91), ("f", 0.3)])]
        kept = retain_attributes(detections)
        assert [a.label for a in kept] == ["a", "b", "c", "d"]


class TestRescaleResponse:
    def test_same_dims_pass_through(self):
        response = ProviderResponse(dims=ImageDims(8, 8))
        assert rescale_response(response, ImageDims(8, 8)) is response

    def test_boxes_scale_linearly(self):
        response = ProviderResponse(
            dims=ImageDims(100, 50),
            detections=[det("keys", 0.9, (10, 5, 30, 25))],
        )
        scaled = rescale_response(response, ImageDims(200, 200))
        box = scaled.detections[0].box
        assert (box.x_min, box.y_min, box.x_max, box.y_max) == (20, 20, 60, 100)

    def test_mask_downsample_two_to_one(self):
        # 2:1 nearest neighbor picks the odd source row/column of each block
        src = BinaryMask([[bool((x // 2 + y // 2) % 2) for x in range(8)] for y in range(8)])
        response = ProviderResponse(
            dims=ImageDims(8, 8),
            regions=[RawRegion("person", 1.0, src)],
        )
        scaled = rescale_response(response, ImageDims(4, 4))
        expected = [[bool((x + y) % 2) for x in range(4)] for y in range(4)]
        assert scaled.regions[0].mask.pixels.tolist() == expected

    def test_mask_upsample_preserves_area_ratio(self):
        src = BinaryMask([[x < 2 for x in range(4)] for _ in range(4)])
        response = ProviderResponse(dims=ImageDims(4, 4),
                                    regions=[RawRegion("person", 1.0, src)])
        scaled = rescale_response(response, ImageDims(8, 8))
        assert scaled.regions[0].mask.count() == 32

    def test_detection_mask_rescaled_with_box(self):
        mask = BinaryMask([[x < 2 and y < 2 for x in range(4)] for y in range(4)])
        response = ProviderResponse(
            dims=ImageDims(4, 4),
            detections=[det("dove", 0.9, (0, 0, 2, 2), mask=mask)],
        )
        scaled = rescale_response(response, ImageDims(8, 8))
        assert scaled.dims == ImageDims(8, 8)
        assert scaled.detections[0].mask.dims == ImageDims(8, 8)
        assert scaled.detections[0].box == BoundingBox(0, 0, 4, 4)

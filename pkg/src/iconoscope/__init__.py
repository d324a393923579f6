"""Identify saints in paintings from their painted attributes.

A detection backend proposes attribute detections (a cross, a winged
lion, a dove) and figure segmentation regions; this package rebuilds the
painted figures, binds each confident attribute to the nearest figure,
and names the figure through a curated attribute-to-saint database.
Corpus evaluation reports per-saint precision and recall.
"""

from .errors import (
    DatabaseError,
    DimensionMismatchError,
    EmptyMaskError,
    IconoscopeError,
    IdMismatchError,
    ImageUnreadableError,
    ManifestError,
    MissingTruthError,
    ParseError,
    ProtocolError,
    ProviderUnavailableError,
    SchemaError,
    ValidationError,
)
from .evaluation import (
    ConfusionCounts,
    GroundTruthRecord,
    MetricsReport,
    SaintMetrics,
    TruthEntry,
    evaluate_corpus,
    format_table,
    match_reading,
    precision,
    recall,
    report_document,
)
from .geometry import (
    BinaryMask,
    BoundingBox,
    ImageDims,
    PixelPoint,
    bbox_center,
    centroid,
    distance,
    nearest_pixel_gap,
    normalize_scale,
    union_masks,
)
from .knowledge import (
    AssociationDatabase,
    AssociationEntry,
    Finding,
    default_database,
    load_database,
    load_database_file,
    saints_for_attribute,
    serialize_database,
    validate_database,
)
from .pipeline import (
    EvaluationOutcome,
    ImageError,
    ImageReading,
    ManifestEntry,
    PipelineConfig,
    ProviderSpec,
    analyze_image,
    empty_image_reading,
    evaluation_document,
    image_id_for,
    load_config,
    load_manifest,
    load_truth,
    read_image_dims,
    reading_document,
    run_evaluation,
    to_json,
)
from .providers import (
    AttributeInstance,
    ClassMap,
    FixtureProvider,
    SegmentRegion,
    SemanticClass,
    SubprocessProvider,
    default_class_map,
    detect_attributes,
    rescale_response,
    retain_attributes,
    retain_detections,
    segment_figures,
    sidecar_for_image,
)
from .reading import Assignment, Figure, Reading, assign_actors, build_figures
from .wire import (
    Detection,
    ProviderResponse,
    RawRegion,
    decode_mask,
    encode_mask,
    parse_response,
    parse_response_text,
    serialize_response,
    wire_schema,
)

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "AssociationDatabase",
    "AssociationEntry",
    "AttributeInstance",
    "BinaryMask",
    "BoundingBox",
    "ClassMap",
    "ConfusionCounts",
    "DatabaseError",
    "Detection",
    "DimensionMismatchError",
    "EmptyMaskError",
    "EvaluationOutcome",
    "Figure",
    "Finding",
    "FixtureProvider",
    "GroundTruthRecord",
    "IconoscopeError",
    "IdMismatchError",
    "ImageDims",
    "ImageError",
    "ImageReading",
    "ImageUnreadableError",
    "ManifestEntry",
    "ManifestError",
    "MetricsReport",
    "MissingTruthError",
    "ParseError",
    "PipelineConfig",
    "PixelPoint",
    "ProtocolError",
    "ProviderResponse",
    "ProviderSpec",
    "ProviderUnavailableError",
    "RawRegion",
    "Reading",
    "SaintMetrics",
    "SchemaError",
    "SegmentRegion",
    "SemanticClass",
    "SubprocessProvider",
    "TruthEntry",
    "ValidationError",
    "analyze_image",
    "assign_actors",
    "bbox_center",
    "build_figures",
    "centroid",
    "decode_mask",
    "default_class_map",
    "default_database",
    "detect_attributes",
    "distance",
    "empty_image_reading",
    "encode_mask",
    "evaluate_corpus",
    "evaluation_document",
    "format_table",
    "image_id_for",
    "load_config",
    "load_database",
    "load_database_file",
    "load_manifest",
    "load_truth",
    "match_reading",
    "nearest_pixel_gap",
    "normalize_scale",
    "parse_response",
    "parse_response_text",
    "precision",
    "read_image_dims",
    "reading_document",
    "recall",
    "report_document",
    "rescale_response",
    "retain_attributes",
    "retain_detections",
    "run_evaluation",
    "saints_for_attribute",
    "segment_figures",
    "serialize_database",
    "serialize_response",
    "sidecar_for_image",
    "to_json",
    "union_masks",
    "wire_schema",
]

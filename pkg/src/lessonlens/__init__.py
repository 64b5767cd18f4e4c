"""Engine turning timestamped lesson transcripts and captions into
rubric-aligned, validated instructional feedback plus objective annotations
(activity codes, question cognitive-demand profiles, outlines, exemplar
clip recommendations), with the evaluation metrics built in.
"""

from .annotations import (
    ActivityLabel,
    ActivitySpan,
    ActivityTaxonomy,
    OutlineSection,
    QuestionRecord,
    annotate_activities,
    build_annotations,
    classify_bloom,
    extract_questions,
    generate_outline,
    question_distribution,
)
from .config import EngineConfig
from .gateway import (
    BackendKind,
    EmbeddingVector,
    ModelGateway,
    ResponseCache,
    StructuredRequest,
    StructuredResponse,
    ValidationVerdict,
)
from .ingestion import WindowingPolicy, caption_all, ingest_lesson, load_transcript, plan_windows
from .metrics import (
    ClassificationScores,
    CoverageReport,
    LabeledTimeSet,
    MultiLabelScores,
    jaccard_error_rate,
    micro_f1,
    prf1,
    temporal_entropy,
)
from .mock_backend import MockBackend
from .model import (
    BloomLevel,
    CaptionSegment,
    ContextDocument,
    LessonTimeline,
    PerformanceLevel,
    Rubric,
    RubricDimension,
    SpeakerRole,
    TranscriptTurn,
    fuse_timeline,
)
from .pipeline import (
    FeedbackItem,
    FeedbackReport,
    FeedbackStatus,
    Guideline,
    Hotspot,
    PipelinePolicy,
    Polarity,
    draft_feedback,
    generate_guidelines,
    generate_hotspots,
    is_grounded,
    run_pipeline,
    validate_feedback,
)
from .recommendation import (
    ClipIndex,
    ExemplarClip,
    RecommendationResult,
    build_index,
    build_query,
    rerank_filter,
    retrieve_top_k,
)
from .remote_backend import RemoteBackend
from .store import LessonRecord, LessonStore
from .timebase import MediaTime, TimeInterval, interval_overlap

__version__ = "0.1.0"

__all__ = [
    "ActivityLabel",
    "ActivitySpan",
    "ActivityTaxonomy",
    "BackendKind",
    "BloomLevel",
    "CaptionSegment",
    "ClassificationScores",
    "ClipIndex",
    "ContextDocument",
    "CoverageReport",
    "EmbeddingVector",
    "EngineConfig",
    "ExemplarClip",
    "FeedbackItem",
    "FeedbackReport",
    "FeedbackStatus",
    "Guideline",
    "Hotspot",
    "LabeledTimeSet",
    "LessonRecord",
    "LessonStore",
    "LessonTimeline",
    "MediaTime",
    "MockBackend",
    "ModelGateway",
    "MultiLabelScores",
    "OutlineSection",
    "PerformanceLevel",
    "PipelinePolicy",
    "Polarity",
    "QuestionRecord",
    "RecommendationResult",
    "RemoteBackend",
    "ResponseCache",
    "Rubric",
    "RubricDimension",
    "SpeakerRole",
    "StructuredRequest",
    "StructuredResponse",
    "TimeInterval",
    "TranscriptTurn",
    "ValidationVerdict",
    "WindowingPolicy",
    "annotate_activities",
    "build_annotations",
    "build_index",
    "build_query",
    "caption_all",
    "classify_bloom",
    "draft_feedback",
    "extract_questions",
    "fuse_timeline",
    "generate_guidelines",
    "generate_hotspots",
    "generate_outline",
    "ingest_lesson",
    "interval_overlap",
    "is_grounded",
    "jaccard_error_rate",
    "load_transcript",
    "micro_f1",
    "plan_windows",
    "prf1",
    "question_distribution",
    "rerank_filter",
    "retrieve_top_k",
    "run_pipeline",
    "temporal_entropy",
    "validate_feedback",
]

"""namegraft: rewrite generic image captions with recognized people's names.

The pipeline has three stages. Captions and face identifications enter as
data (JSONL records or an HTTP face service); noun-phrase chunking finds
the person-referring spans; alignment pairs them with recognized names
either sequentially or from attention-grid evidence; substitution splices
the names into the caption.
"""

from namegraft.alignment import (
    AlignMode,
    AlignmentResult,
    Identity,
    assign_optimal,
    attention_align,
    score_matrix,
    sequential_align,
)
from namegraft.chunking import (
    Count,
    NpChunk,
    PosTag,
    TaggedToken,
    Token,
    chunk_nps,
    classify_person,
    pos_tag,
    tokenize,
)
from namegraft.errors import (
    AlignmentError,
    ConfigError,
    GeometryError,
    LexiconError,
    NamegraftError,
    ProviderError,
    RecordError,
    RecordParseError,
    RecordSchemaError,
    RecordValidationError,
    SubstitutionError,
)
from namegraft.geometry import (
    AttentionMap,
    BoundingBox,
    Rect,
    attention_mass_in_box,
    cell_rect,
    iou,
    nms,
)
from namegraft.lexicons import load_person_lexicon, load_tag_lexicon
from namegraft.pipeline import (
    BatchSummary,
    CaptionRewriter,
    Config,
    OutputRecord,
    run_batch,
    run_record,
)
from namegraft.providers import ImageRecord, fetch_faces_http, parse_record, serialize_record
from namegraft.substitution import (
    Replacement,
    RewriteRecord,
    Skipped,
    detokenize,
    render_name_list,
    substitute,
)

__version__ = "0.1.0"

__all__ = [
    "AlignMode",
    "AlignmentError",
    "AlignmentResult",
    "AttentionMap",
    "BatchSummary",
    "BoundingBox",
    "CaptionRewriter",
    "Config",
    "ConfigError",
    "Count",
    "GeometryError",
    "Identity",
    "ImageRecord",
    "LexiconError",
    "NamegraftError",
    "NpChunk",
    "OutputRecord",
    "PosTag",
    "ProviderError",
    "RecordError",
    "RecordParseError",
    "RecordSchemaError",
    "RecordValidationError",
    "Rect",
    "Replacement",
    "RewriteRecord",
    "Skipped",
    "SubstitutionError",
    "TaggedToken",
    "Token",
    "assign_optimal",
    "attention_align",
    "attention_mass_in_box",
    "cell_rect",
    "chunk_nps",
    "classify_person",
    "detokenize",
    "fetch_faces_http",
    "iou",
    "load_person_lexicon",
    "load_tag_lexicon",
    "nms",
    "parse_record",
    "pos_tag",
    "render_name_list",
    "run_batch",
    "run_record",
    "score_matrix",
    "sequential_align",
    "serialize_record",
    "substitute",
    "tokenize",
]

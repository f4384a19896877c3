# Copyright 2026 The dictner Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Clinical named entity tagger with dictionary features.

Thin re-export of the compiled extension. Sentences are ``(text, tags)``
tuples where ``tags`` is a list of BIEOS tag strings or ``None``; spans are
``(start, end, type)`` with an inclusive ``end``.
"""

from ._core import (
    DataError,
    Dictionary,
    Model,
    ModelConfig,
    StructureError,
    __version__,
    format_corpus,
    generate_synthetic,
    micro_prf,
    ngram_features,
    parse_corpus,
    pdet_labels,
    piet_labels,
    read_corpus,
    run_cli,
    segment,
    split_clauses,
    tags_to_spans,
)

__all__ = [
    "DataError",
    "Dictionary",
    "Model",
    "ModelConfig",
    "StructureError",
    "format_corpus",
    "generate_synthetic",
    "micro_prf",
    "ngram_features",
    "parse_corpus",
    "pdet_labels",
    "piet_labels",
    "read_corpus",
    "run_cli",
    "segment",
    "split_clauses",
    "tags_to_spans",
]

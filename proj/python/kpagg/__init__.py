# Copyright 2026 The kpagg Authors.
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

"""Keyphrase generation with multi-sample aggregation (C++ core)."""

import json as _json
import os as _os

from ._core import (  # noqa: F401
    AuthError,
    ConfigError,
    CorpusError,
    Error,
    MockServer,
    build_prompt,
    corpus_stats,
    is_present,
    normalize,
    normalize_tokens,
    parse_sample,
    perplexity,
    porter_stem,
    predict,
    recall_at_inf,
    score_at_k,
    score_at_m,
    strategies,
)
from ._core import run as _run


def run(**config):
    """Runs one configuration. Keyword names follow the run config JSON keys.

    The API key is taken from the KPAGG_API_KEY environment variable and the
    endpoint defaults to KPAGG_ENDPOINT.
    """
    if "endpoint" not in config and _os.environ.get("KPAGG_ENDPOINT"):
        config["endpoint"] = _os.environ["KPAGG_ENDPOINT"]
    return _run(_json.dumps(config, default=str), _os.environ.get("KPAGG_API_KEY", ""))

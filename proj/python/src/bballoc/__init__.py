# Copyright 2026 The bballoc Authors
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
"""Balanced multi-product billboard slot allocation."""

from ._bballoc import (
    DataError,
    Error,
    Problem,
    SizeGuardError,
    check,
    generate,
    load,
    sample_size,
    solve,
)

ALGORITHMS = ("lp-rr", "greedy", "random", "topk", "exact")

__all__ = [
    "ALGORITHMS",
    "DataError",
    "Error",
    "Problem",
    "SizeGuardError",
    "check",
    "generate",
    "load",
    "sample_size",
    "solve",
]

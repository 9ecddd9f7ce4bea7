#!/usr/bin/env python3
#
# Copyright 2026 The fairdial Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
#
"""Regenerates lemma_golden.tsv from lemma_tokens.txt.

Reference lemma = noun lemma if it differs from the token, else verb lemma
(the usual noun-then-verb fallback used with dictionary lemmatizers).
Requires the `lemminflect` package. Run once; the output is committed.
"""
import pathlib

from lemminflect import getLemma

here = pathlib.Path(__file__).parent
tokens = [t.strip() for t in (here / "lemma_tokens.txt").read_text().split()
          if t.strip()]
rows = []
for tok in tokens:
    noun = getLemma(tok, upos="NOUN")[0]
    lemma = noun if noun != tok else getLemma(tok, upos="VERB")[0]
    rows.append(f"{tok}\t{lemma}")
(here / "lemma_golden.tsv").write_text("\n".join(rows) + "\n")
print(len(rows), "rows")

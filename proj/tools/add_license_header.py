#!/usr/bin/env python3
"""Prepend the Apache 2.0 header to C++ sources that lack it."""

import argparse
import pathlib

HEADER = """\
// Copyright 2026 The DAS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

"""

SUFFIXES = {".cpp", ".hpp", ".h", ".in"}
DIRS = ("src", "include", "tests", "tools")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("root", nargs="?", default=pathlib.Path(__file__).resolve().parent.parent,
                        type=pathlib.Path)
    args = parser.parse_args()
    for d in DIRS:
        for path in sorted((args.root / d).rglob("*")):
            if path.suffix not in SUFFIXES or not path.is_file():
                continue
            text = path.read_text()
            if text.startswith("// Copyright"):
                continue
            path.write_text(HEADER + text)
            print(path.relative_to(args.root))


if __name__ == "__main__":
    main()

######################################################################
# Copyright 2024 The edindex Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
######################################################################

"""
Flask CLI Command Extensions

    flask build TEXT OUT [--b N] [--engine small|large|both] [--seed N]
    flask query INDEX [--pattern P ...] [--engine E] [--workers N]
    flask verify [TEXT] [--cases N] [--sigma LIST] [--mmax N] [--seed N] [--fault]
    flask bench INDEX ... --pattern-file FILE [--repeat N]

Results go to stdout, diagnostics and logs to stderr.
"""
import os
import statistics
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import click
import numpy as np
from flask import current_app as app  # Import Flask application
from flask.cli import with_appcontext

from edindex.models import DataValidationError, EditKind, IndexContainer, Occurrence, ProbeCounter, TextCorpus, oracle_query
from edindex.models.container import ENGINES
from . import status
from .error_handlers import handle_errors

Symbols = Union[bytes, List[int]]

PRINTABLE_FIRST = 33  # '!'
PRINTABLE_COUNT = 94


######################################################################
#  H E L P E R S
######################################################################
def parse_pattern(corpus: TextCorpus, line: bytes) -> Symbols:
    """A pattern line: raw bytes, or whitespace-separated integers for integer texts"""
    if corpus.is_bytes:
        return line
    try:
        return [int(token) for token in line.split()]
    except ValueError as error:
        raise DataValidationError(f"Pattern {line!r} is not a list of integers") from error


def read_patterns(corpus: TextCorpus, patterns: Sequence[str]) -> List[Symbols]:
    """Patterns from --pattern options, else one per line of stdin"""
    if patterns:
        lines = [os.fsencode(pattern) for pattern in patterns]
    else:
        lines = click.get_binary_stream("stdin").read().splitlines()
    return [parse_pattern(corpus, line) for line in lines]


def format_symbol(corpus: TextCorpus, code: int) -> str:
    """The symbol behind a code as printed in query output, control and non-ASCII bytes escaped"""
    symbol = corpus.decode(code)
    if not corpus.is_bytes:
        return str(symbol)
    return bytes([symbol]).decode("latin-1").encode("unicode_escape").decode("ascii")


def format_match(corpus: TextCorpus, occurrence: Occurrence) -> str:
    """start, length, kind, pos and char, tab separated"""
    edit = occurrence.edit
    pos = "" if edit.kind == EditKind.EXACT else str(edit.pos)
    char = format_symbol(corpus, edit.ch) if edit.kind in (EditKind.SUBSTITUTION, EditKind.INSERTION) else ""
    return f"{occurrence.start}\t{occurrence.length}\t{edit.kind.label}\t{pos}\t{char}"


def _setting(value, name: str):
    return app.config[name] if value is None else value


######################################################################
#  B U I L D
######################################################################
@click.command("build")
@click.argument("text_path", type=click.Path(dir_okay=False))
@click.argument("out_path", type=click.Path(dir_okay=False))
@click.option("--b", "b", type=click.IntRange(min=1), default=None, help="Longest pattern the index accepts")
@click.option("--engine", type=click.Choice(ENGINES), default=None, help="Engines to build")
@click.option("--seed", type=click.IntRange(min=0, max=2**64 - 1), default=None, help="Seed for the hash base")
@with_appcontext
@handle_errors
def build(text_path: str, out_path: str, b: Optional[int], engine: Optional[str], seed: Optional[int]):
    """Builds an index over the bytes of TEXT_PATH and writes it to OUT_PATH"""
    b = _setting(b, "EDINDEX_B")
    engine = _setting(engine, "EDINDEX_ENGINE")
    seed = _setting(seed, "EDINDEX_SEED")
    corpus = TextCorpus(Path(text_path).read_bytes())
    container = IndexContainer.build(corpus, b, engine, seed, app.config["HASH_MAX_RETRIES"])
    size = container.save(out_path)
    click.echo(f"{out_path}\tn={corpus.n}\tsigma={corpus.sigma}\tb={b}\tengine={engine}\tbytes={size}")


######################################################################
#  Q U E R Y
######################################################################
@click.command("query")
@click.argument("index_path", type=click.Path(dir_okay=False))
@click.option("--pattern", "-p", "patterns", multiple=True, help="Pattern to search; stdin lines when absent")
@click.option("--engine", type=click.Choice(ENGINES), default=None, help="Engine answering the queries")
@click.option("--workers", type=click.IntRange(min=1), default=None, help="Worker threads")
@with_appcontext
@handle_errors
def query(index_path: str, patterns: Tuple[str, ...], engine: Optional[str], workers: Optional[int]):
    """Prints every substring within edit distance one of each pattern"""
    container = IndexContainer.load(index_path)
    engine = _setting(engine, "EDINDEX_ENGINE")
    workers = _setting(workers, "QUERY_WORKERS")
    queries = read_patterns(container.corpus, patterns)
    for pattern in queries:
        container.validate_pattern(pattern)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        answers = list(pool.map(lambda pattern: container.query(pattern, engine), queries))
    for number, matches in enumerate(answers):
        if number:
            click.echo("")
        for occurrence in matches:
            click.echo(format_match(container.corpus, occurrence))


######################################################################
#  V E R I F Y
######################################################################
@dataclass
class Failure:
    """A case where an engine disagreed with the oracle"""

    engine: str
    text: Symbols
    pattern: Symbols

    @property
    def size(self) -> Tuple[int, int]:
        """Ordering used to report the smallest failure"""
        return len(self.text), len(self.pattern)


def random_text(rng: np.random.Generator, sigma: int, length: int) -> Symbols:
    """Printable bytes for small alphabets, integers otherwise"""
    codes = rng.integers(0, sigma, length)
    if sigma <= PRINTABLE_COUNT:
        return bytes(int(code) + PRINTABLE_FIRST for code in codes)
    return [int(code) for code in codes]


def random_pattern(rng: np.random.Generator, text: Symbols, mmax: int) -> Symbols:
    """A slice of text with at most one random edit, of length 1..mmax"""
    alphabet = sorted(set(text))
    foreign = PRINTABLE_FIRST - 1 if isinstance(text, bytes) else max(alphabet) + 1
    symbols = alphabet + [foreign]
    length = int(rng.integers(1, mmax + 1))
    start = int(rng.integers(0, max(1, len(text) - length + 1)))
    pattern = list(text[start : start + length])
    kind = int(rng.integers(0, 4))
    if kind == EditKind.DELETION and len(pattern) > 1:
        del pattern[int(rng.integers(0, len(pattern)))]
    elif kind == EditKind.SUBSTITUTION:
        pattern[int(rng.integers(0, len(pattern)))] = symbols[int(rng.integers(0, len(symbols)))]
    elif kind == EditKind.INSERTION and len(pattern) < mmax:
        pattern.insert(int(rng.integers(0, len(pattern) + 1)), symbols[int(rng.integers(0, len(symbols)))])
    return bytes(pattern) if isinstance(text, bytes) else pattern


def check_case(container: IndexContainer, text: Symbols, pattern: Symbols) -> List[Failure]:
    """Runs both engines against the oracle"""
    expected = oracle_query(text, pattern)
    failures = []
    for engine in ("small", "large"):
        try:
            found = {(match.start, match.length) for match in container.query(pattern, engine)}
        except Exception as error:  # pylint: disable=broad-except
            app.logger.warning("%s engine raised %r", engine, error)
            found = None
        if found != expected:
            failures.append(Failure(engine, text, pattern))
    return failures


def _build_checked(text: Symbols, mmax: int, seed: int, fault: bool) -> IndexContainer:
    container = IndexContainer.build(TextCorpus(text), mmax, "both", seed, app.config["HASH_MAX_RETRIES"])
    if fault:
        container.inject_fault()
    return container


@click.command("verify")
@click.argument("text_path", required=False, type=click.Path(dir_okay=False))
@click.option("--cases", type=click.IntRange(min=0), default=None, help="Cases per alphabet size")
@click.option("--sigma", "sigmas", default=None, help="Comma-separated alphabet sizes")
@click.option("--mmax", type=click.IntRange(min=1), default=None, help="Longest random pattern, also used as b")
@click.option("--seed", type=click.IntRange(min=0), default=None, help="Seed for cases and hash bases")
@click.option("--fault", is_flag=True, help="Corrupt every index to check that failures are caught")
@with_appcontext
@handle_errors
def verify(
    text_path: Optional[str],
    cases: Optional[int],
    sigmas: Optional[str],
    mmax: Optional[int],
    seed: Optional[int],
    fault: bool,
):  # pylint: disable=too-many-arguments
    """Checks both engines against the brute-force oracle on random cases"""
    cases = _setting(cases, "VERIFY_CASES")
    mmax = _setting(mmax, "VERIFY_MMAX")
    seed = _setting(seed, "EDINDEX_SEED")
    rng = np.random.default_rng(seed)
    failures: List[Failure] = []
    if text_path:
        text = Path(text_path).read_bytes()
        container = _build_checked(text, mmax, seed, fault)
        for _ in range(cases):
            failures.extend(check_case(container, text, random_pattern(rng, text, mmax)))
        click.echo(f"text\tn={len(text)}\tcases={cases}\tfailures={len(failures)}")
    else:
        try:
            alphabet_sizes = [int(token) for token in _setting(sigmas, "VERIFY_SIGMAS").split(",")]
        except ValueError as error:
            raise DataValidationError(f"Bad sigma list '{sigmas}'") from error
        for sigma in alphabet_sizes:
            if sigma < 1:
                raise DataValidationError(f"Alphabet size must be positive, got {sigma}")
            before = len(failures)
            for _ in range(cases):
                text = random_text(rng, sigma, int(rng.integers(1, app.config["VERIFY_NMAX"] + 1)))
                container = _build_checked(text, mmax, seed, fault)
                failures.extend(check_case(container, text, random_pattern(rng, text, mmax)))
            click.echo(f"sigma={sigma}\tcases={cases}\tfailures={len(failures) - before}")
    if failures:
        smallest = min(failures, key=lambda failure: failure.size)
        click.echo(f"FAILED\tengine={smallest.engine}\ttext={smallest.text!r}\tpattern={smallest.pattern!r}")
        sys.exit(status.EXIT_VERIFY_FAILED)
    click.echo("OK\tall cases agree with the oracle")


######################################################################
#  B E N C H
######################################################################
@click.command("bench")
@click.argument("index_paths", nargs=-1, required=True, type=click.Path(dir_okay=False))
@click.option("--pattern-file", required=True, type=click.Path(dir_okay=False), help="One pattern per line")
@click.option("--repeat", type=click.IntRange(min=1), default=3, help="Timed runs per pattern")
@click.option("--engine", type=click.Choice(ENGINES), default=None, help="Engine answering the queries")
@with_appcontext
@handle_errors
def bench(index_paths: Tuple[str, ...], pattern_file: str, repeat: int, engine: Optional[str]):
    """Prints probe counts and timings per pattern, then how they scale across indexes"""
    engine = _setting(engine, "EDINDEX_ENGINE")
    containers = [(path, IndexContainer.load(path)) for path in index_paths]
    lines = Path(pattern_file).read_bytes().splitlines()
    totals = {}
    click.echo("index\tn\tpattern\tocc\thash_probes\tarray_probes\tcolor_probes\ttotal_probes\tmean_ms")
    for path, container in containers:
        patterns = [parse_pattern(container.corpus, line) for line in lines]
        for pattern in patterns:
            container.validate_pattern(pattern)
        for line, pattern in zip(lines, patterns):
            latencies = []
            for _ in range(repeat):
                probes = ProbeCounter()
                start = time.perf_counter()
                matches = container.query(pattern, engine, probes)
                latencies.append((time.perf_counter() - start) * 1000)
            label = line.decode("latin-1")
            totals.setdefault(label, []).append(probes.total)
            click.echo(
                f"{path}\t{container.corpus.n}\t{label}\t{len(matches)}\t{probes.hash_probes}\t{probes.array_probes}"
                f"\t{probes.color_probes}\t{probes.total}\t{statistics.mean(latencies):.3f}"
            )
    if len(containers) > 1 and totals:
        click.echo("")
        click.echo("pattern\tmin_probes\tmax_probes\tratio")
        for label, values in totals.items():
            click.echo(f"{label}\t{min(values)}\t{max(values)}\t{max(values) / max(1, min(values)):.2f}")


COMMANDS = (build, query, verify, bench)

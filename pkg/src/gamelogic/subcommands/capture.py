import asyncio
import csv
import json
import logging
import random
from collections import Counter
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import tabulate
import tqdm

from gamelogic.atm import Atm, reference_cells, simulate
from gamelogic.cli_utils import Config, ExitCode
from gamelogic.common import compile_machine, load_bound, load_machine, load_vocabulary
from gamelogic.game import Outcome, solve
from gamelogic.structure import (
    count_structures,
    decode,
    encode,
    enumerate_structures,
    random_structure,
)
from gamelogic.syntax import ClockTerm, FormulaAst, Vocabulary, eval_clock_term

logger = logging.getLogger(name=__name__)

DEFAULT_SIZES = (1, 2)


@dataclass(frozen=True)
class CaptureJob:
    """Everything a worker needs to check one model."""

    atm: Atm
    formula: FormulaAst
    vocab: Vocabulary
    k: Optional[int] = None
    bound: Optional[ClockTerm] = None
    budget: Optional[int] = None
    solver: str = "local"
    clock_bit_cap: Optional[int] = None

    def cells(self, size: int) -> int:
        if self.bound is not None:
            room = eval_clock_term(self.bound, size, self.clock_bit_cap)
        else:
            assert self.k is not None
            room = size ** (self.k + 1)
        return reference_cells(self.atm, size, self.vocab, lambda _: room)


@dataclass(frozen=True)
class InstanceResult:
    size: int
    encoding: str
    accepted: bool
    outcome: Outcome
    explored: int = 0

    @property
    def formula_holds(self) -> Optional[bool]:
        if self.outcome == Outcome.unknown:
            return None
        return self.outcome == Outcome.eloise_wins

    @property
    def agrees(self) -> Optional[bool]:
        holds = self.formula_holds
        return None if holds is None else holds == self.accepted


def check_instance(job: CaptureJob, bits: str) -> InstanceResult:
    m = decode(bits, job.vocab)
    accepted = simulate(job.atm, bits, job.cells(m.size))
    verdict = solve(
        job.formula,
        m,
        budget=job.budget,
        mode=job.solver,
        clock_bit_cap=job.clock_bit_cap,
    )
    return InstanceResult(m.size, bits, accepted, verdict.outcome, verdict.stats.explored)


def collect_instances(
    vocab: Vocabulary, sizes: tuple[int, int], threshold: int, seed: int
) -> list[str]:
    """
    Encodings of every model with a size in `sizes`, or a seeded sample of
    `threshold` models when there are more than `threshold` of them.
    """
    low, high = sizes
    if high < low:
        return []
    total = sum(count_structures(vocab, n) for n in range(low, high + 1))
    if total <= threshold:
        logger.info(f"Enumerating all {total} models of size {low}..{high}.")
        return [
            encode(m)
            for n in range(low, high + 1)
            for m in enumerate_structures(vocab, n)
        ]
    logger.info(f"{total} models of size {low}..{high}; sampling {threshold} with seed {seed}.")
    rng = random.Random(seed)
    return [
        encode(random_structure(vocab, rng.randint(low, high), rng))
        for _ in range(threshold)
    ]


def agreement_matrix(results: list[InstanceResult]) -> list[list]:
    counts = Counter((r.accepted, r.formula_holds) for r in results)
    return [
        [label, counts[(accepted, True)], counts[(accepted, False)], counts[(accepted, None)]]
        for label, accepted in (("machine accepts", True), ("machine rejects", False))
    ]


def size_table(results: list[InstanceResult]) -> list[list]:
    rows = []
    for size in sorted({r.size for r in results}):
        group = [r for r in results if r.size == size]
        rows.append(
            [
                size,
                len(group),
                sum(r.agrees is True for r in group),
                sum(r.agrees is False for r in group),
                sum(r.agrees is None for r in group),
            ]
        )
    return rows


def write_csv(path: str, results: list[InstanceResult]):
    with open(path, "w", newline="") as fout:
        writer = csv.writer(fout)
        writer.writerow(["size", "encoding", "machine", "formula", "agrees", "explored"])
        for r in results:
            writer.writerow(
                [
                    r.size,
                    r.encoding,
                    "accept" if r.accepted else "reject",
                    str(r.outcome),
                    "" if r.agrees is None else r.agrees,
                    r.explored,
                ]
            )
    logger.info(f"Saved the per-model report to {path}.")


def _executor(jobs: int) -> Executor:
    if jobs > 1:
        return ProcessPoolExecutor(max_workers=jobs)
    return ThreadPoolExecutor(max_workers=1)


async def run_instances(
    job: CaptureJob, encodings: list[str], jobs: int = 1, progress: bool = True
) -> list[InstanceResult]:
    """Check every encoding; results keep the order of `encodings`."""
    loop = asyncio.get_running_loop()
    with _executor(jobs) as executor, tqdm.tqdm(
        total=len(encodings), desc="Checking models...", disable=not progress
    ) as bar:
        futures = [
            loop.run_in_executor(executor, check_instance, job, bits)
            for bits in encodings
        ]
        for future in asyncio.as_completed(futures):
            await future
            bar.update(1)
    return [f.result() for f in futures]


async def capture(configs: Config) -> int:
    assert configs.machine is not None
    atm = load_machine(configs.machine)
    vocab = load_vocabulary(configs.vocab)
    bound = load_bound(configs, atm)
    job = CaptureJob(
        atm=atm,
        formula=compile_machine(configs, atm, vocab),
        vocab=vocab,
        k=None if bound is not None else (configs.k if configs.k is not None else atm.space_k),
        bound=bound,
        budget=configs.budget,
        solver=configs.solver,
        clock_bit_cap=configs.clock_bit_cap,
    )
    encodings = collect_instances(
        vocab, configs.sizes or DEFAULT_SIZES, configs.exhaustive_threshold, configs.seed
    )
    results = await run_instances(job, encodings, configs.jobs, progress=not configs.pipe)

    disagreements = [r for r in results if r.agrees is False]
    unknown = [r for r in results if r.agrees is None]
    for r in disagreements:
        logger.error(
            f"{atm.name} {'accepts' if r.accepted else 'rejects'} {r.encoding}, "
            f"but the formula gives {r.outcome}."
        )
    if configs.out:
        write_csv(configs.out, results)

    decided = len(results) - len(unknown)
    agreement = (decided - len(disagreements)) / decided if decided else None
    if configs.pipe:
        print(
            json.dumps(
                {
                    "machine": atm.name,
                    "instances": len(results),
                    "agreement": agreement,
                    "matrix": {
                        row[0]: dict(zip(("true", "false", "unknown"), row[1:]))
                        for row in agreement_matrix(results)
                    },
                    "disagreements": [r.encoding for r in disagreements],
                    "unknown": [r.encoding for r in unknown],
                }
            )
        )
    else:
        print(f"{atm.name}: {len(results)} model(s), formula of {job.formula.size} nodes")
        if results:
            print(
                tabulate.tabulate(
                    agreement_matrix(results),
                    headers=["", "formula true", "formula false", "unknown"],
                )
            )
            print()
            print(
                tabulate.tabulate(
                    size_table(results),
                    headers=["Size", "Models", "Agree", "Disagree", "Unknown"],
                )
            )
        if agreement is not None:
            print(f"Agreement: {agreement:.2%}")

    if disagreements:
        return ExitCode.negative
    if unknown:
        return ExitCode.unknown
    return ExitCode.success

"""Block Task experimentation toolkit.

Three task classes (hashcash cryptopuzzles, k-Orthogonal-Vectors and
threshold-decision TSP) behind one generate / solve / verify / reconstruct
interface, a deterministic proof-of-work network simulator, and probes
that measure block task properties on traces and backend runs.
"""

from .base import (
    FULL,
    BlockContext,
    Difficulty,
    Full,
    OpCount,
    ProofOfComputation,
    SolveStats,
    SpotCheck,
    TaskClass,
    context_digest,
)
from .core import BlockTask, SolveOutcome, TaskSolution, generate, reconstruct, solve, verify
from .errors import (
    ClassMismatch,
    DimensionMismatch,
    EmptySupply,
    InsufficientData,
    InvalidProof,
    MissingTransform,
    PuwError,
    ScenarioError,
    TooLarge,
    TsplibError,
    UnknownClass,
    UnknownParent,
)
from .supply import Fifo, MinerChoice, SupplyItem, TaskSupplyState, UniformRandom, select_task

__version__ = "0.1.0"

"""
Cryptopuzzle timing
===================

How long a hashcash puzzle takes, how often a nonce space comes up empty,
and what the exponential model says about slow blocks.
"""

import math

import numpy as np

from puwbench import BlockContext, context_digest
from puwbench.backends import cryptopuzzle as cp
from puwbench.probes import probe_solvability, probe_variability

# With unit expected work per nonce space, about e^-1 of spaces hold no solution.
for bits in (16, 32):
    print(f"p_no_solution(D=1, {bits} bits) = {cp.p_no_solution(1, bits):.6f}")
print(f"p_no_solution(D=1e6, 32 bits) = {cp.p_no_solution(1e6, 32):.7f}")

# A network hashing fast enough for a 600 s mean still waits over 45 min one block in a hundred.
model = cp.interblock_model(cp.hashrate_for_mean(600.0, 1, 32), 1, 32)
print(f"mean {model.mean_s:.0f} s, p99 {model.p99_s:.0f} s, p99.9 {model.quantile(0.999):.0f} s")

# %%
# Mining one block: scan nonces, bump the extra nonce when the space runs dry.
ctx = BlockContext(prev_block_id=b"\x00" * 32, payload_digest=b"\x11" * 32, height=1, timestamp=0.0, miner_id=7)
result = cp.mine(ctx, diff=4, nonce_bits=12)
print(f"found nonce {result.proof.nonce} after {result.hashes} hashes over {result.contexts_tried} context(s)")
print("digest", context_digest(result.context).hex()[:16], "...")

# %%
# Empirical checks at desk scale.
solv = probe_solvability("cryptopuzzle", trials=2000, nonce_bits=12, seed=1)
print(f"exhausted {solv.value:.3f} vs analytic {solv.details['analytic']:.3f}")
var = probe_variability("cryptopuzzle", trials=500, nonce_bits=12, seed=1)
print(f"solve-time cv {var.value:.3f} (exponential gives 1), verdict {var.verdict.value}")
print(f"e^-1 = {math.exp(-1):.6f}; ln(100) = {np.log(100):.4f}")

"""
Choosing k and reading the evaluation report
============================================

Sweeps the neighbor count over a held-out set, then renders the full
per-class report for the best k, including the collapsed two-way verdict.
"""

from texstage import (
    GlcmConfig,
    as_training_samples,
    build_model,
    classify,
    confusion,
    render_text,
    sweep_k,
    synthetic_samples,
    to_binary,
    weighted_binary_accuracy,
)

config = GlcmConfig()

# Disjoint seed ranges keep train and evaluation sets independent.
train = as_training_samples(synthetic_samples(8, base_seed=0, config=config))
held_out = synthetic_samples(4, base_seed=500, config=config)

result = sweep_k(train, held_out, k_min=4, k_max=16, glcm_config=config)
print("k    correct  accuracy")
for row in result.rows:
    print(f"{row.k:<4} {row.correct:>2}/{len(held_out):<4} {row.accuracy:8.4f}")
print(f"best k: {result.best_k}")
print()

# Refit at the winning k and score the held-out set in full.
model = build_model(train, k=result.best_k, glcm_config=config)
truth = [s.label for s in held_out]
pred = [classify(model, s.features).label for s in held_out]

cm = confusion(truth, pred)
print(render_text(cm))

# Collapse to the two-way decision a wearer actually cares about: keep
# using the mask, or not.
btruth = [to_binary(t) for t in truth]
bpred = [to_binary(p) for p in pred]
bcm = confusion(btruth, bpred)
print("two-way collapse:")
print(render_text(bcm))

# Weighted binary accuracy pools the per-group hit counts.
n_normal = sum(1 for t in btruth if t.value == "normal use")
n_worn = len(btruth) - n_normal
hits_normal = sum(1 for t, p in zip(btruth, bpred) if t == p and t.value == "normal use")
hits_worn = sum(1 for t, p in zip(btruth, bpred) if t == p and t.value != "normal use")
wba = weighted_binary_accuracy(hits_normal, n_normal, hits_worn, n_worn)
print(f"weighted binary accuracy: {wba:.4f}")

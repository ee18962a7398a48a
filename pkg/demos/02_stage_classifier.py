"""
Classifying service stage with nearest neighbors
================================================

Trains a small nearest-neighbor model on synthetic textures and inspects
a single prediction: the label, the human-readable phrase, and the
neighbors that produced the vote.
"""

from texstage import (
    GlcmConfig,
    as_training_samples,
    build_model,
    classify,
    image_features,
    synth_texture,
    synthetic_samples,
    to_binary,
)

config = GlcmConfig()

# Ten samples per stage; each sample is one synthetic texture whose speckle
# density stands in for filter wear.
train = as_training_samples(synthetic_samples(10, base_seed=0, config=config))
model = build_model(train, k=6, glcm_config=config)
print(f"trained on {len(model.samples)} samples, k={model.k}")
print(f"feature fingerprint {model.glcm_config.fingerprint()[:16]}...")
print()

# Generate a fresh texture from the heavily-worn class (unseen seed) and
# classify it.
gray = synth_texture(2, seed=999)
features = image_features(gray, config)
pred = classify(model, features)

print(f"prediction: {pred.label} ({pred.label.phrase})")
print(f"two-way verdict: {to_binary(pred.label).value}")
print()

# The vote is transparent: every neighbor, its label, and its distance.
print("nearest neighbors:")
for nb in pred.neighbors:
    print(f"  {nb.sample_id:<14} {nb.label!s:<10} distance {nb.distance:.6f}")

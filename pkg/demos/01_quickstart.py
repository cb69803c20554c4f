"""
Fitting, predicting and saving a model
======================================

Fit the classifier on the Coffee training split, score it on the test
split, and round-trip the model through a file. Set ``SELFROCKET_UCR_DIR``
to a directory of ``<name>_TRAIN.tsv`` files; without it the demo falls
back to a synthetic two-class problem.
"""

import os
import tempfile
from pathlib import Path

import numpy as np

import selfrocket
from selfrocket.ridge import accuracy
from selfrocket.synthetic import spike_amplitude

ucr = os.environ.get("SELFROCKET_UCR_DIR")
if ucr and (Path(ucr) / "Coffee_TRAIN.tsv").is_file():
    train = selfrocket.load_dataset(Path(ucr) / "Coffee_TRAIN.tsv")
    test = selfrocket.load_dataset(Path(ucr) / "Coffee_TEST.tsv")
else:
    train, test = spike_amplitude(seed=0), spike_amplitude(seed=1)
print(f"{train.name}: {train.n_instances} train series of length {train.length}, "
      f"classes {train.class_names}")

# Fitting builds BASE and DIFF kernel plans, computes all 15 feature
# matrices, runs the vote over them and trains the final ridge classifier on
# the winning combination only.
model = selfrocket.fit(train, seed=0)
print("selected:", model.combo.name, f"({model.num_features} features, alpha={model.ridge.alpha:.3g})")

# The per-voter accuracies behind the vote are kept with the model.
medians = model.table.medians()
for combo in sorted(medians, key=medians.get, reverse=True)[:5]:
    print(f"  {combo.name:10s} median validation accuracy {medians[combo]:.3f}")

# Prediction only computes the selected combination's features.
pred = selfrocket.predict(model, test)
print(f"test accuracy: {accuracy(test.labels, pred):.4f}")

# Model files are checksummed; loading reproduces predictions exactly.
with tempfile.TemporaryDirectory() as tmp:
    path = os.path.join(tmp, "model.bin")
    selfrocket.save(model, path)
    again = selfrocket.load(path)
    print("file size:", os.path.getsize(path), "bytes")
    print("identical predictions after reload:", np.array_equal(pred, selfrocket.predict(again, test)))

"""
Watching the vote
=================

Two synthetic problems with a known answer. In the first the classes differ
only in the height of one spike, which the global max (GMP) reads directly.
In the second the labels are shuffled noise, so no combination should win
convincingly and the vote falls back to the default, PPV_MIX.
"""

from selfrocket.selection import SelectionConfig, highest_median_vote, select_features, vote_consensus
from selfrocket.synthetic import nearest_centroid_accuracy, shuffled_noise, spike_amplitude
from selfrocket.transform import fit_plans, transform

ds = spike_amplitude(seed=0)
other = spike_amplitude(seed=1)

# A nearest-centroid check on hand-made summaries: the series maximum
# separates the classes, the pattern of positive samples does not.
print("centroid on max:     ", nearest_centroid_accuracy(ds.series.max(1), ds.labels, other.series.max(1), other.labels))
print("centroid on sign map:", nearest_centroid_accuracy(ds.series > 0, ds.labels, other.series > 0, other.labels))

cfg = SelectionConfig(seed=0)
feats = transform(ds, fit_plans(ds, seed=0))
combo, table = select_features(feats, ds.labels, cfg)
print(f"\n{table.n_voters} voters x {len(table.combos)} combinations")
for c, m in sorted(table.medians().items(), key=lambda kv: -kv[1])[:5]:
    print(f"  {c.name:10s} median {m:.3f}  consensus {vote_consensus(table, c, cfg.top):.2f}")
print("selected:", combo.name)

# Pure noise: the highest median is a winner by chance, and few voters
# agree on it, so validation rejects it.
noise = shuffled_noise(seed=1)
combo, table = select_features(transform(noise, fit_plans(noise, seed=1)), noise.labels, cfg)
vote = highest_median_vote(table)
print(f"\nnoise: vote {vote.name}, consensus {vote_consensus(table, vote, cfg.top):.2f}, returned {combo.name}")

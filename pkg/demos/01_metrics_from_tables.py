"""
Validity metrics from reported confusion counts
===============================================

Comparing badge data against video coding boils down to
four counts of dyad-seconds. Feeding them into ``metrics`` gives the
reported sensitivity, specificity and accuracy.
"""

from sociobadge.validity import ClassificationTable, metrics

# raw badge data against the video coding
raw = ClassificationTable(tp=25_326, fp=6_086, fn=25_674, tn=196_025)

# the same data after interpolation (75 s) and minimal-duration deletion
processed = ClassificationTable(tp=33_446, fp=10_638, fn=17_554, tn=191_473)

for name, table in [("raw", raw), ("processed", processed)]:
    m = metrics(table)
    print(f"{name:>9}: sensitivity {m.sensitivity:.3f}  specificity {m.specificity:.3f}  "
          f"accuracy {m.accuracy:.3f}  (n = {table.total:,} dyad-seconds)")

# Half the true contact seconds go missing in the raw data, while almost
# every second the badges do report is real. Processing trades a little
# specificity for a large gain in sensitivity.

# A table without any positive truth seconds has no defined sensitivity;
# it comes back as None instead of a misleading 0 or 1.
print(metrics(ClassificationTable(0, 0, 0, 10)))
